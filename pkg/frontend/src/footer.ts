/** Footer line naming the dataset(s) under the pointer. A hover target that
 * maps to many records shows a count plus up to three titles. */

export class Footer {
  constructor(private el: HTMLElement, private idleText = "Hover a dataset") {
    this.clear();
  }

  showTitle(title: string): void {
    this.el.textContent = title;
  }

  showMany(count: number, titles: string[]): void {
    const shown = titles.slice(0, 3).join(" | ");
    const suffix = count > 3 ? " | ..." : "";
    this.el.textContent = `${count} dataset${count === 1 ? "" : "s"}: ${shown}${suffix}`;
  }

  showNotice(text: string): void {
    this.el.textContent = text;
  }

  clear(): void {
    this.el.textContent = this.idleText;
  }
}
