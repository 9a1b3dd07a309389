/** Footer line naming the dataset(s) under the pointer. A hover target that
 * maps to many records shows a count plus up to three titles. */
export class Footer {
    constructor(el, idleText = "Hover a dataset") {
        this.el = el;
        this.idleText = idleText;
        this.clear();
    }
    showTitle(title) {
        this.el.textContent = title;
    }
    showMany(count, titles) {
        const shown = titles.slice(0, 3).join(" | ");
        const suffix = count > 3 ? " | ..." : "";
        this.el.textContent = `${count} dataset${count === 1 ? "" : "s"}: ${shown}${suffix}`;
    }
    showNotice(text) {
        this.el.textContent = text;
    }
    clear() {
        this.el.textContent = this.idleText;
    }
}
