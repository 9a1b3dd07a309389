/** Debounced search box driving emphasize/dim across the active view. */

import { ApiClient } from "./api.js";

export type HitsListener = (hits: Set<string> | null, total: number) => void;

export class SearchBox {
  /** Tests await this to observe the async hit delivery. */
  pending: Promise<void> | null = null;

  private timer: ReturnType<typeof setTimeout> | null = null;
  private generation = 0;

  constructor(
    private input: HTMLInputElement,
    private api: ApiClient,
    private listener: HitsListener,
    private debounceMs = 150,
  ) {}

  attach(): void {
    this.input.addEventListener("input", () => this.schedule());
  }

  schedule(): void {
    if (this.timer !== null) clearTimeout(this.timer);
    this.timer = setTimeout(() => {
      this.timer = null;
      this.run();
    }, this.debounceMs);
  }

  run(): void {
    const generation = ++this.generation;
    const q = this.input.value.trim();
    if (!q) {
      this.listener(null, 0);
      this.pending = Promise.resolve();
      return;
    }
    this.pending = this.api.search(q).then(
      (doc) => {
        if (generation !== this.generation) return; // a newer query superseded us
        this.listener(new Set(doc.hits), doc.total);
      },
      () => {
        if (generation !== this.generation) return;
        this.listener(new Set(), 0);
      },
    );
  }
}
