/** Debounced search box driving emphasize/dim across the active view. */
export class SearchBox {
    constructor(input, api, listener, debounceMs = 150) {
        this.input = input;
        this.api = api;
        this.listener = listener;
        this.debounceMs = debounceMs;
        /** Tests await this to observe the async hit delivery. */
        this.pending = null;
        this.timer = null;
        this.generation = 0;
    }
    attach() {
        this.input.addEventListener("input", () => this.schedule());
    }
    schedule() {
        if (this.timer !== null)
            clearTimeout(this.timer);
        this.timer = setTimeout(() => {
            this.timer = null;
            this.run();
        }, this.debounceMs);
    }
    run() {
        const generation = ++this.generation;
        const q = this.input.value.trim();
        if (!q) {
            this.listener(null, 0);
            this.pending = Promise.resolve();
            return;
        }
        this.pending = this.api.search(q).then((doc) => {
            if (generation !== this.generation)
                return; // a newer query superseded us
            this.listener(new Set(doc.hits), doc.total);
        }, () => {
            if (generation !== this.generation)
                return;
            this.listener(new Set(), 0);
        });
    }
}
