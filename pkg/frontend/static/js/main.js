/** Bootstrapping and view switching for the explorer page. */
import { ApiClient } from "./api.js";
import { COLORBLIND_PALETTE, DEFAULT_PALETTE, renderLegend } from "./colors.js";
import { DepositorView } from "./depositorView.js";
import { Footer } from "./footer.js";
import { LinkedView } from "./linkedView.js";
import { renderCirclePack } from "./scene.js";
import { SearchBox } from "./search.js";
import { initialState } from "./state.js";
import { checkNodesDoc } from "./types.js";
export class ExplorerApp {
    constructor(api, viewRoot, legendEl, footerEl, searchTotalEl, openUrl) {
        this.api = api;
        this.viewRoot = viewRoot;
        this.legendEl = legendEl;
        this.state = initialState();
        this.showGeneration = 0;
        this.footer = new Footer(footerEl);
        this.searchTotalEl = searchTotalEl;
        this.linked = new LinkedView(api, this.state, viewRoot, this.footer, openUrl);
        this.depositors = new DepositorView(api, this.state, viewRoot, this.footer, openUrl);
    }
    async show(view) {
        this.state.activeView = view;
        const generation = ++this.showGeneration;
        const isCurrent = () => generation === this.showGeneration;
        try {
            if (view === "categoryTreemap") {
                await this.linked.load(isCurrent);
            }
            else if (view === "depositorTreemap") {
                await this.depositors.load(isCurrent);
            }
            else {
                const doc = checkNodesDoc(await this.api.circlepack(this.state.mode), "circle pack");
                if (!isCurrent())
                    return;
                this.viewRoot.textContent = "";
                this.viewRoot.append(renderCirclePack(doc));
            }
        }
        catch (err) {
            if (!isCurrent())
                return; // stale failures stay silent
            this.viewRoot.textContent = "";
            const banner = document.createElement("div");
            banner.className = "error-banner";
            banner.textContent = `Could not load this view: ${err.message}`;
            this.viewRoot.append(banner);
        }
        renderLegend(this.legendEl, this.state.colorLegend);
    }
    async setExclude(code) {
        this.state.excludeCode = code;
        await this.show(this.state.activeView);
    }
    async setMode(mode) {
        this.state.mode = mode;
        await this.show(this.state.activeView);
    }
    setPalette(name) {
        this.state.colorLegend = {
            ...(name === "colorblind" ? COLORBLIND_PALETTE : DEFAULT_PALETTE),
        };
        renderLegend(this.legendEl, this.state.colorLegend);
    }
    onSearchHits(hits, total) {
        this.state.searchHits = hits;
        if (this.state.activeView === "categoryTreemap") {
            this.linked.applySearchHits(hits);
        }
        else if (this.state.activeView === "depositorTreemap") {
            this.depositors.applySearchHits(hits);
        }
        if (hits === null) {
            this.searchTotalEl.textContent = "";
        }
        else {
            this.searchTotalEl.textContent = `${total} result${total === 1 ? "" : "s"}`;
        }
    }
}
function requireEl(id) {
    const el = document.getElementById(id);
    if (!el)
        throw new Error(`missing #${id}`);
    return el;
}
export function boot() {
    const api = new ApiClient("");
    const app = new ExplorerApp(api, requireEl("view-root"), requireEl("legend"), requireEl("footer"), requireEl("search-total"), (url) => {
        window.open(url, "_blank");
    });
    const search = new SearchBox(requireEl("search-box"), api, (hits, total) => app.onSearchHits(hits, total));
    search.attach();
    const excludeCode = document.body.dataset.excludeCode || "D37000";
    requireEl("exclude-toggle").addEventListener("change", (ev) => {
        const on = ev.target.checked;
        void app.setExclude(on ? excludeCode : null);
    });
    requireEl("nav-category").addEventListener("click", () => void app.show("categoryTreemap"));
    requireEl("nav-depositor").addEventListener("click", () => void app.show("depositorTreemap"));
    requireEl("nav-pack").addEventListener("click", () => void app.show("circlePack"));
    requireEl("palette-select").addEventListener("change", (ev) => {
        app.setPalette(ev.target.value);
        void app.show(app.state.activeView);
    });
    void app.show("categoryTreemap");
    return app;
}
// Browser entry point; tests construct ExplorerApp directly instead.
if (typeof document !== "undefined" && document.getElementById("view-root")) {
    boot();
}
