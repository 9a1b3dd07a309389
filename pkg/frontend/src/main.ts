/** Bootstrapping and view switching for the explorer page. */

import { ApiClient } from "./api.js";
import { COLORBLIND_PALETTE, DEFAULT_PALETTE, renderLegend } from "./colors.js";
import { DepositorView } from "./depositorView.js";
import { Footer } from "./footer.js";
import { LinkedView } from "./linkedView.js";
import { renderCirclePack } from "./scene.js";
import { SearchBox } from "./search.js";
import { ActiveView, initialState } from "./state.js";
import { CirclePackDoc, checkNodesDoc } from "./types.js";

export class ExplorerApp {
  state = initialState();
  linked: LinkedView;
  depositors: DepositorView;
  footer: Footer;
  searchTotalEl: HTMLElement;

  constructor(
    private api: ApiClient,
    private viewRoot: HTMLElement,
    private legendEl: HTMLElement,
    footerEl: HTMLElement,
    searchTotalEl: HTMLElement,
    openUrl: (url: string) => void,
  ) {
    this.footer = new Footer(footerEl);
    this.searchTotalEl = searchTotalEl;
    this.linked = new LinkedView(api, this.state, viewRoot, this.footer, openUrl);
    this.depositors = new DepositorView(api, this.state, viewRoot, this.footer, openUrl);
  }

  private showGeneration = 0;

  async show(view: ActiveView): Promise<void> {
    this.state.activeView = view;
    const generation = ++this.showGeneration;
    const isCurrent = () => generation === this.showGeneration;
    try {
      if (view === "categoryTreemap") {
        await this.linked.load(isCurrent);
      } else if (view === "depositorTreemap") {
        await this.depositors.load(isCurrent);
      } else {
        const doc = checkNodesDoc<CirclePackDoc>(
          await this.api.circlepack(this.state.mode), "circle pack");
        if (!isCurrent()) return;
        this.viewRoot.textContent = "";
        this.viewRoot.append(renderCirclePack(doc));
      }
    } catch (err) {
      if (!isCurrent()) return; // stale failures stay silent
      this.viewRoot.textContent = "";
      const banner = document.createElement("div");
      banner.className = "error-banner";
      banner.textContent = `Could not load this view: ${(err as Error).message}`;
      this.viewRoot.append(banner);
    }
    renderLegend(this.legendEl, this.state.colorLegend);
  }

  async setExclude(code: string | null): Promise<void> {
    this.state.excludeCode = code;
    await this.show(this.state.activeView);
  }

  async setMode(mode: "assignment" | "unique"): Promise<void> {
    this.state.mode = mode;
    await this.show(this.state.activeView);
  }

  setPalette(name: "default" | "colorblind"): void {
    this.state.colorLegend = {
      ...(name === "colorblind" ? COLORBLIND_PALETTE : DEFAULT_PALETTE),
    };
    renderLegend(this.legendEl, this.state.colorLegend);
  }

  onSearchHits(hits: Set<string> | null, total: number): void {
    this.state.searchHits = hits;
    if (this.state.activeView === "categoryTreemap") {
      this.linked.applySearchHits(hits);
    } else if (this.state.activeView === "depositorTreemap") {
      this.depositors.applySearchHits(hits);
    }
    if (hits === null) {
      this.searchTotalEl.textContent = "";
    } else {
      this.searchTotalEl.textContent = `${total} result${total === 1 ? "" : "s"}`;
    }
  }
}

function requireEl<T extends HTMLElement>(id: string): T {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing #${id}`);
  return el as T;
}

export function boot(): ExplorerApp {
  const api = new ApiClient("");
  const app = new ExplorerApp(
    api,
    requireEl("view-root"),
    requireEl("legend"),
    requireEl("footer"),
    requireEl("search-total"),
    (url) => {
      window.open(url, "_blank");
    },
  );

  const search = new SearchBox(
    requireEl<HTMLInputElement>("search-box"), api,
    (hits, total) => app.onSearchHits(hits, total));
  search.attach();

  const excludeCode = document.body.dataset.excludeCode || "D37000";
  requireEl<HTMLInputElement>("exclude-toggle").addEventListener("change", (ev) => {
    const on = (ev.target as HTMLInputElement).checked;
    void app.setExclude(on ? excludeCode : null);
  });
  requireEl("nav-category").addEventListener("click", () => void app.show("categoryTreemap"));
  requireEl("nav-depositor").addEventListener("click", () => void app.show("depositorTreemap"));
  requireEl("nav-pack").addEventListener("click", () => void app.show("circlePack"));
  requireEl<HTMLSelectElement>("palette-select").addEventListener("change", (ev) => {
    app.setPalette((ev.target as HTMLSelectElement).value as "default" | "colorblind");
    void app.show(app.state.activeView);
  });

  void app.show("categoryTreemap");
  return app;
}

// Browser entry point; tests construct ExplorerApp directly instead.
if (typeof document !== "undefined" && document.getElementById("view-root")) {
  boot();
}
