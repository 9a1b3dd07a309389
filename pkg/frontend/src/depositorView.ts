/** Depositor-grouped treemap (left) with one size-coded circle per creator
 * (right) and bidirectional hover between them.
 *
 * Creator circles are a list panel, not a computed layout: positions follow
 * the profile order on a fixed grid, and each radius is a direct presentation
 * scaling of the n_datasets count served by the API. */

import { ApiClient } from "./api.js";
import { Footer } from "./footer.js";
import { renderTreemap, svgElement } from "./scene.js";
import { ViewState } from "./state.js";
import {
  DepositorProfileDoc, SchemaMismatch, TreemapDoc, checkTreemapDoc,
} from "./types.js";

const GRID_COLUMNS = 8;
const MAX_CREATORS = 400;

const SVG_NS = "http://www.w3.org/2000/svg";

export class DepositorView {
  treemapDoc: TreemapDoc | null = null;
  profiles: DepositorProfileDoc[] = [];
  pendingFooter: Promise<void> | null = null;

  private treemapSvg: SVGSVGElement | null = null;
  private creatorSvg: SVGSVGElement | null = null;

  constructor(
    private api: ApiClient,
    private state: ViewState,
    private root: HTMLElement,
    private footer: Footer,
    private openUrl: (url: string) => void,
  ) {}

  async load(isCurrent: () => boolean = () => true): Promise<void> {
    const [treemapDoc, profiles] = await Promise.all([
      this.api.treemap({
        group: "depositor",
        mode: this.state.mode,
        exclude: this.state.excludeCode,
      }),
      this.api.depositors(MAX_CREATORS),
    ]);
    if (!isCurrent()) return; // a newer view load superseded this one
    if (!Array.isArray(profiles)) {
      throw new SchemaMismatch("depositor profiles document has an unexpected shape");
    }
    this.treemapDoc = checkTreemapDoc(treemapDoc);
    this.profiles = profiles;
    this.render();
  }

  private render(): void {
    if (!this.treemapDoc) return;
    this.root.textContent = "";
    this.root.classList.add("depositor-view");

    this.treemapSvg = renderTreemap(this.treemapDoc, this.state.colorLegend, {
      enter: (cell) => this.hoverCell(cell),
      leave: () => this.leave(),
      click: (cell) => this.clickCell(cell),
    });
    this.creatorSvg = this.renderCreators();

    const left = document.createElement("div");
    left.className = "pane pane-treemap";
    left.append(this.treemapSvg);
    const right = document.createElement("div");
    right.className = "pane pane-creators";
    right.append(this.creatorSvg);
    this.root.append(left, right);
    this.applySearchHits(this.state.searchHits);
  }

  private renderCreators(): SVGSVGElement {
    const rows = Math.max(1, Math.ceil(this.profiles.length / GRID_COLUMNS));
    const svg = svgElement(`0 0 ${GRID_COLUMNS} ${rows}`, "creator-scene");
    const peak = this.profiles.length ? this.profiles[0].n_datasets : 1;
    this.profiles.forEach((profile, i) => {
      const circle = document.createElementNS(SVG_NS, "circle");
      circle.setAttribute("cx", String((i % GRID_COLUMNS) + 0.5));
      circle.setAttribute("cy", String(Math.floor(i / GRID_COLUMNS) + 0.5));
      const r = Math.max(0.07, 0.45 * Math.sqrt(profile.n_datasets / peak));
      circle.setAttribute("r", String(r));
      circle.setAttribute("class", "creator-node");
      circle.dataset.creator = profile.creator;
      circle.dataset.nDatasets = String(profile.n_datasets);
      circle.addEventListener("mouseenter", () => this.hoverCreator(circle));
      circle.addEventListener("mouseleave", () => this.leave());
      svg.append(circle);
    });
    return svg;
  }

  hoverCreator(circle: SVGCircleElement): void {
    const creator = circle.dataset.creator ?? "";
    this.state.hoverTarget = { kind: "creator", creator };
    circle.classList.add("hl");
    let count = 0;
    if (this.treemapSvg) {
      for (const cell of this.treemapSvg.querySelectorAll<SVGRectElement>(".cell")) {
        if (cell.dataset.groupKey === creator) {
          cell.classList.add("hl");
          count += 1;
        }
      }
    }
    this.footer.showNotice(`${creator}: ${count} dataset${count === 1 ? "" : "s"}`);
  }

  hoverCell(cell: SVGRectElement): void {
    const easyId = cell.dataset.easyId ?? "";
    this.state.hoverTarget = { kind: "dataset", easyId, path: null };
    if (this.treemapSvg) {
      // the same dataset appears once per creator; light them all up
      const creators = new Set<string>();
      for (const twin of this.treemapSvg.querySelectorAll<SVGRectElement>(".cell")) {
        if (twin.dataset.easyId === easyId) {
          twin.classList.add("hl");
          creators.add(twin.dataset.groupKey ?? "");
        }
      }
      if (this.creatorSvg) {
        for (const node of this.creatorSvg.querySelectorAll<SVGCircleElement>(".creator-node")) {
          if (creators.has(node.dataset.creator ?? "")) node.classList.add("hl");
        }
      }
    }
    this.pendingFooter = this.api.dataset(easyId).then(
      (doc) => this.footer.showTitle(doc.titles[0] ?? easyId),
      () => this.footer.showTitle(easyId),
    );
  }

  clickCell(cell: SVGRectElement): void {
    const easyId = cell.dataset.easyId ?? "";
    this.pendingFooter = this.api.dataset(easyId).then(
      (doc) => this.openUrl(doc.landing_url),
      () => undefined,
    );
  }

  leave(): void {
    this.state.hoverTarget = null;
    for (const el of this.root.querySelectorAll(".hl")) el.classList.remove("hl");
    this.footer.clear();
  }

  applySearchHits(hits: Set<string> | null): void {
    if (!this.treemapSvg) return;
    for (const cell of this.treemapSvg.querySelectorAll<SVGRectElement>(".cell")) {
      cell.classList.remove("hit", "dim");
      if (hits) {
        if (hits.has(cell.dataset.easyId ?? "")) cell.classList.add("hit");
        else cell.classList.add("dim");
      }
    }
  }
}
