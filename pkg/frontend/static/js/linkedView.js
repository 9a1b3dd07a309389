/** Linked category treemap + classification tree with bidirectional hover. */
import { renderTree, renderTreemap } from "./scene.js";
import { checkNodesDoc, checkTreemapDoc, } from "./types.js";
export class LinkedView {
    constructor(api, state, root, footer, openUrl) {
        this.api = api;
        this.state = state;
        this.root = root;
        this.footer = footer;
        this.openUrl = openUrl;
        this.treemapDoc = null;
        this.treeDoc = null;
        /** Tests await this to observe async footer updates. */
        this.pendingFooter = null;
        this.treemapSvg = null;
        this.treeSvg = null;
    }
    async load(isCurrent = () => true) {
        const [treemapDoc, treeDoc] = await Promise.all([
            this.api.treemap({
                group: "category",
                mode: this.state.mode,
                exclude: this.state.excludeCode,
            }),
            this.api.tree(this.state.mode),
        ]);
        if (!isCurrent())
            return; // a newer view load superseded this one
        this.treemapDoc = checkTreemapDoc(treemapDoc);
        this.treeDoc = checkNodesDoc(treeDoc, "tree");
        this.render();
    }
    render() {
        if (!this.treemapDoc || !this.treeDoc)
            return;
        this.root.textContent = "";
        this.root.classList.add("linked-view");
        this.treemapSvg = renderTreemap(this.treemapDoc, this.state.colorLegend, {
            enter: (cell) => this.hoverCell(cell),
            leave: () => this.leaveCell(),
            click: (cell) => this.clickCell(cell),
        });
        this.treeSvg = renderTree(this.treeDoc, {
            enter: (node) => this.hoverNode(node),
            leave: () => this.leaveNode(),
        });
        const left = document.createElement("div");
        left.className = "pane pane-treemap";
        left.append(this.treemapSvg);
        const right = document.createElement("div");
        right.className = "pane pane-tree";
        right.append(this.treeSvg);
        this.root.append(left, right);
        this.applySearchHits(this.state.searchHits);
    }
    hoverCell(cell) {
        const easyId = cell.dataset.easyId ?? "";
        const path = cell.dataset.path ?? null;
        this.state.hoverTarget = { kind: "dataset", easyId, path };
        cell.classList.add("hl");
        if (path && this.treeSvg) {
            const codes = new Set(path.split(":"));
            for (const node of this.treeSvg.querySelectorAll(".tree-node")) {
                if (codes.has(node.dataset.code ?? ""))
                    node.classList.add("hl");
            }
        }
        this.pendingFooter = this.api.dataset(easyId).then((doc) => this.footer.showTitle(doc.titles[0] ?? easyId), () => this.footer.showTitle(easyId));
    }
    leaveCell() {
        this.state.hoverTarget = null;
        this.clearHighlights();
        this.footer.clear();
    }
    hoverNode(node) {
        const code = node.dataset.code ?? "";
        this.state.hoverTarget = { kind: "category", code };
        node.classList.add("hl");
        const ids = [];
        if (this.treemapSvg) {
            for (const cell of this.treemapSvg.querySelectorAll(".cell")) {
                const path = cell.dataset.path ?? "";
                if (path.split(":").includes(code)) {
                    cell.classList.add("hl");
                    const easyId = cell.dataset.easyId ?? "";
                    if (!ids.includes(easyId))
                        ids.push(easyId);
                }
            }
        }
        this.pendingFooter = Promise.all(ids.slice(0, 3).map((id) => this.api.dataset(id).then((doc) => doc.titles[0] ?? id, () => id))).then((titles) => this.footer.showMany(ids.length, titles));
    }
    leaveNode() {
        this.state.hoverTarget = null;
        this.clearHighlights();
        this.footer.clear();
    }
    clickCell(cell) {
        const easyId = cell.dataset.easyId ?? "";
        this.pendingFooter = this.api.dataset(easyId).then((doc) => this.openUrl(doc.landing_url), () => undefined);
    }
    clearHighlights() {
        for (const el of this.root.querySelectorAll(".hl"))
            el.classList.remove("hl");
    }
    /** Search emphasis: hit cells get .hit, others .dim; null clears both. */
    applySearchHits(hits) {
        if (!this.treemapSvg)
            return;
        for (const cell of this.treemapSvg.querySelectorAll(".cell")) {
            cell.classList.remove("hit", "dim");
            if (hits) {
                if (hits.has(cell.dataset.easyId ?? ""))
                    cell.classList.add("hit");
                else
                    cell.classList.add("dim");
            }
        }
    }
}
