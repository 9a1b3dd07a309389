/** SVG scene building. Coordinates from API documents are written into the
 * DOM verbatim; the only screen-space adaptation is each <svg> viewBox, which
 * acts as a camera and never changes the numbers on the elements. */

import { colorFor, Palette } from "./colors.js";
import {
  CirclePackDoc, TreeDoc, TreemapDoc, refId, refPath,
} from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";

export function svgElement(viewBox: string, className: string): SVGSVGElement {
  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("viewBox", viewBox);
  svg.setAttribute("preserveAspectRatio", "xMidYMid meet");
  svg.setAttribute("class", className);
  return svg;
}

export interface CellHandlers {
  enter?: (cell: SVGRectElement) => void;
  leave?: (cell: SVGRectElement) => void;
  click?: (cell: SVGRectElement) => void;
}

export function renderTreemap(
  doc: TreemapDoc, palette: Palette, handlers: CellHandlers = {},
): SVGSVGElement {
  const vp = doc.viewport;
  const svg = svgElement(`${vp.x} ${vp.y} ${vp.w} ${vp.h}`, "treemap-scene");
  for (const group of doc.groups) {
    if (group.headerRect) {
      const header = document.createElementNS(SVG_NS, "rect");
      header.setAttribute("x", String(group.headerRect.x));
      header.setAttribute("y", String(group.headerRect.y));
      header.setAttribute("width", String(group.headerRect.w));
      header.setAttribute("height", String(group.headerRect.h));
      header.setAttribute("class", "group-header");
      header.dataset.groupKey = group.key;
      svg.append(header);
    }
  }
  doc.cells.forEach((cell, index) => {
    const rect = document.createElementNS(SVG_NS, "rect");
    rect.setAttribute("x", String(cell.x));
    rect.setAttribute("y", String(cell.y));
    rect.setAttribute("width", String(cell.w));
    rect.setAttribute("height", String(cell.h));
    rect.setAttribute("fill", colorFor(cell.colorClass, palette));
    rect.setAttribute("class", "cell");
    rect.dataset.index = String(index);
    rect.dataset.easyId = refId(cell.ref);
    const path = refPath(cell.ref);
    if (path !== null) rect.dataset.path = path;
    const group = doc.groups.find(
      (g) => index >= g.cellRange[0] && index < g.cellRange[1]);
    if (group) rect.dataset.groupKey = group.key;
    if (handlers.enter) rect.addEventListener("mouseenter", () => handlers.enter!(rect));
    if (handlers.leave) rect.addEventListener("mouseleave", () => handlers.leave!(rect));
    if (handlers.click) rect.addEventListener("click", () => handlers.click!(rect));
    svg.append(rect);
  });
  return svg;
}

export interface NodeHandlers {
  enter?: (node: SVGCircleElement) => void;
  leave?: (node: SVGCircleElement) => void;
}

export function renderTree(doc: TreeDoc, handlers: NodeHandlers = {}): SVGSVGElement {
  const xs = doc.nodes.map((n) => n.x);
  const ys = doc.nodes.map((n) => n.y);
  const rs = doc.nodes.map((n) => n.r);
  const pad = (rs.length ? Math.max(...rs) : 0.5) + 0.3;
  const x0 = Math.min(0, ...xs) - pad;
  const y0 = Math.min(0, ...ys) - pad;
  const x1 = Math.max(1, ...xs) + pad;
  const y1 = Math.max(1, ...ys) + pad;
  const svg = svgElement(`${x0} ${y0} ${x1 - x0} ${y1 - y0}`, "tree-scene");

  const byCode = new Map(doc.nodes.map((n) => [n.code, n]));
  for (const node of doc.nodes) {
    if (!node.parent) continue;
    const parent = byCode.get(node.parent);
    if (!parent) continue;
    const edge = document.createElementNS(SVG_NS, "line");
    edge.setAttribute("x1", String(parent.x));
    edge.setAttribute("y1", String(parent.y));
    edge.setAttribute("x2", String(node.x));
    edge.setAttribute("y2", String(node.y));
    edge.setAttribute("class", "tree-edge");
    svg.append(edge);
  }
  for (const node of doc.nodes) {
    const circle = document.createElementNS(SVG_NS, "circle");
    circle.setAttribute("cx", String(node.x));
    circle.setAttribute("cy", String(node.y));
    circle.setAttribute("r", String(node.r));
    circle.setAttribute("class", "tree-node");
    circle.dataset.code = node.code;
    circle.dataset.depth = String(node.depth);
    if (handlers.enter) circle.addEventListener("mouseenter", () => handlers.enter!(circle));
    if (handlers.leave) circle.addEventListener("mouseleave", () => handlers.leave!(circle));
    svg.append(circle);
  }
  return svg;
}

export function renderCirclePack(doc: CirclePackDoc): SVGSVGElement {
  const svg = svgElement("-1.05 -1.05 2.1 2.1", "pack-scene");
  for (const node of doc.nodes) {
    const circle = document.createElementNS(SVG_NS, "circle");
    circle.setAttribute("cx", String(node.cx));
    circle.setAttribute("cy", String(node.cy));
    circle.setAttribute("r", String(node.r));
    circle.setAttribute("class", `pack-node depth-${node.depth}`);
    circle.dataset.code = node.code;
    circle.dataset.depth = String(node.depth);
    svg.append(circle);
  }
  return svg;
}
