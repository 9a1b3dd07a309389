/** Shared scaffolding: a fetch mock replaying recorded API documents, plus a
 * DOM skeleton matching the static page. The mock's log doubles as the
 * network-intercept assertion that everything on screen came over the API. */

import fixtures from "./fixtures/api.json";

import { ApiClient } from "../src/api.js";
import { ExplorerApp } from "../src/main.js";

export interface FetchMock {
  fetchFn: (url: string) => Promise<Response>;
  log: string[];
}

export function makeFetchMock(): FetchMock {
  const log: string[] = [];
  const canned = fixtures as Record<string, unknown>;
  const fetchFn = async (url: string): Promise<Response> => {
    log.push(url);
    const doc = canned[url];
    if (doc === undefined) {
      return new Response(
        JSON.stringify({ status: 404, code: "unknown_endpoint", message: url }),
        { status: 404, headers: { "Content-Type": "application/json" } },
      );
    }
    const maybeError = doc as { status?: number; code?: string };
    const status = maybeError.code && maybeError.status ? maybeError.status : 200;
    return new Response(JSON.stringify(doc), {
      status,
      headers: { "Content-Type": "application/json" },
    });
  };
  return { fetchFn, log };
}

export function fixture<T>(url: string): T {
  const doc = (fixtures as Record<string, unknown>)[url];
  if (doc === undefined) throw new Error(`no fixture for ${url}`);
  return doc as T;
}

export function mountDom(): void {
  document.body.innerHTML = `
    <input id="search-box" type="search">
    <span id="search-total"></span>
    <div id="view-root"></div>
    <aside id="legend"></aside>
    <footer id="footer"></footer>
  `;
}

export interface TestApp {
  app: ExplorerApp;
  api: ApiClient;
  log: string[];
  opened: string[];
}

export function buildApp(): TestApp {
  mountDom();
  const { fetchFn, log } = makeFetchMock();
  const api = new ApiClient("", fetchFn);
  const opened: string[] = [];
  const app = new ExplorerApp(
    api,
    document.getElementById("view-root") as HTMLElement,
    document.getElementById("legend") as HTMLElement,
    document.getElementById("footer") as HTMLElement,
    document.getElementById("search-total") as HTMLElement,
    (url) => opened.push(url),
  );
  return { app, api, log, opened };
}

export function hover(el: Element): void {
  el.dispatchEvent(new MouseEvent("mouseenter", { bubbles: false }));
}

export function unhover(el: Element): void {
  el.dispatchEvent(new MouseEvent("mouseleave", { bubbles: false }));
}

export function click(el: Element): void {
  el.dispatchEvent(new MouseEvent("click", { bubbles: true }));
}

export function cells(root: ParentNode = document): SVGRectElement[] {
  return Array.from(root.querySelectorAll<SVGRectElement>(".cell"));
}

export function treeNodes(root: ParentNode = document): SVGCircleElement[] {
  return Array.from(root.querySelectorAll<SVGCircleElement>(".tree-node"));
}

export function creatorNodes(root: ParentNode = document): SVGCircleElement[] {
  return Array.from(root.querySelectorAll<SVGCircleElement>(".creator-node"));
}

export function highlighted(root: ParentNode = document): Element[] {
  return Array.from(root.querySelectorAll(".hl"));
}

/** Wait for any in-flight footer update on either view. */
export async function settleFooter(app: ExplorerApp): Promise<void> {
  await app.linked.pendingFooter;
  await app.depositors.pendingFooter;
}

export function snapshotClasses(): string[] {
  return Array.from(document.querySelectorAll("#view-root [class]"))
    .map((el) => el.getAttribute("class") ?? "");
}
