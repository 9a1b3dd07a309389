/** Debounced search: emphasize hits, dim the rest, restore on clear. */

import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { SearchBox } from "../src/search.js";
import { ApiClient } from "../src/api.js";
import { TestApp, buildApp, cells, makeFetchMock } from "./helpers.js";

let t: TestApp;
let input: HTMLInputElement;
let search: SearchBox;
let log: string[];

beforeEach(async () => {
  vi.useFakeTimers();
  t = buildApp();
  await t.app.show("categoryTreemap");
  input = document.getElementById("search-box") as HTMLInputElement;
  const mock = makeFetchMock();
  log = mock.log;
  search = new SearchBox(input, new ApiClient("", mock.fetchFn),
                         (hits, total) => t.app.onSearchHits(hits, total));
  search.attach();
});

afterEach(() => {
  vi.useRealTimers();
});

async function type(q: string): Promise<void> {
  input.value = q;
  input.dispatchEvent(new Event("input"));
  vi.advanceTimersByTime(200);
  await search.pending;
}

describe("search box", () => {
  it("emphasizes the planted hit and dims everything else", async () => {
    await type("joint");
    const hit = cells().filter((c) => c.classList.contains("hit"));
    const dim = cells().filter((c) => c.classList.contains("dim"));
    expect(hit.length).toBeGreaterThanOrEqual(1);
    expect(hit.every((c) => c.dataset.easyId === "easy-dataset:20001")).toBe(true);
    expect(hit.length + dim.length).toBe(cells().length);
    expect(document.getElementById("search-total")!.textContent).toBe("1 result");
  });

  it("clearing the box restores full emphasis", async () => {
    await type("joint");
    expect(cells().some((c) => c.classList.contains("dim"))).toBe(true);
    await type("");
    expect(cells().some((c) => c.classList.contains("dim"))).toBe(false);
    expect(cells().some((c) => c.classList.contains("hit"))).toBe(false);
    expect(document.getElementById("search-total")!.textContent).toBe("");
  });

  it("zero hits dims everything and reports 0 results", async () => {
    await type("zzzznothing");
    expect(cells().every((c) => c.classList.contains("dim"))).toBe(true);
    expect(document.getElementById("search-total")!.textContent).toBe("0 results");
  });

  it("debounces rapid typing into a single request", async () => {
    input.value = "jo";
    input.dispatchEvent(new Event("input"));
    vi.advanceTimersByTime(50);
    input.value = "joint";
    input.dispatchEvent(new Event("input"));
    vi.advanceTimersByTime(200);
    await search.pending;
    const searches = log.filter((url) => url.startsWith("/api/search"));
    expect(searches).toEqual(["/api/search?q=joint"]);
  });

  it("matches title tokens from the snapshot", async () => {
    await type("10013");
    const hit = cells().filter((c) => c.classList.contains("hit"));
    expect(hit.every((c) => c.dataset.easyId === "easy-dataset:10013")).toBe(true);
    expect(hit.length).toBeGreaterThanOrEqual(1);
  });
});
