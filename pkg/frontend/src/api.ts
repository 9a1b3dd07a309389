import type {
  CirclePackDoc, DatasetDoc, DepositorProfileDoc, SearchDoc, StatsDoc,
  TreeDoc, TreemapDoc,
} from "./types.js";

export class ApiRequestError extends Error {
  constructor(public status: number, public code: string, message: string) {
    super(message);
  }
}

export type FetchLike = (url: string) => Promise<Response>;

/** Thin typed client. Query parameters are always sorted so URLs (and any
 * caches keyed on them) are canonical. */
export class ApiClient {
  private datasetCache = new Map<string, Promise<DatasetDoc>>();

  constructor(
    private baseUrl: string = "",
    private fetchFn: FetchLike = (url) => fetch(url),
  ) {}

  private async getJson<T>(path: string, params?: Record<string, string>): Promise<T> {
    let url = this.baseUrl + path;
    if (params) {
      const search = new URLSearchParams(
        Object.entries(params)
          .filter(([, v]) => v !== "")
          .sort(([a], [b]) => (a < b ? -1 : a > b ? 1 : 0)),
      ).toString();
      if (search) url += "?" + search;
    }
    const resp = await this.fetchFn(url);
    if (!resp.ok) {
      let code = "http_error";
      let message = `${resp.status} for ${url}`;
      try {
        const doc = await resp.json();
        code = doc.code ?? code;
        message = doc.message ?? message;
      } catch {
        /* non-JSON error body */
      }
      throw new ApiRequestError(resp.status, code, message);
    }
    return resp.json() as Promise<T>;
  }

  stats(): Promise<StatsDoc> {
    return this.getJson("/api/stats");
  }

  treemap(opts: { group: string; mode: string; exclude?: string | null }): Promise<TreemapDoc> {
    const params: Record<string, string> = { group: opts.group, mode: opts.mode };
    if (opts.exclude) params.exclude = opts.exclude;
    return this.getJson("/api/treemap", params);
  }

  tree(mode: string): Promise<TreeDoc> {
    return this.getJson("/api/tree", { mode });
  }

  circlepack(mode: string): Promise<CirclePackDoc> {
    return this.getJson("/api/circlepack", { mode });
  }

  depositors(limit: number): Promise<DepositorProfileDoc[]> {
    return this.getJson("/api/depositors", { limit: String(limit) });
  }

  search(q: string): Promise<SearchDoc> {
    return this.getJson("/api/search", { q });
  }

  dataset(easyId: string): Promise<DatasetDoc> {
    let pending = this.datasetCache.get(easyId);
    if (!pending) {
      pending = this.getJson<DatasetDoc>("/api/dataset/" + easyId);
      this.datasetCache.set(easyId, pending);
    }
    return pending;
  }
}
