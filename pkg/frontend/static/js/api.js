export class ApiRequestError extends Error {
    constructor(status, code, message) {
        super(message);
        this.status = status;
        this.code = code;
    }
}
/** Thin typed client. Query parameters are always sorted so URLs (and any
 * caches keyed on them) are canonical. */
export class ApiClient {
    constructor(baseUrl = "", fetchFn = (url) => fetch(url)) {
        this.baseUrl = baseUrl;
        this.fetchFn = fetchFn;
        this.datasetCache = new Map();
    }
    async getJson(path, params) {
        let url = this.baseUrl + path;
        if (params) {
            const search = new URLSearchParams(Object.entries(params)
                .filter(([, v]) => v !== "")
                .sort(([a], [b]) => (a < b ? -1 : a > b ? 1 : 0))).toString();
            if (search)
                url += "?" + search;
        }
        const resp = await this.fetchFn(url);
        if (!resp.ok) {
            let code = "http_error";
            let message = `${resp.status} for ${url}`;
            try {
                const doc = await resp.json();
                code = doc.code ?? code;
                message = doc.message ?? message;
            }
            catch {
                /* non-JSON error body */
            }
            throw new ApiRequestError(resp.status, code, message);
        }
        return resp.json();
    }
    stats() {
        return this.getJson("/api/stats");
    }
    treemap(opts) {
        const params = { group: opts.group, mode: opts.mode };
        if (opts.exclude)
            params.exclude = opts.exclude;
        return this.getJson("/api/treemap", params);
    }
    tree(mode) {
        return this.getJson("/api/tree", { mode });
    }
    circlepack(mode) {
        return this.getJson("/api/circlepack", { mode });
    }
    depositors(limit) {
        return this.getJson("/api/depositors", { limit: String(limit) });
    }
    search(q) {
        return this.getJson("/api/search", { q });
    }
    dataset(easyId) {
        let pending = this.datasetCache.get(easyId);
        if (!pending) {
            pending = this.getJson("/api/dataset/" + easyId);
            this.datasetCache.set(easyId, pending);
        }
        return pending;
    }
}
