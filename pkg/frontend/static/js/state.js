import { DEFAULT_PALETTE } from "./colors.js";
export function initialState() {
    return {
        activeView: "categoryTreemap",
        excludeCode: null,
        mode: "assignment",
        hoverTarget: null,
        searchHits: null,
        colorLegend: { ...DEFAULT_PALETTE },
    };
}
