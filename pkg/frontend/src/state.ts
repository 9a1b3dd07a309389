import { DEFAULT_PALETTE, Palette } from "./colors.js";

export type ActiveView = "categoryTreemap" | "depositorTreemap" | "circlePack";

export type HoverTarget =
  | { kind: "dataset"; easyId: string; path: string | null }
  | { kind: "category"; code: string }
  | { kind: "creator"; creator: string };

export interface ViewState {
  activeView: ActiveView;
  excludeCode: string | null;
  mode: "assignment" | "unique";
  hoverTarget: HoverTarget | null;
  searchHits: Set<string> | null; // null: no active search
  colorLegend: Palette;
}

export function initialState(): ViewState {
  return {
    activeView: "categoryTreemap",
    excludeCode: null,
    mode: "assignment",
    hoverTarget: null,
    searchHits: null,
    colorLegend: { ...DEFAULT_PALETTE },
  };
}
