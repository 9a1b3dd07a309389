/** Document shapes served by the explorer API. The UI renders these verbatim:
 * every coordinate and count on screen comes from one of these documents. */

export type AccessClass = "Open" | "RestrictedGroup" | "Restricted" | "Other";

export const ACCESS_CLASSES: AccessClass[] = [
  "Open", "RestrictedGroup", "Restricted", "Other",
];

export interface RectDoc {
  x: number;
  y: number;
  w: number;
  h: number;
}

/** ref is an easy_id, or [easy_id, colon-joined category path]. */
export type CellRef = string | [string, string];

export interface TreemapCellDoc extends RectDoc {
  ref: CellRef;
  weight: number;
  colorClass: string;
}

export interface TreemapGroupDoc {
  key: string;
  headerRect: RectDoc | null;
  cellRange: [number, number];
}

export interface TreemapDoc {
  viewport: RectDoc;
  cells: TreemapCellDoc[];
  groups: TreemapGroupDoc[];
}

export interface PackNodeDoc {
  code: string;
  cx: number;
  cy: number;
  r: number;
  depth: number;
}

export interface CirclePackDoc {
  nodes: PackNodeDoc[];
}

export interface TreeNodeDoc {
  code: string;
  x: number;
  y: number;
  r: number;
  depth: number;
  parent: string | null;
}

export interface TreeDoc {
  nodes: TreeNodeDoc[];
}

export interface StatsDoc {
  n_records: number;
  n_categories_used: number;
  n_tree_nodes: number;
  n_depositors: number;
  n_assignments: number;
  pct_single_category: number;
  max_categories_per_record: number;
  per_access_class: Record<string, number>;
  n_quarantined: number;
}

export interface DepositorProfileDoc {
  creator: string;
  n_datasets: number;
  per_access_class: Record<string, number>;
  categories: string[];
}

export interface SearchDoc {
  hits: string[];
  total: number;
}

export interface DatasetDoc {
  easy_id: string;
  persistent_id: string | null;
  titles: string[];
  creators: string[];
  categories: string[];
  access: string;
  raw_rights: string[];
  in_driver_set: boolean;
  subjects: string[];
  coverages: string[];
  dates_verbatim: string[];
  landing_url: string;
  other_identifiers: string[];
}

export function refId(ref: CellRef): string {
  return typeof ref === "string" ? ref : ref[0];
}

export function refPath(ref: CellRef): string | null {
  return typeof ref === "string" ? null : ref[1];
}

export class SchemaMismatch extends Error {}

export function checkTreemapDoc(doc: unknown): TreemapDoc {
  const d = doc as TreemapDoc;
  if (!d || typeof d !== "object" || !Array.isArray(d.cells)
      || !Array.isArray(d.groups) || !d.viewport
      || typeof d.viewport.w !== "number") {
    throw new SchemaMismatch("treemap document has an unexpected shape");
  }
  return d;
}

export function checkNodesDoc<T extends TreeDoc | CirclePackDoc>(doc: unknown, kind: string): T {
  const d = doc as { nodes?: unknown };
  if (!d || typeof d !== "object" || !Array.isArray(d.nodes)) {
    throw new SchemaMismatch(`${kind} document has an unexpected shape`);
  }
  return d as T;
}
