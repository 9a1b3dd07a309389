/** Document shapes served by the explorer API. The UI renders these verbatim:
 * every coordinate and count on screen comes from one of these documents. */
export const ACCESS_CLASSES = [
    "Open", "RestrictedGroup", "Restricted", "Other",
];
export function refId(ref) {
    return typeof ref === "string" ? ref : ref[0];
}
export function refPath(ref) {
    return typeof ref === "string" ? null : ref[1];
}
export class SchemaMismatch extends Error {
}
export function checkTreemapDoc(doc) {
    const d = doc;
    if (!d || typeof d !== "object" || !Array.isArray(d.cells)
        || !Array.isArray(d.groups) || !d.viewport
        || typeof d.viewport.w !== "number") {
        throw new SchemaMismatch("treemap document has an unexpected shape");
    }
    return d;
}
export function checkNodesDoc(doc, kind) {
    const d = doc;
    if (!d || typeof d !== "object" || !Array.isArray(d.nodes)) {
        throw new SchemaMismatch(`${kind} document has an unexpected shape`);
    }
    return d;
}
