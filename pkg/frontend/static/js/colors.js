import { ACCESS_CLASSES } from "./types.js";
export const DEFAULT_PALETTE = {
    Open: "#2f9e44",
    RestrictedGroup: "#f4c20d",
    Restricted: "#d7263d",
    Other: "#8c8c8c",
};
/** Okabe-Ito hues: distinguishable under the common color-vision deficiencies. */
export const COLORBLIND_PALETTE = {
    Open: "#009e73",
    RestrictedGroup: "#e69f00",
    Restricted: "#d55e00",
    Other: "#999999",
};
export function colorFor(colorClass, palette) {
    return palette[colorClass] ?? "#5a7bd8";
}
export function renderLegend(container, palette) {
    container.textContent = "";
    container.classList.add("legend");
    for (const cls of ACCESS_CLASSES) {
        const item = document.createElement("span");
        item.className = "legend-item";
        item.dataset.accessClass = cls;
        const swatch = document.createElement("span");
        swatch.className = "legend-swatch";
        swatch.style.backgroundColor = palette[cls];
        const label = document.createElement("span");
        label.textContent = cls;
        item.append(swatch, label);
        container.append(item);
    }
}
