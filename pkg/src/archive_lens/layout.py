"""Pure layout geometry: squarified treemaps, circle packing, tidy trees.

Every function is deterministic (same input, bit-identical output) and works
in an abstract unit space; weights only matter through their ratios, so
scaling all weights by a power of two leaves coordinates unchanged.
"""

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

from .catalogue import CategoryTree
from .analytics import RollupTable

MODES = ("assignment", "unique")


class EmptyInput(Exception):
    pass


class NonPositiveWeight(Exception):
    pass


class EmptyTree(Exception):
    pass


@dataclass
class Rect:
    x: float
    y: float
    w: float
    h: float

    @property
    def area(self) -> float:
        return self.w * self.h

    def to_doc(self) -> dict:
        return {"x": self.x, "y": self.y, "w": self.w, "h": self.h}


@dataclass
class Circle:
    cx: float
    cy: float
    r: float


CellRef = Union[str, tuple[str, str]]


@dataclass
class TreemapCell:
    rect: Rect
    ref: CellRef
    weight: float
    color_class: str

    def to_doc(self) -> dict:
        ref = list(self.ref) if isinstance(self.ref, tuple) else self.ref
        return {"x": self.rect.x, "y": self.rect.y, "w": self.rect.w, "h": self.rect.h,
                "ref": ref, "weight": self.weight, "colorClass": self.color_class}


@dataclass
class TreemapGroup:
    key: str
    header_rect: Optional[Rect]
    cell_range: tuple[int, int]

    def to_doc(self) -> dict:
        return {"key": self.key,
                "headerRect": self.header_rect.to_doc() if self.header_rect else None,
                "cellRange": list(self.cell_range)}


@dataclass
class TreemapLayout:
    viewport: Rect
    cells: list[TreemapCell]
    groups: list[TreemapGroup] = field(default_factory=list)

    def to_doc(self) -> dict:
        return {"viewport": self.viewport.to_doc(),
                "cells": [c.to_doc() for c in self.cells],
                "groups": [g.to_doc() for g in self.groups]}


@dataclass
class PackedNode:
    code: str
    circle: Circle
    depth: int

    def to_doc(self) -> dict:
        return {"code": self.code, "cx": self.circle.cx, "cy": self.circle.cy,
                "r": self.circle.r, "depth": self.depth}


@dataclass
class CirclePackLayout:
    nodes: list[PackedNode]

    def to_doc(self) -> dict:
        return {"nodes": [n.to_doc() for n in self.nodes]}


@dataclass
class TreeNodePlacement:
    code: str
    x: float
    y: float
    r: float
    depth: int
    parent: Optional[str]

    def to_doc(self) -> dict:
        return {"code": self.code, "x": self.x, "y": self.y, "r": self.r,
                "depth": self.depth, "parent": self.parent}


@dataclass
class TreeLayout:
    nodes: list[TreeNodePlacement]

    def to_doc(self) -> dict:
        return {"nodes": [n.to_doc() for n in self.nodes]}


# ---------------------------------------------------------------------------
# squarified treemap


def _worst_ratio(row_sum: float, row_max: float, row_min: float, side: float) -> float:
    s2 = row_sum * row_sum
    w2 = side * side
    return max(w2 * row_max / s2, s2 / (w2 * row_min))


def squarify(weights: Sequence[float], viewport: Rect) -> list[Rect]:
    """Tile the viewport with one rect per weight, areas proportional to weights.

    Placement sorts weights descending and builds rows while the worst aspect
    ratio keeps improving; the returned list follows the input order.
    """
    if not weights:
        raise EmptyInput("no weights")
    if viewport.w <= 0 or viewport.h <= 0:
        raise EmptyInput("viewport area must be positive")
    for w in weights:
        if not (w > 0) or not math.isfinite(w):
            raise NonPositiveWeight(f"weight {w!r}")

    total = math.fsum(weights)
    # ratios only: any exact rescaling of the weights leaves these unchanged
    fractions = [w / total for w in weights]
    order = sorted(range(len(weights)), key=lambda i: (-fractions[i], i))

    viewport_area = viewport.w * viewport.h
    rects: list[Optional[Rect]] = [None] * len(weights)
    x, y, w, h = viewport.x, viewport.y, viewport.w, viewport.h

    pos = 0
    while pos < len(order):
        short = min(w, h)
        row = [order[pos]]
        row_sum = fractions[order[pos]] * viewport_area
        row_max = row_min = row_sum
        pos += 1
        worst = _worst_ratio(row_sum, row_max, row_min, short)
        while pos < len(order):
            area = fractions[order[pos]] * viewport_area
            cand_sum = row_sum + area
            cand_max = max(row_max, area)
            cand_min = min(row_min, area)
            cand_worst = _worst_ratio(cand_sum, cand_max, cand_min, short)
            if cand_worst > worst:
                break
            row.append(order[pos])
            row_sum, row_max, row_min, worst = cand_sum, cand_max, cand_min, cand_worst
            pos += 1

        # spans come straight from each cell's own fraction: differencing
        # cumulative boundaries would cancel catastrophically for cells many
        # orders of magnitude smaller than their row
        areas = [fractions[i] * viewport_area for i in row]
        row_total = math.fsum(areas)
        if w >= h:
            thickness = row_total / h
            offset = y
            for k, i in enumerate(row):
                span = h * (areas[k] / row_total)
                rects[i] = Rect(x, offset, thickness, span)
                offset += span
            x += thickness
            w -= thickness
        else:
            thickness = row_total / w
            offset = x
            for k, i in enumerate(row):
                span = w * (areas[k] / row_total)
                rects[i] = Rect(offset, y, span, thickness)
                offset += span
            y += thickness
            h -= thickness

    return rects  # type: ignore[return-value]


@dataclass
class GroupSpec:
    """One treemap group: a key plus (weight, ref, color_class) members."""

    key: str
    members: list[tuple[float, CellRef, str]]

    @property
    def total(self) -> float:
        return math.fsum(m[0] for m in self.members)


def grouped_treemap(groups: list[GroupSpec], viewport: Rect,
                    header_fraction: float = 0.06,
                    min_region_for_header: float = 0.05) -> TreemapLayout:
    """Outer squarify over group totals, inner squarify per group region.

    Groups are ordered by total descending then key ascending; each region
    reserves a header strip unless it is shorter than min_region_for_header
    of the viewport height.
    """
    if not groups:
        raise EmptyInput("no groups")
    for g in groups:
        if not g.members:
            raise EmptyInput(f"group {g.key!r} is empty")

    ordered = sorted(groups, key=lambda g: (-g.total, g.key))
    outer = squarify([g.total for g in ordered], viewport)

    cells: list[TreemapCell] = []
    out_groups: list[TreemapGroup] = []
    for g, region in zip(ordered, outer):
        header: Optional[Rect] = None
        inner = region
        if header_fraction > 0 and region.h >= min_region_for_header * viewport.h:
            head_h = header_fraction * region.h
            header = Rect(region.x, region.y, region.w, head_h)
            inner = Rect(region.x, region.y + head_h, region.w, region.h - head_h)
        start = len(cells)
        for rect, (weight, ref, color) in zip(
                squarify([m[0] for m in g.members], inner), g.members):
            cells.append(TreemapCell(rect=rect, ref=ref, weight=weight, color_class=color))
        out_groups.append(TreemapGroup(key=g.key, header_rect=header,
                                       cell_range=(start, len(cells))))
    return TreemapLayout(viewport=viewport, cells=cells, groups=out_groups)


def flat_treemap(members: list[tuple[float, CellRef, str]], viewport: Rect) -> TreemapLayout:
    if not members:
        raise EmptyInput("no members")
    rects = squarify([m[0] for m in members], viewport)
    cells = [TreemapCell(rect=r, ref=ref, weight=w, color_class=c)
             for r, (w, ref, c) in zip(rects, members)]
    return TreemapLayout(viewport=viewport, cells=cells, groups=[])


# ---------------------------------------------------------------------------
# smallest enclosing circle of circles (move-to-front Welzl on disks)


def _encloses_not(a: Circle, b: Circle) -> bool:
    dr = a.r - b.r
    dx = b.cx - a.cx
    dy = b.cy - a.cy
    return dr < 0 or dr * dr < dx * dx + dy * dy


def _encloses_weak(a: Circle, b: Circle) -> bool:
    dr = a.r - b.r + max(a.r, b.r, 1.0) * 1e-9
    dx = b.cx - a.cx
    dy = b.cy - a.cy
    return dr > 0 and dr * dr > dx * dx + dy * dy


def _encloses_weak_all(a: Circle, basis) -> bool:
    return all(_encloses_weak(a, b) for b in basis)


def _basis2(a: Circle, b: Circle) -> Circle:
    x21 = b.cx - a.cx
    y21 = b.cy - a.cy
    r21 = b.r - a.r
    length = math.sqrt(x21 * x21 + y21 * y21)
    if length == 0:
        return Circle(a.cx, a.cy, max(a.r, b.r))
    return Circle((a.cx + b.cx + x21 / length * r21) / 2,
                  (a.cy + b.cy + y21 / length * r21) / 2,
                  (length + a.r + b.r) / 2)


def _basis3(a: Circle, b: Circle, c: Circle) -> Circle:
    x1, y1, r1 = a.cx, a.cy, a.r
    x2, y2, r2 = b.cx, b.cy, b.r
    x3, y3, r3 = c.cx, c.cy, c.r
    a2 = x1 - x2
    a3 = x1 - x3
    b2 = y1 - y2
    b3 = y1 - y3
    c2 = r2 - r1
    c3 = r3 - r1
    d1 = x1 * x1 + y1 * y1 - r1 * r1
    d2 = d1 - x2 * x2 - y2 * y2 + r2 * r2
    d3 = d1 - x3 * x3 - y3 * y3 + r3 * r3
    ab = a3 * b2 - a2 * b3
    xa = (b2 * d3 - b3 * d2) / (ab * 2) - x1
    xb = (b3 * c2 - b2 * c3) / ab
    ya = (a3 * d2 - a2 * d3) / (ab * 2) - y1
    yb = (a2 * c3 - a3 * c2) / ab
    qa = xb * xb + yb * yb - 1
    qb = 2 * (r1 + xa * xb + ya * yb)
    qc = xa * xa + ya * ya - r1 * r1
    if abs(qa) > 1e-6:
        r = -(qb + math.sqrt(max(0.0, qb * qb - 4 * qa * qc))) / (2 * qa)
    else:
        r = -qc / qb
    return Circle(x1 + xa + xb * r, y1 + ya + yb * r, r)


def _enclose_basis(basis) -> Circle:
    if len(basis) == 1:
        b = basis[0]
        return Circle(b.cx, b.cy, b.r)
    if len(basis) == 2:
        return _basis2(basis[0], basis[1])
    return _basis3(basis[0], basis[1], basis[2])


def _extend_basis(basis, p: Circle):
    if _encloses_weak_all(p, basis):
        return [p]
    for i in range(len(basis)):
        if (_encloses_not(p, basis[i])
                and _encloses_weak_all(_basis2(basis[i], p), basis)):
            return [basis[i], p]
    for i in range(len(basis) - 1):
        for j in range(i + 1, len(basis)):
            if (_encloses_not(_basis2(basis[i], basis[j]), p)
                    and _encloses_not(_basis2(basis[i], p), basis[j])
                    and _encloses_not(_basis2(basis[j], p), basis[i])
                    and _encloses_weak_all(_basis3(basis[i], basis[j], p), basis)):
                return [basis[i], basis[j], p]
    raise RuntimeError("enclosing basis extension failed")


def _lcg_shuffle(items: list) -> None:
    # fixed-seed linear congruential generator keeps the result deterministic
    state = 1
    for i in range(len(items) - 1, 0, -1):
        state = (state * 1664525 + 1013904223) % 4294967296
        j = state % (i + 1)
        items[i], items[j] = items[j], items[i]


def enclosing_circle(circles: Sequence[Circle]) -> Circle:
    """Smallest circle containing every input circle."""
    if not circles:
        raise EmptyInput("no circles")
    items = list(circles)
    _lcg_shuffle(items)
    basis: list[Circle] = []
    enclosure: Optional[Circle] = None
    i = 0
    while i < len(items):
        p = items[i]
        if enclosure is not None and _encloses_weak(enclosure, p):
            i += 1
        else:
            basis = _extend_basis(basis, p)
            enclosure = _enclose_basis(basis)
            i = 0
    return enclosure  # type: ignore[return-value]


# ---------------------------------------------------------------------------
# front-chain sibling packing


class _ChainNode:
    __slots__ = ("c", "next", "prev")

    def __init__(self, c: Circle):
        self.c = c
        self.next: "_ChainNode" = self
        self.prev: "_ChainNode" = self


def _place(b: Circle, a: Circle, c: Circle) -> None:
    """Put c tangent to both a and b, on the outside of the chain."""
    dx = b.cx - a.cx
    dy = b.cy - a.cy
    d2 = dx * dx + dy * dy
    if d2:
        a2 = (a.r + c.r) ** 2
        b2 = (b.r + c.r) ** 2
        if a2 > b2:
            x = (d2 + b2 - a2) / (2 * d2)
            y = math.sqrt(max(0.0, b2 / d2 - x * x))
            c.cx = b.cx - x * dx - y * dy
            c.cy = b.cy - x * dy + y * dx
        else:
            x = (d2 + a2 - b2) / (2 * d2)
            y = math.sqrt(max(0.0, a2 / d2 - x * x))
            c.cx = a.cx + x * dx - y * dy
            c.cy = a.cy + x * dy + y * dx
    else:
        c.cx = a.cx + c.r
        c.cy = a.cy


def _intersects(a: Circle, b: Circle) -> bool:
    dr = a.r + b.r - 1e-10 * (a.r + b.r)
    dx = b.cx - a.cx
    dy = b.cy - a.cy
    return dr > 0 and dr * dr > dx * dx + dy * dy


def _score(node: _ChainNode) -> float:
    a, b = node.c, node.next.c
    ab = a.r + b.r
    dx = (a.cx * b.r + b.cx * a.r) / ab
    dy = (a.cy * b.r + b.cy * a.r) / ab
    return dx * dx + dy * dy


def pack_siblings(circles: list[Circle]) -> None:
    """Assign positions so the circles pack tightly without overlapping.

    Seeds the chain with the first two circles tangent on the x-axis and
    grows it by placing each next circle against the chain pair closest to
    the origin; callers pass circles sorted largest-first for the canonical
    deterministic result.
    """
    n = len(circles)
    if n == 0:
        return
    a = circles[0]
    a.cx = a.cy = 0.0
    if n == 1:
        return
    b = circles[1]
    a.cx = -b.r
    b.cx = a.r
    b.cy = 0.0
    if n == 2:
        return
    c = circles[2]
    _place(b, a, c)

    na, nb, nc = _ChainNode(a), _ChainNode(b), _ChainNode(c)
    na.next = nc.prev = nb
    nb.next = na.prev = nc
    nc.next = nb.prev = na
    a_node, b_node = na, nb

    i = 3
    guard = 0
    limit = 16 * n * n + 1000
    while i < n:
        guard += 1
        if guard > limit:
            raise RuntimeError("front-chain packing failed to converge")
        c = circles[i]
        _place(a_node.c, b_node.c, c)

        j, k = b_node.next, a_node.prev
        sj, sk = b_node.c.r, a_node.c.r
        retry = False
        while True:
            if sj <= sk:
                if _intersects(j.c, c):
                    b_node = j
                    a_node.next = b_node
                    b_node.prev = a_node
                    retry = True
                    break
                sj += j.c.r
                j = j.next
            else:
                if _intersects(k.c, c):
                    a_node = k
                    a_node.next = b_node
                    b_node.prev = a_node
                    retry = True
                    break
                sk += k.c.r
                k = k.prev
            if j is k.next:
                break
        if retry:
            continue

        nc = _ChainNode(c)
        nc.prev = a_node
        nc.next = b_node
        a_node.next = b_node.prev = nc

        aa = _score(a_node)
        cursor = nc
        while True:
            cursor = cursor.next
            if cursor is nc:
                break
            ca = _score(cursor)
            if ca < aa:
                a_node = cursor
                aa = ca
        b_node = a_node.next
        i += 1


# ---------------------------------------------------------------------------
# hierarchical circle packing


def circle_pack(tree: CategoryTree, sizes: RollupTable, mode: str = "assignment",
                padding: float = 0.0) -> CirclePackLayout:
    """Nested packing of the category tree, leaf areas proportional to size.

    Zero-count nodes are omitted. The outermost circle (single root, or the
    enclosure of all roots) is normalized to unit radius at the origin.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    if padding < 0:
        raise ValueError("padding must be >= 0")

    def displayed(code: str) -> bool:
        return code in sizes and sizes.size(code, mode) > 0

    def pack_subtree(code: str) -> tuple[float, list[tuple[str, float, float, float]]]:
        """Returns (radius, [(code, cx, cy, r)] relative to this node's center)."""
        kids = [c for c in tree.children(code) if displayed(c)]
        if not kids:
            return math.sqrt(sizes.size(code, mode)), [(code, 0.0, 0.0, math.sqrt(sizes.size(code, mode)))]
        packed = [(c, *pack_subtree(c)) for c in kids]
        packed.sort(key=lambda item: (-item[1], item[0]))
        shells = [Circle(0.0, 0.0, radius) for _, radius, _ in packed]
        pack_siblings(shells)
        enclosure = enclosing_circle(shells)
        radius = enclosure.r + padding
        out = [(code, 0.0, 0.0, radius)]
        for (child, _, sub), shell in zip(packed, shells):
            ox = shell.cx - enclosure.cx
            oy = shell.cy - enclosure.cy
            for node_code, cx, cy, r in sub:
                out.append((node_code, cx + ox, cy + oy, r))
        return radius, out

    roots = [r for r in sorted(tree.roots) if displayed(r)]
    if not roots:
        raise EmptyTree("no node has a positive size in this mode")

    placed: list[tuple[str, float, float, float]]
    if len(roots) == 1:
        outer_r, placed = pack_subtree(roots[0])
    else:
        packed = [(r, *pack_subtree(r)) for r in roots]
        packed.sort(key=lambda item: (-item[1], item[0]))
        shells = [Circle(0.0, 0.0, radius) for _, radius, _ in packed]
        pack_siblings(shells)
        enclosure = enclosing_circle(shells)
        outer_r = enclosure.r
        placed = []
        for (root, _, sub), shell in zip(packed, shells):
            ox = shell.cx - enclosure.cx
            oy = shell.cy - enclosure.cy
            placed.extend((code, cx + ox, cy + oy, r) for code, cx, cy, r in sub)

    scale = 1.0 / outer_r
    nodes = [PackedNode(code=code, depth=tree.nodes[code].depth,
                        circle=Circle(cx * scale, cy * scale, r * scale))
             for code, cx, cy, r in placed]
    nodes.sort(key=lambda n: (n.depth, n.code))
    return CirclePackLayout(nodes=nodes)


# ---------------------------------------------------------------------------
# tidy tree with size-scaled node circles


def tidy_tree_layout(tree: CategoryTree, sizes: RollupTable, mode: str = "assignment",
                     level_separation: float = 1.0, max_radius: float = 0.35,
                     gap: float = 0.1) -> TreeLayout:
    """Left-to-right layered tree; x from depth, radii k*sqrt(rollup).

    Vertical bands nest by subtree, so circles at one depth never overlap.
    Siblings are ordered by rollup descending, then code.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    if not len(tree):
        return TreeLayout(nodes=[])

    peak = max(sizes.size(code, mode) for code in tree.nodes)
    k = max_radius / math.sqrt(peak) if peak > 0 else 0.0

    def radius(code: str) -> float:
        return k * math.sqrt(sizes.size(code, mode))

    def ordered_children(code: str) -> list[str]:
        return sorted(tree.children(code), key=lambda c: (-sizes.size(c, mode), c))

    extents: dict[str, float] = {}

    def extent(code: str) -> float:
        if code not in extents:
            kids = tree.children(code)
            own = 2 * radius(code) + gap
            extents[code] = max(own, math.fsum(extent(c) for c in kids))
        return extents[code]

    nodes: list[TreeNodePlacement] = []

    def place(code: str, top: float):
        e = extent(code)
        node = tree.nodes[code]
        nodes.append(TreeNodePlacement(
            code=code, x=(node.depth - 1) * level_separation, y=top + e / 2,
            r=radius(code), depth=node.depth, parent=node.parent))
        kids = ordered_children(code)
        if kids:
            child_total = math.fsum(extent(c) for c in kids)
            cursor = top + (e - child_total) / 2
            for child in kids:
                place(child, cursor)
                cursor += extent(child)

    roots = sorted(tree.roots, key=lambda c: (-sizes.size(c, mode), c))
    cursor = 0.0
    for root in roots:
        place(root, cursor)
        cursor += extent(root)
    return TreeLayout(nodes=nodes)


# ---------------------------------------------------------------------------
# static SVG export

DEFAULT_COLORS = {
    "Open": "#2f9e44",
    "RestrictedGroup": "#f4c20d",
    "Restricted": "#d7263d",
    "Other": "#8c8c8c",
}


def _color(color_class: str, colors: dict) -> str:
    return colors.get(color_class, "#5a7bd8")


def treemap_svg(layout: TreemapLayout, width: int = 960, height: int = 600,
                colors: Optional[dict] = None) -> str:
    colors = colors or DEFAULT_COLORS
    vp = layout.viewport
    sx = width / vp.w
    sy = height / vp.h
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
             f'viewBox="0 0 {width} {height}">']
    for cell in layout.cells:
        parts.append(
            '<rect x="%.3f" y="%.3f" width="%.3f" height="%.3f" fill="%s" '
            'stroke="#ffffff" stroke-width="0.4"/>' % (
                (cell.rect.x - vp.x) * sx, (cell.rect.y - vp.y) * sy,
                cell.rect.w * sx, cell.rect.h * sy, _color(cell.color_class, colors)))
    for group in layout.groups:
        if group.header_rect:
            hr = group.header_rect
            parts.append(
                '<rect x="%.3f" y="%.3f" width="%.3f" height="%.3f" fill="#333333"/>' % (
                    (hr.x - vp.x) * sx, (hr.y - vp.y) * sy, hr.w * sx, hr.h * sy))
    parts.append("</svg>")
    return "".join(parts)


def circlepack_svg(layout: CirclePackLayout, size: int = 800) -> str:
    half = size / 2
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
             f'viewBox="0 0 {size} {size}">']
    for node in layout.nodes:
        parts.append(
            '<circle cx="%.3f" cy="%.3f" r="%.3f" fill="#5a7bd8" fill-opacity="0.18" '
            'stroke="#35508c" stroke-width="0.8"/>' % (
                half + node.circle.cx * half * 0.98,
                half + node.circle.cy * half * 0.98,
                node.circle.r * half * 0.98))
    parts.append("</svg>")
    return "".join(parts)


def tree_svg(layout: TreeLayout, width: int = 900, height: int = 700) -> str:
    if not layout.nodes:
        return f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}"/>'
    xs = [n.x for n in layout.nodes]
    ys = [n.y for n in layout.nodes]
    rs = [n.r for n in layout.nodes]
    pad = max(rs) + 0.2 if rs else 0.5
    x0, x1 = min(xs) - pad, max(xs) + pad
    y0, y1 = min(ys) - pad, max(ys) + pad
    sx = width / (x1 - x0)
    sy = height / (y1 - y0)
    scale = min(sx, sy)
    pos = {n.code: ((n.x - x0) * scale, (n.y - y0) * scale) for n in layout.nodes}
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
             f'viewBox="0 0 {width} {height}">']
    for node in layout.nodes:
        if node.parent and node.parent in pos:
            px, py = pos[node.parent]
            cx, cy = pos[node.code]
            parts.append('<line x1="%.3f" y1="%.3f" x2="%.3f" y2="%.3f" '
                         'stroke="#b0b0b0" stroke-width="0.7"/>' % (px, py, cx, cy))
    for node in layout.nodes:
        cx, cy = pos[node.code]
        parts.append('<circle cx="%.3f" cy="%.3f" r="%.3f" fill="#5a7bd8" '
                     'fill-opacity="0.35" stroke="#35508c" stroke-width="0.6"/>' % (
                         cx, cy, max(node.r * scale, 1.5)))
    parts.append("</svg>")
    return "".join(parts)
