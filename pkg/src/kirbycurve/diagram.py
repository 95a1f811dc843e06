"""Kirby diagrams of curve complements.

A diagram is a cyclic word of braid blocks on ``n`` lanes whose closure gives
the dotted circles (the 1-handles), together with 0-framed attaching circles
placed just before each local block. Lanes follow the canonical labeling of
the base fiber, lane 1 on top. In a crossing glyph for ``sigma_k`` the strand
climbing from lane ``k+1`` to lane ``k`` passes over; for the inverse letter
it passes under.

Rendering goes through :class:`Layout`, shared by the SVG and TikZ backends.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Mapping

from .braid import Braid, braids_equal, compose, exponent_sum, identity, permutation
from .errors import InvariantViolation, PermutationNotIdentity
from .monodromy import MonodromyData

SCHEMA = "kirby/1"
BLOCK_KINDS = ("transport_out", "local", "transport_back", "closing")


@dataclass(frozen=True)
class Block:
    kind: str
    i: int | None
    braid: Braid

    def as_dict(self) -> dict:
        return {"kind": self.kind, "i": self.i, "braid": list(self.braid.word)}


@dataclass(frozen=True)
class PlacedCircle:
    """Attaching circle around lanes ``strands`` just before local block ``host``."""

    host: int
    pair: tuple[int, int]
    strands: tuple[int, int]
    block: int
    framing: int = 0

    def as_dict(self) -> dict:
        return {"i": self.host, "k": self.pair[0], "strands": list(self.strands),
                "block": self.block, "framing": self.framing}


@dataclass(frozen=True)
class KirbyDiagram:
    n: int
    blocks: tuple[Block, ...]
    attaching: tuple[PlacedCircle, ...]
    closure: bool = True
    meta: Mapping[str, object] = field(default_factory=dict)

    def total_braid(self) -> Braid:
        out = identity(self.n)
        for b in self.blocks:
            out = compose(out, b.braid)
        return out

    def local_blocks(self) -> list[Block]:
        return [b for b in self.blocks if b.kind == "local"]

    def writhe(self, include_closing: bool = False) -> int:
        return sum(exponent_sum(b.braid) for b in self.blocks
                   if include_closing or b.kind != "closing")


def build_diagram(md: MonodromyData, meta: Mapping[str, object] | None = None,
                  check_trivial: bool = True) -> KirbyDiagram:
    """Blocks ``phi_i, bar beta_i, phi_i^-1`` in the cyclic arc order, then the closing block.

    The local block is the loop braid on a disk small enough that the collapsing
    strands are adjacent, and the transport block runs the arc into that disk;
    attaching circles therefore only ever enclose neighbouring lanes.

    The closing block is the clockwise loop around all critical values, so the
    cyclic word is trivial in ``B_n`` and its closure is the ``n``-component
    trivial link of dotted circles.
    """
    blocks: list[Block] = []
    circles: list[PlacedCircle] = []
    for c in md.ordered():
        out = compose(c.transport, c.gather)
        blocks.append(Block("transport_out", c.index, out))
        for k in range(1, c.m):
            strands = (c.core_positions[k - 1], c.core_positions[k])
            circles.append(PlacedCircle(c.index, (k, k + 1), strands, len(blocks)))
        blocks.append(Block("local", c.index, c.core))
        blocks.append(Block("transport_back", c.index, out.inverse()))
    blocks.append(Block("closing", None, md.infinity_loop.inverse()))
    kd = KirbyDiagram(md.n, tuple(blocks), tuple(circles), True, dict(meta or {}))
    verify(kd, check_trivial=check_trivial)
    return kd


def verify(kd: KirbyDiagram, check_trivial: bool = True) -> None:
    """Raise unless the cyclic block word closes up into ``n`` dotted circles."""
    total = kd.total_braid()
    perm = permutation(total)
    if perm != tuple(range(1, kd.n + 1)):
        raise PermutationNotIdentity(f"total permutation of the block cycle is {perm}")
    if check_trivial and not braids_equal(total, identity(kd.n)):
        raise PermutationNotIdentity("block cycle is a nontrivial pure braid")
    outs = {b.i: b.braid for b in kd.blocks if b.kind == "transport_out"}
    for b in kd.blocks:
        if b.kind == "transport_back" and b.braid.word != outs[b.i].inverse().word:
            raise InvariantViolation(f"transport blocks for {b.i} are not mutually inverse")
    for c in kd.attaching:
        if c.framing != 0:
            raise InvariantViolation("nonzero framing")
        if not 1 <= c.strands[0] < c.strands[1] <= kd.n:
            raise InvariantViolation(f"attaching circle on strands {c.strands} out of range")


# --------------------------------------------------------------------------
# JSON


def emit_json(kd: KirbyDiagram) -> dict:
    return {
        "schema": SCHEMA,
        "n": kd.n,
        "closure": kd.closure,
        "blocks": [b.as_dict() for b in kd.blocks],
        "attaching": [c.as_dict() for c in kd.attaching],
        "meta": dict(kd.meta),
    }


def dumps(kd: KirbyDiagram) -> str:
    return json.dumps(emit_json(kd), sort_keys=True, indent=2) + "\n"


def read_json(doc: Mapping | str) -> KirbyDiagram:
    if isinstance(doc, str):
        doc = json.loads(doc)
    if doc.get("schema") != SCHEMA:
        raise ValueError(f"not a {SCHEMA} document: schema={doc.get('schema')!r}")
    n = int(doc["n"])
    blocks = []
    for b in doc["blocks"]:
        if b["kind"] not in BLOCK_KINDS:
            raise ValueError(f"unknown block kind {b['kind']!r}")
        blocks.append(Block(b["kind"], b["i"], Braid(n, tuple(b["braid"]))))
    circles = tuple(
        PlacedCircle(c["i"], (c["k"], c["k"] + 1), tuple(c["strands"]), c["block"], c["framing"])
        for c in doc["attaching"]
    )
    return KirbyDiagram(n, tuple(blocks), circles, bool(doc.get("closure", True)), dict(doc.get("meta", {})))


# --------------------------------------------------------------------------
# layout


@dataclass(frozen=True)
class Crossing:
    column: int
    k: int
    sign: int
    block: int


@dataclass(frozen=True)
class CircleGlyph:
    column: int
    lanes: tuple[int, int]
    framing: int
    host: int


@dataclass(frozen=True)
class BlockSpan:
    start: int
    stop: int
    kind: str
    i: int | None


@dataclass(frozen=True)
class Layout:
    """Backend-independent placement: one column per crossing or attaching circle."""

    n: int
    columns: int
    crossings: tuple[Crossing, ...]
    circles: tuple[CircleGlyph, ...]
    spans: tuple[BlockSpan, ...]

    def crossings_in(self, block: int) -> list[Crossing]:
        return [c for c in self.crossings if c.block == block]


def layout(kd: KirbyDiagram) -> Layout:
    crossings, circles, spans = [], [], []
    col = 0
    by_block: dict[int, list[PlacedCircle]] = {}
    for c in kd.attaching:
        by_block.setdefault(c.block, []).append(c)
    for b_index, block in enumerate(kd.blocks):
        for c in by_block.get(b_index, []):
            circles.append(CircleGlyph(col, c.strands, c.framing, c.host))
            col += 1
        start = col
        for a in block.braid.word:
            crossings.append(Crossing(col, abs(a), 1 if a > 0 else -1, b_index))
            col += 1
        spans.append(BlockSpan(start, col, block.kind, block.i))
    return Layout(kd.n, col, tuple(crossings), tuple(circles), tuple(spans))


DEFAULT_STYLE = {
    "dx": 24.0,
    "dy": 24.0,
    "margin": 30.0,
    "stroke": 1.6,
    "gap": 5.0,
    "strand_color": "#000000",
    "circle_color": "#c0392b",
    "block_color": "#7f8c8d",
}


def _style(style: Mapping | None) -> dict:
    out = dict(DEFAULT_STYLE)
    out.update(style or {})
    return out


def _geometry(lay: Layout, st: dict):
    """Coordinates shared by both backends (y grows downward)."""
    n = lay.n
    top = st["margin"] + (n + 1) * st["dy"] * 0.5  # room for closure arcs above
    lane_y = [top + k * st["dy"] for k in range(n)]
    x0 = st["margin"] + n * st["dy"] * 0.5
    width = max(lay.columns, 1) * st["dx"]
    return lane_y, x0, width


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def emit_svg(kd: KirbyDiagram, style: Mapping | None = None) -> str:
    st = _style(style)
    lay = layout(kd)
    lane_y, x0, width = _geometry(lay, st)
    x1 = x0 + width
    dx, gap = st["dx"], st["gap"]
    W = x1 + st["margin"] + lay.n * st["dy"] * 0.5
    H = lane_y[-1] + st["margin"] + st["dy"]
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{_fmt(W)}" height="{_fmt(H)}" '
        f'viewBox="0 0 {_fmt(W)} {_fmt(H)}">',
        f'<g fill="none" stroke="{st["strand_color"]}" stroke-width="{_fmt(st["stroke"])}" '
        'stroke-linecap="round">',
    ]
    crossing_at = {c.column: c for c in lay.crossings}
    for col in range(lay.columns):
        xa, xb = x0 + col * dx, x0 + (col + 1) * dx
        c = crossing_at.get(col)
        for lane in range(1, lay.n + 1):
            if c and lane in (c.k, c.k + 1):
                continue
            y = lane_y[lane - 1]
            out.append(f'<path d="M{_fmt(xa)},{_fmt(y)} L{_fmt(xb)},{_fmt(y)}"/>')
        if c:
            ya, yb = lane_y[c.k - 1], lane_y[c.k]
            xm, ym = (xa + xb) / 2, (ya + yb) / 2
            # over strand: climbing (k+1 -> k) for a positive letter
            over = ((xa, yb), (xb, ya)) if c.sign > 0 else ((xa, ya), (xb, yb))
            under = ((xa, ya), (xb, yb)) if c.sign > 0 else ((xa, yb), (xb, ya))
            out.append(f'<path d="M{_fmt(over[0][0])},{_fmt(over[0][1])} L{_fmt(over[1][0])},{_fmt(over[1][1])}"/>')
            (ux0, uy0), (ux1, uy1) = under
            f = gap / max(((ux1 - ux0) ** 2 + (uy1 - uy0) ** 2) ** 0.5, 1e-9)
            out.append(
                f'<path d="M{_fmt(ux0)},{_fmt(uy0)} L{_fmt(xm - (ux1 - ux0) * f)},{_fmt(ym - (uy1 - uy0) * f)} '
                f'M{_fmt(xm + (ux1 - ux0) * f)},{_fmt(ym + (uy1 - uy0) * f)} L{_fmt(ux1)},{_fmt(uy1)}"/>'
            )
    # closure arcs: lane k returns above the diagram, outermost for lane 1
    for lane in range(1, lay.n + 1):
        y = lane_y[lane - 1]
        r = (lay.n - lane + 1) * st["dy"] * 0.5
        top = lane_y[0] - (lay.n - lane + 1) * st["dy"] * 0.5 - st["dy"] * 0.25
        out.append(
            f'<path d="M{_fmt(x1)},{_fmt(y)} C{_fmt(x1 + r)},{_fmt(y)} {_fmt(x1 + r)},{_fmt(top)} {_fmt(x1)},{_fmt(top)} '
            f'L{_fmt(x0)},{_fmt(top)} C{_fmt(x0 - r)},{_fmt(top)} {_fmt(x0 - r)},{_fmt(y)} {_fmt(x0)},{_fmt(y)}"/>'
        )
    out.append("</g>")
    # dots marking the 1-handles
    for lane in range(1, lay.n + 1):
        top = lane_y[0] - (lay.n - lane + 1) * st["dy"] * 0.5 - st["dy"] * 0.25
        out.append(f'<circle cx="{_fmt((x0 + x1) / 2)}" cy="{_fmt(top)}" r="3.00" fill="{st["strand_color"]}"/>')
    for span in lay.spans:
        if span.kind == "local":
            xa, xb = x0 + span.start * dx, x0 + span.stop * dx
            out.append(
                f'<rect x="{_fmt(xa)}" y="{_fmt(lane_y[0] - st["dy"] * 0.4)}" width="{_fmt(xb - xa)}" '
                f'height="{_fmt(lane_y[-1] - lane_y[0] + st["dy"] * 0.8)}" fill="none" '
                f'stroke="{st["block_color"]}" stroke-dasharray="3,3"/>'
            )
    for g in lay.circles:
        cx = x0 + (g.column + 0.5) * dx
        ya, yb = lane_y[g.lanes[0] - 1], lane_y[g.lanes[1] - 1]
        out.append(
            f'<ellipse cx="{_fmt(cx)}" cy="{_fmt((ya + yb) / 2)}" rx="{_fmt(dx * 0.35)}" '
            f'ry="{_fmt((yb - ya) / 2 + st["dy"] * 0.35)}" fill="none" stroke="{st["circle_color"]}" '
            f'stroke-width="{_fmt(st["stroke"])}"/>'
        )
        out.append(
            f'<text x="{_fmt(cx)}" y="{_fmt(yb + st["dy"] * 0.8)}" font-size="10" text-anchor="middle" '
            f'fill="{st["circle_color"]}">{g.framing}</text>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_tikz(kd: KirbyDiagram, style: Mapping | None = None) -> str:
    """Standalone ``tikzpicture`` (TikZ y axis points up, so lanes are negated)."""
    st = _style(style)
    lay = layout(kd)
    unit = st["dx"]
    lane_y = [-(k) * st["dy"] / unit for k in range(lay.n)]
    dx = 1.0
    x1 = lay.columns * dx

    def p(x, y):
        return f"({x:.2f},{y:.2f})"

    out = [
        "\\begin{tikzpicture}[strand/.style={line width=1pt},",
        "  over/.style={line width=1pt, preaction={draw=white, line width=4pt}},",
        "  attach/.style={red!70!black, line width=1pt}]",
    ]
    crossing_at = {c.column: c for c in lay.crossings}
    for col in range(lay.columns):
        xa, xb = col * dx, (col + 1) * dx
        c = crossing_at.get(col)
        for lane in range(1, lay.n + 1):
            if c and lane in (c.k, c.k + 1):
                continue
            out.append(f"  \\draw[strand] {p(xa, lane_y[lane - 1])} -- {p(xb, lane_y[lane - 1])};")
        if c:
            ya, yb = lane_y[c.k - 1], lane_y[c.k]
            over = (p(xa, yb), p(xb, ya)) if c.sign > 0 else (p(xa, ya), p(xb, yb))
            under = (p(xa, ya), p(xb, yb)) if c.sign > 0 else (p(xa, yb), p(xb, ya))
            out.append(f"  \\draw[strand] {under[0]} -- {under[1]};")
            out.append(f"  \\draw[over] {over[0]} -- {over[1]};")
    for lane in range(1, lay.n + 1):
        y = lane_y[lane - 1]
        top = lane_y[0] + (lay.n - lane + 1) * 0.5 + 0.25
        r = (lay.n - lane + 1) * 0.5
        out.append(
            f"  \\draw[strand] {p(x1, y)} .. controls {p(x1 + r, y)} and {p(x1 + r, top)} .. {p(x1, top)}"
            f" -- {p(0, top)} .. controls {p(-r, top)} and {p(-r, y)} .. {p(0, y)};"
        )
        out.append(f"  \\fill {p(x1 / 2, top)} circle (2pt);")
    for g in lay.circles:
        cx = (g.column + 0.5) * dx
        ya, yb = lane_y[g.lanes[0] - 1], lane_y[g.lanes[1] - 1]
        ry = (ya - yb) / 2 + 0.35
        out.append(f"  \\draw[attach] {p(cx, (ya + yb) / 2)} ellipse ({0.35:.2f} and {ry:.2f});")
        out.append(f"  \\node[attach, below] at {p(cx, yb - 0.35)} {{${g.framing}$}};")
    out.append("\\end{tikzpicture}")
    return "\n".join(out) + "\n"


__all__ = [
    "Block",
    "PlacedCircle",
    "KirbyDiagram",
    "Layout",
    "build_diagram",
    "verify",
    "emit_json",
    "read_json",
    "dumps",
    "layout",
    "emit_svg",
    "emit_tikz",
]
