"""Braid monodromy of a generic plane curve.

The base point ``p0`` sits on the real axis to the right of every critical
value. Each arc leaves ``p0`` along a straight segment to a waypoint on the
vertical line ``Re x = M`` and then runs along a fixed direction ``v`` into
the disk ``U_i``; the parallel tails never meet and the fan of first
segments only meets at ``p0``.
"""

from __future__ import annotations

import cmath
import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import __version__
from .braid import (
    Braid,
    braid_with_phase,
    braids_equal,
    choose_phase,
    compose,
    conjugate,
    identity,
    permutation,
)
from .curve import BivariatePolynomial, CriticalSet, format_polynomial
from .errors import ArcCrossing, InvariantViolation, KirbyCurveError
from .tracking import (
    FiberEvaluator,
    PathSpec,
    StrandTrajectory,
    TrackConfig,
    collapse_cluster,
    fiber_roots,
    track,
)

SCHEMA = "monodromy/1"


# --------------------------------------------------------------------------
# arc system


@dataclass(frozen=True)
class ArcSystem:
    p0: complex
    arcs: tuple[PathSpec, ...]
    disk_radii: tuple[float, ...]
    order: tuple[int, ...]
    direction: float = 0.0

    @property
    def endpoints(self) -> tuple[complex, ...]:
        return tuple(a.end for a in self.arcs)

    def angle_at_base(self, i: int) -> float:
        arc = self.arcs[i]
        return cmath.phase(arc.vertices[1] - arc.vertices[0]) % (2 * math.pi)


def _orient(a, b, c) -> int:
    ax, ay = Fraction(a.real), Fraction(a.imag)
    bx, by = Fraction(b.real), Fraction(b.imag)
    cx, cy = Fraction(c.real), Fraction(c.imag)
    v = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
    return (v > 0) - (v < 0)


def _on_segment(a, b, c) -> bool:
    return (min(a.real, b.real) <= c.real <= max(a.real, b.real)
            and min(a.imag, b.imag) <= c.imag <= max(a.imag, b.imag))


def segments_intersect(a: complex, b: complex, c: complex, d: complex) -> bool:
    """Exact closed-segment intersection test on the float coordinates."""
    o1, o2 = _orient(a, b, c), _orient(a, b, d)
    o3, o4 = _orient(c, d, a), _orient(c, d, b)
    if o1 != o2 and o3 != o4 and 0 not in (o1, o2, o3, o4):
        return True
    if o1 == 0 and _on_segment(a, b, c):
        return True
    if o2 == 0 and _on_segment(a, b, d):
        return True
    if o3 == 0 and _on_segment(c, d, a):
        return True
    if o4 == 0 and _on_segment(c, d, b):
        return True
    return False


def point_segment_distance(p: complex, a: complex, b: complex) -> float:
    ab = b - a
    if ab == 0:
        return abs(p - a)
    u = ((p - a) * ab.conjugate()).real / abs(ab) ** 2
    u = min(1.0, max(0.0, u))
    return abs(p - (a + ab * u))


def _segments(arc: PathSpec):
    return list(zip(arc.vertices, arc.vertices[1:]))


def arcs_valid(X: Sequence[complex], radii: Sequence[float], arcs: Sequence[PathSpec], p0: complex) -> str | None:
    """Return a description of the first violated condition, or None."""
    for i, arc in enumerate(arcs):
        for j, p in enumerate(X):
            if j == i:
                continue
            for a, b in _segments(arc):
                if point_segment_distance(p, a, b) < 1.5 * radii[j]:
                    return f"arc {i} passes within 1.5 r of critical value {j}"
        if abs(arc.end - X[i]) - radii[i] > 1e-9 * (1 + radii[i]):
            return f"arc {i} does not end on its disk boundary"
    for i in range(len(arcs)):
        for j in range(i + 1, len(arcs)):
            si, sj = _segments(arcs[i]), _segments(arcs[j])
            for ka, (a, b) in enumerate(si):
                for kb, (c, d) in enumerate(sj):
                    if ka == 0 and kb == 0:
                        # both leave p0: they may only share that point
                        if _orient(a, b, d) == 0 and ((b - a) * (d - c).conjugate()).real > 0:
                            return f"arcs {i} and {j} overlap at the base point"
                        continue
                    if segments_intersect(a, b, c, d):
                        return f"arcs {i} and {j} intersect"
    return None


def direction_ladder(steps: int = 20) -> list[float]:
    """0, then alternating -k*pi/48 and +k*pi/48 (up to 75 degrees)."""
    out = [0.0]
    for k in range(1, steps + 1):
        out += [-k * math.pi / 48, k * math.pi / 48]
    return out


SHRINK_LADDER = (1.0, 0.5, 0.25)


def build_arc_system(X: CriticalSet, cfg: TrackConfig | None = None) -> ArcSystem:
    """Base point, disks and a non-intersecting arc system for ``X``."""
    cfg = cfg or TrackConfig()
    pts = list(X.points)
    if not pts:
        raise ArcCrossing("no critical values: nothing to connect")
    diam = X.diameter()
    max_re = max(p.real for p in pts)
    p0 = complex(max_re + 2 * diam + 1, 0.0)
    M = max_re + 0.5 * diam + 0.5
    problem = None
    for shrink, psi in itertools.product(SHRINK_LADDER, direction_ladder()):
        radii = tuple(r * cfg.disk_scale * shrink for r in X.safety_radii())
        v = cmath.exp(1j * psi)
        arcs = []
        for p, r in zip(pts, radii):
            start = p + r * v
            s = (M - p.real) / v.real
            w = p + s * v
            verts = [p0, w, start]
            if abs(_orient(p0, w, start)) == 0 or s <= r:
                verts = [p0, start]
            arcs.append(PathSpec.polyline(verts))
        problem = arcs_valid(pts, radii, arcs, p0)
        if problem is None:
            tmp = ArcSystem(p0, tuple(arcs), radii, (), psi)
            order = tuple(sorted(range(len(arcs)), key=tmp.angle_at_base))
            return ArcSystem(p0, tuple(arcs), radii, order, psi)
    raise ArcCrossing(f"no valid arc system along the direction ladder ({problem})")


# --------------------------------------------------------------------------
# per-critical-value data


@dataclass(frozen=True)
class CriticalMonodromy:
    index: int
    point: complex
    radius: float
    local: Braid
    transport: Braid
    global_: Braid
    m: int
    collapse_positions: tuple[int, ...]
    collapse_labels: tuple[int, ...]
    I: tuple[int, ...]
    gather: Braid | None = None
    core: Braid | None = None
    core_positions: tuple[int, ...] = ()

    def as_dict(self) -> dict:
        return {
            "index": self.index,
            "point": [self.point.real, self.point.imag],
            "radius": self.radius,
            "local_braid": list(self.local.word),
            "transport_braid": list(self.transport.word),
            "global_braid": list(self.global_.word),
            "m": self.m,
            "collapse_positions": list(self.collapse_positions),
            "collapse_labels": list(self.collapse_labels),
            "I": list(self.I),
            "gather_braid": list(self.gather.word) if self.gather else None,
            "core_braid": list(self.core.word) if self.core else None,
            "core_positions": list(self.core_positions),
        }


@dataclass
class MonodromyData:
    f: BivariatePolynomial
    n: int
    X: CriticalSet
    arc_system: ArcSystem
    phase: float
    base_fiber: tuple[complex, ...]
    critical: tuple[CriticalMonodromy, ...]
    infinity_loop: Braid
    config: TrackConfig = field(default_factory=TrackConfig)
    residual: float = 0.0
    samples: int = 0

    @property
    def N(self) -> int:
        return len(self.critical)

    def ordered(self) -> list[CriticalMonodromy]:
        """Critical data in the cyclic order of the arcs at ``p0``."""
        return [self.critical[i] for i in self.arc_system.order]

    def as_dict(self) -> dict:
        return {
            "schema": SCHEMA,
            "version": __version__,
            "curve": format_polynomial(self.f),
            "n": self.n,
            "N": self.N,
            "phase": self.phase,
            "base_point": [self.arc_system.p0.real, self.arc_system.p0.imag],
            "base_fiber": [[z.real, z.imag] for z in self.base_fiber],
            "critical_values": [[p.real, p.imag] for p in self.X.points],
            "critical_radii": list(self.X.radii),
            "disk_radii": list(self.arc_system.disk_radii),
            "arcs": [[[v.real, v.imag] for v in a.vertices] for a in self.arc_system.arcs],
            "order": list(self.arc_system.order),
            "critical": [c.as_dict() for c in self.critical],
            "infinity_loop": list(self.infinity_loop.word),
            "config": self.config.as_mapping(),
        }


# --------------------------------------------------------------------------
# operations


def _loop_path(arc_system: ArcSystem, i: int, centre: complex) -> PathSpec:
    return PathSpec.circle_through(centre, arc_system.arcs[i].end, ccw=True)


def transport_trajectory(f, i: int, arc_system: ArcSystem, cfg: TrackConfig, base=None) -> StrandTrajectory:
    ev = f if isinstance(f, FiberEvaluator) else FiberEvaluator(f)
    if base is None:
        base = fiber_roots(ev, arc_system.p0, separation=cfg.separation_floor)
    return track(ev, arc_system.arcs[i], base, cfg)


def local_trajectory(f, i: int, centre: complex, arc_system: ArcSystem, cfg: TrackConfig, start=None) -> StrandTrajectory:
    ev = f if isinstance(f, FiberEvaluator) else FiberEvaluator(f)
    p_start = arc_system.arcs[i].end
    if start is None:
        start = fiber_roots(ev, p_start, separation=cfg.separation_floor)
    return track(ev, _loop_path(arc_system, i, centre), start, cfg)


def local_monodromy(f, i: int, X: CriticalSet, arc_system: ArcSystem, cfg: TrackConfig | None = None,
                    theta: float | None = None, seed: int = 0):
    """``(local braid, m_i, collapse positions)`` for the i-th critical value, standalone.

    Positions refer to the projected order of the fiber at ``p'_i``.
    """
    cfg = cfg or TrackConfig()
    ev = FiberEvaluator(f)
    loop = local_trajectory(ev, i, X.points[i], arc_system, cfg)
    if theta is None:
        theta = choose_phase([loop], seed)
    m, labels = collapse_cluster(ev, X.points[i], arc_system.arcs[i].end, cfg, start=loop.start)
    positions = _positions(loop.start, theta)
    return braid_with_phase(loop, theta), m, tuple(sorted(positions[k] for k in labels))


def transport_braid(f, i: int, arc_system: ArcSystem, cfg: TrackConfig | None = None,
                    theta: float | None = None, seed: int = 0) -> Braid:
    cfg = cfg or TrackConfig()
    traj = transport_trajectory(f, i, arc_system, cfg)
    if theta is None:
        theta = choose_phase([traj], seed, base=[traj])
    return braid_with_phase(traj, theta)


def _positions(points, theta: float) -> list[int]:
    """1-based projected position of every point."""
    z = np.asarray(points) * complex(math.cos(theta), math.sin(theta))
    order = np.argsort(z.real, kind="stable")
    pos = [0] * len(order)
    for p, k in enumerate(order):
        pos[int(k)] = p + 1
    return pos


GATHER_STAGES = 40


def gather_trajectory(f, p_i: complex, start_point: complex, start, labels, theta: float,
                      cfg: TrackConfig) -> tuple[StrandTrajectory, complex]:
    """Approach ``p_i`` radially, halving the distance, until the projection of a
    disk around the collapsing strands ``labels`` (twice their spread) misses every
    other strand.

    Returns the trajectory and the point reached; the loop around ``p_i``
    through that point has its local braid supported on adjacent strands.
    """
    ev = f if isinstance(f, FiberEvaluator) else FiberEvaluator(f)
    y = np.asarray(start, dtype=complex)
    here, traj = start_point, StrandTrajectory.constant(y)
    rot = complex(math.cos(theta), math.sin(theta))
    inside = sorted(labels)
    outside = [k for k in range(len(y)) if k not in labels]
    for stage in range(1, GATHER_STAGES + 1):
        centre = y[inside].mean()
        spread = float(np.max(np.abs(y[inside] - centre)))
        gaps = np.abs(((y[outside] - centre) * rot).real)
        if not outside or gaps.min() > 2 * spread:
            return traj, here
        nxt = p_i + (start_point - p_i) * 0.5 ** stage
        step = track(ev, PathSpec.segment(here, nxt), y, cfg)
        traj, y, here = traj.then(step), step.end, nxt
    raise InvariantViolation(f"collapsing strands over {p_i:.6g} never become adjacent")


def infinity_path(arc_system: ArcSystem, X: CriticalSet, ccw: bool = True) -> PathSpec:
    """Circle through ``p0`` centred at the centroid of the critical values."""
    centre = sum(X.points) / len(X.points)
    return PathSpec.circle_through(complex(centre.real, 0.0) if abs(centre.imag) < 1e-15 else centre,
                                   arc_system.p0, ccw=ccw)


def assemble(f: BivariatePolynomial, X: CriticalSet, cfg: TrackConfig | None = None, seed: int = 0,
             workers: int = 1) -> MonodromyData:
    """Track every arc and loop and package the braid monodromy.

    ``f`` must already be generic for the projection (see
    :func:`kirbycurve.curve.make_generic`).
    """
    cfg = cfg or TrackConfig()
    ev = FiberEvaluator(f)
    n = ev.n
    arcs = build_arc_system(X, cfg)
    base = fiber_roots(ev, arcs.p0, separation=cfg.separation_floor)

    def per_value(i):
        try:
            transport = track(ev, arcs.arcs[i], base, cfg)
            loop = track(ev, _loop_path(arcs, i, X.points[i]), transport.end, cfg)
            m, labels = collapse_cluster(ev, X.points[i], arcs.arcs[i].end, cfg, start=transport.end)
        except KirbyCurveError as exc:
            raise type(exc)(f"critical value {i} ({X.points[i]:.6g}): {exc}") from exc
        return transport, loop, m, labels

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(per_value, range(X.N)))
    else:
        results = [per_value(i) for i in range(X.N)]
    at_infinity = track(ev, infinity_path(arcs, X), base, cfg)

    trajectories = [r[0] for r in results] + [r[1] for r in results] + [at_infinity]
    base_started = [r[0] for r in results] + [at_infinity]
    theta = choose_phase(trajectories, seed, base=base_started)

    critical = []
    for i, (transport, loop, m, labels) in enumerate(results):
        phi = braid_with_phase(transport, theta)
        local = braid_with_phase(loop, theta)
        glob = conjugate(local, phi)
        pos = _positions(transport.end, theta)
        collapse_positions = tuple(sorted(pos[k] for k in labels))
        collapse_labels = tuple(sorted(k + 1 for k in labels))
        I = collapse_labels[:-1]  # drop the largest base label
        gather, inner = gather_trajectory(ev, X.points[i], arcs.arcs[i].end, transport.end, labels, theta, cfg)
        small = track(ev, PathSpec.circle_through(X.points[i], inner), gather.end, cfg)
        trajectories += [gather, small]
        core_pos = _positions(gather.end, theta)
        critical.append(CriticalMonodromy(
            i, X.points[i], arcs.disk_radii[i], local, phi, glob, m, collapse_positions, collapse_labels, I,
            braid_with_phase(gather, theta), braid_with_phase(small, theta),
            tuple(sorted(core_pos[k] for k in labels)),
        ))
    residual = max(t.max_residual for t in trajectories)
    samples = sum(len(t) for t in trajectories)
    md = MonodromyData(f, n, X, arcs, theta, tuple(complex(z) for z in base), tuple(critical),
                       braid_with_phase(at_infinity, theta), cfg, residual, samples)
    validate(md)
    return md


def validate(md: MonodromyData) -> None:
    """Check the structural invariants of assembled monodromy data."""
    for c in md.critical:
        if len(c.I) != c.m - 1:
            raise InvariantViolation(f"|I_{c.index}| = {len(c.I)} but m = {c.m}")
        perm = permutation(c.local)
        for p in range(1, md.n + 1):
            if p not in c.collapse_positions and perm[p - 1] != p:
                raise InvariantViolation(
                    f"local monodromy {c.index} moves strand {p} outside its collapse cluster"
                )
        if set(perm[p - 1] for p in c.collapse_positions) != set(c.collapse_positions):
            raise InvariantViolation(f"local monodromy {c.index} does not preserve its cluster")
        if c.core is not None:
            lo, hi = c.core_positions[0], c.core_positions[-1]
            if hi - lo != c.m - 1:
                raise InvariantViolation(f"core strands of {c.index} are not adjacent")
            if any(abs(a) < lo or abs(a) >= hi for a in c.core.word):
                raise InvariantViolation(f"core braid of {c.index} leaves its cluster")
            if not braids_equal(c.local, conjugate(c.core, c.gather)):
                raise InvariantViolation(f"loop braid of {c.index} is not the conjugated core braid")


def monodromy_at_infinity(md: MonodromyData) -> Braid:
    """Product of the global monodromies in the cyclic order of the arcs."""
    out = identity(md.n)
    for c in md.ordered():
        out = compose(out, c.global_)
    return out


def base_fiber_orbits(md: MonodromyData) -> list[set[int]]:
    """Orbits on ``{1..n}`` of the group generated by the monodromy permutations."""
    parent = list(range(md.n + 1))

    def root(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for c in md.critical:
        perm = permutation(c.global_)
        for p in range(1, md.n + 1):
            parent[root(p)] = root(perm[p - 1])
    groups: dict[int, set[int]] = {}
    for p in range(1, md.n + 1):
        groups.setdefault(root(p), set()).add(p)
    return sorted(groups.values(), key=min)


__all__ = [
    "ArcSystem",
    "CriticalMonodromy",
    "MonodromyData",
    "build_arc_system",
    "local_monodromy",
    "transport_braid",
    "assemble",
    "monodromy_at_infinity",
    "validate",
    "segments_intersect",
    "base_fiber_orbits",
    "infinity_path",
]
