"""Root finding and predictor-corrector tracking of fiber roots.

The fiber over ``x`` is the root set of ``f(x, .)``; because the leading
y-coefficient of a generic ``f`` is constant there are always ``n`` roots,
and away from the critical values they are distinct and move analytically.
"""

from __future__ import annotations

import cmath
import functools
import math
from dataclasses import dataclass, field, fields, replace
from typing import Mapping, Sequence

import numpy as np

from .errors import (
    AmbiguousCluster,
    DegenerateFiber,
    MultipleClusters,
    NoConvergence,
    StepUnderflow,
)

_CONFIG_KEYS = {
    "step.initial": "step_initial",
    "step.max": "step_max",
    "step.min": "step_min",
    "corrector.tol": "corrector_tol",
    "separation.floor": "separation_floor",
    "cluster.ratio": "cluster_ratio",
    "cluster.depth": "cluster_depth",
    "disk.scale": "disk_scale",
}


@dataclass(frozen=True)
class TrackConfig:
    """Numerical knobs. Steps are fractions of the path parameter ``t in [0, 1]``."""

    step_initial: float = 0.01
    step_max: float = 0.02
    step_min: float = 1e-14
    corrector_tol: float = 1e-12
    separation_floor: float = 1e-9
    cluster_ratio: float = 10.0
    cluster_depth: float = 1e-10
    disk_scale: float = 1.0

    def __post_init__(self):
        for f in fields(self):
            if not getattr(self, f.name) > 0:
                raise ValueError(f"{f.name} must be positive")

    @classmethod
    def from_mapping(cls, values: Mapping[str, object]) -> "TrackConfig":
        kwargs = {}
        for key, value in values.items():
            if key not in _CONFIG_KEYS:
                raise KeyError(f"unknown tracking key {key!r}")
            kwargs[_CONFIG_KEYS[key]] = float(value)
        return cls(**kwargs)

    def as_mapping(self) -> dict[str, float]:
        return {key: getattr(self, attr) for key, attr in _CONFIG_KEYS.items()}

    def refined(self, factor: float) -> "TrackConfig":
        """Same configuration with initial and maximal steps divided by ``factor``."""
        return replace(self, step_initial=self.step_initial / factor, step_max=self.step_max / factor)


# --------------------------------------------------------------------------
# univariate roots


def _cauchy_radius(c: np.ndarray) -> float:
    return 1.0 + float(np.max(np.abs(c[1:] / c[0]))) if len(c) > 1 else 1.0


def roots_univariate(coeffs: Sequence[complex], tol: float = 1e-12, certify: bool = True,
                     max_iter: int = 500) -> np.ndarray:
    """All roots of the polynomial with ``coeffs`` (highest degree first).

    Aberth-Ehrlich iteration from a fixed starting circle (stopped when the
    updates or the residuals reach rounding level), followed by a few Newton
    polishing steps. With ``certify`` every returned root ``z`` must
    satisfy the inclusion bound ``d*|p(z)/p'(z)| < tol*(1 + |z|)``.
    """
    c = np.trim_zeros(np.asarray(coeffs, dtype=complex), "f")
    if len(c) == 0:
        raise ValueError("zero polynomial has no roots")
    d = len(c) - 1
    if d == 0:
        return np.zeros(0, dtype=complex)
    c = c / c[0]
    if d == 1:
        return np.array([-c[1]])
    dc = c[:-1] * np.arange(d, 0, -1)

    radius = _cauchy_radius(c)
    # the offset angle avoids symmetric starts for real-coefficient inputs
    z = radius * 0.5 * np.exp(1j * (2 * np.pi * np.arange(d) / d + 0.4))
    absc = np.abs(c)
    for _ in range(max_iter):
        p = np.polyval(c, z)
        dp = np.polyval(dc, z)
        # residuals at rounding level cannot be improved further
        noise = 8e-16 * np.polyval(absc, np.abs(z))
        if np.all(np.abs(p) <= noise):
            break
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, 1.0)
        inv = 1.0 / diff
        np.fill_diagonal(inv, 0.0)
        s = inv.sum(axis=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = p / dp
            step = ratio / (1.0 - ratio * s)
        step = np.where(np.isfinite(step), step, 0.0)
        z = z - step
        if np.all(np.abs(step) <= 1e-15 * (1.0 + np.abs(z))):
            break

    for _ in range(3):
        dp = np.polyval(dc, z)
        ok = np.abs(dp) > 0
        z = np.where(ok, z - np.polyval(c, z) / np.where(ok, dp, 1.0), z)

    if certify:
        p = np.abs(np.polyval(c, z))
        dp = np.abs(np.polyval(dc, z))
        with np.errstate(divide="ignore"):
            bound = np.where(dp > 0, d * p / dp, np.inf)
        if np.any(bound >= tol * (1.0 + np.abs(z))):
            raise NoConvergence(
                f"root inclusion radius {float(np.max(bound)):.3g} exceeds tolerance {tol:.3g}"
            )
    return z


def canonical_order(roots: Sequence[complex], tie: float = 1e-8) -> list[int]:
    """Indices sorting by decreasing imaginary part, ties by increasing real part.

    Imaginary parts within ``tie`` (relative to the largest modulus) count as equal.
    """
    roots = [complex(z) for z in roots]
    eps = tie * (1.0 + max((abs(z) for z in roots), default=0.0))

    def cmp(a, b):
        za, zb = roots[a], roots[b]
        if abs(za.imag - zb.imag) > eps:
            return -1 if za.imag > zb.imag else 1
        return (za.real > zb.real) - (za.real < zb.real)

    return sorted(range(len(roots)), key=functools.cmp_to_key(cmp))


def neighbour_gaps(points: np.ndarray) -> np.ndarray:
    """Distance from each point to its nearest neighbour."""
    if len(points) < 2:
        return np.full(len(points), math.inf)
    d = np.abs(points[:, None] - points[None, :])
    np.fill_diagonal(d, np.inf)
    return d.min(axis=1)


def min_gap(points: np.ndarray) -> float:
    if len(points) < 2:
        return math.inf
    d = np.abs(points[:, None] - points[None, :])
    np.fill_diagonal(d, np.inf)
    return float(d.min())


# --------------------------------------------------------------------------
# numerical evaluation of f along fibers


class FiberEvaluator:
    """Vectorised evaluation of ``f``, ``f_x``, ``f_y`` at a fixed ``x`` and many ``y``."""

    def __init__(self, f):
        A = f.coefficient_array()
        self.n = f.deg_y
        self.A = A
        self.Ax = A[1:] * np.arange(1, A.shape[0])[:, None] if A.shape[0] > 1 else np.zeros((1, A.shape[1]), complex)
        self._xexp = np.arange(A.shape[0])
        self._xexp_d = np.arange(self.Ax.shape[0])

    def y_coefficients(self, x: complex) -> np.ndarray:
        """Coefficients of ``f(x, .)`` in ascending powers of y."""
        return (x ** self._xexp) @ self.A

    def fiber_polynomial(self, x: complex) -> np.ndarray:
        """Coefficients of ``f(x, .)``, highest degree first."""
        return self.y_coefficients(x)[::-1]

    def values(self, x: complex, y: np.ndarray):
        """Return ``f``, ``f_y``, ``f_x`` and the absolute-value scale at ``(x, y)``."""
        cy = self.y_coefficients(x)
        cx = (x ** self._xexp_d) @ self.Ax
        f = np.zeros_like(y)
        fy = np.zeros_like(y)
        fx = np.zeros_like(y)
        scale = np.zeros(y.shape, dtype=float)
        ay = np.abs(y)
        for j in range(len(cy) - 1, -1, -1):
            fy = fy * y + f
            f = f * y + cy[j]
            fx = fx * y + cx[j]
            scale = scale * ay + abs(cy[j])
        return f, fy, fx, scale


def fiber_roots(f, x0: complex, tol: float = 1e-12, separation: float = 1e-9) -> np.ndarray:
    """The ``n`` distinct roots of ``f(x0, .)`` in canonical order."""
    ev = f if isinstance(f, FiberEvaluator) else FiberEvaluator(f)
    coeffs = ev.fiber_polynomial(x0)
    try:
        z = roots_univariate(coeffs, tol=tol)
    except NoConvergence as exc:
        raise DegenerateFiber(f"fiber over {x0} is (nearly) singular: {exc}") from exc
    if len(z) != ev.n:
        raise DegenerateFiber(f"expected {ev.n} roots over {x0}, found {len(z)}")
    if min_gap(z) <= separation:
        raise DegenerateFiber(f"roots over {x0} closer than {separation}")
    return z[canonical_order(z)]


# --------------------------------------------------------------------------
# paths


@dataclass(frozen=True)
class PathSpec:
    """A path in the x-plane parametrised by ``t in [0, 1]``.

    ``segment`` and ``polyline`` use ``vertices`` (constant speed along the
    chain); ``circular_arc`` uses ``center``, ``radius``, ``start_angle`` and a
    signed ``sweep`` (positive = counterclockwise).
    """

    kind: str
    vertices: tuple[complex, ...] = ()
    center: complex = 0j
    radius: float = 0.0
    start_angle: float = 0.0
    sweep: float = 0.0
    _cum: tuple[float, ...] = field(default=(), repr=False, compare=False)

    def __post_init__(self):
        if self.kind in ("segment", "polyline"):
            if len(self.vertices) < 2:
                raise ValueError("polyline needs at least two vertices")
            if self.kind == "segment" and len(self.vertices) != 2:
                raise ValueError("segment needs exactly two endpoints")
            lengths = [abs(b - a) for a, b in zip(self.vertices, self.vertices[1:])]
            cum = [0.0]
            for length in lengths:
                cum.append(cum[-1] + length)
            object.__setattr__(self, "_cum", tuple(cum))
        elif self.kind == "circular_arc":
            if not self.radius > 0:
                raise ValueError("arc radius must be positive")
        else:
            raise ValueError(f"unknown path kind {self.kind!r}")

    @classmethod
    def segment(cls, a: complex, b: complex) -> "PathSpec":
        return cls("segment", (complex(a), complex(b)))

    @classmethod
    def polyline(cls, vertices: Sequence[complex]) -> "PathSpec":
        vs = tuple(complex(v) for v in vertices)
        return cls("segment" if len(vs) == 2 else "polyline", vs)

    @classmethod
    def arc(cls, center: complex, radius: float, start_angle: float, sweep: float) -> "PathSpec":
        return cls("circular_arc", center=complex(center), radius=float(radius),
                   start_angle=float(start_angle), sweep=float(sweep))

    @classmethod
    def circle_through(cls, center: complex, start: complex, ccw: bool = True) -> "PathSpec":
        """Full circle about ``center`` starting and ending at ``start``."""
        offset = complex(start) - complex(center)
        return cls.arc(center, abs(offset), cmath.phase(offset), 2 * math.pi if ccw else -2 * math.pi)

    @property
    def length(self) -> float:
        if self.kind == "circular_arc":
            return abs(self.sweep) * self.radius
        return self._cum[-1]

    @property
    def start(self) -> complex:
        return self.point(0.0)

    @property
    def end(self) -> complex:
        return self.point(1.0)

    def point(self, t: float) -> complex:
        if self.kind == "circular_arc":
            if t >= 1.0:
                # closed loops land exactly on their start point
                angle = self.start_angle + self.sweep
                if abs(abs(self.sweep) - 2 * math.pi) < 1e-15:
                    return self.point(0.0)
            else:
                angle = self.start_angle + self.sweep * t
            return self.center + self.radius * complex(math.cos(angle), math.sin(angle))
        if t <= 0.0:
            return self.vertices[0]
        if t >= 1.0:
            return self.vertices[-1]
        s = t * self._cum[-1]
        for k in range(len(self.vertices) - 1):
            if s <= self._cum[k + 1] or k == len(self.vertices) - 2:
                seg = self._cum[k + 1] - self._cum[k]
                u = (s - self._cum[k]) / seg if seg else 0.0
                a, b = self.vertices[k], self.vertices[k + 1]
                return a + (b - a) * u
        return self.vertices[-1]

    def reversed(self) -> "PathSpec":
        if self.kind == "circular_arc":
            return PathSpec.arc(self.center, self.radius, self.start_angle + self.sweep, -self.sweep)
        return PathSpec(self.kind, tuple(reversed(self.vertices)))

    def as_dict(self) -> dict:
        if self.kind == "circular_arc":
            return {"kind": self.kind, "center": [self.center.real, self.center.imag],
                    "radius": self.radius, "start_angle": self.start_angle, "sweep": self.sweep}
        return {"kind": self.kind, "vertices": [[v.real, v.imag] for v in self.vertices]}


# --------------------------------------------------------------------------
# trajectories


@dataclass(frozen=True)
class StrandTrajectory:
    """Sampled motion of ``n`` strands.

    Column ``j`` of ``positions`` always follows the strand that started at
    index ``j`` of the start vector, so strand identity is the column index.
    """

    ts: np.ndarray
    xs: np.ndarray
    positions: np.ndarray
    max_residual: float = 0.0

    @property
    def n(self) -> int:
        return self.positions.shape[1]

    @property
    def start(self) -> np.ndarray:
        return self.positions[0]

    @property
    def end(self) -> np.ndarray:
        return self.positions[-1]

    def __len__(self):
        return len(self.ts)

    @property
    def permutation(self) -> tuple[int, ...]:
        """Start label (0-based) of the strand found at each canonical end position."""
        return tuple(canonical_order(self.end))

    def reversed(self) -> "StrandTrajectory":
        return StrandTrajectory(1.0 - self.ts[::-1], self.xs[::-1], self.positions[::-1], self.max_residual)

    def then(self, other: "StrandTrajectory") -> "StrandTrajectory":
        """Concatenate with a trajectory that starts where this one ends.

        ``other``'s columns are matched to this trajectory's end positions.
        """
        match = match_points(self.end, other.start)
        pos = other.positions[:, match]
        ts = np.concatenate([self.ts * 0.5, 0.5 + other.ts[1:] * 0.5])
        xs = np.concatenate([self.xs, other.xs[1:]])
        return StrandTrajectory(ts, xs, np.vstack([self.positions, pos[1:]]),
                                max(self.max_residual, other.max_residual))

    @classmethod
    def constant(cls, points: Sequence[complex], samples: int = 2) -> "StrandTrajectory":
        pts = np.asarray(points, dtype=complex)
        return cls(np.linspace(0.0, 1.0, samples), np.zeros(samples, complex), np.tile(pts, (samples, 1)))


def match_points(reference: np.ndarray, candidates: np.ndarray) -> np.ndarray:
    """For each reference point, the index of the nearest candidate (a bijection check is enforced)."""
    d = np.abs(np.asarray(reference)[:, None] - np.asarray(candidates)[None, :])
    idx = d.argmin(axis=1)
    if len(set(idx.tolist())) != len(idx):
        raise DegenerateFiber("fiber points cannot be matched one-to-one")
    return idx


def _newton(ev: FiberEvaluator, x: complex, y: np.ndarray, tol: float, max_iter: int = 8):
    """Simultaneous Newton on all roots; returns ``(y, converged, first_steps)``.

    ``first_steps`` holds the size of each root's first Newton update.

    A root counts as converged when its update is below ``tol`` (relative)
    or its residual is at rounding level, which is all that can be asked for
    close to a collision where ``f_y`` is small.
    """
    first = None
    for _ in range(max_iter):
        f, fy, _, scale = ev.values(x, y)
        if np.any(fy == 0):
            return y, False, first
        step = f / fy
        if first is None:
            first = np.abs(step)
        y = y - step
        done = (np.abs(step) <= tol * (1.0 + np.abs(y))) | (np.abs(f) <= 8e-16 * scale)
        if np.all(done):
            return y, True, first
    return y, False, first


def track(f, path: PathSpec, start: Sequence[complex], cfg: TrackConfig | None = None) -> StrandTrajectory:
    """Follow the fiber roots from ``start`` along ``path``.

    Euler predictor on ``dy/dx = -f_x/f_y`` and a Newton corrector applied to
    all roots at once. A step is accepted only when the corrector converges,
    every root moves less than a third of the distance to its nearest
    neighbour, and the new roots stay further apart than the separation
    floor. Rejected steps halve ``h``; four accepted steps in a row double it.
    """
    cfg = cfg or TrackConfig()
    ev = f if isinstance(f, FiberEvaluator) else FiberEvaluator(f)
    y = np.array(start, dtype=complex)
    if len(y) != ev.n:
        raise ValueError(f"start fiber has {len(y)} points, expected {ev.n}")
    x = path.point(0.0)
    y, ok, _ = _newton(ev, x, y, cfg.corrector_tol)
    if not ok:
        raise NoConvergence(f"start fiber over {x} does not satisfy f = 0")

    ts, xs, samples = [0.0], [x], [y.copy()]
    t = 0.0
    h = min(cfg.step_initial, cfg.step_max)
    streak = 0
    worst = 0.0
    while t < 1.0:
        h = min(h, cfg.step_max)
        t1 = t + h
        if t1 > 1.0 - 1e-15:
            t1 = 1.0
        x1 = path.point(t1)
        gaps = neighbour_gaps(y)
        _, fy, fx, _ = ev.values(x, y)
        yp = y - fx / fy * (x1 - x)
        y1, ok, first = _newton(ev, x1, yp, cfg.corrector_tol)
        accepted = (
            ok
            and first is not None
            and np.all(first < gaps / 4)
            and np.all(np.abs(y1 - y) < gaps / 3)
            and min_gap(y1) > cfg.separation_floor
        )
        if accepted:
            fv, _, _, scale = ev.values(x1, y1)
            residual = float(np.max(np.abs(fv) / np.maximum(scale, 1e-300)))
            worst = max(worst, residual)
            t, x, y = t1, x1, y1
            ts.append(t)
            xs.append(x)
            samples.append(y.copy())
            streak += 1
            if streak >= 4:
                h *= 2.0
                streak = 0
        else:
            h *= 0.5
            streak = 0
            if h < cfg.step_min:
                raise StepUnderflow(
                    f"step {h:.3g} below minimum near x = {x1:.6g} (t = {t:.6g}); "
                    "the path passes too close to a critical value"
                )
    return StrandTrajectory(np.array(ts), np.array(xs), np.array(samples), worst)


# --------------------------------------------------------------------------
# collapse detection


def _mst_edges(points: np.ndarray) -> list[tuple[float, int, int]]:
    n = len(points)
    if n < 2:
        return []
    d = np.abs(points[:, None] - points[None, :])
    in_tree = [0]
    best = d[0].copy()
    parent = np.zeros(n, dtype=int)
    edges = []
    remaining = set(range(1, n))
    while remaining:
        k = min(remaining, key=lambda j: best[j])
        edges.append((float(best[k]), int(parent[k]), k))
        remaining.discard(k)
        in_tree.append(k)
        for j in remaining:
            if d[k, j] < best[j]:
                best[j] = d[k, j]
                parent[j] = k
    return sorted(edges)


def cluster_points(points: Sequence[complex], reference_scale: float, ratio: float = 10.0):
    """Single-linkage clustering of a fiber near a critical value.

    Cutting the minimum spanning tree after its ``k`` shortest edges is
    admissible when the next edge (or ``reference_scale`` once every point is
    merged) is at least ``ratio`` times the ``k``-th. The admissible cut with
    the largest jump wins. Returns the list of clusters (lists of indices).
    """
    pts = np.asarray(points, dtype=complex)
    edges = _mst_edges(pts)
    lengths = [e[0] for e in edges] + [reference_scale]
    best_k, best_jump = None, 0.0
    for k in range(1, len(edges) + 1):
        inner, outer = lengths[k - 1], lengths[k]
        jump = outer / inner if inner > 0 else math.inf
        if jump >= ratio and jump > best_jump:
            best_k, best_jump = k, jump
    if best_k is None:
        raise AmbiguousCluster(
            f"no clustering with gap ratio >= {ratio}; edge lengths {[f'{v:.3g}' for v in lengths]}"
        )
    parent = list(range(len(pts)))

    def root(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for _, a, b in edges[:best_k]:
        parent[root(a)] = root(b)
    groups: dict[int, list[int]] = {}
    for k in range(len(pts)):
        groups.setdefault(root(k), []).append(k)
    return sorted(groups.values())


def collapse_cluster(f, p_i: complex, approach, cfg: TrackConfig | None = None,
                     start: Sequence[complex] | None = None):
    """Follow the fiber from a point of the disk boundary into ``p_i``.

    ``approach`` is either a :class:`PathSpec` ending at ``p_i`` or the start
    point ``p'_i`` (a straight approach is then used). The path stops at
    relative depth ``cfg.cluster_depth``. Returns ``(m_i, labels)`` with the
    labels indexing ``start`` (canonical fiber order at ``p'_i`` by default).
    """
    cfg = cfg or TrackConfig()
    ev = f if isinstance(f, FiberEvaluator) else FiberEvaluator(f)
    if isinstance(approach, PathSpec):
        a, target = approach.start, approach.end
    else:
        a, target = complex(approach), complex(p_i)
    if start is None:
        start = fiber_roots(ev, a, separation=cfg.separation_floor)
    reference = min_gap(np.asarray(start, dtype=complex))
    # geometric stages; stop early once some pair is resolved far below the
    # reference scale (linear branches shrink like the depth itself)
    y = np.asarray(start, dtype=complex)
    here = a
    depth = 1.0
    while depth > cfg.cluster_depth:
        depth = max(depth * 0.1, cfg.cluster_depth)
        nxt = target + (a - target) * depth
        y = track(ev, PathSpec.segment(here, nxt), y, cfg).end
        here = nxt
        if min_gap(y) < 1e-5 * reference:
            break
    groups = cluster_points(y, reference_scale=reference, ratio=cfg.cluster_ratio)
    big = [g for g in groups if len(g) > 1]
    if len(big) != 1:
        raise MultipleClusters(
            f"{len(big)} collapsing clusters over {p_i:.6g} (sizes {[len(g) for g in big]})"
        )
    return len(big[0]), frozenset(big[0])
