"""Handle decomposition, fundamental group and cross-checks for a curve complement."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import mpmath

from . import __version__
from .braid import FreeWord, artin_action, format_free_word, free_reduce
from .curve import BivariatePolynomial, CriticalSet
from .monodromy import MonodromyData, base_fiber_orbits

PI1_SCHEMA = "pi1/1"
PLACEMENT = "fiber over alpha_3 outside U_i along s_i"


# --------------------------------------------------------------------------
# handles


@dataclass(frozen=True)
class AttachingCircle:
    """0-framed circle around the k-th and (k+1)-th collapsing strands, which are
    adjacent lanes in the fiber over the inner disk boundary."""

    critical_index: int
    pair: tuple[int, int]
    strands: tuple[int, int]
    placement: str = PLACEMENT
    framing: int = 0

    def as_dict(self) -> dict:
        return {
            "i": self.critical_index,
            "k": self.pair[0],
            "strands": list(self.strands),
            "framing": self.framing,
        }


@dataclass(frozen=True)
class HandleDecomposition:
    one_handles: int
    two_handles: tuple[AttachingCircle, ...]
    zero_handles: int = 1

    @property
    def counts(self) -> tuple[int, int, int]:
        return (self.zero_handles, self.one_handles, len(self.two_handles))

    @property
    def framings(self) -> tuple[int, ...]:
        return tuple(c.framing for c in self.two_handles)

    def as_dict(self) -> dict:
        return {
            "counts": list(self.counts),
            "framings": list(self.framings),
            "two_handles": [c.as_dict() for c in self.two_handles],
        }


def handle_decomposition(md: MonodromyData) -> HandleDecomposition:
    circles = []
    for c in md.critical:
        for k in range(1, c.m):
            strands = (c.core_positions[k - 1], c.core_positions[k])
            circles.append(AttachingCircle(c.index, (k, k + 1), strands))
    return HandleDecomposition(md.n, tuple(circles))


def euler_characteristic(hd: HandleDecomposition) -> int:
    return hd.zero_handles - hd.one_handles + len(hd.two_handles)


# --------------------------------------------------------------------------
# presentation


@dataclass(frozen=True)
class Relator:
    """``beta_i . e_j = e_j`` written as the word ``(beta_i . e_j) e_j^-1``."""

    critical_index: int
    j: int
    raw: tuple[int, ...]
    word: FreeWord

    @property
    def trivial(self) -> bool:
        return len(self.word) == 0

    def as_dict(self) -> dict:
        return {
            "i": self.critical_index,
            "j": self.j,
            "raw": list(self.raw),
            "word": list(self.word.letters),
            "trivial": self.trivial,
        }


@dataclass(frozen=True)
class Presentation:
    n: int
    relators: tuple[Relator, ...]
    generators: tuple[int, ...] = field(default=())

    def __post_init__(self):
        if not self.generators:
            object.__setattr__(self, "generators", tuple(range(1, self.n + 1)))

    @property
    def words(self) -> list[FreeWord]:
        return [r.word for r in self.relators]

    def __str__(self):
        gens = ",".join(f"e{g}" for g in self.generators)
        rels = ", ".join(format_free_word(r.word.letters) for r in self.relators)
        return f"<{gens} | {rels}>"

    def as_dict(self) -> dict:
        rank, torsion = abelianization(self)
        return {
            "schema": PI1_SCHEMA,
            "version": __version__,
            "generators": [f"e{g}" for g in self.generators],
            "relators": [r.as_dict() for r in self.relators],
            "text": str(self),
            "abelianization": {"rank": rank, "torsion": list(torsion)},
        }


def pi1_presentation(md: MonodromyData) -> Presentation:
    relators = []
    for c in md.critical:
        for j in c.I:
            image = artin_action(c.global_, FreeWord.generator(md.n, j))
            raw = image.letters + (-j,)
            relators.append(Relator(c.index, j, raw, FreeWord(md.n, raw)))
    return Presentation(md.n, tuple(relators))


def simplify(p: Presentation) -> Presentation:
    """Cheap Tietze moves: cyclically reduce, drop trivial and repeated relators,
    eliminate generators killed by ``e_a`` or identified by ``e_a e_b^-1``.

    Generators keep their original labels.
    """
    gens = list(p.generators)
    words = [r.word.letters for r in p.relators]
    while True:
        words = [cyclic_reduce(w) for w in words]
        seen, unique = set(), []
        for w in words:
            key = min(_cyclic_forms(w), default=())
            if w and key not in seen:
                seen.add(key)
                unique.append(w)
        words = unique
        move = None
        for w in words:
            if len(w) == 1:
                move = (abs(w[0]), ())
            elif len(w) == 2 and w[0] * w[1] < 0 and abs(w[0]) != abs(w[1]):
                # e_a e_b^-1 in some rotation or inversion: e_a = e_b
                move = (max(w), (-min(w),))
            if move:
                break
        if move is None:
            break
        a, sub = move
        words = [free_reduce(_replace(u, a, sub)) for u in words]
        gens.remove(a)
    rels = tuple(Relator(-1, 0, w, FreeWord(p.n, w)) for w in words)
    return Presentation(p.n, rels, tuple(gens))


def cyclic_reduce(w: Sequence[int]) -> tuple[int, ...]:
    """Freely reduce ``w`` and cancel inverse letters at its two ends."""
    w = free_reduce(w)
    k = 0
    while k < len(w) - 1 - k and w[k] == -w[-1 - k]:
        k += 1
    return tuple(w[k:len(w) - k])


def _replace(w: Sequence[int], a: int, sub: tuple[int, ...]) -> tuple[int, ...]:
    out: list[int] = []
    for x in w:
        if abs(x) != a:
            out.append(x)
        elif x > 0:
            out.extend(sub)
        else:
            out.extend(-y for y in reversed(sub))
    return tuple(out)


def _cyclic_forms(w: tuple[int, ...]):
    """All cyclic rotations of ``w`` and of its inverse (a relator's equivalence class)."""
    inv = tuple(-a for a in reversed(w))
    for u in (w, inv):
        for k in range(len(u)):
            yield u[k:] + u[:k]


# --------------------------------------------------------------------------
# abelianization


def smith_normal_form(matrix: Sequence[Sequence[int]]) -> list[int]:
    """Nonzero invariant factors ``d_1 | d_2 | ...`` of an integer matrix."""
    A = [list(map(int, row)) for row in matrix]
    if not A or not A[0]:
        return []
    rows, cols = len(A), len(A[0])
    diag = []
    t = 0
    while t < min(rows, cols):
        nonzero = [(abs(A[r][c]), r, c) for r in range(t, rows) for c in range(t, cols) if A[r][c]]
        if not nonzero:
            break
        _, r, c = min(nonzero)
        A[t], A[r] = A[r], A[t]
        for row in A:
            row[t], row[c] = row[c], row[t]
        while True:
            p = A[t][t]
            dirty = False
            for r in range(t + 1, rows):
                q = A[r][t] // p
                if q:
                    A[r] = [a - q * b for a, b in zip(A[r], A[t])]
                if A[r][t]:
                    dirty = True
            for c in range(t + 1, cols):
                q = A[t][c] // p
                if q:
                    for row in A:
                        row[c] -= q * row[t]
                if A[t][c]:
                    dirty = True
            if not dirty:
                # the pivot must divide every remaining entry
                bad = next(((r, c) for r in range(t + 1, rows) for c in range(t + 1, cols)
                            if A[r][c] % p), None)
                if bad is None:
                    break
                A[t] = [a + b for a, b in zip(A[t], A[bad[0]])]
                continue
            # move the smallest remaining entry of row/column t to the pivot
            cands = [(abs(A[r][t]), r, t) for r in range(t, rows) if A[r][t]]
            cands += [(abs(A[t][c]), t, c) for c in range(t, cols) if A[t][c]]
            _, r, c = min(cands)
            A[t], A[r] = A[r], A[t]
            for row in A:
                row[t], row[c] = row[c], row[t]
        diag.append(abs(A[t][t]))
        t += 1
    return diag


def relator_matrix(p: Presentation) -> list[list[int]]:
    index = {g: k for k, g in enumerate(p.generators)}
    rows = []
    for w in p.words:
        v = [0] * len(p.generators)
        for a in w.letters:
            v[index[abs(a)]] += 1 if a > 0 else -1
        rows.append(v)
    return rows


def abelianization(p: Presentation) -> tuple[int, tuple[int, ...]]:
    """``(rank, torsion)`` with ``H_1 = Z^rank + sum Z/t``."""
    factors = smith_normal_form(relator_matrix(p)) if p.relators else []
    rank = len(p.generators) - len(factors)
    return rank, tuple(d for d in factors if d > 1)


def component_count(md: MonodromyData) -> int:
    return len(base_fiber_orbits(md))


# --------------------------------------------------------------------------
# Euler characteristic of the curve itself


def _sylvester(a: list, b: list) -> mpmath.matrix:
    m, n = len(a) - 1, len(b) - 1
    size = m + n
    S = mpmath.matrix(size, size)
    for r in range(n):
        for k, c in enumerate(a):
            S[r, r + k] = c
    for r in range(m):
        for k, c in enumerate(b):
            S[n + r, r + k] = c
    return S


def distinct_fiber_roots(f: BivariatePolynomial, x, digits: int = 50, threshold: int = 25) -> int:
    """Number of distinct roots of ``f(x, .)`` from the rank of Sylvester(g, g').

    ``x`` should be accurate to about ``digits`` digits; singular values below
    ``10**-threshold`` times the largest count as zero.
    """
    n = f.deg_y
    with mpmath.workdps(digits):
        x = mpmath.mpc(x)
        g = [mpmath.mpc(0)] * (n + 1)
        for (i, j), c in f.terms.items():
            g[n - j] += c.to_mpc() * x ** i
        if n <= 1:
            return n
        dg = [c * (n - k) for k, c in enumerate(g[:-1])]
        sv = mpmath.svd_c(_sylvester(g, dg), compute_uv=False)
        top = max(abs(s) for s in sv)
        rank = sum(1 for s in sv if abs(s) > top * mpmath.mpf(10) ** (-threshold))
    return rank - n + 1


def curve_euler_characteristic(f: BivariatePolynomial, X: CriticalSet, digits: int = 50) -> int:
    """chi(C) from the branched covering C -> C: n*chi(C minus X) + sum of fiber sizes."""
    n = f.deg_y
    total = n * (1 - X.N)
    for k in range(X.N):
        total += distinct_fiber_roots(f, X.refined(k, digits + 10), digits)
    return total


__all__ = [
    "AttachingCircle",
    "HandleDecomposition",
    "Relator",
    "Presentation",
    "handle_decomposition",
    "euler_characteristic",
    "pi1_presentation",
    "simplify",
    "cyclic_reduce",
    "smith_normal_form",
    "abelianization",
    "component_count",
    "curve_euler_characteristic",
    "distinct_fiber_roots",
]
