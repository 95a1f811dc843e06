"""Braid words, the Artin action on the free group, and braid extraction.

Conventions used everywhere in the package:

* ``sigma_k`` (letter ``k``) is the counterclockwise half-twist exchanging the
  strands in positions ``k`` and ``k+1``; letter ``-k`` is its inverse.
* Words read left to right in time: ``compose(a, b)`` is "``a`` then ``b``".
* ``sigma_k`` acts on the free group by ``e_k -> e_k e_{k+1} e_k^-1``,
  ``e_{k+1} -> e_k``; a word acts letter by letter from the left, so
  ``action(compose(a, b), w) == action(b, action(a, w))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import ActionOverflow, PhaseDegeneracy, RankMismatch, StrandMismatch

ACTION_LENGTH_CAP = 10**6


def free_reduce(letters: Iterable[int]) -> tuple[int, ...]:
    """Cancel adjacent ``x x^-1`` pairs."""
    out: list[int] = []
    for a in letters:
        if out and out[-1] == -a:
            out.pop()
        else:
            out.append(a)
    return tuple(out)


@dataclass(frozen=True)
class Braid:
    """A word in the Artin generators of ``B_n``; never reduced implicitly."""

    n: int
    word: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "word", tuple(int(a) for a in self.word))
        if self.n < 1:
            raise ValueError("a braid needs at least one strand")
        for a in self.word:
            if a == 0 or abs(a) >= self.n:
                raise ValueError(f"generator {a} out of range for {self.n} strands")

    def __len__(self):
        return len(self.word)

    def __iter__(self):
        return iter(self.word)

    def inverse(self) -> "Braid":
        return Braid(self.n, tuple(-a for a in reversed(self.word)))

    def normalize(self) -> "Braid":
        return Braid(self.n, free_reduce(self.word))

    def __mul__(self, other: "Braid") -> "Braid":
        return compose(self, other)

    def __pow__(self, k: int) -> "Braid":
        base = self if k >= 0 else self.inverse()
        return Braid(self.n, base.word * abs(k))

    def __str__(self):
        return f"braid n={self.n}: " + ",".join(str(a) for a in self.word)

    @classmethod
    def parse(cls, text: str, n: int | None = None) -> "Braid":
        """Read ``"braid n=3: 1,2,-1"`` or a bare ``"1,2,-1"`` (then ``n`` is required)."""
        text = text.strip()
        if text.startswith("braid"):
            head, _, body = text.partition(":")
            n = int(head.split("n=")[1])
        else:
            body = text
        if n is None:
            raise ValueError("strand count missing")
        body = body.strip()
        word = tuple(int(tok) for tok in body.split(",") if tok.strip()) if body else ()
        return cls(n, word)


def identity(n: int) -> Braid:
    return Braid(n, ())


def compose(a: Braid, b: Braid) -> Braid:
    """``a`` first, then ``b``."""
    if a.n != b.n:
        raise StrandMismatch(f"cannot compose braids on {a.n} and {b.n} strands")
    return Braid(a.n, a.word + b.word)


def conjugate(b: Braid, by: Braid) -> Braid:
    """``by`` then ``b`` then ``by^-1``: the braid of the loop ``s . gamma . s^-1``."""
    return compose(compose(by, b), by.inverse())


def permutation(b: Braid) -> tuple[int, ...]:
    """Image of the braid in ``S_n`` as a 1-based tuple: ``perm[p-1]`` is where position ``p`` ends up."""
    where = list(range(b.n))  # where[strand] = current position
    at = list(range(b.n))  # at[position] = strand
    for a in b.word:
        k = abs(a) - 1
        s, t = at[k], at[k + 1]
        at[k], at[k + 1] = t, s
        where[s], where[t] = k + 1, k
    return tuple(p + 1 for p in where)


def exponent_sum(b: Braid) -> int:
    return sum(1 if a > 0 else -1 for a in b.word)


def full_twist(n: int) -> Braid:
    if n < 2:
        raise ValueError("the full twist needs n >= 2")
    return Braid(n, tuple(range(1, n)) * n)


def brieskorn_braid(p: int, q: int) -> Braid:
    """``(sigma_1 ... sigma_{q-1})^p``."""
    return Braid(q, tuple(range(1, q)) * p)


# --------------------------------------------------------------------------
# free group and Artin action


@dataclass(frozen=True)
class FreeWord:
    """Freely reduced word over ``e_1..e_n`` (letter ``-j`` is ``e_j^-1``)."""

    n: int
    letters: tuple[int, ...] = ()

    def __post_init__(self):
        reduced = free_reduce(int(a) for a in self.letters)
        for a in reduced:
            if a == 0 or abs(a) > self.n:
                raise ValueError(f"letter {a} out of range for rank {self.n}")
        object.__setattr__(self, "letters", reduced)

    def __len__(self):
        return len(self.letters)

    def __mul__(self, other: "FreeWord") -> "FreeWord":
        if self.n != other.n:
            raise RankMismatch("free words of different rank")
        return FreeWord(self.n, self.letters + other.letters)

    def inverse(self) -> "FreeWord":
        return FreeWord(self.n, tuple(-a for a in reversed(self.letters)))

    def exponent_vector(self) -> tuple[int, ...]:
        v = [0] * self.n
        for a in self.letters:
            v[abs(a) - 1] += 1 if a > 0 else -1
        return tuple(v)

    def __str__(self):
        return format_free_word(self.letters)

    @classmethod
    def generator(cls, n: int, j: int) -> "FreeWord":
        return cls(n, (j,))

    @classmethod
    def product_of_generators(cls, n: int) -> "FreeWord":
        return cls(n, tuple(range(1, n + 1)))


def format_free_word(letters: Sequence[int]) -> str:
    if not letters:
        return "1"
    return " ".join(f"e{a}" if a > 0 else f"e{-a}^-1" for a in letters)


def _letter_images(a: int) -> dict[int, tuple[int, ...]]:
    """Images of the generators moved by the single braid letter ``a``."""
    k = abs(a)
    if a > 0:
        return {k: (k, k + 1, -k), k + 1: (k,)}
    return {k: (k + 1,), k + 1: (-(k + 1), k, k + 1)}


def _substitute(letters: Sequence[int], images: dict[int, tuple[int, ...]]) -> tuple[int, ...]:
    out: list[int] = []
    for x in letters:
        img = images.get(abs(x))
        if img is None:
            piece: Sequence[int] = (x,)
        elif x > 0:
            piece = img
        else:
            piece = tuple(-y for y in reversed(img))
        for y in piece:
            if out and out[-1] == -y:
                out.pop()
            else:
                out.append(y)
        if len(out) > ACTION_LENGTH_CAP:
            raise ActionOverflow(f"Artin action exceeded {ACTION_LENGTH_CAP} letters")
    return tuple(out)


def artin_action(b: Braid, w: FreeWord) -> FreeWord:
    """Apply the letters of ``b`` to ``w`` in order (see module docstring)."""
    if b.n != w.n:
        raise RankMismatch(f"braid on {b.n} strands cannot act on a rank-{w.n} free group")
    letters = w.letters
    for a in b.word:
        letters = _substitute(letters, _letter_images(a))
    return FreeWord(w.n, letters)


def generator_images(b: Braid) -> tuple[tuple[int, ...], ...]:
    """``artin_action(b, e_j)`` for every ``j``, as raw letter tuples."""
    images = [(j,) for j in range(1, b.n + 1)]
    for a in b.word:
        sub = _letter_images(a)
        images = [_substitute(img, sub) for img in images]
    return tuple(images)


def braids_equal(a: Braid, b: Braid) -> bool:
    """Equality in ``B_n`` via faithfulness of the Artin representation."""
    if a.n != b.n:
        raise StrandMismatch("braids on different strand counts")
    if free_reduce(a.word) == free_reduce(b.word):
        return True
    # a == b  iff  a b^-1 acts trivially; its images stay short when they are equal
    images = generator_images(compose(a, b.inverse()))
    return all(img == (j,) for j, img in enumerate(images, start=1))


# --------------------------------------------------------------------------
# braids from strand trajectories


def phase_candidates(seed: int = 0, count: int = 64) -> list[float]:
    """Projection phases close to ``pi/2``.

    Multiplying fiber points by ``exp(i*theta)`` with ``theta`` slightly below
    ``pi/2`` orders them by decreasing imaginary part with ties broken by
    increasing real part, i.e. the canonical labeling. The small offsets are a
    fixed low-discrepancy sequence whose starting point is set by ``seed``.
    """
    golden = (math.sqrt(5.0) - 1.0) / 2.0
    out = []
    for k in range(count):
        frac = ((seed + k + 1) * golden) % 1.0
        out.append(math.pi / 2 - 1e-3 * (0.25 + frac))
    return out


def _crossing_events(z0: np.ndarray, z1: np.ndarray, eps: float):
    """Pairs whose projected real parts swap between two samples, with their times."""
    r0, r1 = z0.real, z1.real
    d0 = r0[:, None] - r0[None, :]
    d1 = r1[:, None] - r1[None, :]
    events = []
    n = len(z0)
    for a in range(n):
        for b in range(a + 1, n):
            if d0[a, b] * d1[a, b] < 0:
                tau = d0[a, b] / (d0[a, b] - d1[a, b])
                events.append((float(tau), a, b))
    return events


def _check_separated(z: np.ndarray, eps: float) -> bool:
    r = np.sort(z.real)
    return len(r) < 2 or float(np.min(np.diff(r))) > eps


def braid_with_phase(traj, theta: float, tie_window: float = 1e-9) -> Braid:
    """Braid word of ``traj`` for a fixed projection phase ``theta``.

    Between samples each strand is moved linearly; every exchange of two
    neighbours in the projected real order emits ``sigma_k`` when the strand
    travelling right-to-left passes with larger imaginary part, ``sigma_k^-1``
    otherwise. Exchanges of disjoint pairs occurring within ``tie_window`` of
    each other are emitted in increasing position order so that words do not
    depend on rounding in symmetric configurations.
    """
    rot = complex(math.cos(theta), math.sin(theta))
    Z = np.asarray(traj.positions) * rot
    n = Z.shape[1]
    scale = 1.0 + float(np.max(np.abs(Z)))
    eps = 1e-12 * scale
    for z in Z:
        if not _check_separated(z, eps):
            raise PhaseDegeneracy(f"two strands share a projected real part (theta={theta})")
    order = list(np.argsort(Z[0].real, kind="stable"))
    pos_of = {s: p for p, s in enumerate(order)}
    word: list[int] = []
    for s in range(len(Z) - 1):
        z0, z1 = Z[s], Z[s + 1]
        events = _crossing_events(z0, z1, eps)
        events.sort()
        emitted: list[tuple[float, int]] = []
        for tau, a, b in events:
            pa, pb = pos_of[a], pos_of[b]
            if abs(pa - pb) != 1:
                raise PhaseDegeneracy("non-adjacent strands exchange; refine the trajectory")
            left, right = (a, b) if pa < pb else (b, a)
            k = min(pa, pb)
            zl = z0[left] + (z1[left] - z0[left]) * tau
            zr = z0[right] + (z1[right] - z0[right]) * tau
            if abs(zr.imag - zl.imag) <= eps:
                raise PhaseDegeneracy("strands collide in projection")
            sign = 1 if zr.imag > zl.imag else -1
            emitted.append((tau, sign * (k + 1)))
            order[k], order[k + 1] = right, left
            pos_of[left], pos_of[right] = k + 1, k
        # canonical order for (near-)simultaneous commuting exchanges
        changed = True
        while changed:
            changed = False
            for q in range(len(emitted) - 1):
                (t1, g1), (t2, g2) = emitted[q], emitted[q + 1]
                if abs(t1 - t2) < tie_window and abs(abs(g1) - abs(g2)) >= 2 and abs(g2) < abs(g1):
                    emitted[q], emitted[q + 1] = emitted[q + 1], emitted[q]
                    changed = True
        word.extend(g for _, g in emitted)
    return Braid(n, free_reduce(word))


def start_order_matches(traj, theta: float) -> bool:
    """Whether the projected order at the start equals the canonical order."""
    from .tracking import canonical_order

    rot = complex(math.cos(theta), math.sin(theta))
    z = np.asarray(traj.start) * rot
    return list(np.argsort(z.real, kind="stable")) == canonical_order(traj.start)


def choose_phase(trajectories: Sequence, seed: int = 0, base: Sequence = ()) -> float:
    """First phase candidate that separates every trajectory.

    Trajectories listed in ``base`` must additionally start in canonical order.
    """
    for theta in phase_candidates(seed):
        try:
            for traj in trajectories:
                braid_with_phase(traj, theta)
        except PhaseDegeneracy:
            continue
        if all(start_order_matches(t, theta) for t in base):
            return theta
    raise PhaseDegeneracy("no phase among the 64 candidates separates the strands")


def braid_from_trajectory(traj, theta: float | None = None, seed: int = 0) -> Braid:
    """Braid traced by a strand trajectory (phase chosen automatically if omitted)."""
    if theta is None:
        theta = choose_phase([traj], seed)
    return braid_with_phase(traj, theta)


__all__ = [
    "Braid",
    "FreeWord",
    "free_reduce",
    "identity",
    "compose",
    "conjugate",
    "permutation",
    "exponent_sum",
    "full_twist",
    "brieskorn_braid",
    "artin_action",
    "generator_images",
    "braids_equal",
    "format_free_word",
    "phase_candidates",
    "braid_with_phase",
    "braid_from_trajectory",
    "choose_phase",
    "start_order_matches",
]
