"""Curve corpus with independently derived invariants, plus shared oracles."""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass

import numpy as np

from kirbycurve.braid import braid_with_phase
from kirbycurve.cli import RunConfig, analyze
from kirbycurve.tracking import StrandTrajectory, TrackConfig


@dataclass(frozen=True)
class Curve:
    text: str
    one_minus_chi: int  # 1 - chi(C), derived by hand (see ``why``)
    components: int
    n: int
    N: int
    why: str


CORPUS = (
    Curve("x^2-y^2", 0, 2, 2, 1, "two lines meeting once: chi = 1 + 1 - 1"),
    Curve("x^2-y^3", 0, 1, 3, 1, "cusp, image of t -> (t^3, t^2): chi = 1"),
    Curve("x^3-y^3", 0, 3, 3, 1, "three concurrent lines: chi = 3 - 2"),
    Curve("x^2-y^5", 0, 1, 5, 1, "image of t -> (t^5, t^2): chi = 1"),
    Curve("x^3-y^4", 0, 1, 4, 1, "image of t -> (t^4, t^3): chi = 1"),
    Curve("(x+y)*(x-y)*(y-1)", 1, 3, 3, 3, "three lines, three nodes: chi = 3 - 3"),
    Curve("x^2+y^2-1", 1, 1, 2, 2, "conic minus two points at infinity: chi = 0"),
    Curve("x^3+y^3-1", 4, 1, 3, 3, "genus 1 minus 3 points: chi = 0 - 3"),
    Curve("x^4+y^4-1", 9, 1, 4, 4, "genus 3 minus 4 points: chi = -4 - 4"),
    Curve("x^3+y^3-3*x*y", 3, 1, 3, 4, "nodal cubic, 3 points at infinity: chi = 2 - 3 - 1"),
    Curve("y^2-x^2*(x+1)", 1, 1, 3, 2, "nodal cubic, 1 point at infinity: chi = 2 - 1 - 1"),
    Curve("x*y", 0, 2, 2, 1, "two lines meeting once: chi = 1"),
)

CORPUS_IDS = [c.text for c in CORPUS]


@functools.lru_cache(maxsize=None)
def analysis(text: str, seed: int = 0, track: TrackConfig = TrackConfig()):
    return analyze(RunConfig(curve=text, seed=seed, track=track))


def compression_braid(points, theta: float, samples: int = 400):
    """Braid of the isotopy squeezing points on a circle about 0 onto the arc |arg| <= pi/4.

    Arguments are taken in (-pi, pi] and scaled by 1/4, so no two points ever
    share an argument and no point crosses the negative real axis.
    """
    pts = np.asarray(points, dtype=complex)
    radius, angle = np.abs(pts), np.angle(pts)
    ts = np.linspace(0.0, 1.0, samples)
    pos = np.array([radius * np.exp(1j * angle * (1 - 0.75 * t)) for t in ts])
    return braid_with_phase(StrandTrajectory(ts, ts.astype(complex), pos), theta)


# --------------------------------------------------------------------------
# homomorphisms into S_3


S3 = tuple(itertools.permutations(range(3)))


def _mul(a, b):
    """``a`` then ``b`` acting on the right (any fixed convention works for counting)."""
    return tuple(b[a[i]] for i in range(3))


def _inv(a):
    out = [0] * 3
    for i, v in enumerate(a):
        out[v] = i
    return tuple(out)


IDENTITY = (0, 1, 2)


def evaluate(word, images):
    g = IDENTITY
    for letter in word:
        x = images[abs(letter) - 1]
        g = _mul(g, x if letter > 0 else _inv(x))
    return g


def count_homs_to_s3(rank: int, relators) -> int:
    """Tuples in S_3^rank killing every relator (letters are signed 1-based indices)."""
    rels = [tuple(r) for r in relators]
    return sum(
        all(evaluate(r, images) == IDENTITY for r in rels)
        for images in itertools.product(S3, repeat=rank)
    )


def torus_relator(p: int, q: int):
    """``a^p b^-q`` in generators a = 1, b = 2."""
    return (1,) * p + (-2,) * q


def commutator(a: int, b: int):
    return (a, b, -a, -b)
