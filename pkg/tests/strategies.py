"""Hypothesis strategies for braid words."""

from hypothesis import strategies as st

from kirbycurve.braid import Braid, FreeWord


@st.composite
def braids(draw, n=None, max_len=50, min_n=2, max_n=6):
    n = n or draw(st.integers(min_n, max_n))
    letters = st.integers(1, n - 1).flatmap(lambda k: st.sampled_from((k, -k)))
    return Braid(n, tuple(draw(st.lists(letters, max_size=max_len))))


@st.composite
def braid_pairs(draw, max_len=50):
    a = draw(braids(max_len=max_len))
    b = draw(braids(n=a.n, max_len=max_len))
    return a, b


@st.composite
def free_words(draw, n, max_len=10):
    letters = st.integers(1, n).flatmap(lambda k: st.sampled_from((k, -k)))
    return FreeWord(n, tuple(draw(st.lists(letters, max_size=max_len))))


def realize(braid: Braid, theta: float, samples: int = 8):
    """A strand trajectory whose braid under phase ``theta`` is ``braid`` letter for letter.

    In the projected frame the strands sit at 1..n on the real axis; a letter
    ``+-k`` turns lanes k and k+1 half way around their midpoint, counterclockwise
    for a positive letter (the right strand passes above). An odd number of
    intervals keeps the pair off a common vertical at every sample.
    """
    import math

    import numpy as np

    from kirbycurve.tracking import StrandTrajectory

    z = np.arange(1, braid.n + 1, dtype=complex)
    lane = list(range(braid.n))  # lane -> strand (column)
    frames = [z.copy()]
    for a in braid.word:
        k, sign = abs(a) - 1, 1 if a > 0 else -1
        u, v = lane[k], lane[k + 1]
        mid = (z[u] + z[v]) / 2
        for t in np.linspace(0, 1, samples)[1:-1]:
            turn = np.exp(1j * sign * math.pi * t)
            step = z.copy()
            step[u], step[v] = mid + (z[u] - mid) * turn, mid + (z[v] - mid) * turn
            frames.append(step)
        z[u], z[v] = z[v], z[u]
        lane[k], lane[k + 1] = v, u
        frames.append(z.copy())
    pos = np.array(frames) / complex(math.cos(theta), math.sin(theta))
    ts = np.linspace(0, 1, len(frames))
    return StrandTrajectory(ts, ts.astype(complex), pos)
