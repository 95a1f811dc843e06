import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kirbycurve.braid import (
    Braid,
    FreeWord,
    artin_action,
    braid_from_trajectory,
    braid_with_phase,
    braids_equal,
    brieskorn_braid,
    choose_phase,
    compose,
    conjugate,
    exponent_sum,
    format_free_word,
    free_reduce,
    full_twist,
    identity,
    permutation,
    phase_candidates,
)
from kirbycurve.curve import parse_polynomial
from kirbycurve.errors import ActionOverflow, PhaseDegeneracy, RankMismatch, StrandMismatch
from kirbycurve.tracking import PathSpec, StrandTrajectory, fiber_roots, track

from strategies import braid_pairs, braids, free_words

s1, s2 = Braid(3, (1,)), Braid(3, (2,))


class TestWords:
    def test_compose_and_normalize(self):
        assert compose(Braid(2, (1,)), Braid(2, (-1,))).normalize().word == ()
        assert compose(s1, s2).word == (1, 2)
        b = brieskorn_braid(2, 3)
        assert compose(b, b.inverse()).normalize() == identity(3)

    def test_compose_never_reduces(self):
        assert compose(Braid(2, (1,)), Braid(2, (-1,))).word == (1, -1)

    def test_strand_mismatch(self):
        with pytest.raises(StrandMismatch):
            compose(Braid(2, (1,)), s1)

    def test_range_checked(self):
        with pytest.raises(ValueError):
            Braid(3, (3,))
        with pytest.raises(ValueError):
            Braid(3, (0,))

    def test_text_format(self):
        b = Braid(3, (1, 2, 1, -2))
        assert str(b) == "braid n=3: 1,2,1,-2"
        assert Braid.parse(str(b)) == b
        assert Braid.parse("1,2,1,-2", n=3) == b
        assert Braid.parse("braid n=2: ") == identity(2)

    def test_power(self):
        assert (s1 * s2) ** 2 == brieskorn_braid(2, 3)
        assert (s1 ** -2).word == (-1, -1)

    def test_free_reduce(self):
        assert free_reduce([1, 2, -2, -1, 3]) == (3,)


class TestPermutation:
    def test_examples(self):
        assert permutation(Braid(2, (1, 1))) == (1, 2)
        p = permutation(s1 * s2)
        assert sorted(p) == [1, 2, 3] and all(p[k] != k + 1 for k in range(3))
        assert permutation(full_twist(3)) == (1, 2, 3)

    @pytest.mark.parametrize("p, q", [(2, 3), (3, 4), (2, 5), (4, 6)])
    def test_brieskorn_is_power_of_cycle(self, p, q):
        cycle = permutation(brieskorn_braid(1, q))
        power = list(range(1, q + 1))
        for _ in range(p):
            power = [cycle[v - 1] for v in power]
        assert permutation(brieskorn_braid(p, q)) == tuple(power)


class TestCounts:
    def test_exponent_sums(self):
        assert exponent_sum(Braid(2, (1, 1))) == 2
        assert exponent_sum(brieskorn_braid(3, 4)) == 9
        for n in range(2, 7):
            assert exponent_sum(full_twist(n)) == n * (n - 1)

    def test_full_twist(self):
        assert full_twist(2) == Braid(2, (1, 1))
        with pytest.raises(ValueError):
            full_twist(1)


class TestArtinAction:
    def test_generator_convention(self):
        e1, e2 = FreeWord.generator(2, 1), FreeWord.generator(2, 2)
        assert artin_action(Braid(2, (1,)), e1).letters == (1, 2, -1)
        assert artin_action(Braid(2, (1,)), e2).letters == (1,)
        assert artin_action(Braid(2, (1, 1)), e2).letters == (1, 2, -1)

    def test_inverse_letter(self):
        e = [FreeWord.generator(2, j) for j in (1, 2)]
        assert artin_action(Braid(2, (-1,)), e[0]).letters == (2,)
        assert artin_action(Braid(2, (-1,)), e[1]).letters == (-2, 1, 2)

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_full_twist_conjugates_by_product(self, n):
        prod = FreeWord.product_of_generators(n)
        for j in range(1, n + 1):
            e = FreeWord.generator(n, j)
            assert artin_action(full_twist(n), e) == prod * e * prod.inverse()

    def test_rank_mismatch(self):
        with pytest.raises(RankMismatch):
            artin_action(s1, FreeWord.generator(2, 1))

    def test_format(self):
        assert format_free_word((1, -2)) == "e1 e2^-1"
        assert str(FreeWord(2, (1, -1))) == "1"

    def test_overflow_cap(self, monkeypatch):
        import kirbycurve.braid as braid_module

        monkeypatch.setattr(braid_module, "ACTION_LENGTH_CAP", 50)
        with pytest.raises(ActionOverflow):
            artin_action(Braid(3, (1, -2) * 20), FreeWord.generator(3, 1))

    @settings(max_examples=200, deadline=None, derandomize=True)
    @given(braid_pairs(max_len=20), st.data())
    def test_action_composition_law(self, pair, data):
        a, b = pair
        w = data.draw(free_words(a.n))
        assert artin_action(compose(a, b), w) == artin_action(b, artin_action(a, w))

    @settings(max_examples=200, deadline=None, derandomize=True)
    @given(braids(max_len=30))
    def test_product_of_generators_fixed(self, b):
        prod = FreeWord.product_of_generators(b.n)
        assert artin_action(b, prod) == prod


class TestEquality:
    def test_examples(self):
        assert braids_equal(s1 * s2 * s1, s2 * s1 * s2)
        assert not braids_equal(Braid(2, (1,)), Braid(2, (-1,)))
        assert braids_equal(brieskorn_braid(2, 3), Braid(3, (1, 2, 1, 2)))

    def test_far_commutation(self):
        assert braids_equal(Braid(4, (1, 3)), Braid(4, (3, 1)))
        assert not braids_equal(Braid(4, (1, 2)), Braid(4, (2, 1)))

    def test_full_twist_is_central(self):
        for k in (1, 2, 3):
            g = Braid(4, (k,))
            assert braids_equal(g * full_twist(4), full_twist(4) * g)

    @settings(max_examples=200, deadline=None, derandomize=True)
    @given(braid_pairs(max_len=12))
    def test_consistent_with_invariants(self, pair):
        a, b = pair
        c = conjugate(b, a)  # a b a^-1
        assert braids_equal(compose(compose(a.inverse(), c), a), b)
        if braids_equal(a, b):
            assert permutation(a) == permutation(b) and exponent_sum(a) == exponent_sum(b)

    @settings(max_examples=100, deadline=None, derandomize=True)
    @given(braids(max_len=25))
    def test_inverse(self, b):
        assert braids_equal(compose(b, b.inverse()), identity(b.n))
        assert braids_equal(b.inverse().inverse(), b)


def straight_trajectory(points_from, points_to, samples=50):
    ts = np.linspace(0, 1, samples)
    a, b = np.asarray(points_from, complex), np.asarray(points_to, complex)
    pos = np.array([a + (b - a) * t for t in ts])
    return StrandTrajectory(ts, ts.astype(complex), pos)


def half_turn(samples=200, ccw=True):
    ts = np.linspace(0, 1, samples)
    sign = 1 if ccw else -1
    pos = np.array([[-np.exp(1j * sign * math.pi * t), np.exp(1j * sign * math.pi * t)] for t in ts])
    return StrandTrajectory(ts, ts.astype(complex), pos)


class TestExtraction:
    def test_constant_is_empty(self):
        tr = StrandTrajectory.constant([1j, 0, -1j])
        assert braid_from_trajectory(tr) == identity(3)

    def test_ccw_half_turn_is_positive(self):
        assert braid_from_trajectory(half_turn()).word == (1,)
        assert braid_from_trajectory(half_turn(ccw=False)).word == (-1,)

    def test_phase_candidates_near_vertical(self):
        thetas = phase_candidates(0)
        assert len(thetas) == 64 and len(set(thetas)) == 64
        assert all(math.pi / 2 - 2e-3 < t < math.pi / 2 for t in thetas)
        assert phase_candidates(1)[0] == thetas[1]

    def test_phase_reproduces_canonical_order(self):
        tr = StrandTrajectory.constant([1 + 1j, -1 + 1j, 0.5])
        theta = phase_candidates(0)[0]
        z = tr.start * complex(math.cos(theta), math.sin(theta))
        assert list(np.argsort(z.real)) == [1, 0, 2]

    def test_degenerate_phase(self):
        # two strands on top of each other after every phase
        tr = StrandTrajectory.constant([0, 0])
        with pytest.raises(PhaseDegeneracy):
            braid_from_trajectory(tr)

    def test_node_loop_gives_sigma_squared(self):
        f = parse_polynomial("x^2-y^2")
        tr = track(f, PathSpec.circle_through(0, 0.25), fiber_roots(f, 0.25))
        assert braid_from_trajectory(tr).word == (1, 1)

    def test_fermat_loop_is_rotation_braid(self):
        f = parse_polynomial("x^3+y^3-1")
        tr = track(f, PathSpec.circle_through(1, 1.25), fiber_roots(f, 1.25))
        b = braid_from_trajectory(tr)
        # a 2 pi / 3 turn of three points: a conjugate of sigma_1 sigma_2, cube = full twist
        assert exponent_sum(b) == 2
        assert braids_equal(b ** 3, full_twist(3))

    def test_reversal_gives_inverse(self):
        f = parse_polynomial("x^3+y^3-1")
        tr = track(f, PathSpec.circle_through(1, 1.25), fiber_roots(f, 1.25))
        theta = choose_phase([tr])
        assert braid_with_phase(tr.reversed(), theta) == braid_with_phase(tr, theta).inverse()

    @pytest.mark.parametrize("split", [0.2, 0.5, 0.77])
    def test_concatenation(self, split):
        f = parse_polynomial("x^3+y^3-1")
        full = PathSpec.circle_through(1, 1.25)
        start = fiber_roots(f, 1.25)
        mid = 1 + 0.25 * cmath.exp(2j * math.pi * split)
        first = track(f, PathSpec.arc(1, 0.25, 0, 2 * math.pi * split), start)
        second = track(f, PathSpec.arc(1, 0.25, 2 * math.pi * split, 2 * math.pi * (1 - split)), first.end)
        assert abs(first.end[0] - fiber_roots(f, mid)[np.argmin(abs(fiber_roots(f, mid) - first.end[0]))]) < 1e-9
        theta = choose_phase([first, second, first.then(second)])
        whole = braid_with_phase(first.then(second), theta)
        parts = compose(braid_with_phase(first, theta), braid_with_phase(second, theta))
        assert whole.normalize() == parts.normalize()
        assert braids_equal(whole, braid_with_phase(track(f, full, start), theta))

    def test_simultaneous_commuting_exchanges_are_ordered(self):
        # strands (1,2) and (3,4) make ccw half turns at the same instants
        ts = np.linspace(0, 1, 101)
        rot = np.exp(1j * math.pi * ts)
        pos = np.stack([-2 - rot, -2 + rot, 2 - rot, 2 + rot], axis=1)
        b = braid_with_phase(StrandTrajectory(ts, ts.astype(complex), pos), phase_candidates(0)[0])
        assert b.word == (1, 3)
