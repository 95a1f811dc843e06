from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given, settings, strategies as st

from kirbycurve.curve import (
    BivariatePolynomial,
    GaussianRational,
    critical_values,
    discriminant,
    format_polynomial,
    genericity_check,
    is_transverse_at_infinity,
    make_generic,
    parse_polynomial,
    reducedness_check,
    shear,
    shear_ladder,
)
from kirbycurve.errors import (
    DiscriminantIdenticallyZero,
    GenericityFailure,
    NonReducedCurve,
    PolynomialSyntaxError,
    ZeroPolynomial,
)

X, Y = sympy.symbols("x y")


def terms(f):
    return {k: complex(v) for k, v in f.terms.items()}


class TestParse:
    def test_difference_of_squares(self):
        assert terms(parse_polynomial("x^2 - y^2")) == {(2, 0): 1, (0, 2): -1}

    def test_three_lines_matches_sympy_expansion(self):
        f = parse_polynomial("(x+y)*(x-y)*(y-1)")
        expected = sympy.Poly(sympy.expand((X + Y) * (X - Y) * (Y - 1)), X, Y)
        got = {(i, j): complex(c) for (i, j), c in f.terms.items()}
        assert got == {m: complex(c) for m, c in zip(expected.monoms(), expected.coeffs())}
        assert got[(0, 3)] == -1

    def test_fermat_cubic(self):
        assert terms(parse_polynomial("x^3 + y^3 - 1")) == {(3, 0): 1, (0, 3): 1, (0, 0): -1}

    def test_gaussian_and_rational_coefficients(self):
        f = parse_polynomial("(1/2 + 3*i)*x*y - 2/3")
        assert f.terms[(1, 1)] == GaussianRational(Fraction(1, 2), 3)
        assert f.terms[(0, 0)] == GaussianRational(Fraction(-2, 3))

    def test_double_star_power(self):
        assert parse_polynomial("x**3") == parse_polynomial("x^3")

    def test_degrees(self):
        f = parse_polynomial("x^4*y + y^2 - x")
        assert (f.degree, f.deg_y, f.deg_x) == (5, 2, 4)

    @pytest.mark.parametrize("text", ["x^2 - y^2", "(x+y)*(x-y)*(y-1)", "x^3 + y^3 - 1", "i*x^2 - 1/3*y + 7"])
    def test_printer_round_trip(self, text):
        f = parse_polynomial(text)
        assert parse_polynomial(format_polynomial(f)) == f

    def test_graded_lex_printing(self):
        assert format_polynomial(parse_polynomial("-1 + y^3 + x^3")) == "x^3 + y^3 - 1"

    @pytest.mark.parametrize("text, position", [("x + * y", 4), ("x^y", 2), ("(x + 1", 6), ("x $ y", 2), ("", 0)])
    def test_syntax_errors_carry_position(self, text, position):
        with pytest.raises(PolynomialSyntaxError) as info:
            parse_polynomial(text)
        assert info.value.position == position
        assert isinstance(info.value, SyntaxError)

    def test_zero_polynomial(self):
        with pytest.raises(ZeroPolynomial):
            parse_polynomial("x*y - y*x")


class TestAlgebra:
    @pytest.mark.parametrize("text, expected", [("x^2-y^2", True), ("(x-y)^2", False), ("x^3+y^3-1", True),
                                                ("(x^2+y)^2*(x-1)", False)])
    def test_reducedness(self, text, expected):
        assert reducedness_check(parse_polynomial(text)) is expected

    def test_reducedness_agrees_with_sympy_sqf(self):
        for text in ["x^2*y - y^3", "(x+y)^3 - x", "(x*y-1)^2*(x+2)"]:
            f = parse_polynomial(text)
            sq = sympy.sqf_list(f.to_sympy())[1]
            assert reducedness_check(f) == all(mult == 1 for _, mult in sq)

    def test_shear_examples(self):
        assert shear(parse_polynomial("x*y"), 1) == parse_polynomial("x*y + y^2")
        f = parse_polynomial("x^3 + y^3 - 1")
        assert shear(f, 0) == f
        assert shear(parse_polynomial("x^2-y^2"), 2) == parse_polynomial("x^2 + 4*x*y + 3*y^2")

    @settings(max_examples=40, deadline=None)
    @given(st.dictionaries(st.tuples(st.integers(0, 3), st.integers(0, 3)), st.integers(-5, 5), min_size=1),
           st.fractions(min_value=-3, max_value=3, max_denominator=4))
    def test_shear_inverts_exactly(self, coeffs, t):
        f = BivariatePolynomial(coeffs)
        assert shear(shear(f, t), -t) == f
        if not f.is_zero():
            assert shear(f, t).degree == f.degree

    def test_shear_ladder_order(self):
        assert list(shear_ladder(6)) == [1, -1, 2, -2, 3, -3]

    def test_discriminant_of_node(self):
        d = discriminant(parse_polynomial("x^2-y^2"))
        assert d.degree() == 2 and d.eval(0) == 0 and d.eval(1) != 0

    def test_transversality_at_infinity(self):
        assert is_transverse_at_infinity(parse_polynomial("x^3+y^3-1"))
        assert is_transverse_at_infinity(parse_polynomial("(x+y)*(x-y)*(y-1)"))
        assert not is_transverse_at_infinity(parse_polynomial("x^2-y^3"))


class TestCriticalValues:
    def test_node(self):
        assert critical_values(parse_polynomial("x^2-y^2")).points == (0j,)

    def test_three_lines(self):
        X_ = critical_values(parse_polynomial("(x+y)*(x-y)*(y-1)"))
        assert sorted(p.real for p in X_.points) == pytest.approx([-1, 0, 1], abs=1e-12)

    def test_fermat_cube_roots(self):
        import cmath

        X_ = critical_values(parse_polynomial("x^3+y^3-1"))
        expected = [cmath.exp(2j * cmath.pi * k / 3) for k in range(3)]
        assert X_.N == 3
        for z in expected:
            assert min(abs(z - p) for p in X_.points) < 1e-12
        assert all(r < 1e-10 for r in X_.radii)

    def test_discriminant_small_at_points_and_not_elsewhere(self):
        f = parse_polynomial("x^3+y^3-3*x*y")
        X_ = critical_values(f)
        d = discriminant(f)
        coeffs = [complex(c) for c in d.all_coeffs()]
        scale = max(abs(c) for c in coeffs)
        for p in X_.points:
            assert abs(np.polyval(coeffs, p)) < 1e-9 * scale
        assert d.eval(sympy.Rational(1, 3)) != 0

    def test_tighter_tolerance_is_stable(self):
        f = parse_polynomial("x^3+y^3-3*x*y")
        a, b = critical_values(f), critical_values(f, tol=1e-11)
        assert a.N == b.N
        for p, q, r in zip(a.points, b.points, a.radii):
            assert abs(p - q) <= max(r, 1e-15)

    def test_vertical_component_makes_discriminant_vanish(self):
        with pytest.raises(DiscriminantIdenticallyZero):
            critical_values(parse_polynomial("(y-x)^2*(y+1)"))

    def test_safety_radii(self):
        X_ = critical_values(parse_polynomial("(x+y)*(x-y)*(y-1)"))
        assert X_.safety_radii() == pytest.approx((0.25, 0.25, 0.25))
        assert critical_values(parse_polynomial("x^2-y^2")).safety_radii() == (0.25,)


class TestGenericity:
    def test_node_passes(self):
        report = genericity_check(parse_polynomial("x^2-y^2"))
        assert report.passed and report.cluster_sizes == (2,)

    def test_vertical_line_fails_a(self):
        report = genericity_check(parse_polynomial("x*y"))
        assert not report.leading_coefficient_ok and not report.passed

    def test_two_nodes_in_one_fiber_fail_c(self):
        report = genericity_check(parse_polynomial("(y^2-x^2)*((y-1)^2-x^2)"))
        assert report.leading_coefficient_ok and not report.single_cluster_ok

    def test_tangent_parabolas_need_a_shear(self):
        f = parse_polynomial("(y-x^2)*(y+x^2)")
        assert not genericity_check(f).leading_coefficient_ok  # deg_y 2 < degree 4
        g, t, report, _ = make_generic(f)
        assert t != 0 and report.passed

    def test_fermat_reports_higher_order_tangency(self):
        report = genericity_check(parse_polynomial("x^3+y^3-1"))
        assert report.passed and report.cluster_sizes == (3, 3, 3)
        assert report.simple_tangency == (False, False, False)

    def test_make_generic_shears_vertical_lines(self):
        g, t, report, X_ = make_generic(parse_polynomial("x*y"))
        assert t == 1 and report.passed and g == parse_polynomial("x*y + y^2")

    def test_make_generic_respects_no_shear(self):
        with pytest.raises(GenericityFailure):
            make_generic(parse_polynomial("x*y"), allow_shear=False)

    def test_make_generic_rejects_non_reduced(self):
        with pytest.raises(NonReducedCurve):
            make_generic(parse_polynomial("(x-y)^2"))
