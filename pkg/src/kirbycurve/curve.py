"""Exact bivariate polynomials over the Gaussian rationals.

Everything here is exact except the final extraction of discriminant roots,
which goes through the univariate solver in :mod:`kirbycurve.tracking` and is
then polished at high precision against the exact coefficients.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

import mpmath
import numpy as np
import sympy

from .errors import (
    DiscriminantIdenticallyZero,
    GenericityFailure,
    NonReducedCurve,
    PolynomialSyntaxError,
    ZeroPolynomial,
)

_X, _Y = sympy.symbols("x y")


class GaussianRational:
    """Exact complex number ``re + im*i`` with rational parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", Fraction(re))
        object.__setattr__(self, "im", Fraction(im))

    def __setattr__(self, name, value):
        raise AttributeError("GaussianRational is immutable")

    @classmethod
    def coerce(cls, value) -> "GaussianRational":
        if isinstance(value, GaussianRational):
            return value
        if isinstance(value, complex):
            return cls(Fraction(value.real), Fraction(value.imag))
        return cls(value)

    def __add__(self, other):
        other = GaussianRational.coerce(other)
        return GaussianRational(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, other):
        return self + (-GaussianRational.coerce(other))

    def __rsub__(self, other):
        return GaussianRational.coerce(other) - self

    def __mul__(self, other):
        o = GaussianRational.coerce(other)
        return GaussianRational(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = GaussianRational.coerce(other)
        norm = o.re * o.re + o.im * o.im
        if norm == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        return self * GaussianRational(o.re / norm, -o.im / norm)

    def __pow__(self, k: int):
        result = GaussianRational(1)
        base = self
        if k < 0:
            base, k = GaussianRational(1) / base, -k
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        try:
            o = GaussianRational.coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __abs__(self):
        return abs(complex(self))

    @property
    def is_real(self) -> bool:
        return self.im == 0

    def to_sympy(self):
        return sympy.Rational(self.re.numerator, self.re.denominator) + sympy.I * sympy.Rational(
            self.im.numerator, self.im.denominator
        )

    def to_mpc(self):
        return mpmath.mpc(
            mpmath.mpf(self.re.numerator) / self.re.denominator,
            mpmath.mpf(self.im.numerator) / self.im.denominator,
        )

    def __repr__(self):
        return f"GaussianRational({self.re!s}, {self.im!s})"

    def __str__(self):
        if self.is_real:
            return str(self.re)
        if self.re == 0:
            return f"{_imag_str(self.im)}"
        sign = "-" if self.im < 0 else "+"
        return f"{self.re} {sign} {_imag_str(abs(self.im))}"


def _imag_str(v: Fraction) -> str:
    if v == 1:
        return "i"
    if v == -1:
        return "-i"
    return f"{v}*i"


ONE = GaussianRational(1)
ZERO = GaussianRational(0)
I_UNIT = GaussianRational(0, 1)


def _from_sympy_coeff(c) -> GaussianRational:
    c = sympy.nsimplify(c) if not isinstance(c, sympy.Basic) else c
    re_part, im_part = sympy.re(c), sympy.im(c)
    return GaussianRational(
        Fraction(int(re_part.p), int(re_part.q)), Fraction(int(im_part.p), int(im_part.q))
    )


class BivariatePolynomial:
    """Immutable polynomial ``sum a_ij x^i y^j`` with Gaussian-rational coefficients.

    ``terms`` maps ``(deg_x, deg_y)`` to a nonzero coefficient.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[tuple[int, int], object] | None = None):
        clean = {}
        for (i, j), c in (terms or {}).items():
            if i < 0 or j < 0:
                raise ValueError(f"negative exponent in monomial {(i, j)}")
            c = GaussianRational.coerce(c)
            if c:
                clean[(int(i), int(j))] = c
        self._terms = MappingProxyType(clean)
        self._hash = None

    # construction helpers
    @classmethod
    def constant(cls, c) -> "BivariatePolynomial":
        return cls({(0, 0): c})

    @classmethod
    def x(cls) -> "BivariatePolynomial":
        return cls({(1, 0): 1})

    @classmethod
    def y(cls) -> "BivariatePolynomial":
        return cls({(0, 1): 1})

    @classmethod
    def from_sympy(cls, expr) -> "BivariatePolynomial":
        poly = sympy.Poly(sympy.expand(expr), _X, _Y, domain=sympy.QQ_I)
        return cls({m: _from_sympy_coeff(c) for m, c in poly.terms()})

    @property
    def terms(self) -> Mapping[tuple[int, int], GaussianRational]:
        return self._terms

    def is_zero(self) -> bool:
        return not self._terms

    @property
    def degree(self) -> int:
        """Total degree ``n``; -1 for the zero polynomial."""
        return max((i + j for i, j in self._terms), default=-1)

    n = degree

    @property
    def deg_y(self) -> int:
        return max((j for _, j in self._terms), default=-1)

    @property
    def deg_x(self) -> int:
        return max((i for i, _ in self._terms), default=-1)

    # ring operations
    def __add__(self, other):
        other = _as_poly(other)
        out = dict(self._terms)
        for m, c in other._terms.items():
            out[m] = out.get(m, ZERO) + c
        return BivariatePolynomial(out)

    __radd__ = __add__

    def __neg__(self):
        return BivariatePolynomial({m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-_as_poly(other))

    def __rsub__(self, other):
        return _as_poly(other) - self

    def __mul__(self, other):
        other = _as_poly(other)
        out: dict[tuple[int, int], GaussianRational] = {}
        for (i1, j1), c1 in self._terms.items():
            for (i2, j2), c2 in other._terms.items():
                key = (i1 + i2, j1 + j2)
                out[key] = out.get(key, ZERO) + c1 * c2
        return BivariatePolynomial(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("polynomial powers must be non-negative integers")
        result = BivariatePolynomial.constant(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, BivariatePolynomial):
            return dict(self._terms) == dict(other._terms)
        try:
            return self == _as_poly(other)
        except TypeError:
            return NotImplemented

    def __hash__(self):
        if self._hash is None:
            object.__setattr__(self, "_hash", hash(frozenset(self._terms.items())))
        return self._hash

    def diff_x(self) -> "BivariatePolynomial":
        return BivariatePolynomial({(i - 1, j): c * i for (i, j), c in self._terms.items() if i})

    def diff_y(self) -> "BivariatePolynomial":
        return BivariatePolynomial({(i, j - 1): c * j for (i, j), c in self._terms.items() if j})

    def leading_y_coefficient(self) -> "BivariatePolynomial":
        """Coefficient of ``y^deg_y`` as a polynomial in x."""
        d = self.deg_y
        return BivariatePolynomial({(i, 0): c for (i, j), c in self._terms.items() if j == d})

    def top_form(self) -> "BivariatePolynomial":
        d = self.degree
        return BivariatePolynomial({m: c for m, c in self._terms.items() if sum(m) == d})

    def evaluate(self, x: complex, y: complex) -> complex:
        return sum(complex(c) * x**i * y**j for (i, j), c in self._terms.items())

    def coefficient_array(self) -> np.ndarray:
        """Dense complex array ``A[i, j]`` holding the coefficient of ``x^i y^j``."""
        arr = np.zeros((max(self.deg_x, 0) + 1, max(self.deg_y, 0) + 1), dtype=complex)
        for (i, j), c in self._terms.items():
            arr[i, j] = complex(c)
        return arr

    def to_sympy(self):
        return sympy.Add(*[c.to_sympy() * _X**i * _Y**j for (i, j), c in self._terms.items()])

    def sympy_poly(self, *gens) -> sympy.Poly:
        gens = gens or (_X, _Y)
        return sympy.Poly(self.to_sympy(), *gens, domain=sympy.QQ_I)

    def sorted_terms(self) -> list[tuple[tuple[int, int], GaussianRational]]:
        """Terms in graded-lex order: total degree descending, then x-degree descending."""
        return sorted(self._terms.items(), key=lambda t: (-(t[0][0] + t[0][1]), -t[0][0]))

    def __str__(self):
        return format_polynomial(self)

    def __repr__(self):
        return f"BivariatePolynomial({format_polynomial(self)!r})"


def _as_poly(value) -> BivariatePolynomial:
    if isinstance(value, BivariatePolynomial):
        return value
    if isinstance(value, (int, Fraction, GaussianRational, complex)):
        return BivariatePolynomial.constant(value)
    raise TypeError(f"cannot interpret {value!r} as a polynomial")


def _monomial_str(i: int, j: int) -> str:
    parts = []
    for var, e in (("x", i), ("y", j)):
        if e == 1:
            parts.append(var)
        elif e > 1:
            parts.append(f"{var}^{e}")
    return "*".join(parts)


def format_polynomial(f: BivariatePolynomial) -> str:
    """Canonical printer; the output parses back to the same polynomial."""
    if f.is_zero():
        return "0"
    pieces: list[str] = []
    for (i, j), c in f.sorted_terms():
        mono = _monomial_str(i, j)
        if c.is_real:
            negative = c.re < 0
            mag = abs(c.re)
            if mono:
                body = mono if mag == 1 else f"{mag}*{mono}"
            else:
                body = str(mag)
        else:
            negative = False
            body = f"({c})" + (f"*{mono}" if mono else "")
        if not pieces:
            pieces.append(f"-{body}" if negative else body)
        else:
            pieces.append(f"{'-' if negative else '+'} {body}")
    return " ".join(pieces)


# --------------------------------------------------------------------------
# parser

_TOKEN = re.compile(r"\s*(?:(\d+)|(\*\*|[-+*^()/])|([xyi]))")


def _tokenize(text: str):
    pos = 0
    tokens = []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            start = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise PolynomialSyntaxError(f"unexpected character {text[start]!r}", text, start)
        start = m.start(m.lastindex)
        if m.group(1):
            tokens.append(("num", int(m.group(1)), start))
        elif m.group(2):
            op = "^" if m.group(2) == "**" else m.group(2)
            tokens.append(("op", op, start))
        else:
            tokens.append(("var", m.group(3), start))
        pos = m.end()
    tokens.append(("end", None, len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def error(self, message, tok=None):
        tok = tok or self.peek()
        return PolynomialSyntaxError(message, self.text, tok[2])

    def parse(self) -> BivariatePolynomial:
        if self.peek()[0] == "end":
            raise self.error("empty expression")
        value = self.expr()
        if self.peek()[0] != "end":
            raise self.error(f"unexpected token {self.peek()[1]!r}")
        return value

    def expr(self):
        sign = 1
        if self.peek()[:2] in (("op", "-"), ("op", "+")):
            sign = -1 if self.take()[1] == "-" else 1
        value = self.term()
        if sign < 0:
            value = -value
        while self.peek()[:2] in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self):
        value = self.factor()
        while self.peek()[:2] == ("op", "*"):
            self.take()
            value = value * self.factor()
        return value

    def factor(self):
        base = self.base()
        if self.peek()[:2] == ("op", "^"):
            self.take()
            tok = self.take()
            if tok[0] != "num":
                raise self.error("exponent must be a non-negative integer", tok)
            base = base**tok[1]
        return base

    def base(self):
        tok = self.take()
        kind, value, _ = tok
        if kind == "num":
            num = Fraction(value)
            if self.peek()[:2] == ("op", "/"):
                self.take()
                den = self.take()
                if den[0] != "num":
                    raise self.error("expected integer denominator", den)
                if den[1] == 0:
                    raise self.error("zero denominator", den)
                num = Fraction(value, den[1])
            return BivariatePolynomial.constant(num)
        if kind == "var":
            if value == "x":
                return BivariatePolynomial.x()
            if value == "y":
                return BivariatePolynomial.y()
            return BivariatePolynomial.constant(I_UNIT)
        if (kind, value) == ("op", "("):
            inner = self.expr()
            close = self.take()
            if close[:2] != ("op", ")"):
                raise self.error("expected ')'", close)
            return inner
        if kind == "end":
            raise self.error("unexpected end of input", tok)
        raise self.error(f"unexpected token {value!r}", tok)


def parse_polynomial(text: str) -> BivariatePolynomial:
    """Parse ``text`` (variables x, y, imaginary unit i) into canonical form.

    >>> str(parse_polynomial("(x+y)*(x-y)"))
    'x^2 - y^2'
    """
    f = _Parser(text).parse()
    if f.is_zero():
        raise ZeroPolynomial(f"{text!r} expands to the zero polynomial")
    return f


# --------------------------------------------------------------------------
# algebra


def shear(f: BivariatePolynomial, t) -> BivariatePolynomial:
    """Return ``f(x + t*y, y)``."""
    t = Fraction(t)
    if t == 0:
        return f
    sub = BivariatePolynomial.x() + BivariatePolynomial.y() * t
    out = BivariatePolynomial()
    y = BivariatePolynomial.y()
    for (i, j), c in f.terms.items():
        out = out + (sub**i) * (y**j) * c
    return out


def reducedness_check(f: BivariatePolynomial) -> bool:
    """True iff f is squarefree, i.e. gcd(f, f_x, f_y) is a constant."""
    if f.is_zero():
        raise ZeroPolynomial("reducedness of the zero polynomial is undefined")
    P = f.sympy_poly()
    g = P.gcd(P.diff(_X)).gcd(P.diff(_Y))
    return g.total_degree() == 0


def discriminant(f: BivariatePolynomial) -> sympy.Poly:
    """Res_y(f, df/dy) as a univariate polynomial in x over QQ(i)."""
    F = sympy.Poly(f.to_sympy(), _Y, _X, domain=sympy.QQ_I)
    res = F.resultant(F.diff(_Y))
    res_expr = res.as_expr() if isinstance(res, sympy.Poly) else res
    return sympy.Poly(res_expr, _X, domain=sympy.QQ_I)


def is_transverse_at_infinity(f: BivariatePolynomial) -> bool:
    """True iff the top-degree form is squarefree and the vertical direction is not on C."""
    top = f.top_form()
    if top.deg_y != f.degree:
        return False
    P = sympy.Poly(top.to_sympy().subs(_X, 1), _Y, domain=sympy.QQ_I)
    return P.degree() == f.degree and P.gcd(P.diff(_Y)).degree() == 0


@dataclass(frozen=True)
class CriticalSet:
    """Distinct roots of the discriminant with certified error radii.

    ``discriminant`` keeps the exact squarefree discriminant (coefficients in
    descending degree) so the points can be refined to any precision later.
    """

    points: tuple[complex, ...]
    radii: tuple[float, ...]
    discriminant: tuple[GaussianRational, ...] = field(default=(), repr=False, compare=False)

    @property
    def N(self) -> int:
        return len(self.points)

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def diameter(self) -> float:
        pts = self.points
        return max((abs(a - b) for a in pts for b in pts), default=0.0)

    def safety_radii(self, isolated: float = 0.25) -> tuple[float, ...]:
        """Quarter of the distance to the nearest other critical value.

        A lone critical value has nothing to measure against and gets ``isolated``.
        """
        out = []
        for k, p in enumerate(self.points):
            others = [abs(p - q) for m, q in enumerate(self.points) if m != k]
            out.append(0.25 * min(others) if others else isolated)
        return tuple(out)

    def refined(self, index: int, digits: int = 60):
        """The index-th point as an mpmath complex with ``digits`` significant digits."""
        coeffs = self.discriminant
        if not coeffs:
            return mpmath.mpc(self.points[index])
        with mpmath.workdps(digits + 10):
            cs = [c.to_mpc() for c in coeffs]
            dcs = [c * (len(cs) - 1 - k) for k, c in enumerate(cs[:-1])]
            z = mpmath.mpc(self.points[index])
            for _ in range(200):
                step = mpmath.polyval(cs, z) / mpmath.polyval(dcs, z)
                z -= step
                if abs(step) <= mpmath.mpf(10) ** (-digits - 5) * (1 + abs(z)):
                    break
            return +z


def _polish(coeffs: Sequence[GaussianRational], z: complex, digits: int = 40):
    """Newton-polish a simple root at high precision; return (root, certified radius)."""
    d = len(coeffs) - 1
    with mpmath.workdps(digits):
        cs = [c.to_mpc() for c in coeffs]
        dcs = [c * (d - k) for k, c in enumerate(cs[:-1])]
        w = mpmath.mpc(z)
        for _ in range(60):
            dp = mpmath.polyval(dcs, w)
            if dp == 0:
                break
            step = mpmath.polyval(cs, w) / dp
            w -= step
            if abs(step) < mpmath.mpf(10) ** (-digits + 5) * (1 + abs(w)):
                break
        p = mpmath.polyval(cs, w)
        dp = mpmath.polyval(dcs, w)
        radius = float(d * abs(p) / abs(dp)) if dp != 0 else float("inf")
        rounded = complex(w)
        # rounding to double adds at most one ulp per component
        radius += abs(rounded) * 2.3e-16 + 1e-300
    return rounded, radius


def critical_values(f: BivariatePolynomial, tol: float = 1e-10) -> CriticalSet:
    """Distinct roots of Disc_y(f), each certified to within ``tol``."""
    from .tracking import roots_univariate

    disc = discriminant(f)
    if disc.is_zero:
        raise DiscriminantIdenticallyZero(
            "Res_y(f, f_y) vanishes identically: f is not reduced or has a vertical component"
        )
    sqf = disc.sqf_part()
    if sqf.degree() <= 0:
        return CriticalSet((), (), ())
    exact = tuple(_from_sympy_coeff(c) for c in sqf.all_coeffs())
    scale = max(abs(complex(c)) for c in exact)
    numeric = np.array([complex(c) / scale for c in exact], dtype=complex)
    approx = roots_univariate(numeric, tol=max(tol, 1e-6), certify=False)

    points, radii = [], []
    for z in approx:
        w, r = _polish(exact, z)
        if r >= tol:
            w, r = _polish(exact, w, digits=80)
        points.append(w)
        radii.append(r)

    # collapse clusters narrower than 10*tol
    merged: list[list[int]] = []
    for k in sorted(range(len(points)), key=lambda k: (points[k].real, points[k].imag)):
        for group in merged:
            if any(abs(points[k] - points[m]) < 10 * tol for m in group):
                group.append(k)
                break
        else:
            merged.append([k])
    pts = []
    rads = []
    for group in merged:
        centre = sum(points[k] for k in group) / len(group)
        spread = max(abs(points[k] - centre) for k in group)
        pts.append(centre)
        rads.append(max(radii[k] for k in group) + spread)
    order = sorted(range(len(pts)), key=lambda k: (-pts[k].imag, pts[k].real))
    pts = [_clean(pts[k]) for k in order]
    rads = [rads[k] for k in order]
    return CriticalSet(tuple(pts), tuple(rads), exact)


def _clean(z: complex, eps: float = 1e-15) -> complex:
    """Snap components that are zero up to rounding, keeping JSON output stable."""
    re_, im_ = z.real, z.imag
    scale = max(abs(z), 1.0)
    if abs(re_) < eps * scale:
        re_ = 0.0
    if abs(im_) < eps * scale:
        im_ = 0.0
    return complex(re_, im_)


# --------------------------------------------------------------------------
# genericity


@dataclass
class GenericityReport:
    leading_coefficient_ok: bool
    distinct_values_ok: bool
    single_cluster_ok: bool
    cluster_sizes: tuple[int, ...] = ()
    simple_tangency: tuple[bool, ...] = ()
    messages: tuple[str, ...] = ()

    @property
    def passed(self) -> bool:
        return self.leading_coefficient_ok and self.distinct_values_ok and self.single_cluster_ok

    def as_dict(self) -> dict:
        return {
            "passed": self.passed,
            "leading_coefficient": self.leading_coefficient_ok,
            "distinct_critical_values": self.distinct_values_ok,
            "single_cluster": self.single_cluster_ok,
            "cluster_sizes": list(self.cluster_sizes),
            "simple_tangency": list(self.simple_tangency),
            "messages": list(self.messages),
        }


def has_constant_leading_coefficient(f: BivariatePolynomial) -> bool:
    lead = f.leading_y_coefficient()
    return f.deg_y == f.degree and f.degree >= 1 and lead.degree == 0


def genericity_check(f: BivariatePolynomial, X: CriticalSet | None = None, cfg=None) -> GenericityReport:
    """Check the projection ``(x, y) -> x`` is generic for ``f``.

    Condition (c) is decided numerically: for each critical value the fiber
    roots are followed radially into it and clustered.
    """
    from .errors import AmbiguousCluster, MultipleClusters
    from .tracking import TrackConfig, collapse_cluster

    cfg = cfg or TrackConfig()
    messages = []
    lead_ok = has_constant_leading_coefficient(f)
    if not lead_ok:
        messages.append(
            f"deg_y(f)={f.deg_y}, n={f.degree}, leading y-coefficient {f.leading_y_coefficient()}"
        )
        return GenericityReport(False, False, False, messages=tuple(messages))
    if X is None:
        X = critical_values(f)

    distinct_ok = True
    for a in range(X.N):
        for b in range(a + 1, X.N):
            if abs(X.points[a] - X.points[b]) <= 2 * (X.radii[a] + X.radii[b]):
                distinct_ok = False
                messages.append(f"critical values {a} and {b} are not separated")

    sizes, simple = [], []
    cluster_ok = distinct_ok
    if distinct_ok:
        radii = X.safety_radii()
        for k, p in enumerate(X.points):
            try:
                m, _ = collapse_cluster(f, p, p + radii[k] * cfg.disk_scale, cfg=cfg)
            except (MultipleClusters, AmbiguousCluster) as exc:
                cluster_ok = False
                sizes.append(0)
                simple.append(False)
                messages.append(f"critical value {k}: {exc}")
                continue
            sizes.append(m)
            simple.append(m == 2)
    return GenericityReport(
        lead_ok, distinct_ok, cluster_ok, tuple(sizes), tuple(simple), tuple(messages)
    )


def shear_ladder(cap: int = 20) -> Iterable[Fraction]:
    """Deterministic shear parameters 1, -1, 2, -2, ..."""
    for k in range(1, cap + 1):
        magnitude = (k + 1) // 2
        yield Fraction(magnitude if k % 2 else -magnitude)


def make_generic(f: BivariatePolynomial, cap: int = 20, tol: float = 1e-10, cfg=None, allow_shear=True):
    """Find the first shear (0 first, then the ladder) giving a generic projection.

    Returns ``(sheared_f, t, report, X)``.
    """
    if not reducedness_check(f):
        raise NonReducedCurve(f"{f} is not reduced")
    candidates = [Fraction(0)] + (list(shear_ladder(cap)) if allow_shear else [])
    last = None
    for t in candidates:
        g = shear(f, t)
        if not has_constant_leading_coefficient(g):
            last = genericity_check(g, cfg=cfg)
            continue
        X = critical_values(g, tol)
        report = genericity_check(g, X, cfg=cfg)
        if report.passed:
            return g, t, report, X
        last = report
    detail = "; ".join(last.messages) if last else ""
    raise GenericityFailure(f"no generic projection after {len(candidates)} attempts: {detail}")


__all__ = [
    "GaussianRational",
    "BivariatePolynomial",
    "CriticalSet",
    "GenericityReport",
    "parse_polynomial",
    "format_polynomial",
    "shear",
    "shear_ladder",
    "reducedness_check",
    "discriminant",
    "critical_values",
    "genericity_check",
    "make_generic",
    "is_transverse_at_infinity",
]
