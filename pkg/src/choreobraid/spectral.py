"""Integer polynomials for stretch factors of the braids ``beta_m``.

The stretch factor of ``beta_m`` is the largest real root of ``F_m``, built
from the recursion

    R_(m1)          = t^(m1+1) (t - 1) - 2t
    R_(m1,...,mi)   = t^mi (t - 1) R_prev + (-1)^i 2t R_prev*
    F_(m1,...,mk+1) = t^(mk+1) R_(m1..mk) + (-1)^(k+1) R_(m1..mk)*

where ``f*`` is the reciprocal polynomial.  Roots are isolated with exact
integer arithmetic: a Sturm sequence counts roots above a point, and
bisection runs over dyadic rationals.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .combinatorics import (Composition, SignSequence, enumerate_compositions, is_constant,
                            negate, theta_inverse, DEFAULT_STRAND_CAP)

PERIODIC = "periodic"
PSEUDO_ANOSOV = "pseudoAnosov"

#: Finest enclosure width used when separating close roots.
MIN_TOL = 1e-14


class PeriodicBraidError(ValueError):
    """Raised when a polynomial is requested for a periodic composition."""


@dataclass(frozen=True)
class IntPolynomial:
    """Polynomial with integer coefficients, ``coeffs[i]`` multiplying ``t^i``."""

    coeffs: tuple[int, ...]

    def __post_init__(self):
        c = [int(x) for x in self.coeffs]
        while c and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(c))

    @classmethod
    def monomial(cls, k: int, c: int = 1) -> "IntPolynomial":
        return cls((0,) * k + (c,))

    @classmethod
    def product(cls, *factors: "IntPolynomial") -> "IntPolynomial":
        out = cls((1,))
        for f in factors:
            out = out * f
        return out

    @property
    def degree(self) -> int:
        """Degree, with -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    @property
    def leading(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def is_zero(self) -> bool:
        return not self.coeffs

    def __add__(self, other: "IntPolynomial") -> "IntPolynomial":
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0,) * (n - len(self.coeffs))
        b = other.coeffs + (0,) * (n - len(other.coeffs))
        return IntPolynomial(tuple(x + y for x, y in zip(a, b)))

    def __neg__(self) -> "IntPolynomial":
        return IntPolynomial(tuple(-x for x in self.coeffs))

    def __sub__(self, other: "IntPolynomial") -> "IntPolynomial":
        return self + (-other)

    def __mul__(self, other) -> "IntPolynomial":
        if isinstance(other, int):
            return IntPolynomial(tuple(other * x for x in self.coeffs))
        if self.is_zero() or other.is_zero():
            return IntPolynomial(())
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, x in enumerate(self.coeffs):
            if x:
                for j, y in enumerate(other.coeffs):
                    out[i + j] += x * y
        return IntPolynomial(tuple(out))

    __rmul__ = __mul__

    def shift(self, k: int) -> "IntPolynomial":
        """Multiply by ``t^k``."""
        if self.is_zero():
            return self
        return IntPolynomial((0,) * k + self.coeffs)

    def derivative(self) -> "IntPolynomial":
        return IntPolynomial(tuple(i * c for i, c in enumerate(self.coeffs))[1:])

    def content(self) -> int:
        return math.gcd(*self.coeffs) if self.coeffs else 0

    def primitive(self) -> "IntPolynomial":
        """Divide by the content, keeping the leading coefficient positive."""
        g = self.content()
        if g == 0:
            return self
        if self.leading < 0:
            g = -g
        return IntPolynomial(tuple(c // g for c in self.coeffs))

    def __call__(self, x):
        acc = 0 * x
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def sign_at_dyadic(self, p: int, q: int) -> int:
        """Exact sign of ``f(p / 2^q)`` using only integers."""
        d = self.degree
        if d < 0:
            return 0
        acc = 0
        for i, c in enumerate(self.coeffs):
            acc += c * p ** i << (q * (d - i))
        return (acc > 0) - (acc < 0)

    def divmod_exact(self, divisor: "IntPolynomial") -> tuple["IntPolynomial", "IntPolynomial"]:
        """Division with remainder; raises if the quotient is not integral."""
        if divisor.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dd = divisor.degree
        lead = divisor.leading
        quot = [0] * max(len(rem) - dd, 0)
        for k in range(len(rem) - dd - 1, -1, -1):
            c = rem[k + dd]
            if c == 0:
                continue
            if c % lead:
                raise ValueError("quotient has non-integer coefficients")
            q = c // lead
            quot[k] = q
            for j, dc in enumerate(divisor.coeffs):
                rem[k + j] -= q * dc
        return IntPolynomial(tuple(quot)), IntPolynomial(tuple(rem[:dd] if dd > 0 else ()))

    def divides(self, other: "IntPolynomial") -> bool:
        """True when ``self`` divides ``other`` exactly over the integers."""
        try:
            _, r = other.divmod_exact(self)
        except ValueError:
            return False
        return r.is_zero()

    def __truediv__(self, divisor: "IntPolynomial") -> "IntPolynomial":
        q, r = self.divmod_exact(divisor)
        if not r.is_zero():
            raise ValueError("division leaves a remainder")
        return q

    def __str__(self):
        if self.is_zero():
            return "0"
        terms = []
        for i in range(self.degree, -1, -1):
            c = self.coeffs[i]
            if c == 0:
                continue
            sign = "-" if c < 0 else "+"
            a = abs(c)
            if i == 0:
                body = str(a)
            else:
                mono = "t" if i == 1 else f"t^{i}"
                body = mono if a == 1 else f"{a}{mono}"
            terms.append((sign, body))
        first_sign, first = terms[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in terms[1:]:
            out += f" {sign} {body}"
        return out

    def to_json(self) -> list[str]:
        return [str(c) for c in self.coeffs]

    @classmethod
    def from_json(cls, data: Sequence) -> "IntPolynomial":
        return cls(tuple(int(c) for c in data))


T = IntPolynomial((0, 1))
ONE = IntPolynomial((1,))


def reciprocal(f: IntPolynomial) -> IntPolynomial:
    """``t^d f(1/t)``: the coefficient list reversed."""
    if f.is_zero():
        raise ValueError("the zero polynomial has no reciprocal")
    return IntPolynomial(f.coeffs[::-1])


def _parts(m) -> tuple[int, ...]:
    parts = tuple(m.parts) if isinstance(m, Composition) else tuple(int(x) for x in m)
    if not parts or any(p < 1 for p in parts):
        raise ValueError(f"need a nonempty tuple of positive integers, got {parts}")
    return parts


def r_poly(m) -> IntPolynomial:
    """The auxiliary polynomial ``R_(m1,...,mi)``."""
    parts = _parts(m)
    t_minus_1 = IntPolynomial((-1, 1))
    r = (t_minus_1 * IntPolynomial.monomial(parts[0] + 1)) - IntPolynomial((0, 2))
    for i, mi in enumerate(parts[1:], start=2):
        r = (t_minus_1 * r).shift(mi) + reciprocal(r).shift(1) * (2 * (-1) ** i)
    return r


def f_poly(m) -> IntPolynomial:
    """``F_m``, whose largest real root is the stretch factor of ``beta_m``."""
    parts = _parts(m)
    k = len(parts) - 1
    if k == 0:
        raise PeriodicBraidError(f"{parts} gives a periodic braid: no F polynomial")
    r = r_poly(parts[:-1])
    return r.shift(parts[-1]) + reciprocal(r) * ((-1) ** (k + 1))


# --------------------------------------------------------------------------
# root isolation

def gcd(f: IntPolynomial, g: IntPolynomial) -> IntPolynomial:
    """Primitive gcd over the rationals (pseudo-remainder Euclid)."""
    a, b = f.primitive(), g.primitive()
    while not b.is_zero():
        a, b = b, _pseudo_rem(a, b).primitive()
    return a.primitive()


def _pseudo_rem(a: IntPolynomial, b: IntPolynomial) -> IntPolynomial:
    if a.degree < b.degree:
        return a
    scale = b.leading ** (a.degree - b.degree + 1)
    _, r = (a * scale).divmod_exact(b)
    return r


def squarefree_part(f: IntPolynomial) -> IntPolynomial:
    g = gcd(f, f.derivative())
    return (f.primitive() / g).primitive() if g.degree > 0 else f.primitive()


def sturm_sequence(f: IntPolynomial) -> list[IntPolynomial]:
    """Sturm chain with each member rescaled by a positive factor to integers."""
    seq = [f.primitive(), f.derivative().primitive()]
    while seq[-1].degree > 0:
        a, b = seq[-2], seq[-1]
        # positive scale keeps sign information intact
        scale = abs(b.leading) ** (a.degree - b.degree + 1)
        _, r = (a * scale).divmod_exact(b)
        if r.is_zero():
            break
        g = r.content()
        seq.append(IntPolynomial(tuple(-c // g for c in r.coeffs)))
    return seq


def _variations(signs: Iterable[int]) -> int:
    s = [x for x in signs if x != 0]
    return sum(1 for a, b in zip(s, s[1:]) if a != b)


def _variations_at(seq: list[IntPolynomial], p: int, q: int) -> int:
    return _variations(f.sign_at_dyadic(p, q) for f in seq)


def _variations_at_infinity(seq: list[IntPolynomial]) -> int:
    return _variations((f.leading > 0) - (f.leading < 0) for f in seq)


def root_bound(f: IntPolynomial) -> Fraction:
    """Cauchy bound ``1 + max |a_i / a_d|``: every real root is below it."""
    lead = abs(f.leading)
    return 1 + max(Fraction(abs(c), lead) for c in f.coeffs[:-1]) if f.degree > 0 else Fraction(1)


@dataclass(frozen=True)
class RootEnclosure:
    """Closed interval ``[lo, hi]`` with exact rational endpoints."""

    lo: Fraction
    hi: Fraction

    @property
    def mid(self) -> float:
        return float((self.lo + self.hi) / 2)

    @property
    def width(self) -> float:
        return float(self.hi - self.lo)

    @property
    def radius(self) -> float:
        return self.width / 2

    def contains(self, x: float) -> bool:
        return self.lo <= Fraction(x) <= self.hi

    def disjoint_below(self, other: "RootEnclosure") -> bool:
        """True when this interval lies strictly left of ``other``."""
        return self.hi < other.lo

    def to_json(self) -> dict:
        return {"lo": float(self.lo), "hi": float(self.hi), "lo_exact": str(self.lo),
                "hi_exact": str(self.hi)}


class NoPositiveRootError(ValueError):
    pass


def largest_real_root(f: IntPolynomial, tol: float = 1e-12) -> RootEnclosure:
    """Certified enclosure of the largest real root of ``f``, which must be positive.

    Bisection over dyadic rationals in ``[0, bound]``; the Sturm chain of the
    square-free part decides whether the top root lies above the midpoint.
    Once the bracket isolates a single simple root, plain sign bisection of
    the square-free part finishes the job.
    """
    if f.degree < 1:
        raise ValueError("need a nonconstant polynomial")
    tol = max(float(tol), MIN_TOL)
    g = squarefree_part(f)
    seq = sturm_sequence(g)
    v_inf = _variations_at_infinity(seq)
    if _variations_at(seq, 0, 0) - v_inf == 0:
        raise NoPositiveRootError(f"{f} has no real root above 0")
    bound = root_bound(g)
    # bracket is (lo, hi] = (lp / 2^q, hp / 2^q]
    q = 0
    # power-of-two top so every dyadic rational gets visited
    lp, hp = 0, 1 << max(math.ceil(bound) - 1, 1).bit_length()
    isolated = False
    sign_hi = g.sign_at_dyadic(hp, q)
    while Fraction(hp - lp, 1 << q) > Fraction(tol):
        lp, hp, q = 2 * lp, 2 * hp, q + 1
        mp = (lp + hp) // 2
        if not isolated:
            above = _variations_at(seq, mp, q) - v_inf
            if above == 0 and g.sign_at_dyadic(mp, q) == 0:
                return RootEnclosure(Fraction(mp, 1 << q), Fraction(mp, 1 << q))
            if above > 0:
                lp = mp
            else:
                hp = mp
            sign_hi = g.sign_at_dyadic(hp, q)
            isolated = _variations_at(seq, lp, q) - v_inf == 1 and g.sign_at_dyadic(lp, q) != 0
        else:
            s = g.sign_at_dyadic(mp, q)
            if s == 0:
                return RootEnclosure(Fraction(mp, 1 << q), Fraction(mp, 1 << q))
            if s == sign_hi:
                hp = mp
            else:
                lp = mp
        if g.sign_at_dyadic(hp, q) == 0:
            return RootEnclosure(Fraction(hp, 1 << q), Fraction(hp, 1 << q))
    return RootEnclosure(Fraction(lp, 1 << q), Fraction(hp, 1 << q))


def count_real_roots(f: IntPolynomial) -> int:
    """Number of distinct real roots."""
    seq = sturm_sequence(squarefree_part(f))
    lead_signs = [(p.leading > 0) - (p.leading < 0) for p in seq]
    at_minus_inf = [s * (-1) ** p.degree for s, p in zip(lead_signs, seq)]
    return _variations(at_minus_inf) - _variations(lead_signs)


# --------------------------------------------------------------------------
# stretch factors

@dataclass(frozen=True)
class StretchReport:
    composition: Composition
    classification: str
    polynomial: IntPolynomial | None = None
    enclosure: RootEnclosure | None = None

    @property
    def value(self) -> float:
        """The stretch factor; 1 for periodic braids."""
        return self.enclosure.mid if self.enclosure is not None else 1.0

    @property
    def radius(self) -> float:
        return self.enclosure.radius if self.enclosure is not None else 0.0

    def to_json(self) -> dict:
        return {
            "composition": self.composition.to_json(),
            "strands": self.composition.strands,
            "classification": self.classification,
            "lambda": self.value,
            "radius": self.radius,
            "enclosure": self.enclosure.to_json() if self.enclosure else None,
            "polynomial": self.polynomial.to_json() if self.polynomial else None,
        }


def stretch_factor(m: Composition, tol: float = 1e-12) -> StretchReport:
    """Classify ``beta_m`` and enclose its stretch factor when pseudo-Anosov."""
    if m.k == 0:
        return StretchReport(m, PERIODIC)
    f = f_poly(m)
    return StretchReport(m, PSEUDO_ANOSOV, f, largest_real_root(f, tol))


def classify(omega: SignSequence) -> str:
    """Braid type of ``alpha_omega``: periodic iff all signs agree."""
    return PERIODIC if is_constant(omega) else PSEUDO_ANOSOV


def composition_for(omega: SignSequence) -> Composition:
    """Composition of the member of ``{omega, -omega}`` that starts with +1."""
    return theta_inverse(omega if omega.signs[0] == 1 else negate(omega))


def stretch_factor_for(omega: SignSequence, tol: float = 1e-12) -> StretchReport:
    """Stretch factor of ``alpha_omega``; equivalent sign sequences share it."""
    return stretch_factor(composition_for(omega), tol)


def separate(a: Composition, b: Composition, tol: float = 1e-6) -> int:
    """Compare two stretch factors rigorously.

    Returns -1 or +1 once certified enclosures are disjoint, refining down to
    ``MIN_TOL``; returns 0 if they still overlap (the values are equal as far
    as can be decided at that width).
    """
    while True:
        ra, rb = stretch_factor(a, tol), stretch_factor(b, tol)
        if ra.enclosure is None or rb.enclosure is None:
            raise PeriodicBraidError("cannot order periodic braids by stretch factor")
        if ra.enclosure.disjoint_below(rb.enclosure):
            return -1
        if rb.enclosure.disjoint_below(ra.enclosure):
            return 1
        if tol <= MIN_TOL:
            return 0
        tol = max(tol / 1e3, MIN_TOL)


@dataclass(frozen=True)
class SurveyResult:
    N: int
    rows: tuple[StretchReport, ...]
    argmin: tuple[Composition, ...]
    argmax: tuple[Composition, ...]

    @property
    def lambda_min(self) -> float:
        return self._by(self.argmin[0]).value

    @property
    def lambda_max(self) -> float:
        return self._by(self.argmax[0]).value

    def _by(self, m: Composition) -> StretchReport:
        return next(r for r in self.rows if r.composition == m)

    def to_json(self) -> dict:
        return {
            "N": self.N,
            "argmin": [m.to_json() for m in self.argmin],
            "lambda_min": self.lambda_min,
            "argmax": [m.to_json() for m in self.argmax],
            "lambda_max": self.lambda_max,
            "rows": [r.to_json() for r in self.rows],
        }


def predicted_extremes(N: int) -> tuple[set[Composition], set[Composition]]:
    """Compositions predicted to realize the smallest and largest stretch factor."""
    n = (N - 1) // 2 if N % 2 else N // 2
    if N == 3:
        low = {Composition((1, 1))}
    elif N % 2:
        low = {Composition((n, n))}
    else:
        low = {Composition((n - 1, n)), Composition((n, n - 1))}
    return low, {Composition((1,) * (N - 1))}


def extremal_survey(N: int, tol: float = 1e-12, cap: int = DEFAULT_STRAND_CAP) -> SurveyResult:
    """Stretch factors of every pseudo-Anosov ``beta_m`` with ``m`` composing ``N - 1``.

    Ties are compositions whose enclosures overlap the extreme one.
    """
    if N < 3 or N > cap:
        raise ValueError(f"N must lie in [3, {cap}], got {N}")
    rows = tuple(stretch_factor(m, tol) for m in enumerate_compositions(N - 1) if m.k > 0)
    lo = min(rows, key=lambda r: r.enclosure.lo)
    hi = max(rows, key=lambda r: r.enclosure.hi)
    argmin = tuple(r.composition for r in rows if not lo.enclosure.disjoint_below(r.enclosure))
    argmax = tuple(r.composition for r in rows if not r.enclosure.disjoint_below(hi.enclosure))
    return SurveyResult(N, rows, argmin, argmax)


# --------------------------------------------------------------------------
# Perron-Frobenius

def perron_eigenvalue(matrix, tol: float = 1e-12, max_iter: int = 10_000) -> float:
    """Dominant eigenvalue of a nonnegative primitive matrix by power iteration."""
    a = np.asarray(matrix, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("need a square matrix")
    if (a < 0).any():
        raise ValueError("matrix has negative entries")
    v = np.ones(a.shape[0])
    lam = 0.0
    for _ in range(max_iter):
        w = a @ v
        new = float(w.sum() / v.sum())
        v = w / np.linalg.norm(w, 1)
        if abs(new - lam) < tol * max(1.0, abs(new)):
            return new
        lam = new
    raise RuntimeError(f"power iteration did not converge in {max_iter} steps")
