"""Exact univariate polynomials and rational functions in t = q^(-s).

Coefficients are Fractions throughout; floating point never enters any
identity check.  Rational functions compare by cross-multiplication.
"""

from __future__ import annotations

from fractions import Fraction


def _strip(coeffs: list[Fraction]) -> tuple[Fraction, ...]:
    n = len(coeffs)
    while n and coeffs[n - 1] == 0:
        n -= 1
    return tuple(coeffs[:n])


class Poly:
    """Polynomial in t with exact rational coefficients, constant term first."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        self.coeffs = _strip([Fraction(c) for c in coeffs])

    @staticmethod
    def term(power: int, coeff) -> "Poly":
        return Poly([0] * power + [coeff])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __eq__(self, other) -> bool:
        return isinstance(other, Poly) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __add__(self, other: "Poly") -> "Poly":
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return Poly(out)

    def __neg__(self) -> "Poly":
        return Poly([-c for c in self.coeffs])

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __mul__(self, other: "Poly") -> "Poly":
        if not self or not other:
            return Poly()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return Poly(out)

    def scale(self, c) -> "Poly":
        c = Fraction(c)
        return Poly([a * c for a in self.coeffs])

    def coeff(self, k: int) -> Fraction:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else Fraction(0)

    def substitute_scaled_t(self, factor) -> "Poly":
        """t -> factor * t."""
        factor = Fraction(factor)
        return Poly([c * factor**k for k, c in enumerate(self.coeffs)])

    def __repr__(self):
        return f"Poly({[str(c) for c in self.coeffs]})"


ONE = Poly([1])


class RationalFunc:
    """Quotient of two Polys; the denominator needs a nonzero constant term
    whenever a power-series expansion is requested."""

    __slots__ = ("num", "den")

    def __init__(self, num: Poly, den: Poly = ONE):
        if not den:
            raise ZeroDivisionError("zero denominator")
        self.num = num
        self.den = den

    @staticmethod
    def constant(c) -> "RationalFunc":
        return RationalFunc(Poly([c]))

    def __add__(self, other: "RationalFunc") -> "RationalFunc":
        return RationalFunc(self.num * other.den + other.num * self.den, self.den * other.den)

    def __sub__(self, other: "RationalFunc") -> "RationalFunc":
        return RationalFunc(self.num * other.den - other.num * self.den, self.den * other.den)

    def __mul__(self, other: "RationalFunc") -> "RationalFunc":
        return RationalFunc(self.num * other.num, self.den * other.den)

    def scale(self, c) -> "RationalFunc":
        return RationalFunc(self.num.scale(c), self.den)

    def equals(self, other: "RationalFunc") -> bool:
        """Equality as rational functions (cross-multiplied polynomial identity)."""
        return self.num * other.den == other.num * self.den

    def substitute_scaled_t(self, factor) -> "RationalFunc":
        return RationalFunc(self.num.substitute_scaled_t(factor), self.den.substitute_scaled_t(factor))

    def series(self, terms: int) -> list[Fraction]:
        """Power-series coefficients of t^0 .. t^(terms-1)."""
        d0 = self.den.coeff(0)
        if d0 == 0:
            raise ZeroDivisionError("denominator has zero constant term")
        out: list[Fraction] = []
        for k in range(terms):
            acc = self.num.coeff(k)
            for j in range(1, k + 1):
                dj = self.den.coeff(j)
                if dj:
                    acc -= dj * out[k - j]
            out.append(acc / d0)
        return out

    def to_json(self) -> dict:
        def enc(poly: Poly):
            return [[c.numerator, c.denominator] for c in poly.coeffs]

        return {"numerator_t": enc(self.num), "denominator_t": enc(self.den)}

    def __repr__(self):
        return f"RationalFunc({self.num!r} / {self.den!r})"


def geometric_factor(x: "Poly") -> RationalFunc:
    """x / (1 - x) for a polynomial x with zero constant term."""
    if x.coeff(0) != 0:
        raise ValueError("geometric factor needs a vanishing constant term")
    return RationalFunc(x, ONE - x)
