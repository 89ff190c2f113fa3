"""Exact arithmetic in the finite local rings Z/p^r.

Elements are canonical residues in [0, p^r).  The valuation of 0 is r by
convention (a finite sentinel for "at least r"), which matches the capping
used everywhere downstream for elementary-divisor profiles.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import factorial

MAX_MODULUS = 2**62


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


@dataclass(frozen=True)
class LocalRing:
    """The ring Z/p^r for an odd prime p; the uniformizer is p itself."""

    p: int
    r: int

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValueError(f"p = {self.p} is not prime")
        if self.p == 2:
            raise ValueError("p = 2 is not supported")
        if self.r < 1:
            raise ValueError(f"level r = {self.r} must be >= 1")
        if self.p**self.r > MAX_MODULUS:
            raise ValueError(f"modulus {self.p}^{self.r} exceeds the 2^62 guard")

    @property
    def modulus(self) -> int:
        return self.p**self.r

    def elem(self, value: int) -> "RingElem":
        return RingElem(value % self.modulus, self)

    def lifted(self, extra: int) -> "LocalRing":
        """The ring at precision r + extra, used for exact division by factorials."""
        return LocalRing(self.p, self.r + extra)

    def reduced(self, r2: int) -> "LocalRing":
        if r2 > self.r:
            raise ValueError(f"cannot reduce level {self.r} to higher level {r2}")
        return LocalRing(self.p, r2)

    def valuation(self, value: int) -> int:
        """p-adic valuation of a residue, capped at r; valuation(0) = r."""
        v = value % self.modulus
        if v == 0:
            return self.r
        k = 0
        while v % self.p == 0:
            v //= self.p
            k += 1
        return k

    def unit_inverse(self, value: int) -> int | None:
        """Inverse of a residue, or None for a non-unit."""
        try:
            return pow(value % self.modulus, -1, self.modulus)
        except ValueError:
            return None


@dataclass(frozen=True)
class RingElem:
    value: int
    ring: LocalRing

    def __post_init__(self):
        if not 0 <= self.value < self.ring.modulus:
            raise ValueError(f"{self.value} is not a canonical residue mod {self.ring.modulus}")

    @property
    def valuation(self) -> int:
        return self.ring.valuation(self.value)

    def __add__(self, other: "RingElem") -> "RingElem":
        self._check(other)
        return self.ring.elem(self.value + other.value)

    def __sub__(self, other: "RingElem") -> "RingElem":
        self._check(other)
        return self.ring.elem(self.value - other.value)

    def __mul__(self, other: "RingElem") -> "RingElem":
        self._check(other)
        return self.ring.elem(self.value * other.value)

    def __neg__(self) -> "RingElem":
        return self.ring.elem(-self.value)

    def _check(self, other: "RingElem"):
        if other.ring != self.ring:
            raise ValueError("mixed-ring arithmetic")


def reduce_elem(x: RingElem, r2: int) -> RingElem:
    """Reduce an element of Z/p^r to Z/p^r2 for r2 <= r."""
    return x.ring.reduced(r2).elem(x.value)


def valuation_and_inverse(x: RingElem) -> tuple[int, RingElem | None]:
    """Valuation of x together with its inverse when x is a unit.

    Non-units report no inverse instead of failing; the valuation of 0 is r.
    """
    v = x.valuation
    if v > 0:
        return v, None
    return 0, x.ring.elem(x.ring.unit_inverse(x.value))


def exact_divide_lifted(numerator: int, k: int, ring: LocalRing) -> RingElem:
    """Divide an integer carried at lifted precision by k! and reduce mod p^r.

    The caller guarantees the numerator is an integer representative computed
    at precision at least r + v_p(k!); the result is then independent of the
    representative.  Failure of integer divisibility by k! means the contract
    was violated (insufficient precision) and raises.
    """
    fact = factorial(k)
    if numerator % fact != 0:
        raise ValueError(f"{numerator} is not divisible by {k}! = {fact}: insufficient precision")
    return ring.elem(numerator // fact)


@lru_cache(maxsize=None)
def factorial_valuation(k: int, p: int) -> int:
    """v_p(k!) by Legendre's formula."""
    v = 0
    q = p
    while q <= k:
        v += k // q
        q *= p
    return v


@lru_cache(maxsize=None)
def exp_truncation(p: int, r: int) -> tuple[int, int]:
    """Series cutoff for exp on p * gl_n(Z/p^r).

    Returns (i_max, E): terms x^i/i! with i >= i_max vanish mod p^r whenever
    every entry of x has valuation >= 1, because v(x^i/i!) >= i - v_p(i!).
    E = v_p(i_max!) is the extra precision that makes every division exact.
    """
    # i - v_p(i!) >= i - (i-1)/(p-1) >= (i+1)/2 for p >= 3, so 2r is a safe horizon.
    horizon = 2 * r + 2
    i_max = horizon
    for i in range(horizon, 0, -1):
        if i - factorial_valuation(i, p) >= r:
            i_max = i
        else:
            break
    return i_max, factorial_valuation(i_max, p)
