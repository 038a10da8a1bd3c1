"""Exact construction of the integer linear forms

    I_n = int_{[0,1]^5} (1-x1)^n (1-x2)^n (1-x3)^n (1-x4)^n P_n(x5) / (1 - x1 x2 x3 x4 x5) dx
        = (a zeta(2) + b zeta(3) + c zeta(4) + d zeta(5) + e) / lcm(1..n)^5

together with a Monte-Carlo cross-check of the equivalent integrand
``prod x_i^n (1-x_i)^n / (1 - x1...x5)^(n+1)``.
"""
from __future__ import annotations

import math
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations_with_replacement

import numpy as np

from .exact_core import binomial, lcm_upto
from .precision import ErrorBoundedValue
from .zeta_forms import ZetaForm, closed_form

__all__ = [
    "MAX_N",
    "CapacityError",
    "IntegralityViolation",
    "LegendrePoly",
    "MonomialTerm",
    "IntegerLinearForm",
    "legendre_coeffs",
    "legendre_rodrigues",
    "monomial_terms",
    "expand_In",
    "to_integer_form",
    "quadrature_In",
]

MAX_N = 12


class CapacityError(ValueError):
    """Requested n is beyond the supported expansion ceiling."""


class IntegralityViolation(ArithmeticError):
    """A scaled coefficient of I_n failed to be an integer."""

    def __init__(self, n: int, name: str, value: Fraction):
        super().__init__(f"n={n}: coefficient {name} = {value} is not an integer")
        self.n = n
        self.name = name
        self.value = value


@dataclass(frozen=True)
class LegendrePoly:
    n: int
    coeffs: tuple[int, ...]  # P_n(x) = sum coeffs[j] x**j

    def __call__(self, x):
        return sum(c * x**j for j, c in enumerate(self.coeffs))


def legendre_rodrigues(n: int) -> tuple[int, ...]:
    """Coefficients of (1/n!) (d/dx)^n (x^n (1-x)^n), by repeated differentiation."""
    # x^n (1-x)^n = sum_i (-1)^i C(n,i) x^(n+i)
    poly = [0] * (2 * n + 1)
    for i in range(n + 1):
        poly[n + i] = (-1) ** i * math.comb(n, i)
    for _ in range(n):
        poly = [k * poly[k] for k in range(1, len(poly))]
    fact = math.factorial(n)
    if any(c % fact for c in poly):
        raise ArithmeticError(f"Rodrigues polynomial for n={n} is not integral")
    return tuple(c // fact for c in poly)


def legendre_coeffs(n: int) -> LegendrePoly:
    """Integer coefficients ``(-1)^j C(n,j) C(n+j,j)``, cross-checked against Rodrigues."""
    if n < 0:
        raise ValueError("n must be >= 0")
    closed = tuple((-1) ** j * math.comb(n, j) * math.comb(n + j, j) for j in range(n + 1))
    if closed != legendre_rodrigues(n):
        raise ArithmeticError(f"Legendre constructions disagree at n={n}")
    return LegendrePoly(n, closed)


@dataclass(frozen=True)
class MonomialTerm:
    exponents: tuple[int, int, int, int, int]
    weight: int
    multiplicity: int


def _arrangements(multiset: tuple[int, ...]) -> int:
    out = math.factorial(len(multiset))
    for c in _counts(multiset):
        out //= math.factorial(c)
    return out


def _counts(multiset: tuple[int, ...]) -> list[int]:
    counts: dict[int, int] = defaultdict(int)
    for x in multiset:
        counts[x] += 1
    return list(counts.values())


def monomial_terms(n: int) -> list[MonomialTerm]:
    """Monomials of (1-x1)^n...(1-x4)^n P_n(x5), one per multiset {r1..r4} and r5."""
    p = legendre_coeffs(n).coeffs
    out = []
    for quad in combinations_with_replacement(range(n + 1), 4):
        sign = (-1) ** sum(quad)
        binoms = math.prod(binomial(n, r) for r in quad)
        mult = _arrangements(quad)
        for r5, p5 in enumerate(p):
            w = sign * binoms * p5
            if w:
                out.append(MonomialTerm(tuple(quad) + (r5,), w, mult))
    return out


def _check_n(n: int) -> None:
    if n < 0:
        raise ValueError("n must be >= 0")
    if n > MAX_N:
        raise CapacityError(f"n={n} exceeds the supported ceiling n <= {MAX_N}")


def expand_In(n: int) -> ZetaForm:
    """Exact ZetaForm of I_n, summing closed forms over the symmetry-reduced monomials."""
    _check_n(n)
    weights: dict[tuple[int, ...], int] = defaultdict(int)
    for term in monomial_terms(n):
        weights[tuple(sorted(term.exponents, reverse=True))] += term.weight * term.multiplicity
    acc = [Fraction(0)] * 5
    for key in sorted(weights):
        w = weights[key]
        if w == 0:
            continue
        for i, c in enumerate(closed_form(key).coefficients):
            if c:
                acc[i] += w * c
    return ZetaForm(*acc)


@dataclass(frozen=True)
class IntegerLinearForm:
    """``(a zeta(2) + b zeta(3) + c zeta(4) + d zeta(5) + e) / lcm**5 == I_n``."""

    n: int
    a: int
    b: int
    c: int
    d: int
    e: int
    lcm: int

    FIELDS = ("n", "a", "b", "c", "d", "e", "lcm")

    def zeta_form(self) -> ZetaForm:
        """The unscaled combination ``a zeta(2) + ... + e`` (i.e. lcm**5 * I_n)."""
        return ZetaForm(Fraction(self.e), Fraction(self.a), Fraction(self.b), Fraction(self.c), Fraction(self.d))

    def alpha_form(self) -> ZetaForm:
        """``a zeta(2) + b zeta(3) + c zeta(4)``."""
        return ZetaForm(Fraction(0), Fraction(self.a), Fraction(self.b), Fraction(self.c), Fraction(0))

    def max_bits(self) -> int:
        return max(abs(x).bit_length() for x in (self.a, self.b, self.c, self.d, self.e))

    def to_json(self) -> dict:
        return {"n": self.n, **{k: str(getattr(self, k)) for k in self.FIELDS[1:]}}

    @classmethod
    def from_json(cls, data: dict) -> "IntegerLinearForm":
        return cls(int(data["n"]), *(int(data[k]) for k in cls.FIELDS[1:]))

    def csv_row(self) -> list[str]:
        return [str(getattr(self, k)) for k in self.FIELDS]


def to_integer_form(n: int) -> IntegerLinearForm:
    """Scale I_n by lcm(1..n)^5; raises IntegralityViolation on a non-integer coefficient."""
    _check_n(n)
    form = expand_In(n)
    m = lcm_upto(n)[n] if n >= 1 else 1
    scale = m**5
    names = ("e", "a", "b", "c", "d")  # ZetaForm order: c0, c2, c3, c4, c5
    values = {}
    for name, coeff in zip(names, form.coefficients):
        scaled = coeff * scale
        if scaled.denominator != 1:
            raise IntegralityViolation(n, name, scaled)
        values[name] = scaled.numerator
    return IntegerLinearForm(n, values["a"], values["b"], values["c"], values["d"], values["e"], m)


def integer_forms(ns, workers: int = 1) -> list[IntegerLinearForm]:
    """:func:`to_integer_form` over several n, optionally in worker processes."""
    ns = list(ns)
    if workers <= 1 or len(ns) <= 1:
        return [to_integer_form(n) for n in ns]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(to_integer_form, ns))


# ---------------------------------------------------------------------------
# Monte-Carlo cross-check


def _integrand(x: np.ndarray, n: int) -> np.ndarray:
    prod = np.prod(x, axis=1)
    if n == 0:
        return 1.0 / (1.0 - prod)
    body = np.prod(x * (1.0 - x), axis=1) ** n
    return body / (1.0 - prod) ** (n + 1)


def quadrature_In(n: int, samples: int = 10**6, seed: int = 0, chunk: int = 2**17) -> ErrorBoundedValue:
    """Monte-Carlo mean of the integrand with a 3-sigma radius (statistical, not certified).

    Chunk ``i`` draws from ``Philox`` keyed by ``(seed, i)``, so the result
    does not depend on how chunks are scheduled.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    if samples < 10**4:
        raise ValueError("need at least 1e4 samples")
    root = np.random.SeedSequence(seed)
    total = 0.0
    total_sq = 0.0
    done = 0
    for i, child in enumerate(root.spawn(math.ceil(samples / chunk))):
        size = min(chunk, samples - done)
        rng = np.random.Generator(np.random.Philox(child))
        # open interval keeps 1 - prod away from 0
        x = rng.random((size, 5))
        x = np.where(x == 0.0, np.nextafter(0.0, 1.0), x)
        v = _integrand(x, n)
        total += math.fsum(v)
        total_sq += math.fsum(v * v)
        done += size
    mean = total / samples
    var = max(total_sq / samples - mean * mean, 0.0) * samples / (samples - 1)
    radius = 3.0 * math.sqrt(var / samples)
    value = ErrorBoundedValue.from_bounds(Fraction(mean) - Fraction(radius), Fraction(mean) + Fraction(radius), 64)
    return ErrorBoundedValue(value.estimate, value.radius, 64, certified=False)
