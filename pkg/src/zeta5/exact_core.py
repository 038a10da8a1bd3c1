"""Exact integer and rational helpers: binomials, power sums, lcm and prime tables.

Rationals are plain :class:`fractions.Fraction` objects, which are normalized
to lowest terms after every operation (``ExactRational`` is an alias).
"""
from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

ExactRational = Fraction

__all__ = [
    "ExactRational",
    "LcmTable",
    "PrimePi",
    "binomial",
    "gen_harmonic",
    "lcm_upto",
    "prime_pi",
    "laurent_coeff",
    "bernoulli",
    "smallest_prime_factors",
]

LAURENT_MAX = 7


def binomial(n: int, k: int) -> int:
    if n < 0 or k < 0 or k > n:
        raise ValueError(f"binomial({n}, {k}) requires 0 <= k <= n")
    return math.comb(n, k)


@lru_cache(maxsize=None)
def _power_sum(m: int, j: int) -> Fraction:
    if m == 0:
        return Fraction(0)
    return _power_sum(m - 1, j) + Fraction(1, m**j)


def gen_harmonic(m: int, j: int) -> Fraction:
    """Return ``sum(1 / i**j for i in 1..m)`` exactly; the empty sum (m=0) is 0."""
    if not 1 <= j <= 5:
        raise ValueError(f"power-sum order must be in 1..5, got {j}")
    if m < 0:
        raise ValueError(f"m must be nonnegative, got {m}")
    # iterative warm-up keeps the recursion shallow for large m
    for i in range(0, m + 1, 256):
        _power_sum(i, j)
    return _power_sum(m, j)


def smallest_prime_factors(n: int) -> list[int]:
    """Sieve of smallest prime factors; ``spf[k]`` for 2 <= k <= n, zeros below."""
    spf = [0] * (n + 1)
    for p in range(2, n + 1):
        if spf[p] == 0:
            for q in range(p, n + 1, p):
                if spf[q] == 0:
                    spf[q] = p
    return spf


@dataclass(frozen=True)
class LcmTable:
    max_n: int
    values: tuple[int, ...]  # values[i] = m(i + 1)

    def __getitem__(self, n: int) -> int:
        if not 1 <= n <= self.max_n:
            raise IndexError(f"m({n}) outside table 1..{self.max_n}")
        return self.values[n - 1]


def lcm_upto(n: int) -> LcmTable:
    """Build m(1..n), multiplying by p exactly at prime powers p**k."""
    if n < 1:
        raise ValueError("lcm table needs n >= 1")
    spf = smallest_prime_factors(n)
    values = [1]
    current = 1
    for k in range(2, n + 1):
        p = spf[k]
        rest = k
        while rest % p == 0:
            rest //= p
        if rest == 1:
            current *= p
        values.append(current)
    return LcmTable(n, tuple(values))


@dataclass(frozen=True)
class PrimePi:
    max_n: int
    counts: tuple[int, ...]  # counts[i] = pi(i + 1)

    def __getitem__(self, n: int) -> int:
        if not 1 <= n <= self.max_n:
            raise IndexError(f"pi({n}) outside table 1..{self.max_n}")
        return self.counts[n - 1]


def prime_pi(n: int) -> PrimePi:
    if n < 1:
        raise ValueError("prime table needs n >= 1")
    sieve = bytearray([1]) * (n + 1)
    sieve[0] = 0
    sieve[1] = 0
    for p in range(2, math.isqrt(n) + 1):
        if sieve[p]:
            sieve[p * p :: p] = bytes(len(range(p * p, n + 1, p)))
    counts = []
    running = 0
    for k in range(1, n + 1):
        running += sieve[k]
        counts.append(running)
    return PrimePi(n, tuple(counts))


# f(z) = 1/(e^z - 1) = sum_{m >= -1} f_m z^m; _LAURENT[m + 1] holds f_m.
_LAURENT: list[Fraction] = [Fraction(1), Fraction(-1, 2)]
_LAURENT_LOCK = threading.Lock()


def _laurent_series(upto: int) -> list[Fraction]:
    # Matching z^t (t >= 1) in (e^z - 1) f(z) = 1 gives
    # f_{t-1} = -sum_{i=2}^{t+1} f_{t-i} / i!.
    with _LAURENT_LOCK:
        while len(_LAURENT) < upto + 2:
            ell = len(_LAURENT) - 1
            t = ell + 1
            _LAURENT.append(
                -sum(_LAURENT[t - i + 1] / math.factorial(i) for i in range(2, t + 2))
            )
        return _LAURENT


def laurent_coeff(ell: int) -> Fraction:
    """c_ell in 1/(e^z - 1) = 1/z - 1/2 + sum c_ell z^ell / ell!, for 1 <= ell <= 7."""
    if not 1 <= ell <= LAURENT_MAX:
        raise ValueError(f"laurent_coeff supports 1..{LAURENT_MAX}, got {ell}")
    series = _laurent_series(ell)
    return series[ell + 1] * math.factorial(ell)


def bernoulli(m: int) -> Fraction:
    """Bernoulli number B_m (B_1 = -1/2), from the same Laurent recurrence."""
    if m < 0:
        raise ValueError("bernoulli index must be >= 0")
    if m == 0:
        return Fraction(1)
    series = _laurent_series(max(m - 1, 0))
    # f_{m-1} = B_m / m!
    return series[m] * math.factorial(m)
