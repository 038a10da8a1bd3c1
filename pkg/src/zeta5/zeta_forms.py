"""Exact closed forms of the five-fold sums

    I(r) = sum_{k >= 0} 1 / ((k + r1 + 1) (k + r2 + 1) ... (k + r5 + 1))

as rational combinations of 1, zeta(2), ..., zeta(5).

The engine decomposes the summand into partial fractions over its poles
``x = -(r_i + 1)``, sums the simple-pole part telescopically and turns every
higher-order pole into a shifted zeta tail ``zeta(j) - H_{a-1}^{(j)}``.
"""
from __future__ import annotations

import threading
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .exact_core import gen_harmonic
from .precision import DEFAULT_PRECISION, ErrorBoundedValue

__all__ = [
    "ZetaForm",
    "PoleSystem",
    "canonical",
    "classify",
    "pole_system",
    "partial_fractions",
    "closed_form",
    "series_oracle",
    "ALL_COMPOSITIONS",
]

DIM = 5


def _parse_fraction(s: str) -> Fraction:
    return Fraction(s)


@dataclass(frozen=True)
class ZetaForm:
    """``c0 + c2 zeta(2) + c3 zeta(3) + c4 zeta(4) + c5 zeta(5)`` with exact coefficients."""

    c0: Fraction = Fraction(0)
    c2: Fraction = Fraction(0)
    c3: Fraction = Fraction(0)
    c4: Fraction = Fraction(0)
    c5: Fraction = Fraction(0)

    @classmethod
    def zeta_tail(cls, j: int, m: int) -> "ZetaForm":
        """``zeta(j) - (1 + 2**-j + ... + m**-j)``."""
        coeffs = {"c0": -gen_harmonic(m, j), f"c{j}": Fraction(1)}
        return cls(**coeffs)

    @classmethod
    def constant(cls, q) -> "ZetaForm":
        return cls(c0=Fraction(q))

    @property
    def coefficients(self) -> tuple[Fraction, Fraction, Fraction, Fraction, Fraction]:
        return (self.c0, self.c2, self.c3, self.c4, self.c5)

    def __add__(self, other: "ZetaForm") -> "ZetaForm":
        if not isinstance(other, ZetaForm):
            return NotImplemented
        return ZetaForm(*(a + b for a, b in zip(self.coefficients, other.coefficients)))

    def __sub__(self, other: "ZetaForm") -> "ZetaForm":
        if not isinstance(other, ZetaForm):
            return NotImplemented
        return ZetaForm(*(a - b for a, b in zip(self.coefficients, other.coefficients)))

    def __neg__(self) -> "ZetaForm":
        return ZetaForm(*(-a for a in self.coefficients))

    def scale(self, q) -> "ZetaForm":
        q = Fraction(q)
        return ZetaForm(*(q * a for a in self.coefficients))

    def __mul__(self, q):
        if isinstance(q, (int, Fraction)):
            return self.scale(q)
        return NotImplemented

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return not any(self.coefficients)

    def to_json(self) -> dict[str, str]:
        return {name: f"{c.numerator}/{c.denominator}" for name, c in zip(("c0", "c2", "c3", "c4", "c5"), self.coefficients)}

    @classmethod
    def from_json(cls, data: dict[str, str]) -> "ZetaForm":
        return cls(*(_parse_fraction(data[name]) for name in ("c0", "c2", "c3", "c4", "c5")))

    def __str__(self) -> str:
        parts = []
        for label, c in zip(("", "z2", "z3", "z4", "z5"), self.coefficients):
            if c:
                parts.append(f"({c})" + (f"*{label}" if label else ""))
        return " + ".join(parts) if parts else "0"


ZERO = ZetaForm()


def canonical(r: Iterable[int]) -> tuple[int, ...]:
    """Sorted-descending exponent vector; I(r) is symmetric in its entries."""
    r = tuple(int(x) for x in r)
    if len(r) != DIM:
        raise ValueError(f"exponent vector must have {DIM} entries, got {len(r)}")
    if any(x < 0 for x in r):
        raise ValueError(f"exponents must be nonnegative, got {r}")
    return tuple(sorted(r, reverse=True))


def classify(r: Iterable[int]) -> tuple[int, ...]:
    """Run lengths of the sorted vector, e.g. (3, 1, 0, 0, 0) -> (1, 1, 3)."""
    s = canonical(r)
    runs = []
    prev = None
    for x in s:
        if x == prev:
            runs[-1] += 1
        else:
            runs.append(1)
            prev = x
    return tuple(runs)


def _compositions(total: int) -> list[tuple[int, ...]]:
    if total == 0:
        return [()]
    out = []
    for first in range(1, total + 1):
        out.extend((first,) + rest for rest in _compositions(total - first))
    return out


ALL_COMPOSITIONS: tuple[tuple[int, ...], ...] = tuple(_compositions(DIM))


@dataclass(frozen=True)
class PoleSystem:
    """Poles ``(a_i, m_i)`` of ``1 / prod (x + a_i)**m_i`` with a_i strictly decreasing."""

    poles: tuple[tuple[int, int], ...]

    def __post_init__(self):
        locs = [a for a, _ in self.poles]
        if any(a <= 0 for a in locs) or any(m <= 0 for _, m in self.poles):
            raise ValueError(f"invalid pole system {self.poles}")
        if any(x <= y for x, y in zip(locs, locs[1:])):
            raise ValueError(f"pole locations must be strictly decreasing: {locs}")
        if sum(m for _, m in self.poles) != DIM:
            raise ValueError(f"multiplicities must sum to {DIM}")


def pole_system(r: Iterable[int]) -> PoleSystem:
    counts = Counter(canonical(r))
    return PoleSystem(tuple((v + 1, counts[v]) for v in sorted(counts, reverse=True)))


# ---------------------------------------------------------------------------
# polynomial helpers (coefficient lists, lowest degree first)


def _poly_mul(p: Sequence[Fraction], q: Sequence[Fraction]) -> list[Fraction]:
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] += a * b
    return out


def _linear_power(a: int, m: int) -> list[Fraction]:
    """(x + a)**m."""
    out = [Fraction(1)]
    for _ in range(m):
        out = _poly_mul(out, [Fraction(a), Fraction(1)])
    return out


def _solve(matrix: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction]:
    """Exact Gauss-Jordan elimination."""
    n = len(rhs)
    rows = [list(row) + [b] for row, b in zip(matrix, rhs)]
    for col in range(n):
        pivot = next((i for i in range(col, n) if rows[i][col] != 0), None)
        if pivot is None:
            raise ArithmeticError("singular partial-fraction system")
        rows[col], rows[pivot] = rows[pivot], rows[col]
        inv = 1 / rows[col][col]
        rows[col] = [v * inv for v in rows[col]]
        for i in range(n):
            if i != col and rows[i][col] != 0:
                factor = rows[i][col]
                rows[i] = [v - factor * w for v, w in zip(rows[i], rows[col])]
    return [rows[i][n] for i in range(n)]


def _basis_polys(ps: PoleSystem) -> list[tuple[int, int, list[Fraction]]]:
    # A[i][j] / (x + a_i)**j, times the full denominator, is
    # A[i][j] * (x + a_i)**(m_i - j) * prod_{k != i} (x + a_k)**m_k.
    out = []
    for i, (a, m) in enumerate(ps.poles):
        others = [Fraction(1)]
        for k, (b, mk) in enumerate(ps.poles):
            if k != i:
                others = _poly_mul(others, _linear_power(b, mk))
        for j in range(1, m + 1):
            poly = _poly_mul(others, _linear_power(a, m - j))
            poly += [Fraction(0)] * (DIM - len(poly))
            out.append((i, j, poly))
    return out


def partial_fractions(ps: PoleSystem) -> list[list[Fraction]]:
    """Coefficients ``A[i][j-1]`` with ``1/prod (x+a_i)**m_i = sum A[i][j-1]/(x+a_i)**j``.

    Found by matching polynomial coefficients after clearing denominators,
    then checked by rebuilding the numerator, which must be exactly 1.
    """
    basis = _basis_polys(ps)
    matrix = [[poly[deg] for _, _, poly in basis] for deg in range(DIM)]
    rhs = [Fraction(1)] + [Fraction(0)] * (DIM - 1)
    sol = _solve(matrix, rhs)

    rebuilt = [Fraction(0)] * DIM
    for coeff, (_, _, poly) in zip(sol, basis):
        for deg in range(DIM):
            rebuilt[deg] += coeff * poly[deg]
    if rebuilt != rhs:
        raise ArithmeticError(f"partial-fraction identity failed for {ps}")

    table = [[Fraction(0)] * m for _, m in ps.poles]
    for coeff, (i, j, _) in zip(sol, basis):
        table[i][j - 1] = coeff
    return table


# ---------------------------------------------------------------------------
# closed forms

_CACHE: dict[tuple[int, ...], ZetaForm] = {}
_CACHE_LOCK = threading.Lock()


def _closed_form_uncached(key: tuple[int, ...]) -> ZetaForm:
    ps = pole_system(key)
    table = partial_fractions(ps)
    if len(ps.poles) > 1 and sum(row[0] for row in table) != 0:
        raise ArithmeticError(f"simple-pole residues do not cancel for {key}")
    coeffs = {2: Fraction(0), 3: Fraction(0), 4: Fraction(0), 5: Fraction(0)}
    c0 = Fraction(0)
    for (a, m), row in zip(ps.poles, table):
        # sum_{k>=0} 1/(k+a) diverges, but with zero residue sum the
        # parts combine to -sum_i A_i H_{a_i - 1}.
        c0 -= row[0] * gen_harmonic(a - 1, 1)
        for j in range(2, m + 1):
            coeffs[j] += row[j - 1]
            c0 -= row[j - 1] * gen_harmonic(a - 1, j)
    return ZetaForm(c0, coeffs[2], coeffs[3], coeffs[4], coeffs[5])


def closed_form(r: Iterable[int]) -> ZetaForm:
    """Exact ZetaForm of I(r); memoized on the sorted exponent vector."""
    key = canonical(r)
    form = _CACHE.get(key)
    if form is None:
        form = _closed_form_uncached(key)
        with _CACHE_LOCK:
            form = _CACHE.setdefault(key, form)
    return form


def clear_cache() -> None:
    with _CACHE_LOCK:
        _CACHE.clear()


def series_oracle(
    r: Iterable[int], terms: int, precision_bits: int = DEFAULT_PRECISION
) -> ErrorBoundedValue:
    """Direct partial sum of the defining series with a certified tail bound.

    Each term is floored to ``precision_bits + 24`` fractional bits, so the
    partial sum is known to within ``terms`` units of that scale; the tail
    past ``terms`` lies in ``[0, (terms + min(r))**-4 / 4]``.
    """
    r = canonical(r)
    if terms < max(r) + 2:
        raise ValueError(f"need at least {max(r) + 2} terms, got {terms}")
    frac_bits = precision_bits + 24
    one = 1 << frac_bits
    a1, a2, a3, a4, a5 = (x + 1 for x in r)
    total = 0
    for k in range(terms):
        total += one // ((k + a1) * (k + a2) * (k + a3) * (k + a4) * (k + a5))
    scale = Fraction(1, one)
    lo = total * scale
    hi = (total + terms) * scale + Fraction(1, 4 * (terms + min(r)) ** 4)
    return ErrorBoundedValue.from_bounds(lo, hi, precision_bits)
