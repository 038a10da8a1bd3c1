"""Certified high-precision reals (midpoint/radius balls) and zeta constants.

A ball stores an exact dyadic midpoint and an exact dyadic radius as
``Fraction`` objects, so its endpoints are known exactly and comparisons are
decided without further rounding.  Rounding happens only when a midpoint is
trimmed back to ``precision_bits`` significant bits, and the discarded part is
added to the radius.  Transcendental operations (powers with rational
exponent, logarithms, pi) go through :mod:`mpmath.iv`, which rounds outward.
"""
from __future__ import annotations

import contextlib
import enum
import math
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Union

from mpmath import iv

from .exact_core import bernoulli, laurent_coeff

DEFAULT_PRECISION = 256
GUARD_BITS = 32
RADIUS_BITS = 30

Number = Union[int, Fraction]

_IV_LOCK = threading.RLock()


class PrecisionError(ArithmeticError):
    """Raised when an operation cannot be certified at the available precision."""


# ---------------------------------------------------------------------------
# dyadic rounding


def _round_to_bits(x: Fraction, bits: int) -> Fraction:
    """Round to nearest dyadic with ``bits`` significant bits."""
    if x == 0:
        return Fraction(0)
    num, den = abs(x.numerator), x.denominator
    # 2**(e-1) <= |x| < 2**(e+1)
    e = num.bit_length() - den.bit_length()
    shift = bits - e
    if shift >= 0:
        m = (num << shift) // den
        r = (num << shift) - m * den
        if 2 * r >= den:
            m += 1
        val = Fraction(m, 1 << shift)
    else:
        d = den << (-shift)
        m = num // d
        if 2 * (num - m * d) >= d:
            m += 1
        val = Fraction(m << (-shift))
    return val if x > 0 else -val


def _round_up(x: Fraction, bits: int = RADIUS_BITS) -> Fraction:
    """Smallest dyadic with ``bits`` significant bits that is >= x (x >= 0)."""
    if x <= 0:
        return Fraction(0)
    num, den = x.numerator, x.denominator
    e = num.bit_length() - den.bit_length()
    shift = bits - e
    if shift >= 0:
        m = -((-(num << shift)) // den)
        return Fraction(m, 1 << shift)
    d = den << (-shift)
    m = -((-num) // d)
    return Fraction(m << (-shift))


def _mpf_tuple_to_fraction(t) -> Fraction:
    sign, man, exp, _bc = t
    if man == 0 and exp != 0:
        raise PrecisionError("non-finite interval endpoint")
    v = int(man)
    val = Fraction(v << exp) if exp >= 0 else Fraction(v, 1 << -exp)
    return -val if sign else val


@contextlib.contextmanager
def iv_precision(bits: int):
    """Run a block with ``mpmath.iv`` at ``bits`` of working precision."""
    with _IV_LOCK:
        saved = iv.prec
        iv.prec = bits
        try:
            yield iv
        finally:
            iv.prec = saved


def _iv_from_fraction(x: Fraction):
    return iv.mpf(x.numerator) / iv.mpf(x.denominator)


# ---------------------------------------------------------------------------
# verdicts


class Verdict(str, enum.Enum):
    HOLDS = "holds"
    FAILS = "fails"
    UNDECIDABLE = "undecidable"


@dataclass(frozen=True)
class Decision:
    """Outcome of a certified comparison, together with the deciding intervals."""

    name: str
    relation: str
    verdict: Verdict
    lhs: "ErrorBoundedValue"
    rhs: "ErrorBoundedValue"

    @property
    def holds(self) -> bool:
        return self.verdict is Verdict.HOLDS

    def to_json(self, digits: int = 30) -> dict:
        return {
            "name": self.name,
            "relation": self.relation,
            "verdict": self.verdict.value,
            "lhs": self.lhs.to_json(digits),
            "rhs": self.rhs.to_json(digits),
        }


# ---------------------------------------------------------------------------
# balls


@dataclass(frozen=True)
class ErrorBoundedValue:
    """Real number known to lie in ``[estimate - radius, estimate + radius]``.

    ``certified=False`` marks statistical radii (Monte-Carlo standard errors),
    which carry no containment guarantee.
    """

    estimate: Fraction
    radius: Fraction = Fraction(0)
    precision_bits: int = DEFAULT_PRECISION
    certified: bool = field(default=True, compare=False)

    def __post_init__(self):
        if self.radius < 0:
            raise ValueError("radius must be nonnegative")

    # construction ----------------------------------------------------------

    @classmethod
    def exact(cls, x: Number, precision_bits: int = DEFAULT_PRECISION) -> "ErrorBoundedValue":
        """Ball around ``x``; exact when ``x`` is dyadic and fits, else rounded."""
        return cls.from_rational(Fraction(x), precision_bits)

    @classmethod
    def from_rational(
        cls, x: Number, precision_bits: int = DEFAULT_PRECISION, extra_radius: Fraction = Fraction(0)
    ) -> "ErrorBoundedValue":
        x = Fraction(x)
        est = _round_to_bits(x, precision_bits)
        rad = _round_up(abs(x - est) + extra_radius)
        return cls(est, rad, precision_bits)

    @classmethod
    def from_bounds(cls, lo: Fraction, hi: Fraction, precision_bits: int) -> "ErrorBoundedValue":
        if lo > hi:
            raise ValueError("empty interval")
        mid = _round_to_bits((lo + hi) / 2, precision_bits)
        rad = _round_up(max(hi - mid, mid - lo))
        return cls(mid, rad, precision_bits)

    @classmethod
    def from_iv(cls, x, precision_bits: int) -> "ErrorBoundedValue":
        lo, hi = x._mpi_
        return cls.from_bounds(_mpf_tuple_to_fraction(lo), _mpf_tuple_to_fraction(hi), precision_bits)

    # accessors -------------------------------------------------------------

    @property
    def lo(self) -> Fraction:
        return self.estimate - self.radius

    @property
    def hi(self) -> Fraction:
        return self.estimate + self.radius

    @property
    def is_exact(self) -> bool:
        return self.radius == 0

    def contains(self, x: Number) -> bool:
        return self.lo <= Fraction(x) <= self.hi

    def contains_ball(self, other: "ErrorBoundedValue") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def overlaps(self, other: "ErrorBoundedValue") -> bool:
        return self.lo <= other.hi and other.lo <= self.hi

    def inflate(self, r: Fraction) -> "ErrorBoundedValue":
        return ErrorBoundedValue(self.estimate, _round_up(self.radius + r), self.precision_bits, self.certified)

    def with_precision(self, bits: int) -> "ErrorBoundedValue":
        """Re-round the midpoint to ``bits`` significant bits."""
        est = _round_to_bits(self.estimate, bits)
        rad = _round_up(self.radius + abs(self.estimate - est))
        return ErrorBoundedValue(est, rad, bits, self.certified)

    def ulp(self) -> Fraction:
        """One unit in the last place of the midpoint at the ball's precision."""
        mag = max(abs(self.estimate), self.radius, Fraction(1, 1 << 4096))
        e = mag.numerator.bit_length() - mag.denominator.bit_length()
        return Fraction(2) ** (e + 1 - self.precision_bits)

    def __float__(self) -> float:
        return float(self.estimate)

    def __repr__(self) -> str:
        return f"ErrorBoundedValue({self.decimal(20)} +/- {float(self.radius):.3e})"

    # arithmetic ------------------------------------------------------------

    def _coerce(self, other) -> "ErrorBoundedValue":
        if isinstance(other, ErrorBoundedValue):
            return other
        if isinstance(other, (int, Fraction)):
            return ErrorBoundedValue(Fraction(other), Fraction(0), self.precision_bits)
        return NotImplemented

    def _make(self, exact_mid: Fraction, radius: Fraction, other=None) -> "ErrorBoundedValue":
        bits = self.precision_bits if other is None else max(self.precision_bits, other.precision_bits)
        certified = self.certified and (other is None or other.certified)
        est = _round_to_bits(exact_mid, bits)
        rad = _round_up(radius + abs(exact_mid - est))
        return ErrorBoundedValue(est, rad, bits, certified)

    def __neg__(self):
        return ErrorBoundedValue(-self.estimate, self.radius, self.precision_bits, self.certified)

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self._make(self.estimate + other.estimate, self.radius + other.radius, other)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self._make(self.estimate - other.estimate, self.radius + other.radius, other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b = self.estimate, other.estimate
        ra, rb = self.radius, other.radius
        return self._make(a * b, abs(a) * rb + abs(b) * ra + ra * rb, other)

    __rmul__ = __mul__

    def reciprocal(self) -> "ErrorBoundedValue":
        e, r = self.estimate, self.radius
        if abs(e) <= r:
            raise PrecisionError("reciprocal of a ball containing zero")
        # |1/x - 1/e| <= r / (|e| (|e| - r)) on the ball
        return self._make(1 / e, r / (abs(e) * (abs(e) - r)))

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.reciprocal()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other * self.reciprocal()

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            return self.power(Fraction(k))
        result = ErrorBoundedValue(Fraction(1), Fraction(0), self.precision_bits, self.certified)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __abs__(self):
        e, r = self.estimate, self.radius
        if abs(e) >= r:
            return ErrorBoundedValue(abs(e), r, self.precision_bits, self.certified)
        # ball straddles zero: [0, |e| + r]
        return ErrorBoundedValue.from_bounds(Fraction(0), abs(e) + r, self.precision_bits)

    # transcendental (via mpmath.iv) -----------------------------------------

    def to_iv(self):
        """Outward-rounded ``mpmath.iv`` interval; call inside :func:`iv_precision`."""
        lo = _iv_from_fraction(self.lo)
        hi = _iv_from_fraction(self.hi)
        return iv.mpf([lo.a, hi.b])

    def power(self, exponent: Number) -> "ErrorBoundedValue":
        """``self ** exponent`` for a rational exponent; the ball must be positive."""
        exponent = Fraction(exponent)
        if exponent.denominator == 1 and exponent >= 0:
            return self ** int(exponent)
        if self.lo <= 0:
            raise PrecisionError("rational power of a ball not certified positive")
        bits = self.precision_bits + GUARD_BITS
        with iv_precision(bits):
            y = iv.power(self.to_iv(), _iv_from_fraction(exponent))
            out = ErrorBoundedValue.from_iv(y, self.precision_bits)
        return ErrorBoundedValue(out.estimate, out.radius, self.precision_bits, self.certified)

    def sqrt(self) -> "ErrorBoundedValue":
        return self.power(Fraction(1, 2))

    def log(self) -> "ErrorBoundedValue":
        if self.lo <= 0:
            raise PrecisionError("log of a ball not certified positive")
        with iv_precision(self.precision_bits + GUARD_BITS):
            out = ErrorBoundedValue.from_iv(iv.log(self.to_iv()), self.precision_bits)
        return out

    # comparisons -----------------------------------------------------------

    def compare(self, relation: str, other, name: str = "") -> Decision:
        """Three-valued certified comparison ``self <relation> other``."""
        other = self._coerce(other)
        a_lo, a_hi, b_lo, b_hi = self.lo, self.hi, other.lo, other.hi
        if relation == "<":
            verdict = Verdict.HOLDS if a_hi < b_lo else Verdict.FAILS if a_lo >= b_hi else Verdict.UNDECIDABLE
        elif relation == "<=":
            verdict = Verdict.HOLDS if a_hi <= b_lo else Verdict.FAILS if a_lo > b_hi else Verdict.UNDECIDABLE
        elif relation == ">":
            return _flip(other.compare("<", self, name), self, other, ">")
        elif relation == ">=":
            return _flip(other.compare("<=", self, name), self, other, ">=")
        else:
            raise ValueError(f"unknown relation {relation!r}")
        if not (self.certified and other.certified) and verdict is not Verdict.UNDECIDABLE:
            # statistical radii never certify
            verdict = Verdict.UNDECIDABLE
        return Decision(name, relation, verdict, self, other)

    # output ----------------------------------------------------------------

    def decimal(self, digits: int = 30) -> str:
        return _fraction_to_decimal(self.estimate, digits)

    def to_json(self, digits: int = 30) -> list[str]:
        return [self.decimal(digits), _fraction_to_decimal(self.radius, 6, round_up=True)]


def _flip(d: Decision, lhs, rhs, relation) -> Decision:
    return Decision(d.name, relation, d.verdict, lhs, rhs)


def _fraction_to_decimal(x: Fraction, digits: int, round_up: bool = False) -> str:
    """Deterministic scientific-notation rendering with ``digits`` significant digits."""
    if x == 0:
        return "0"
    sign = "-" if x < 0 else ""
    x = abs(x)
    e = len(str(x.numerator)) - len(str(x.denominator))
    # normalize so that 10**(digits-1) <= m < 10**digits
    while True:
        scale = digits - 1 - e
        scaled = x * (Fraction(10) ** scale)
        if scaled >= 10**digits:
            e += 1
        elif scaled < 10 ** (digits - 1):
            e -= 1
        else:
            break
    m = math.ceil(scaled) if round_up else round(scaled)
    if m == 10**digits:
        m //= 10
        e += 1
    s = str(m)
    mant = s[0] + ("." + s[1:].rstrip("0") if s[1:].rstrip("0") else "")
    return f"{sign}{mant}e{e:+d}"


def linear_combination(
    constant: Fraction,
    coefficients: Iterable[Fraction],
    values: Iterable[ErrorBoundedValue],
    precision_bits: int,
) -> ErrorBoundedValue:
    """``constant + sum(c * v)`` with exact accumulation and a single final rounding."""
    mid = Fraction(constant)
    rad = Fraction(0)
    for c, v in zip(coefficients, values):
        c = Fraction(c)
        if c == 0:
            continue
        mid += c * v.estimate
        rad += abs(c) * v.radius
    return ErrorBoundedValue.from_rational(mid, precision_bits, rad)


# ---------------------------------------------------------------------------
# zeta constants


def _zeta_em(s: int, precision_bits: int) -> tuple[Fraction, Fraction]:
    """Euler-Maclaurin approximation of zeta(s) with a rigorous remainder bound.

    For f(x) = x**-s all even-order derivatives are positive on [N, oo), so
    the remainder after the B_{2p} term is bounded by the first omitted term.
    """
    target = Fraction(1, 1 << (precision_bits + 8))
    n_terms = precision_bits // 8 + 16
    while True:
        head = sum(Fraction(1, k**s) for k in range(1, n_terms))
        # tail sum_{k >= N} k**-s
        tail = Fraction(1, (s - 1) * n_terms ** (s - 1)) + Fraction(1, 2 * n_terms**s)
        rising = Fraction(s)  # s (s+1) ... (s + 2j - 2)
        prev_bound = None
        j = 1
        while True:
            term = bernoulli(2 * j) / math.factorial(2 * j) * rising / Fraction(n_terms ** (s + 2 * j - 1))
            next_rising = rising * (s + 2 * j - 1) * (s + 2 * j)
            bound = abs(
                bernoulli(2 * j + 2) / math.factorial(2 * j + 2) * next_rising / Fraction(n_terms ** (s + 2 * j + 1))
            )
            tail += term
            if bound < target:
                return head + tail, 2 * bound
            if prev_bound is not None and bound > prev_bound:
                break
            prev_bound = bound
            rising = next_rising
            j += 1
        n_terms *= 2


def zeta_int(s: int, precision_bits: int = DEFAULT_PRECISION) -> ErrorBoundedValue:
    """Certified zeta(s) for s in 2..5, radius below 2**(1 - precision_bits)."""
    if s not in (2, 3, 4, 5):
        raise ValueError(f"zeta_int supports s in 2..5, got {s}")
    if precision_bits < 2:
        raise ValueError("precision_bits must be >= 2")
    value, err = _zeta_em(s, precision_bits)
    return ErrorBoundedValue.from_rational(value, precision_bits, err)


def zeta_direct(s: int, terms: int, precision_bits: int = DEFAULT_PRECISION) -> ErrorBoundedValue:
    """Low-precision zeta(s): partial sum to ``terms`` plus an integral-comparison tail.

    ``K**(1-s)/(s-1) <= sum_{k>K} k**-s <= (K-1)**(1-s)/(s-1)`` is wide, so this
    is only a cross-check for :func:`zeta_int`.
    """
    if s not in (2, 3, 4, 5):
        raise ValueError(f"zeta_direct supports s in 2..5, got {s}")
    if terms < 2:
        raise ValueError("terms must be >= 2")
    head = sum(Fraction(1, k**s) for k in range(1, terms + 1))
    lo = head + Fraction(1, (s - 1) * (terms + 1) ** (s - 1))
    hi = head + Fraction(1, (s - 1) * terms ** (s - 1))
    return ErrorBoundedValue.from_bounds(lo, hi, precision_bits)


def certified_pi(precision_bits: int = DEFAULT_PRECISION) -> ErrorBoundedValue:
    with iv_precision(precision_bits + GUARD_BITS):
        return ErrorBoundedValue.from_iv(iv.pi, precision_bits)


def zeta_even_via_pi(k: int, precision_bits: int = DEFAULT_PRECISION) -> ErrorBoundedValue:
    """zeta(2k) = (-1)**(k-1) 2**(2k-1) c_{2k-1} pi**(2k) / (2k-1)!, for k in {1, 2}."""
    if k not in (1, 2):
        raise ValueError(f"zeta_even_via_pi supports k in (1, 2), got {k}")
    work = precision_bits + GUARD_BITS
    pi = certified_pi(work)
    coeff = (-1) ** (k - 1) * Fraction(2) ** (2 * k - 1) * laurent_coeff(2 * k - 1) / math.factorial(2 * k - 1)
    return ((pi ** (2 * k)) * coeff).with_precision(precision_bits)


@dataclass(frozen=True)
class ConstantsTable:
    precision_bits: int
    zeta2: ErrorBoundedValue
    zeta3: ErrorBoundedValue
    zeta4: ErrorBoundedValue
    zeta5: ErrorBoundedValue

    def zeta(self, s: int) -> ErrorBoundedValue:
        return {2: self.zeta2, 3: self.zeta3, 4: self.zeta4, 5: self.zeta5}[s]

    def to_json(self, digits: int = 40) -> dict:
        return {
            "precision_bits": self.precision_bits,
            **{f"zeta{s}": self.zeta(s).to_json(digits) for s in (2, 3, 4, 5)},
        }


_TABLES: dict[int, ConstantsTable] = {}
_TABLES_LOCK = threading.Lock()


def constants_table(precision_bits: int = DEFAULT_PRECISION) -> ConstantsTable:
    with _TABLES_LOCK:
        table = _TABLES.get(precision_bits)
        if table is None:
            table = ConstantsTable(precision_bits, *(zeta_int(s, precision_bits) for s in (2, 3, 4, 5)))
            _TABLES[precision_bits] = table
        return table


def eval_zeta_form(f, constants: ConstantsTable) -> ErrorBoundedValue:
    """Numeric image of ``c0 + c2 zeta(2) + ... + c5 zeta(5)``."""
    if constants.precision_bits < 64:
        raise ValueError("eval_zeta_form needs constants with >= 64 bits")
    return linear_combination(
        f.c0,
        (f.c2, f.c3, f.c4, f.c5),
        (constants.zeta2, constants.zeta3, constants.zeta4, constants.zeta5),
        constants.precision_bits,
    )
