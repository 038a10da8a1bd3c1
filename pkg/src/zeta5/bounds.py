"""Bound constants for the diagonal maximization of
Q(x) = prod x_i (1 - x_i) / (1 - x1 x2 x3 x4 x5), the sandwich check on the
linear forms, and the lcm / prime-counting growth scan.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from mpmath import iv

from .exact_core import lcm_upto, prime_pi
from .linear_forms import IntegerLinearForm, to_integer_form
from .precision import (
    DEFAULT_PRECISION,
    ConstantsTable,
    Decision,
    ErrorBoundedValue,
    Verdict,
    constants_table,
    eval_zeta_form,
    iv_precision,
)
from .zeta_forms import ZetaForm

__all__ = [
    "T1_LOW",
    "T1_HIGH",
    "G",
    "F",
    "gamma_bound",
    "delta_bound",
    "fifth_root_third",
    "BoundConstants",
    "critical_points",
    "epsilon_n",
    "Lemma33Row",
    "lemma33_check",
    "GrowthReport",
    "lcm_growth_scan",
    "printed_value_checks",
]

T1_LOW = Fraction(1, 2) + Fraction(1, 200)
T1_HIGH = Fraction(1, 2) + Fraction(1, 100)

# decimal values as printed, checked as exact rational equalities
PRINTED_G_LOW = Fraction("0.006586252353140625")
PRINTED_G_HIGH = Fraction("-0.002403712199")
PRINTED_GAMMA_NUM_BASE = Fraction("0.25245")
PRINTED_GAMMA_DEN = Fraction("0.9654974749")
PRINTED_DELTA = "0.2580667226431440537"
PRINTED_G_T0 = Fraction("-0.33790260")


class InconsistencyError(AssertionError):
    """An internal check that must hold by construction did not."""


def G(t) -> Fraction:
    t = Fraction(t)
    return 1 - 2 * t + t**6


def F(t) -> Fraction:
    """F(t) = t^5 (1-t)^5 / (1 - t^5), the restriction of Q to the diagonal."""
    t = Fraction(t)
    if not 0 <= t < 1:
        raise ValueError(f"F is defined on [0, 1), got {t}")
    return t**5 * (1 - t) ** 5 / (1 - t**5)


def gamma_bound() -> Fraction:
    """Upper bound for F on [T1_LOW, T1_HIGH] from its monotone factors."""
    return T1_HIGH**5 * (1 - T1_LOW) ** 5 / (1 - T1_HIGH**5)


def delta_bound() -> Fraction:
    return 3**5 * gamma_bound()


def fifth_root_third(precision_bits: int) -> ErrorBoundedValue:
    """(1/3)^(1/5) by exact bisection on t^5 = 1/3."""
    lo, hi = Fraction(0), Fraction(1)
    target = Fraction(1, 3)
    width = Fraction(1, 1 << (precision_bits + 2))
    while hi - lo > width:
        mid = (lo + hi) / 2
        if mid**5 < target:
            lo = mid
        else:
            hi = mid
    return ErrorBoundedValue.from_bounds(lo, hi, precision_bits)


@dataclass(frozen=True)
class BoundConstants:
    t0: ErrorBoundedValue
    g_t0: ErrorBoundedValue
    t1_bracket: tuple[Fraction, Fraction]
    gamma: Fraction
    delta: Fraction
    precision_bits: int

    def to_json(self) -> dict:
        def q(x: Fraction) -> str:
            return f"{x.numerator}/{x.denominator}"

        return {
            "precision_bits": self.precision_bits,
            "t0": self.t0.to_json(30),
            "G_t0": self.g_t0.to_json(30),
            "t1_bracket": [q(self.t1_bracket[0]), q(self.t1_bracket[1])],
            "G_t1_bracket": [q(G(self.t1_bracket[0])), q(G(self.t1_bracket[1]))],
            "gamma": q(self.gamma),
            "gamma_decimal": decimal_expansion(self.gamma, 40),
            "delta": q(self.delta),
            "delta_decimal": decimal_expansion(self.delta, 40),
        }


def decimal_expansion(x: Fraction, digits: int) -> str:
    """Truncated (not rounded) fixed-point expansion with ``digits`` decimals."""
    sign = "-" if x < 0 else ""
    x = abs(x)
    whole = x.numerator // x.denominator
    frac = x - whole
    scaled = (frac * 10**digits).numerator // (frac * 10**digits).denominator
    return f"{sign}{whole}.{scaled:0{digits}d}"


def critical_points(precision_bits: int = DEFAULT_PRECISION) -> BoundConstants:
    if precision_bits < 64:
        raise ValueError("critical_points needs >= 64 bits")
    lo, hi = T1_LOW, T1_HIGH
    if not (G(lo) > 0 and G(hi) < 0):
        raise InconsistencyError("G does not change sign on the bracket")
    t0 = fifth_root_third(precision_bits)
    g_t0 = 1 - 2 * t0 + t0**6
    if g_t0.compare("<", 0).verdict is not Verdict.HOLDS:
        raise InconsistencyError("G(t0) < 0 not certified")
    return BoundConstants(t0, g_t0, (lo, hi), gamma_bound(), delta_bound(), precision_bits)


def printed_value_checks(constants: Optional[BoundConstants] = None) -> list[dict]:
    """Each printed decimal compared with the value recomputed here."""
    bc = constants or critical_points()
    checks = [
        ("G(1/2+1/200) == 0.006586252353140625", G(T1_LOW) == PRINTED_G_LOW),
        ("G(1/2+1/100) == -0.002403712199", G(T1_HIGH) == PRINTED_G_HIGH),
        ("(1/2+1/100)(1/2-1/200) == 0.25245", T1_HIGH * (1 - T1_LOW) == PRINTED_GAMMA_NUM_BASE),
        ("1-(1/2+1/100)^5 == 0.9654974749", 1 - T1_HIGH**5 == PRINTED_GAMMA_DEN),
        ("gamma == 0.25245^5 / 0.9654974749", bc.gamma == PRINTED_GAMMA_NUM_BASE**5 / PRINTED_GAMMA_DEN),
        (
            "delta matches 0.2580667226 to 1e-9",
            abs(bc.delta - Fraction("0.2580667226")) < Fraction(1, 10**9),
        ),
        (
            "G(t0) matches -0.337902 to 1e-6",
            abs(bc.g_t0.estimate - Fraction("-0.337902")) + bc.g_t0.radius < Fraction(1, 10**6),
        ),
    ]
    out = [{"check": name, "pass": bool(ok)} for name, ok in checks]
    out.append(
        {
            "check": "delta full printed string",
            "printed": PRINTED_DELTA,
            "computed": decimal_expansion(bc.delta, len(PRINTED_DELTA) - 2),
            "pass": decimal_expansion(bc.delta, len(PRINTED_DELTA) - 2) == PRINTED_DELTA,
        }
    )
    return out


# ---------------------------------------------------------------------------
# sandwich


def epsilon_n(n: int) -> Fraction:
    """lcm(1..n)^5 4^(-10n) / (2^5 (1 - 4^-5)^(n+1))."""
    if n < 1:
        raise ValueError("epsilon_n is defined for n >= 1")
    m = lcm_upto(n)[n]
    return Fraction(m**5, 4 ** (10 * n)) / (2**5 * (1 - Fraction(1, 4**5)) ** (n + 1))


@dataclass
class Lemma33Row:
    n: int
    orientation: str
    beta: ErrorBoundedValue
    epsilon: Fraction
    lower: Decision
    upper: Decision
    lcm_le_3n: bool

    @property
    def holds(self) -> bool:
        return self.lower.holds and self.upper.holds

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "orientation": self.orientation,
            "beta": self.beta.to_json(30),
            "epsilon_n": f"{self.epsilon.numerator}/{self.epsilon.denominator}",
            "lower": self.lower.to_json(),
            "upper": self.upper.to_json(),
            "lcm_le_3^n": self.lcm_le_3n,
        }


def lemma33_check(
    n: int,
    constants: Optional[ConstantsTable] = None,
    form: Optional[IntegerLinearForm] = None,
    orientation: str = "literal",
) -> Lemma33Row:
    """Certified verdicts for eps_n <= beta_n and beta_n <= delta^n zeta(5).

    ``orientation="literal"`` uses the integers of the linear form as built;
    ``"oriented"`` multiplies them by (-1)^n, which is the form whose value is
    lcm^5 times the positive integrand ``prod x^n(1-x)^n / (1-prod x)^(n+1)``.
    The upper comparison is done on the exact difference form, so no
    cancellation between two intervals is involved.
    """
    if n < 1:
        raise ValueError("lemma33_check needs n >= 1")
    constants = constants or constants_table()
    form = form or to_integer_form(n)
    sign = _orientation_sign(n, orientation)
    beta_form = form.zeta_form().scale(sign)
    beta = eval_zeta_form(beta_form, constants)
    eps = epsilon_n(n)
    lower = ErrorBoundedValue.exact(eps, constants.precision_bits).compare("<=", beta, "eps_n <= beta_n")
    rhs_form = ZetaForm(c5=delta_bound() ** n)
    gap = eval_zeta_form(rhs_form - beta_form, constants)
    upper_gap = gap.compare(">=", 0, "delta^n zeta(5) - beta_n >= 0")
    upper = Decision("beta_n <= delta^n zeta(5)", "<=", upper_gap.verdict, beta, eval_zeta_form(rhs_form, constants))
    return Lemma33Row(n, orientation, beta, eps, lower, upper, form.lcm <= 3**n)


def _orientation_sign(n: int, orientation: str) -> int:
    if orientation == "literal":
        return 1
    if orientation == "oriented":
        return (-1) ** n
    raise ValueError(f"orientation must be 'literal' or 'oriented', got {orientation!r}")


# ---------------------------------------------------------------------------
# growth scan


@dataclass
class GrowthReport:
    max_n: int
    max_ln_lcm_over_n: float
    argmax_ln_lcm: int
    max_pi_lnn_over_n: float
    argmax_pi_lnn: int
    lcm_below_3n_all: bool
    first_lcm_violation: Optional[int]
    pi_bound_violations: list[int]
    rows: list[tuple[int, int, float, float]] = field(default_factory=list)
    certified_max_ln_lcm: Optional[ErrorBoundedValue] = None

    CSV_COLUMNS = ("n", "pi_n", "ln_lcm_over_n", "pi_lnn_over_n")

    def findings(self) -> list[str]:
        out = []
        if self.pi_bound_violations:
            out.append(
                f"pi(n) <= ln3 * n / ln n fails for {len(self.pi_bound_violations)} n in 2..{self.max_n}; "
                f"largest such n = {max(self.pi_bound_violations)}; max pi(n) ln n / n = "
                f"{self.max_pi_lnn_over_n:.6f} at n = {self.argmax_pi_lnn}; lcm(1..n) < 3^n still holds "
                f"for all n <= {self.max_n}: {self.lcm_below_3n_all}"
            )
        return out

    def to_json(self) -> dict:
        return {
            "max_n": self.max_n,
            "max_ln_lcm_over_n": self.max_ln_lcm_over_n,
            "argmax_ln_lcm_over_n": self.argmax_ln_lcm,
            "certified_max_ln_lcm_over_n": None
            if self.certified_max_ln_lcm is None
            else self.certified_max_ln_lcm.to_json(20),
            "ln3": math.log(3),
            "lcm_below_3^n_for_all_n": self.lcm_below_3n_all,
            "first_lcm_violation": self.first_lcm_violation,
            "max_pi_lnn_over_n": self.max_pi_lnn_over_n,
            "argmax_pi_lnn_over_n": self.argmax_pi_lnn,
            "pi_bound_violation_count": len(self.pi_bound_violations),
            "largest_pi_bound_violation": max(self.pi_bound_violations) if self.pi_bound_violations else None,
            "findings": self.findings(),
        }


def _sample_points(max_n: int) -> list[int]:
    pts = set(range(1, min(max_n, 120) + 1))
    k = 1
    while 10**k <= max_n:
        for m in (1, 2, 5):
            if m * 10**k <= max_n:
                pts.add(m * 10**k)
        k += 1
    pts.add(max_n)
    return sorted(pts)


def lcm_growth_scan(max_n: int) -> GrowthReport:
    """Exact scan of lcm(1..n) against 3^n and of pi(n) ln n / n against ln 3.

    The lcm bound is decided by exact integer comparison; the reported
    logarithms are for display, with the maximizer re-evaluated as a
    certified interval.
    """
    if max_n < 100:
        raise ValueError("lcm_growth_scan needs max_n >= 100")
    lcm = lcm_upto(max_n)
    pi = prime_pi(max_n)
    ln3 = math.log(3)
    three_n = 1
    all_ok = True
    first_bad = None
    best_lcm = (-1.0, 0)
    best_pi = (-1.0, 0)
    violations = []
    for n in range(1, max_n + 1):
        three_n *= 3
        m = lcm[n]
        if not m < three_n:
            all_ok = False
            first_bad = first_bad or n
        ratio = math.log(m) / n
        if ratio > best_lcm[0]:
            best_lcm = (ratio, n)
        if n >= 2:
            pr = pi[n] * math.log(n) / n
            if pr > best_pi[0]:
                best_pi = (pr, n)
            # pi(n) <= ln3 n / ln n  <=>  pi(n) ln n <= ln3 n; decide with intervals
            if _pi_bound_fails(pi[n], n, three_n):
                violations.append(n)
    rows = []
    for n in _sample_points(max_n):
        pr = pi[n] * math.log(n) / n if n >= 2 else 0.0
        rows.append((n, pi[n], math.log(lcm[n]) / n, pr))
    with iv_precision(96):
        cert = ErrorBoundedValue.from_iv(iv.log(iv.mpf(lcm[best_lcm[1]])) / best_lcm[1], 64)
    return GrowthReport(
        max_n,
        best_lcm[0],
        best_lcm[1],
        best_pi[0],
        best_pi[1],
        all_ok,
        first_bad,
        violations,
        rows,
        cert,
    )


def _pi_bound_fails(count: int, n: int, three_n: int) -> bool:
    # count * ln n > ln 3 * n  <=>  n**count > 3**n, decided exactly
    return n**count > three_n
