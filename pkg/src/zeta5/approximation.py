"""Certified Dirichlet approximation, small-linear-form witnesses, and a
step-by-step numeric replay of the approximation argument built on the
linear forms ``beta = alpha + d zeta(5) + e``.

Every inequality of the replay is evaluated with ball arithmetic and stored
as a three-valued :class:`~zeta5.precision.Decision`.  Free choices (L, the
Dirichlet bound, gamma) are made by precision-independent rules so that a
decided verdict cannot change when the working precision changes.
"""
from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .bounds import delta_bound, epsilon_n
from .linear_forms import IntegerLinearForm, to_integer_form
from .precision import (
    DEFAULT_PRECISION,
    ConstantsTable,
    Decision,
    ErrorBoundedValue,
    PrecisionError,
    Verdict,
    constants_table,
    eval_zeta_form,
)
from .zeta_forms import ZetaForm

__all__ = [
    "RationalApproximation",
    "KeyLemmaWitness",
    "AuditParameters",
    "AuditTrace",
    "convergents",
    "dirichlet_approx",
    "key_lemma_witness",
    "simplest_dyadic",
    "audit_section3",
    "audit_many",
]


# ---------------------------------------------------------------------------
# Dirichlet approximation


@dataclass(frozen=True)
class RationalApproximation:
    p: int
    n: int
    bound: int
    quality: ErrorBoundedValue  # |alpha - p/n|
    method: str

    def to_json(self) -> dict:
        return {"p": str(self.p), "n": str(self.n), "N": str(self.bound), "quality": self.quality.to_json(), "method": self.method}


def convergents(x: Fraction, max_den: int) -> list[tuple[int, int]]:
    """Continued-fraction convergents of ``x`` up to the first denominator > max_den."""
    out = []
    p0, q0, p1, q1 = 0, 1, 1, 0
    num, den = x.numerator, x.denominator
    while den:
        a, rem = divmod(num, den)
        p0, q0, p1, q1 = p1, q1, a * p1 + p0, a * q1 + q0
        out.append((p1, q1))
        if q1 > max_den:
            break
        num, den = den, rem
    return out


def _certified_distance(alpha: ErrorBoundedValue, p: int, n: int) -> Fraction:
    """Upper bound of |alpha - p/n| over the ball (exact)."""
    target = Fraction(p, n)
    return max(abs(alpha.lo - target), abs(alpha.hi - target))


def dirichlet_approx(alpha: ErrorBoundedValue, N: int) -> RationalApproximation:
    """``p/n`` with ``n <= N`` and certified ``|alpha - p/n| < 1/(N n)``.

    Takes the last continued-fraction convergent with denominator <= N when
    both ball endpoints share it; otherwise scans n = 1..N.
    """
    if not isinstance(N, int) or N < 1:
        raise ValueError("N must be a positive integer")
    need = Fraction(1, 2 * N * N)
    if alpha.radius >= need:
        raise PrecisionError(f"alpha radius {float(alpha.radius):.3e} must be < 1/(2N^2) = {float(need):.3e}")
    lo_cf = convergents(alpha.lo, N)
    hi_cf = convergents(alpha.hi, N)
    if lo_cf == hi_cf:
        candidates = [pq for pq in lo_cf if pq[1] <= N]
        p, q = candidates[-1]
        if _certified_distance(alpha, p, q) < Fraction(1, N * q):
            return RationalApproximation(p, q, N, abs(alpha - Fraction(p, q)), "convergent")
    for n in range(1, N + 1):
        p = round(alpha.estimate * n)
        if _certified_distance(alpha, p, n) < Fraction(1, N * n):
            return RationalApproximation(p, n, N, abs(alpha - Fraction(p, n)), "exhaustive")
    raise PrecisionError(f"no certified Dirichlet approximation with n <= {N}; raise precision")


@dataclass(frozen=True)
class KeyLemmaWitness:
    x: int
    y: int
    distance: ErrorBoundedValue  # |alpha x - y|

    def to_json(self) -> dict:
        return {"x": str(self.x), "y": str(self.y), "distance": self.distance.to_json()}


def key_lemma_witness(alpha: ErrorBoundedValue, eps, x_bound: int) -> Optional[KeyLemmaWitness]:
    """Smallest ``x <= x_bound`` with certified ``0 < |alpha x - y| < eps``.

    ``None`` only means the bounded search found nothing.
    """
    eps = Fraction(eps)
    if eps <= 0 or x_bound < 1:
        raise ValueError("eps must be positive and x_bound >= 1")
    if alpha.radius >= eps / (4 * x_bound):
        raise PrecisionError(f"alpha radius must be < eps/(4 x_bound) = {float(eps / (4 * x_bound)):.3e}")
    for x in range(1, x_bound + 1):
        y = round(alpha.estimate * x)
        lo = alpha.lo * x - y
        hi = alpha.hi * x - y
        if (lo > 0 or hi < 0) and max(abs(lo), abs(hi)) < eps:
            return KeyLemmaWitness(x, y, abs(alpha * x - y))
    return None


# ---------------------------------------------------------------------------
# replay


@dataclass(frozen=True)
class AuditParameters:
    eps: Fraction = Fraction(1, 100)
    mu: Fraction = Fraction(1, 200)
    nu: Fraction = Fraction(1, 64)
    tau: Optional[Fraction] = None  # None selects tau = (1 + mu/2) / 2
    precision_bits: int = DEFAULT_PRECISION
    orientation: str = "oriented"

    def __post_init__(self):
        object.__setattr__(self, "eps", Fraction(self.eps))
        object.__setattr__(self, "mu", Fraction(self.mu))
        object.__setattr__(self, "nu", Fraction(self.nu))
        if self.tau is not None:
            object.__setattr__(self, "tau", Fraction(self.tau))
        if self.eps <= 0:
            raise ValueError("eps must be positive")
        if not 0 < self.mu < Fraction(1, 100):
            raise ValueError("mu must lie in (0, 1/100)")
        if not 0 < self.nu < Fraction(1, 2):
            raise ValueError("nu must lie in (0, 1/2)")
        if not Fraction(1, 2) < self.resolved_tau < 1:
            raise ValueError("tau must lie in (1/2, 1)")
        if self.precision_bits < 64:
            raise ValueError("precision must be >= 64 bits")
        if self.orientation not in ("oriented", "literal"):
            raise ValueError("orientation must be 'oriented' or 'literal'")

    @property
    def resolved_tau(self) -> Fraction:
        return self.tau if self.tau is not None else (1 + self.mu / 2) / 2

    def to_json(self) -> dict:
        def q(x):
            return f"{x.numerator}/{x.denominator}"

        return {
            "eps": q(self.eps),
            "mu": q(self.mu),
            "nu": q(self.nu),
            "tau": q(self.resolved_tau),
            "tau_rule": "given" if self.tau is not None else "(1+mu/2)/2",
            "precision_bits": self.precision_bits,
            "orientation": self.orientation,
        }


@dataclass
class AuditTrace:
    n: int
    params: AuditParameters
    case: str = "general"
    form: Optional[IntegerLinearForm] = None
    beta: Optional[ErrorBoundedValue] = None
    alpha: Optional[ErrorBoundedValue] = None
    L: Optional[Fraction] = None
    N: Optional[ErrorBoundedValue] = None
    dirichlet_bound: Optional[int] = None
    m: Optional[int] = None
    p: Optional[int] = None
    gamma: Optional[Fraction] = None
    M0: Optional[ErrorBoundedValue] = None
    m_M0: Optional[ErrorBoundedValue] = None
    decisions: list[Decision] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def decide(self, step: str, lhs, relation: str, rhs) -> Decision:
        d = _as_ball(lhs, self.params.precision_bits).compare(relation, _as_ball(rhs, self.params.precision_bits), step)
        self.decisions.append(d)
        return d

    def by_definition(self, step: str, lhs, relation: str, rhs, reason: str) -> Decision:
        """Record a link that holds by construction; intervals are kept for reference."""
        bits = self.params.precision_bits
        d = Decision(step, relation, Verdict.HOLDS, _as_ball(lhs, bits), _as_ball(rhs, bits))
        self.decisions.append(d)
        self.notes.append(f"{step}: holds by definition ({reason})")
        return d

    def equality(self, step: str, lhs, rhs) -> Decision:
        """A printed equality: fails if the balls are disjoint, undecidable otherwise."""
        bits = self.params.precision_bits
        lhs, rhs = _as_ball(lhs, bits), _as_ball(rhs, bits)
        if lhs.radius == 0 and rhs.radius == 0 and lhs.estimate == rhs.estimate:
            v = Verdict.HOLDS
        else:
            v = Verdict.UNDECIDABLE if lhs.overlaps(rhs) else Verdict.FAILS
        d = Decision(step, "==", v, lhs, rhs)
        self.decisions.append(d)
        return d

    def verdict(self, step: str) -> Optional[Verdict]:
        for d in self.decisions:
            if d.name == step:
                return d.verdict
        return None

    @property
    def final(self) -> Verdict:
        finals = [d.verdict for d in self.decisions if d.name.startswith("final")]
        if not finals:
            return Verdict.UNDECIDABLE
        if any(v is Verdict.FAILS for v in finals):
            return Verdict.FAILS
        if all(v is Verdict.HOLDS for v in finals):
            return Verdict.HOLDS
        return Verdict.UNDECIDABLE

    def to_json(self) -> dict:
        def q(x):
            return None if x is None else f"{x.numerator}/{x.denominator}"

        def b(x):
            return None if x is None else x.to_json()

        return {
            "n": self.n,
            "params": self.params.to_json(),
            "case": self.case,
            "linear_form": None if self.form is None else self.form.to_json(),
            "beta": b(self.beta),
            "alpha": b(self.alpha),
            "L": q(self.L),
            "N": b(self.N),
            "dirichlet_bound": None if self.dirichlet_bound is None else str(self.dirichlet_bound),
            "m": None if self.m is None else str(self.m),
            "p": None if self.p is None else str(self.p),
            "gamma": q(self.gamma),
            "M0": b(self.M0),
            "m_M0": b(self.m_M0),
            "final": self.final.value,
            "decisions": [d.to_json() for d in self.decisions],
            "notes": list(self.notes),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=1)


def _as_ball(x, bits: int) -> ErrorBoundedValue:
    if isinstance(x, ErrorBoundedValue):
        return x
    return ErrorBoundedValue.exact(Fraction(x), bits)


def simplest_dyadic(lo: ErrorBoundedValue, hi: ErrorBoundedValue, finest: int = 512) -> Optional[Fraction]:
    """Coarsest-granularity dyadic ``g`` with certified ``lo < g < hi``.

    Tries grids ``2**j * Z`` from coarse to fine and returns the smallest
    grid point above ``lo`` at the first grid that has one below ``hi``, so
    a power of two is chosen whenever one lies in the window.  Returns None
    when the window is empty down to ``2**-finest`` or the choice cannot be
    certified at the balls' precision.
    """
    top = max(abs(hi.hi), abs(lo.hi), Fraction(1))
    j = top.numerator.bit_length() - top.denominator.bit_length() + 2
    while j >= -finest:
        step = Fraction(2) ** j
        k_lo, k_hi = math.floor(lo.lo / step), math.floor(lo.hi / step)
        if k_lo != k_hi:
            return None
        g = (k_lo + 1) * step
        if hi.lo > g:
            return g
        if hi.hi > g:
            return None
        j -= 1
    return None


def _record_undecidable(trace: AuditTrace, step: str, why: str) -> AuditTrace:
    trace.notes.append(f"{step}: stopped, {why}")
    z = ErrorBoundedValue.exact(0, trace.params.precision_bits)
    trace.decisions.append(Decision(f"final: {step}", "?", Verdict.UNDECIDABLE, z, z))
    return trace


def audit_section3(
    n: int,
    params: Optional[AuditParameters] = None,
    form: Optional[IntegerLinearForm] = None,
    constants: Optional[ConstantsTable] = None,
) -> AuditTrace:
    """Replay the approximation argument for the linear form of index ``n``."""
    params = params or AuditParameters()
    bits = params.precision_bits
    constants = constants or constants_table(bits)
    form = form or to_integer_form(n)
    sign = (-1) ** n if params.orientation == "oriented" else 1
    a, bb, c, d, e = (sign * x for x in (form.a, form.b, form.c, form.d, form.e))
    tau, nu, mu, eps = params.resolved_tau, params.nu, params.mu, params.eps
    trace = AuditTrace(n, params, form=form)
    if sign == -1:
        trace.notes.append("integers multiplied by (-1)^n so that beta equals the positive integral")

    beta_form = ZetaForm(Fraction(e), Fraction(a), Fraction(bb), Fraction(c), Fraction(d))
    alpha_form = ZetaForm(Fraction(0), Fraction(a), Fraction(bb), Fraction(c), Fraction(0))
    beta = eval_zeta_form(beta_form, constants)
    alpha = eval_zeta_form(alpha_form, constants)
    trace.beta, trace.alpha = beta, alpha
    upper_form = ZetaForm(c5=delta_bound() ** n)
    upper = eval_zeta_form(upper_form, constants)
    gap = eval_zeta_form(upper_form - beta_form, constants)

    # (3.3)
    trace.decide("(3.3) 0 < beta", 0, "<", beta)
    if n >= 1:
        trace.decide("(3.3) eps_n <= beta", epsilon_n(n), "<=", beta)
    gap_d = gap.compare(">=", 0)
    trace.decisions.append(Decision("(3.3) beta <= delta^n zeta(5)", "<=", gap_d.verdict, beta, upper))

    if alpha_form.is_zero():
        trace.case = "alpha_zero"
        trace.decide("case 1: delta^n zeta(5) < eps", upper, "<", eps)
        trace.decide("final: 0 < |d zeta(5) + e|", 0, "<", abs(beta))
        trace.decide("final: |d zeta(5) + e| < eps", abs(beta), "<", eps)
        return trace

    if trace.verdict("(3.3) 0 < beta") is not Verdict.HOLDS:
        trace.case = "beta_not_positive"
        return _record_undecidable(trace, "beta", "beta is not certified positive; no square root available") \
            if trace.verdict("(3.3) 0 < beta") is Verdict.UNDECIDABLE else _fail(trace, "beta <= 0")

    try:
        sqrt_beta = beta.sqrt()
        lower_L = beta.power(-1 / (2 * tau))
        upper_L = lower_L * ErrorBoundedValue.exact(1 + nu, bits).power(1 / tau)
    except PrecisionError as exc:
        return _record_undecidable(trace, "(3.4)", str(exc))

    # (3.4): choose L in (beta^(-1/(2 tau)), ((1+nu)/sqrt(beta))^(1/tau))
    L = simplest_dyadic(lower_L, upper_L)
    if L is None:
        return _record_undecidable(trace, "(3.4)", "L window not certified at this precision")
    trace.L = L
    L_b = ErrorBoundedValue.exact(L, bits)
    L_tau = L_b.power(tau)
    trace.decide("(3.4) 1/L^tau < beta^(1/2)", L_tau.reciprocal(), "<", sqrt_beta)
    trace.decide("(3.4) beta^(1/2) < (1+nu)/L^tau", sqrt_beta, "<", (1 + nu) * L_tau.reciprocal())

    # (3.5)
    L_1mtau = L_b.power(1 - tau)
    N = L_1mtau / sqrt_beta
    trace.N = N
    q_lo, q_hi = math.floor(N.lo), math.floor(N.hi)
    if q_lo != q_hi or q_lo < 1:
        return _record_undecidable(trace, "(3.5)", "floor(N) not certified")
    trace.dirichlet_bound = q_lo

    # (3.6)
    try:
        approx = dirichlet_approx(alpha, q_lo)
    except PrecisionError as exc:
        return _record_undecidable(trace, "(3.6)", str(exc))
    m, p = approx.n, approx.p
    trace.m, trace.p = m, p
    trace.notes.append(f"(3.6) Dirichlet approximation via {approx.method} with N = floor(N_k) = {q_lo}")
    trace.decide("(3.6) |alpha - p/m| < 1/(N m)", approx.quality, "<", (N * m).reciprocal())

    # (3.7), (3.9): gamma in (max(1/L, 1/L^(1-mu)), 1/N)
    inv_N = N.reciprocal()
    inv_L = L_b.reciprocal()
    inv_L_1mmu = L_b.power(1 - mu).reciprocal()
    gamma = simplest_dyadic(inv_L_1mmu, inv_N)
    if gamma is None:
        trace.notes.append("(3.9) window (1/L^(1-mu), 1/N) empty or undecided; gamma taken from (1/L, 1/N)")
        gamma = simplest_dyadic(inv_L, inv_N)
    if gamma is None:
        trace.decide("(3.7) 1/L < 1/N", inv_L, "<", inv_N)
        return _record_undecidable(trace, "(3.7)", "no certified gamma in (1/L, 1/N)")
    trace.gamma = gamma
    trace.decide("(3.7) 0 < 1/L", 0, "<", inv_L)
    trace.decide("(3.7) 1/L < gamma", inv_L, "<", gamma)
    trace.decide("(3.7) gamma < 1/N", gamma, "<", inv_N)
    trace.by_definition("(3.7) 1/N = beta^(1/2)/L^(1-tau)", inv_N, "==", sqrt_beta / L_1mtau, "(3.5)")
    trace.decide("(3.7) 1/N <= m/N", inv_N, "<=", inv_N * m)
    trace.decide("(3.7) m/N <= 1", inv_N * m, "<=", 1)

    # (3.8)
    beta_exp = beta.power(1 - 1 / (2 * tau))  # beta^(1 - 1/(2 tau))
    trace.decide("(3.8) beta^(1/2) < eps/2", sqrt_beta, "<", eps / 2)
    trace.decide("(3.8) 2 beta^(1-1/(2tau)) < eps/2", 2 * beta_exp, "<", eps / 2)

    # (3.9)
    trace.decide("(3.9) 1/L < 1/L^(1-mu)", inv_L, "<", inv_L_1mmu)
    trace.decide("(3.9) 1/L^(1-mu) < gamma", inv_L_1mmu, "<", gamma)
    trace.decide("(3.9) gamma < 1", gamma, "<", 1)
    # (3.4) gives 1/N < (1+nu)/L, so (3.7) and (3.9) can share a gamma only if L^mu < 1+nu
    trace.decide("diagnostic: L^mu < 1+nu", L_b.power(mu), "<", 1 + nu)

    # (a)
    trace.decide("(a) 1/N <= beta^(1/2)", inv_N, "<=", sqrt_beta)
    trace.decide("(a) beta^(1/2) < eps/2", sqrt_beta, "<", eps / 2)

    # (b)
    one_nu = ErrorBoundedValue.exact(1 + nu, bits)
    b_coeff = one_nu.power((2 - mu) / (2 + mu))
    trace.decide("(b) m beta <= N beta", beta * m, "<=", N * beta)
    trace.by_definition("(b) N beta = L^(1-tau) beta^(1/2)", N * beta, "==", L_1mtau * sqrt_beta, "(3.5)")
    trace.decide(
        "(b) L^(1-tau) beta^(1/2) < (1+nu)^((2-mu)/(2+mu)) beta^(1-1/(2tau))",
        L_1mtau * sqrt_beta,
        "<",
        b_coeff * beta_exp,
    )
    trace.decide("(b) (1+nu)^((2-mu)/(2+mu)) beta^(1-1/(2tau)) <= 2 beta^(1-1/(2tau))", b_coeff * beta_exp, "<=", 2 * beta_exp)
    trace.decide("(b) 2 beta^(1-1/(2tau)) < eps/2", 2 * beta_exp, "<", eps / 2)

    # (c)
    gamma_b = ErrorBoundedValue.exact(gamma, bits)
    inv_Nm = (N * m).reciprocal()
    c1 = (gamma_b * N * N).reciprocal()
    c2 = beta / (gamma_b * L_1mtau * L_1mtau)
    beta_inv_tau = beta.power(1 / tau)
    c3 = beta_inv_tau / gamma_b
    c4 = L_b.power(1 - mu) * beta_inv_tau
    c5 = L_b.power(-mu) * one_nu.power(1 / tau) * beta.power(1 / (2 * tau))
    c6 = one_nu.power(4 / (2 + mu)) * beta.power((1 + mu) / (1 + mu / 2))
    trace.decide("(c) 1/(N m) <= 1/(gamma N^2)", inv_Nm, "<=", c1)
    trace.by_definition("(c) 1/(gamma N^2) = beta/(gamma L^(2(1-tau)))", c1, "==", c2, "(3.5)")
    trace.decide("(c) beta/(gamma L^(2(1-tau))) < beta^(1/tau)/gamma", c2, "<", c3)
    trace.decide("(c) beta^(1/tau)/gamma < L^(1-mu) beta^(1/tau)", c3, "<", c4)
    trace.equality("(c) L^(1-mu) beta^(1/tau) = L^(-mu) (1+nu)^(1/tau) beta^(1/(2tau))", c4, c5)
    trace.decide("(c) L^(1-mu) beta^(1/tau) <= L^(-mu) (1+nu)^(1/tau) beta^(1/(2tau))", c4, "<=", c5)
    trace.decide("(c) L^(-mu) (1+nu)^(1/tau) beta^(1/(2tau)) < (1+nu)^(4/(2+mu)) beta^((1+mu)/(1+mu/2))", c5, "<", c6)
    trace.decide("(c) (1+nu)^(4/(2+mu)) beta^((1+mu)/(1+mu/2)) < beta", c6, "<", beta)
    trace.decide("(c) 1/(N m) < beta", inv_Nm, "<", beta)

    # M0 = p/m + d zeta(5) + e, evaluated from its exact form
    M0 = eval_zeta_form(ZetaForm(c0=Fraction(p, m) + e, c5=Fraction(d)), constants)
    m_M0 = eval_zeta_form(ZetaForm(c0=Fraction(p + m * e), c5=Fraction(m * d)), constants)
    trace.M0, trace.m_M0 = M0, m_M0
    trace.decide("M0 >= beta - 1/(N m)", M0, ">=", beta - inv_Nm)
    trace.decide("beta - 1/(N m) >= beta - (1+nu)^(4/(2+mu)) beta^((1+mu)/(1+mu/2))", beta - inv_Nm, ">=", beta - c6)
    trace.decide("beta - (1+nu)^(4/(2+mu)) beta^((1+mu)/(1+mu/2)) > 0", beta - c6, ">", 0)
    trace.decide("beta - 1/(N m) > 0", beta - inv_Nm, ">", 0)
    trace.decide("1/(N m) < eps/(2m)", inv_Nm, "<", Fraction(eps) / (2 * m))
    trace.decide("beta < eps/(2m)", beta, "<", Fraction(eps) / (2 * m))
    trace.decide("M0 < eps/m", M0, "<", Fraction(eps) / m)
    trace.decide("final: 0 < m M0", 0, "<", m_M0)
    trace.decide("final: m M0 < eps", m_M0, "<", eps)
    return trace


def _fail(trace: AuditTrace, why: str) -> AuditTrace:
    trace.notes.append(f"stopped: {why}")
    z = ErrorBoundedValue.exact(0, trace.params.precision_bits)
    trace.decisions.append(Decision("final: beta > 0", ">", Verdict.FAILS, trace.beta or z, z))
    return trace


def _audit_json(args) -> str:
    n, params = args
    return audit_section3(n, params).dumps()


def audit_many(ns, params: Optional[AuditParameters] = None, workers: int = 1) -> list[str]:
    """Serialized traces for several n, computed serially or in worker processes."""
    params = params or AuditParameters()
    jobs = [(n, params) for n in ns]
    if workers <= 1:
        return [_audit_json(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_audit_json, jobs))
