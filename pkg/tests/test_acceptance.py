"""One test per acceptance criterion; each prints a PASS/FAIL line.

Criteria 3 and 5 are checked literally on the forms as constructed.  They
are expected to fail for odd n because the expansion carries a (-1)^n sign
relative to the positive integrand; the sign-corrected variants are printed
alongside for reference.
"""
import math
import random
import time
from fractions import Fraction

import mpmath
import pytest

from zeta5.approximation import AuditParameters, audit_many, dirichlet_approx
from zeta5.bounds import (
    PRINTED_DELTA,
    critical_points,
    decimal_expansion,
    delta_bound,
    gamma_bound,
    G,
    lcm_growth_scan,
    lemma33_check,
)
from zeta5.lemmas import oracle_suite, verify_lemmas
from zeta5.linear_forms import expand_In, integer_forms, quadrature_In
from zeta5.precision import ErrorBoundedValue, Verdict, certified_pi, constants_table, eval_zeta_form
from zeta5.zeta_forms import ZetaForm


@pytest.fixture
def emit(capsys):
    def _emit(k: int, ok: bool, detail: str) -> None:
        with capsys.disabled():
            print(f"\nACCEPTANCE {k}: {'PASS' if ok else 'FAIL'} | {detail}")

    return _emit


def test_criterion_1_lemma_engine_oracle_suite(emit):
    start = time.perf_counter()
    oracle = oracle_suite(max_entry=6, terms=10**5, precision_bits=256)
    disagreements = [o.r for o in oracle if not o.agrees]
    radius = max(max(o.engine.radius, o.oracle.radius) for o in oracle)
    checks = verify_lemmas(6)
    mismatches = [c for c in checks if not c.matches]
    untraced = [c.r for c in mismatches if not c.suspect_terms]
    labels = sorted({c.lemma for c in mismatches})
    lines = sorted({t for c in mismatches for t in c.suspect_terms})
    elapsed = time.perf_counter() - start
    ok = len(oracle) == 462 and not disagreements and radius < Fraction(1, 10**15) and not untraced and elapsed < 120
    emit(
        1,
        ok,
        f"{len(oracle)} vectors, {len(disagreements)} oracle disagreements, max radius {float(radius):.2e} < 1e-15; "
        f"{len(checks)} printed-formula cases, {len(mismatches)} findings in {labels} at term(s) {lines}; {elapsed:.1f}s < 120s",
    )
    assert ok


def test_criterion_2_integrality(emit):
    start = time.perf_counter()
    forms = integer_forms(range(0, 11))
    elapsed = time.perf_counter() - start
    ok = len(forms) == 11 and all(
        f.zeta_form().scale(Fraction(1, f.lcm**5)) == expand_In(f.n) for f in forms
    ) and elapsed < 180
    emit(2, ok, f"n = 0..10 scaled coefficients exact integers; max bits {forms[-1].max_bits()}; {elapsed:.1f}s < 180s")
    assert ok


def test_criterion_3_sandwich_literal(emit):
    table = constants_table(256)
    forms = integer_forms(range(1, 11))
    literal = [lemma33_check(f.n, table, f, "literal") for f in forms]
    oriented = [lemma33_check(f.n, table, f, "oriented") for f in forms]
    bad = [(r.n, r.lower.verdict.value, r.upper.verdict.value) for r in literal if not r.holds]
    ok = not bad
    emit(
        3,
        ok,
        f"eps_n <= beta_n <= delta^n zeta(5) at 256 bits, n = 1..10: not holding {bad}; "
        f"with beta_n multiplied by (-1)^n all hold: {all(r.holds for r in oriented)}",
    )
    assert ok


def test_criterion_4_printed_constants(emit):
    bc = critical_points(256)
    results = {
        "G(101/200)": G(Fraction(101, 200)) == Fraction("0.006586252353140625"),
        "G(51/100)": G(Fraction(51, 100)) == Fraction(-2403712199, 10**12),
        "gamma": gamma_bound() == Fraction(25245, 100000) ** 5 / Fraction(9654974749, 10**10),
        "delta 1e-9": abs(delta_bound() - Fraction("0.2580667226")) < Fraction(1, 10**9),
        "G(t0) 1e-6": abs(bc.g_t0.estimate - Fraction("-0.337902")) + bc.g_t0.radius < Fraction(1, 10**6),
    }
    ok = all(results.values())
    emit(
        4,
        ok,
        f"{results}; delta = {decimal_expansion(delta_bound(), 40)} "
        f"(printed {PRINTED_DELTA} reproduced: {decimal_expansion(delta_bound(), 19) == PRINTED_DELTA})",
    )
    assert ok


def test_criterion_5_monte_carlo_literal(emit):
    table = constants_table(256)
    literal, oriented, rows = [], [], []
    for n in range(4):
        mc = quadrature_In(n, samples=10**6, seed=20240501)
        exact = eval_zeta_form(expand_In(n), table)
        flipped = eval_zeta_form(expand_In(n).scale((-1) ** n), table)
        literal.append(mc.lo <= exact.estimate <= mc.hi)
        oriented.append(mc.lo <= flipped.estimate <= mc.hi)
        rows.append(f"n={n}: mc {float(mc.estimate):.6e}+/-{float(mc.radius):.1e} exact {float(exact.estimate):.6e}")
    i0 = expand_In(0) == ZetaForm(c5=Fraction(1))
    ok = all(literal) and i0
    emit(
        5,
        ok,
        f"3-sigma containment per n {literal} (sign-corrected {oriented}); I_0 == zeta(5): {i0}; " + "; ".join(rows),
    )
    assert ok


def test_criterion_6_lcm_growth(emit):
    start = time.perf_counter()
    rep = lcm_growth_scan(10**4)
    elapsed = time.perf_counter() - start
    ln3 = ErrorBoundedValue.exact(3, 64).log()
    certified = rep.certified_max_ln_lcm.compare("<", ln3).holds
    pi_ok = rep.argmax_pi_lnn == 113 and abs(rep.max_pi_lnn_over_n - 1.2551) < 1e-4
    ok = rep.lcm_below_3n_all and certified and pi_ok and elapsed < 30
    emit(
        6,
        ok,
        f"lcm(1..n) < 3^n for all n <= 1e4: {rep.lcm_below_3n_all}; max ln m(n)/n = {rep.max_ln_lcm_over_n:.6f} "
        f"at n = {rep.argmax_ln_lcm} (< ln 3 certified: {certified}); finding: max pi(n) ln n/n = "
        f"{rep.max_pi_lnn_over_n:.6f} at n = {rep.argmax_pi_lnn}; {elapsed:.2f}s < 30s",
    )
    assert ok


def test_criterion_7_dirichlet_suite(emit):
    rng = random.Random(7)
    failures = []
    for _ in range(100):
        N = rng.randint(1, 1000)
        x = Fraction(rng.getrandbits(200) - 2**199, 2**190 + rng.getrandbits(180))
        alpha = ErrorBoundedValue(x, Fraction(1, 2**200), 256)
        a = dirichlet_approx(alpha, N)
        bound = Fraction(1, N * a.n)
        # exhaustive independent check on both ball endpoints
        if not (1 <= a.n <= N and abs(alpha.lo - Fraction(a.p, a.n)) < bound and abs(alpha.hi - Fraction(a.p, a.n)) < bound):
            failures.append((x, N))
        exists = any(
            abs(x - Fraction(round(x * n), n)) < Fraction(1, N * n) for n in range(1, N + 1)
        )
        if not exists:
            failures.append(("no approximation exists?", x, N))
    pi = dirichlet_approx(certified_pi(128), 10)
    ok = not failures and (pi.p, pi.n) == (22, 7)
    emit(7, ok, f"100 seeded alpha, N <= 1000: {len(failures)} failures; (pi, N=10) -> ({pi.p},{pi.n})")
    assert ok


def test_criterion_8_audit_determinism(emit):
    params = AuditParameters()
    ns = list(range(1, 9))
    first = audit_many(ns, params, workers=1)
    second = audit_many(ns, params, workers=1)
    pooled = audit_many(ns, params, workers=8)
    identical = first == second == pooled
    flips = []
    import json

    low = [json.loads(t) for t in audit_many(ns, AuditParameters(precision_bits=128))]
    high = [json.loads(t) for t in audit_many(ns, AuditParameters(precision_bits=512))]
    for a, b in zip(low, high):
        hv = {d["name"]: d["verdict"] for d in b["decisions"]}
        for d in a["decisions"]:
            v = hv.get(d["name"])
            if {d["verdict"], v} == {"holds", "fails"}:
                flips.append((a["n"], d["name"]))
    undecided_128 = sum(d["verdict"] == "undecidable" for t in low for d in t["decisions"])
    ok = identical and not flips
    emit(
        8,
        ok,
        f"n = 1..8 byte-identical across runs and 1 vs 8 workers: {identical}; holds<->fails flips 128->512 bits: "
        f"{len(flips)}; undecidable at 128 bits: {undecided_128}",
    )
    assert ok
