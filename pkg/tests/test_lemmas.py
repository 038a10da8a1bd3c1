from dataclasses import replace
from fractions import Fraction

import pytest

from zeta5.lemmas import (
    LEMMA_PATTERNS,
    check_lemma,
    engine_symbols,
    lemma_closed_form,
    lemma_for,
    lemma_terms,
    oracle_check,
    sorted_vectors,
    verify_lemmas,
)
from zeta5.lemmas import _terms_to_form
from zeta5.zeta_forms import closed_form


@pytest.fixture(scope="module")
def checks():
    return verify_lemmas(6)


def test_coverage_counts(checks):
    counts = {}
    for c in checks:
        counts[c.lemma] = counts.get(c.lemma, 0) + 1
    assert counts == {
        "Lemma 2.1": 21,
        "Lemma 2.2": 35,
        "Lemma 2.3": 35,
        "Lemma 2.4": 21,
        "Lemma 2.5": 35,
        "Lemma 2.6": 21,
        "Lemma 2.7": 7,
    }


@pytest.mark.parametrize("label", ["Lemma 2.1", "Lemma 2.2", "Lemma 2.3", "Lemma 2.4", "Lemma 2.6", "Lemma 2.7"])
def test_printed_formula_equals_engine(checks, label):
    assert all(c.matches for c in checks if c.lemma == label)


def test_lemma_25_mismatch_traced_to_term_4(checks):
    bad = [c for c in checks if c.lemma == "Lemma 2.5" and not c.matches]
    assert len(bad) == 26
    for c in bad:
        assert c.suspect_terms == [4]
        assert [m["symbol"] for m in c.mismatched_symbols] == [f"H({c.r[2]},{c.r[0]}]"]


def test_lemma_25_matches_exactly_on_equal_gaps(checks):
    for c in checks:
        if c.lemma == "Lemma 2.5":
            r1, r2, r3, r4, r5 = c.r
            assert c.matches == (r2 - r3 == r3 - r4)


def test_lemma_25_plus_is_the_only_viable_operator(checks):
    for c in checks:
        if c.lemma == "Lemma 2.5":
            assert c.sign_variants["-"] is False
            assert c.sign_variants["+"] == c.matches


def test_lemma_25_corrected_bracket_matches_engine():
    # replacing 1/(r3-r4) by 2/(r2-r4) in the fourth bracket fixes every case
    for r in sorted_vectors(7):
        if lemma_for(r) != "Lemma 2.5":
            continue
        r1, r2, r3, r4, r5 = r
        terms = lemma_terms(r)
        fixed = Fraction(1, (r2 - r4) ** 2 * (r2 - r3)) * (Fraction(1, r2 - r3) + Fraction(2, r2 - r4))
        terms[3] = replace(terms[3], coefficient=fixed)
        assert _terms_to_form(terms) == closed_form(r)


def test_uncovered_pattern_returns_none():
    r = (1, 0, 0, 0, 0)
    assert lemma_for(r) is None
    assert check_lemma(r) is None
    assert lemma_closed_form(r) is None


def test_pattern_table_covers_seven_compositions():
    assert len(LEMMA_PATTERNS) == 7
    assert lemma_for((5, 4, 3, 2, 1)) == "Lemma 2.1"


def test_engine_symbols_rebuild_closed_form():
    from zeta5.lemmas import _symbol_form
    from zeta5.zeta_forms import ZetaForm

    for r in [(4, 4, 2, 1, 1), (3, 3, 3, 1, 0), (5, 2, 2, 2, 2), (6, 5, 3, 1, 0)]:
        total = ZetaForm()
        for sym, coeff in engine_symbols(r).items():
            total = total + _symbol_form(sym).scale(coeff)
        assert total == closed_form(r)


def test_mismatch_json_reports_difference():
    c = check_lemma((4, 4, 2, 1, 1))
    data = c.to_json()
    assert data["matches"] is False
    assert data["lemma"] == "Lemma 2.5"
    assert any(v != "0/1" for v in data["difference"].values())


def test_oracle_check_single_vector():
    o = oracle_check((2, 1, 1, 0, 0), terms=2000, precision_bits=64)
    assert o.agrees
