"""Printed closed forms for seven multiplicity patterns, kept verbatim, and a
checker that compares them with the general engine.

Each printed formula is a list of terms ``coefficient * symbol`` where a
symbol is either a harmonic block ``('H', lo, hi) = 1/(lo+1) + ... + 1/hi``
or a zeta tail ``('Z', j, m) = zeta(j) - (1 + ... + 1/m**j)``.  Terms are
numbered from 1 in printed order, so a mismatch can be traced to the term
that causes it.  Signs and operators are transcribed as printed; the one
term printed without a leading operator is transcribed as ``+`` and flagged.
"""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Callable, Iterable, Optional

from .exact_core import gen_harmonic
from .precision import DEFAULT_PRECISION, ErrorBoundedValue, constants_table, eval_zeta_form
from .zeta_forms import (
    ZetaForm,
    canonical,
    classify,
    closed_form,
    partial_fractions,
    pole_system,
    series_oracle,
)

__all__ = [
    "LEMMA_PATTERNS",
    "Term",
    "lemma_for",
    "lemma_terms",
    "lemma_closed_form",
    "engine_symbols",
    "LemmaCheck",
    "check_lemma",
    "verify_lemmas",
    "MISSING_OPERATOR_TERMS",
    "OracleCheck",
    "sorted_vectors",
    "oracle_check",
    "oracle_suite",
]

Symbol = tuple  # ('H', lo, hi) or ('Z', j, m)


@dataclass(frozen=True)
class Term:
    index: int
    coefficient: Fraction
    symbol: Symbol


def _H(lo: int, hi: int) -> Symbol:
    return ("H", lo, hi)


def _Z(j: int, m: int) -> Symbol:
    return ("Z", j, m)


def _q(x) -> Fraction:
    return Fraction(x)


def _terms(*pairs) -> list[Term]:
    return [Term(i, _q(c), s) for i, (c, s) in enumerate(pairs, start=1)]


def _lemma_2_1(r1, r2, r3, r4, r5, sign=1):
    return _terms(
        (_q(1) / ((r1 - r5) * (r2 - r5) * (r3 - r5) * (r4 - r5)), _H(r5, r4)),
        (
            -_q(1) / ((r1 - r5) * (r3 - r4))
            * (_q(1) / ((r2 - r5) * (r3 - r5)) + _q(1) / ((r2 - r5) * (r2 - r4)) + _q(1) / ((r1 - r4) * (r2 - r4))),
            _H(r4, r3),
        ),
        (
            _q(1) / ((r1 - r5) * (r2 - r3))
            * (_q(1) / ((r2 - r5) * (r2 - r4)) + _q(1) / ((r1 - r4) * (r2 - r4)) + _q(1) / ((r1 - r4) * (r1 - r3))),
            _H(r3, r2),
        ),
        (-_q(1) / ((r1 - r5) * (r1 - r4) * (r1 - r3) * (r1 - r2)), _H(r2, r1)),
    )


def _lemma_2_2(r1, r2, r3, r4, r5, sign=1):
    return _terms(
        (_q(1) / ((r2 - r5) ** 2 * (r3 - r5) * (r4 - r5)), _H(r5, r2)),
        (
            -_q(1) / ((r2 - r5) * (r2 - r4))
            * (_q(1) / ((r3 - r4) * (r3 - r5)) + _q(1) / ((r3 - r4) * (r2 - r4)) + _q(1) / ((r3 - r5) * (r4 - r5))),
            _H(r4, r2),
        ),
        (
            _q(1) / ((r2 - r5) * (r2 - r3))
            * (_q(1) / ((r3 - r4) * (r3 - r5)) + _q(1) / ((r3 - r4) * (r2 - r4)) + _q(1) / ((r2 - r3) * (r2 - r4))),
            _H(r3, r2),
        ),
        (-_q(1) / ((r2 - r5) * (r2 - r4) * (r2 - r3)), _Z(2, r2)),
    )


def _lemma_2_3(r1, r2, r3, r4, r5, sign=1):
    return _terms(
        (_q(1) / ((r3 - r5) ** 3 * (r4 - r5)), _H(r5, r3)),
        (-_q(1) / ((r3 - r5) * (r3 - r4) ** 2) * (_q(1) / (r4 - r5) + _q(1) / (r3 - r4)), _H(r4, r3)),
        (
            _q(1) / (r3 - r5)
            * (_q(1) / ((r3 - r4) * (r4 - r5)) + _q(1) / (r3 - r4) ** 2 - _q(1) / ((r3 - r5) * (r4 - r5))),
            _Z(2, r3),
        ),
        (_q(1) / ((r3 - r5) * (r3 - r4)), _Z(3, r3)),
    )


def _lemma_2_4(r1, r2, r3, r4, r5, sign=1):
    d = r4 - r5
    return _terms(
        (_q(1) / d**4, _H(r5, r4)),
        (-_q(1) / d**3, _Z(2, r4)),
        (-_q(1) / d**2, _Z(3, r4)),
        (-_q(1) / d, _Z(4, r4)),
    )


def _lemma_2_5(r1, r2, r3, r4, r5, sign=1):
    # ``sign`` stands in for the operator missing in front of term 4.
    return _terms(
        (_q(1) / ((r2 - r4) ** 2 * (r3 - r4)), _Z(2, r4)),
        (-_q(1) / ((r2 - r4) ** 2 * (r3 - r4)) * (_q(1) / (r3 - r4) + _q(1) / (r2 - r3)), _H(r4, r3)),
        (_q(1) / (r2 - r4) ** 3 * (_q(1) / (r2 - r3) - _q(1) / (r3 - r4)), _H(r4, r3)),
        (sign * _q(1) / ((r2 - r4) ** 2 * (r2 - r3)) * (_q(1) / (r2 - r3) + _q(1) / (r3 - r4)), _H(r3, r2)),
        (-_q(1) / ((r2 - r4) ** 2 * (r2 - r3)), _Z(2, r2)),
    )


def _lemma_2_6(r1, r2, r3, r4, r5, sign=1):
    d = r3 - r4
    return _terms(
        (_q(1) / d**3, _Z(2, r4)),
        (-_q(3) / d**4, _H(r4, r3)),
        (_q(2) / d**3, _Z(2, r3)),
        (_q(1) / d**2, _Z(3, r3)),
    )


def _lemma_2_7(r1, r2, r3, r4, r5, sign=1):
    return _terms((1, _Z(5, r1)))


# multiplicity pattern -> (label, transcription)
LEMMA_PATTERNS: dict[tuple[int, ...], tuple[str, Callable]] = {
    (1, 1, 1, 1, 1): ("Lemma 2.1", _lemma_2_1),
    (2, 1, 1, 1): ("Lemma 2.2", _lemma_2_2),
    (3, 1, 1): ("Lemma 2.3", _lemma_2_3),
    (4, 1): ("Lemma 2.4", _lemma_2_4),
    (2, 1, 2): ("Lemma 2.5", _lemma_2_5),
    (3, 2): ("Lemma 2.6", _lemma_2_6),
    (5,): ("Lemma 2.7", _lemma_2_7),
}

# label -> index of the term printed without a leading operator
MISSING_OPERATOR_TERMS: dict[str, int] = {"Lemma 2.5": 4}


def lemma_for(r: Iterable[int]) -> Optional[str]:
    entry = LEMMA_PATTERNS.get(classify(r))
    return entry[0] if entry else None


def lemma_terms(r: Iterable[int], sign: int = 1) -> Optional[list[Term]]:
    """Printed terms for ``r`` (sorted), or None when no printed formula applies."""
    s = canonical(r)
    entry = LEMMA_PATTERNS.get(classify(s))
    if entry is None:
        return None
    return entry[1](*s, sign=sign)


def _symbol_form(symbol: Symbol) -> ZetaForm:
    kind, a, b = symbol
    if kind == "H":
        return ZetaForm.constant(gen_harmonic(b, 1) - gen_harmonic(a, 1))
    return ZetaForm.zeta_tail(a, b)


def _terms_to_form(terms: list[Term]) -> ZetaForm:
    total = ZetaForm()
    for t in terms:
        total = total + _symbol_form(t.symbol).scale(t.coefficient)
    return total


def lemma_closed_form(r: Iterable[int], sign: int = 1) -> Optional[ZetaForm]:
    """Printed right-hand side as a ZetaForm; None marks an uncovered pattern."""
    terms = lemma_terms(r, sign)
    return None if terms is None else _terms_to_form(terms)


# ---------------------------------------------------------------------------
# symbolic comparison


def _split_blocks(symbol: Symbol, values: list[int]) -> dict[Symbol, int]:
    """Break ``H(lo, hi)`` into unit blocks between consecutive distinct values."""
    _, lo, hi = symbol
    inside = sorted(v for v in values if lo <= v <= hi)
    return {_H(a, b): 1 for a, b in zip(inside, inside[1:])}


def _canonical_symbols(terms: Iterable[tuple[Fraction, Symbol]], values: list[int]) -> dict[Symbol, Fraction]:
    out: dict[Symbol, Fraction] = {}
    for coeff, symbol in terms:
        if symbol[0] == "H":
            for block in _split_blocks(symbol, values):
                out[block] = out.get(block, Fraction(0)) + coeff
        else:
            out[symbol] = out.get(symbol, Fraction(0)) + coeff
    return {k: v for k, v in out.items() if v != 0}


def engine_symbols(r: Iterable[int]) -> dict[Symbol, Fraction]:
    """The engine's result for ``r`` in unit-block / zeta-tail coordinates."""
    s = canonical(r)
    ps = pole_system(s)
    table = partial_fractions(ps)
    values = [a - 1 for a, _ in ps.poles]  # descending
    pairs: list[tuple[Fraction, Symbol]] = []
    # -sum_i A_i H_{v_i} = sum_t (-sum_{i<=t} A_i) H(v_{t+1}, v_t)
    running = Fraction(0)
    for t in range(len(values) - 1):
        running += table[t][0]
        pairs.append((-running, _H(values[t + 1], values[t])))
    for v, row in zip(values, table):
        for j in range(2, len(row) + 1):
            pairs.append((row[j - 1], _Z(j, v)))
    return _canonical_symbols(pairs, sorted(set(values), reverse=True))


def _printed_symbols(terms: list[Term], values: list[int]) -> dict[Symbol, Fraction]:
    return _canonical_symbols(((t.coefficient, t.symbol) for t in terms), values)


def _symbol_str(symbol: Symbol) -> str:
    kind, a, b = symbol
    return f"H({a},{b}]" if kind == "H" else f"zeta({a})-H_{b}^({a})"


@dataclass
class LemmaCheck:
    r: tuple[int, ...]
    lemma: str
    matches: bool
    printed: ZetaForm
    engine: ZetaForm
    mismatched_symbols: list[dict] = field(default_factory=list)
    suspect_terms: list[int] = field(default_factory=list)
    sign_variants: dict[str, bool] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "r": list(self.r),
            "lemma": self.lemma,
            "matches": self.matches,
            "printed": self.printed.to_json(),
            "engine": self.engine.to_json(),
            "difference": (self.printed - self.engine).to_json(),
            "mismatched_symbols": self.mismatched_symbols,
            "suspect_terms": self.suspect_terms,
            "sign_variants": self.sign_variants,
        }


def check_lemma(r: Iterable[int]) -> Optional[LemmaCheck]:
    """Compare the printed formula for ``r`` with the engine; None if uncovered."""
    s = canonical(r)
    label = lemma_for(s)
    if label is None:
        return None
    terms = lemma_terms(s)
    printed = _terms_to_form(terms)
    engine = closed_form(s)
    check = LemmaCheck(s, label, printed == engine, printed, engine)

    if label in MISSING_OPERATOR_TERMS:
        check.sign_variants = {
            "+": printed == engine,
            "-": lemma_closed_form(s, sign=-1) == engine,
        }

    if not check.matches:
        values = sorted(set(s), reverse=True)
        ours = _printed_symbols(terms, values)
        theirs = engine_symbols(s)
        suspects: set[int] = set()
        for symbol in sorted(set(ours) | set(theirs)):
            a, b = ours.get(symbol, Fraction(0)), theirs.get(symbol, Fraction(0))
            if a == b:
                continue
            contributing = [
                t.index
                for t in terms
                if symbol in _canonical_symbols([(Fraction(1), t.symbol)], values)
            ]
            suspects.update(contributing)
            check.mismatched_symbols.append(
                {
                    "symbol": _symbol_str(symbol),
                    "printed": f"{a.numerator}/{a.denominator}",
                    "engine": f"{b.numerator}/{b.denominator}",
                    "terms": contributing,
                }
            )
        check.suspect_terms = sorted(suspects)
    return check


def verify_lemmas(max_entry: int = 6) -> list[LemmaCheck]:
    """Check every sorted r with entries <= max_entry that a printed formula covers."""
    out = []
    for combo in sorted_vectors(max_entry):
        c = check_lemma(combo)
        if c is not None:
            out.append(c)
    return out


def sorted_vectors(max_entry: int) -> list[tuple[int, ...]]:
    """All descending 5-vectors with entries in 0..max_entry."""
    return [tuple(c) for c in combinations_with_replacement(range(max_entry, -1, -1), 5)]


@dataclass(frozen=True)
class OracleCheck:
    r: tuple[int, ...]
    engine: ErrorBoundedValue
    oracle: ErrorBoundedValue

    @property
    def gap(self) -> Fraction:
        return abs(self.engine.estimate - self.oracle.estimate)

    @property
    def agrees(self) -> bool:
        return self.engine.overlaps(self.oracle)

    def to_json(self) -> dict:
        return {
            "r": list(self.r),
            "engine": self.engine.to_json(),
            "oracle": self.oracle.to_json(),
            "agrees": self.agrees,
        }


def oracle_check(r: Iterable[int], terms: int = 10**5, precision_bits: int = DEFAULT_PRECISION) -> OracleCheck:
    s = canonical(r)
    engine = eval_zeta_form(closed_form(s), constants_table(precision_bits))
    return OracleCheck(s, engine, series_oracle(s, terms, precision_bits))


def _oracle_job(args) -> OracleCheck:
    return oracle_check(*args)


def oracle_suite(
    max_entry: int = 6, terms: int = 10**5, precision_bits: int = DEFAULT_PRECISION, workers: int = 1
) -> list[OracleCheck]:
    """Engine against the direct series for every sorted r with entries <= max_entry."""
    jobs = [(r, terms, precision_bits) for r in sorted_vectors(max_entry)]
    if workers <= 1:
        return [_oracle_job(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_oracle_job, jobs, chunksize=8))
