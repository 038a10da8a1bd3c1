"""Exact closed forms, integer linear forms and an auditable numeric replay
for five-fold Beukers-type integrals in zeta(2), ..., zeta(5)."""
from .precision import ErrorBoundedValue, Verdict, constants_table, eval_zeta_form
from .zeta_forms import ZetaForm, closed_form
from .linear_forms import IntegerLinearForm, expand_In, to_integer_form
from .approximation import AuditParameters, audit_section3, dirichlet_approx, key_lemma_witness

__all__ = [
    "ErrorBoundedValue",
    "Verdict",
    "constants_table",
    "eval_zeta_form",
    "ZetaForm",
    "closed_form",
    "IntegerLinearForm",
    "expand_In",
    "to_integer_form",
    "AuditParameters",
    "audit_section3",
    "dirichlet_approx",
    "key_lemma_witness",
]

__version__ = "0.1.0"
