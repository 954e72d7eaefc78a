"""Correspondence engine for a modal language with subordination operators.

The package turns inequalities, quasi-inequalities, and Π₂-statements of a
bimodal language (forward box/diamond plus reverse subordination modalities)
into first-order frame conditions:

- :mod:`modalcorr.syntax` — formula/statement types, parser, renderer;
- :mod:`modalcorr.trees` — signed generation trees and node classification;
- :mod:`modalcorr.classify` — inductive/restricted-inductive certificates;
- :mod:`modalcorr.alba` — the rewriting engine with replayable traces and a
  topological-correctness monitor;
- :mod:`modalcorr.alba_pi2` — bound-variable elimination for ∃-statements;
- :mod:`modalcorr.fol` — standard translation and a conservative simplifier;
- :mod:`modalcorr.semantics` — brute-force finite-frame oracles;
- :mod:`modalcorr.generators` — seeded corpora for property testing;
- :mod:`modalcorr.cli` — the ``modalcorr`` command.
"""

from .alba import (
    AckermannError,
    DerivationTrace,
    Failure,
    RuleError,
    Success,
    System,
    TraceStep,
    check_topological_correctness,
    run_alba,
)
from .alba_pi2 import FirstHalfOutcome, first_half, run_alba_pi2
from .classify import (
    Certificate,
    ClassificationReport,
    check_inductive_pi2,
    check_inductive_quasi,
    check_restricted_inductive_pi2,
    check_restricted_inductive_quasi,
    find_certificate,
    syntactic_polarity,
)
from .fol import (
    FOFormula,
    fo_and_all,
    render_fo,
    simplify_fo,
    standard_translation_formula,
    standard_translation_statement,
)
from .generators import (
    inductive_quasi_corpus,
    restricted_pi2_corpus,
    restricted_quasi_corpus,
)
from .kernel import backend_name, has_compiled
from .semantics import (
    BudgetExceededError,
    Counterexample,
    Equivalent,
    FiniteFrame,
    Valuation,
    equivalence_oracle,
    frames_up_to,
    statement_equivalence_oracle,
    valid,
)
from .syntax import (
    BBox,
    BDia,
    Bottom,
    Box,
    Dia,
    ExistsStatement,
    Formula,
    Imp,
    And,
    Inequality,
    Nominal,
    Not,
    Or,
    ParseError,
    Pi2Statement,
    PropVar,
    QuasiInequality,
    Rel,
    SBBox,
    SBDia,
    SBox,
    SDia,
    TRIVIAL_INEQ,
    Top,
    VocabularyReport,
    analyze_vocabulary,
    parse_formula,
    parse_statement,
    render,
    substitute,
)
from .trees import DependenceOrder, Eps, OrderType

__all__ = [
    "AckermannError",
    "And",
    "BBox",
    "BDia",
    "Bottom",
    "Box",
    "BudgetExceededError",
    "Certificate",
    "ClassificationReport",
    "Counterexample",
    "DependenceOrder",
    "DerivationTrace",
    "Dia",
    "Eps",
    "Equivalent",
    "ExistsStatement",
    "FOFormula",
    "Failure",
    "FiniteFrame",
    "FirstHalfOutcome",
    "Formula",
    "Imp",
    "Inequality",
    "Nominal",
    "Not",
    "Or",
    "OrderType",
    "ParseError",
    "Pi2Statement",
    "PropVar",
    "QuasiInequality",
    "Rel",
    "RuleError",
    "SBBox",
    "SBDia",
    "SBox",
    "SDia",
    "Success",
    "System",
    "TRIVIAL_INEQ",
    "Top",
    "TraceStep",
    "Valuation",
    "VocabularyReport",
    "analyze_vocabulary",
    "backend_name",
    "check_inductive_pi2",
    "check_inductive_quasi",
    "check_restricted_inductive_pi2",
    "check_restricted_inductive_quasi",
    "check_topological_correctness",
    "equivalence_oracle",
    "find_certificate",
    "first_half",
    "fo_and_all",
    "frames_up_to",
    "has_compiled",
    "inductive_quasi_corpus",
    "parse_formula",
    "parse_statement",
    "render",
    "render_fo",
    "restricted_pi2_corpus",
    "restricted_quasi_corpus",
    "run_alba",
    "run_alba_pi2",
    "simplify_fo",
    "standard_translation_formula",
    "standard_translation_statement",
    "statement_equivalence_oracle",
    "substitute",
    "syntactic_polarity",
    "valid",
]

__version__ = "0.1.0"
