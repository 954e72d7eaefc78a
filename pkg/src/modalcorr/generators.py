"""Seeded corpora of classified statements for property testing.

Each corpus is produced by rejection sampling from a fixed-seed stream of
random statements, so repeated calls with the same arguments return the same
items in the same order.  Admission is decided by the classifier only — a
corpus never filters on whether the rewriting engine succeeds, so engine
failures on certified inputs remain observable downstream.
"""

from __future__ import annotations

import random
from collections.abc import Sequence

from ._encode import EncodingUnsupported, encode_fo
from .alba import Success, run_alba
from .classify import (
    check_restricted_inductive_pi2,
    check_restricted_inductive_quasi,
    find_certificate,
)
from .fol import fo_and_all, simplify_fo, standard_translation_statement
from .syntax import (
    And,
    BOT,
    Box,
    Dia,
    Formula,
    Imp,
    Inequality,
    Not,
    Or,
    Pi2Statement,
    PropVar,
    QuasiInequality,
    Rel,
    SBox,
    SDia,
    TOP,
    TRIVIAL_INEQ,
    render,
)

#: Unary connectives of the input language.
INPUT_UNARY = (Not, Box, Dia, SBox, SDia)
#: Unary connectives allowed in restricted inputs (no reverse modalities).
RESTRICTED_UNARY = (Not, Box, Dia)

_BINARY = (And, Or, Imp)


def random_formula(
    rng: random.Random,
    names: Sequence[str],
    depth: int,
    unary: Sequence[type] = INPUT_UNARY,
) -> Formula:
    """Random formula of modal/connective depth at most ``depth``."""
    roll = rng.random()
    if depth == 0 or roll < 0.35:
        return PropVar(rng.choice(names))
    if roll < 0.40:
        return rng.choice((TOP, BOT))
    if roll < 0.75:
        return rng.choice(unary)(random_formula(rng, names, depth - 1, unary))
    op = rng.choice(_BINARY)
    return op(
        random_formula(rng, names, depth - 1, unary),
        random_formula(rng, names, depth - 1, unary),
    )


def random_inequality(
    rng: random.Random,
    names: Sequence[str],
    depth: int,
    unary: Sequence[type] = INPUT_UNARY,
    allow_prec: bool = True,
) -> Inequality:
    rel = Rel.Prec if allow_prec and rng.random() < 0.25 else Rel.Leq
    return Inequality(
        random_formula(rng, names, depth, unary),
        rel,
        random_formula(rng, names, depth, unary),
    )


def random_quasi(
    rng: random.Random,
    names: Sequence[str],
    depth: int,
    unary: Sequence[type] = INPUT_UNARY,
) -> QuasiInequality:
    n_ante = rng.randrange(3)
    ante = tuple(
        random_inequality(rng, names, depth, unary) for _ in range(n_ante)
    ) or (TRIVIAL_INEQ,)
    cons = tuple(
        random_inequality(rng, names, depth, unary)
        for _ in range(rng.randrange(1, 3))
    )
    return QuasiInequality(ante, cons)


def _output_fo_slots(q: QuasiInequality) -> int | None:
    """Quantifier slots of the translated engine output, None if unavailable."""
    out = run_alba(q)
    if not isinstance(out, Success):
        return None
    fo = simplify_fo(
        fo_and_all([standard_translation_statement(p) for p in out.pure_quasis])
    )
    try:
        return encode_fo(fo).n_slots
    except EncodingUnsupported:  # pragma: no cover - translations are plain FO
        return None


def inductive_quasi_corpus(
    count: int = 100,
    seed: int = 2024,
    names: Sequence[str] = ("p", "q"),
    depth: int = 3,
    max_fo_slots: int = 16,
    max_tries: int = 20000,
) -> tuple[QuasiInequality, ...]:
    """Certificate-bearing quasi-inequalities over ``names``.

    Items whose translated output needs more than ``max_fo_slots`` bound
    first-order variables are skipped so that exhaustive oracle checks stay
    within the compiled scan's budget.  Engine failures are *not* skipped:
    a certified input that the engine cannot reduce stays in the corpus.
    """
    rng = random.Random(seed)
    seen: set[str] = set()
    corpus: list[QuasiInequality] = []
    for _ in range(max_tries):
        if len(corpus) >= count:
            return tuple(corpus)
        q = random_quasi(rng, names, depth)
        key = render(q)
        if key in seen:
            continue
        seen.add(key)
        if find_certificate(q, max_vars=len(names)) is None:
            continue
        slots = _output_fo_slots(q)
        if slots is not None and slots > max_fo_slots:
            continue
        corpus.append(q)
    raise RuntimeError(
        f"exhausted {max_tries} tries with only {len(corpus)}/{count} items"
    )


def restricted_quasi_corpus(
    count: int = 40,
    seed: int = 7,
    names: Sequence[str] = ("p", "q"),
    depth: int = 3,
    max_tries: int = 20000,
) -> tuple[QuasiInequality, ...]:
    """Restricted-inductive quasi-inequalities: certified and free of
    nominals, reverse, and backward modalities in the input."""
    rng = random.Random(seed)
    seen: set[str] = set()
    corpus: list[QuasiInequality] = []
    for _ in range(max_tries):
        if len(corpus) >= count:
            return tuple(corpus)
        q = random_quasi(rng, names, depth, RESTRICTED_UNARY)
        key = render(q)
        if key in seen:
            continue
        seen.add(key)
        if not check_restricted_inductive_quasi(q, max_vars=len(names)).accepted:
            continue
        corpus.append(q)
    raise RuntimeError(
        f"exhausted {max_tries} tries with only {len(corpus)}/{count} items"
    )


def restricted_pi2_corpus(
    count: int = 30,
    seed: int = 99,
    free_names: Sequence[str] = ("p", "q"),
    bound_name: str = "c",
    depth: int = 2,
    max_tries: int = 50000,
) -> tuple[Pi2Statement, ...]:
    """Restricted first-round good ∃-statements with one bound variable."""
    rng = random.Random(seed)
    seen: set[str] = set()
    corpus: list[Pi2Statement] = []
    for _ in range(max_tries):
        if len(corpus) >= count:
            return tuple(corpus)
        frees = tuple(free_names[: rng.randrange(1, len(free_names) + 1)])
        row_names = frees + (bound_name,)
        rows = tuple(
            random_inequality(rng, row_names, depth, RESTRICTED_UNARY)
            for _ in range(rng.randrange(2, 4))
        )
        ante = tuple(
            random_inequality(rng, frees, depth, RESTRICTED_UNARY)
            for _ in range(rng.randrange(2))
        ) or (TRIVIAL_INEQ,)
        s = Pi2Statement(ante, (bound_name,), rows)
        key = render(s)
        if key in seen:
            continue
        seen.add(key)
        max_vars = len(free_names) + 1
        if not check_restricted_inductive_pi2(s, max_vars=max_vars).accepted:
            continue
        corpus.append(s)
    raise RuntimeError(
        f"exhausted {max_tries} tries with only {len(corpus)}/{count} items"
    )
