"""First half of the rewriting algorithm for Π₂-statements.

An ∃-statement is reduced without nominals: preprocessing (distribution,
splitting, uniform-bound-variable elimination, prec-rewriting) followed by
residuation/splitting and existential Ackermann substitutions that remove
every bound variable.  The result is a meta-conjunction of inequalities over
the free variables only; the second half runs the ordinary engine on the
quasi-inequality formed from the original antecedent and that
meta-conjunction.

The elimination is guided by a sign assignment and elimination order for the
bound variables.  Candidates are tried in a fixed order and the first one
that eliminates every bound variable is kept, so runs are deterministic.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from . import alba
from .alba import (
    AckermannError,
    AlbaOutcome,
    Certificate,
    DerivationTrace,
    Failure,
    Success,
    System,
    TraceStep,
    _choose_rule,
    _distribute_pass,
    _monotone_quasi_pass,
    _prec_pass,
    _Recorder,
    _run_quasi,
    _split_pass,
    apply_rule,
    eliminate,
)
from .syntax import (
    ExistsStatement,
    Inequality,
    Pi2Statement,
    QuasiInequality,
    TRIVIAL_INEQ,
    analyze_vocabulary,
    free_vars,
    render,
)
from .trees import DependenceOrder, Eps, OrderType


@dataclass(frozen=True)
class FirstHalfOutcome:
    success: bool
    meta_con_ineq: tuple[Inequality, ...]
    steps: tuple[TraceStep, ...]
    reason: str = ""
    certificate: Certificate | None = None
    stuck_rows: tuple[Inequality, ...] = ()


def _row_vars(rows) -> set[str]:
    return {n for i in rows for n in free_vars(i.lhs) | free_vars(i.rhs)}


def _candidates(bound: tuple[str, ...], free: set[str]):
    """Sign assignments (all-1 first, lexicographic) × bound permutations."""
    free_chain = sorted(free)
    for values in itertools.product((Eps.One, Eps.Partial), repeat=len(bound)):
        eps_q = OrderType.of(dict(zip(bound, values)))
        for perm in itertools.permutations(bound):
            omega = DependenceOrder.from_chain(free_chain + list(perm))
            yield eps_q, omega, perm


def _attempt(rows, bound_present, eps_q, omega, perm, rec: _Recorder):
    """Try to eliminate every bound variable; returns final rows or an error
    message.  Steps go to rec only; the caller discards rec on failure."""
    cert = Certificate(eps_q, omega)
    s = System(tuple(rows), TRIVIAL_INEQ, 0)

    def decompose(s: System) -> System:
        while True:
            r = _choose_rule(s, cert)
            if r is None:
                return s
            consumed = [s.inequalities[r.index]]
            new = apply_rule(s, r)
            count = len(new.inequalities) - len(s.inequalities) + 1
            produced = list(new.inequalities[r.index : r.index + count])
            name = r.rule if r.variant == 0 else f"{r.rule}-{r.variant}"
            rec.add("reduce", 1, name, None, "cons", consumed, produced)
            s = new

    s = decompose(s)
    order = [v for v in reversed(perm) if v in bound_present]
    for name in order:
        present = _row_vars(s.inequalities)
        if name not in present:
            continue
        side = "Right" if eps_q.get(name) is not Eps.Partial else "Left"
        before = s.inequalities
        try:
            s = eliminate(s, name, side)
        except AckermannError as exc:
            return None, str(exc), s.inequalities
        consumed = [i for i in before if i not in s.inequalities]
        produced = [i for i in s.inequalities if i not in before]
        rec.add(
            "reduce", 1, f"ackermann-{side.lower()}:{name}", None, "cons",
            consumed, produced,
        )
        s = decompose(s)
    leftover = _row_vars(s.inequalities) & bound_present
    if leftover:
        return (
            None,
            f"bound variables {sorted(leftover)} could not be isolated",
            s.inequalities,
        )
    return s.inequalities, "", s.inequalities


def first_half(stmt: Pi2Statement | ExistsStatement) -> FirstHalfOutcome:
    """Reduce the existential part to a meta-conjunction over free variables."""
    if isinstance(stmt, Pi2Statement):
        stmt = stmt.exists_part()
    vocab = analyze_vocabulary(stmt)
    if vocab.nominals:
        return FirstHalfOutcome(
            False, (), (), f"existential part contains nominals: "
            f"{sorted(vocab.nominals)}",
        )
    bound = stmt.bound_vars
    rec = _Recorder()
    rows = list(stmt.inequalities)
    _distribute_pass(rows, rec, None, "cons", half=1)
    _split_pass(rows, rec, None, "cons", "preprocess", half=1)
    _monotone_quasi_pass(rows, [], rec, half=1, only=set(bound), ante_where="cons")
    _prec_pass(rows, rec, None, "cons", half=1)
    bound_present = set(bound) & _row_vars(rows)
    if not bound_present:
        return FirstHalfOutcome(True, tuple(rows), tuple(rec.steps))
    first_error = None
    for eps_q, omega, perm in _candidates(bound, _row_vars(rows) - set(bound)):
        attempt_rec = _Recorder()
        final, err, stuck = _attempt(
            rows, bound_present, eps_q, omega, perm, attempt_rec
        )
        if final is not None:
            for st in attempt_rec.steps:
                rec.steps.append(
                    TraceStep(
                        len(rec.steps), st.stage, st.half, st.rule, st.member,
                        st.where, st.consumed, st.produced, st.fresh,
                    )
                )
            return FirstHalfOutcome(
                True, tuple(final), tuple(rec.steps),
                certificate=Certificate(eps_q, omega),
            )
        if first_error is None:
            first_error = (err, stuck)
    err, stuck = first_error
    names = ", ".join(sorted(_row_vars(stuck) & set(bound)))
    return FirstHalfOutcome(
        False, (), tuple(rec.steps),
        reason=f"existential quantifier for {names or '?'} stuck: {err}",
        stuck_rows=tuple(stuck),
    )


def run_alba_pi2(
    s: Inequality | QuasiInequality | Pi2Statement | ExistsStatement,
    max_vars: int = 6,
) -> AlbaOutcome:
    """Both halves: eliminate bound variables, then run the ordinary engine
    on the resulting quasi-inequality.

    Statements without an existential part are forwarded unchanged, so this
    is a safe entry point for any parsed statement.
    """
    if isinstance(s, (Inequality, QuasiInequality)):
        return alba.run_alba(s, max_vars)
    if isinstance(s, ExistsStatement):
        s = Pi2Statement((TRIVIAL_INEQ,), s.bound_vars, s.inequalities)
    if not s.bound_vars:
        return alba.run_alba(QuasiInequality(s.antecedent, s.consequent), max_vars)
    fh = first_half(s)
    input_text = render(s)
    if not fh.success:
        trace = DerivationTrace(input_text, fh.steps)
        stuck = System(fh.stuck_rows, TRIVIAL_INEQ, 0)
        unresolved = tuple(sorted(_row_vars(fh.stuck_rows) & set(s.bound_vars)))
        return Failure(stuck, unresolved, fh.reason, trace)
    rec = _Recorder()
    rec.steps.extend(fh.steps)
    rec.add(
        "reduce", 1, "meta-conjunction", None, "cons",
        [], [render(i) for i in fh.meta_con_ineq],
    )
    quasi = QuasiInequality(s.antecedent, fh.meta_con_ineq)
    outcome = _run_quasi(quasi, rec, half=2, max_vars=max_vars)
    trace = DerivationTrace(input_text, tuple(rec.steps))
    if isinstance(outcome, Failure):
        return Failure(
            outcome.stuck_system, outcome.unresolved_vars, outcome.reason, trace
        )
    return Success(tuple(outcome), trace)
