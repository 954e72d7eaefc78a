"""Rewriting engine turning quasi-inequalities into pure quasi-inequalities.

The run has three stages.  Stage 1 (preprocessing) distributes Skeleton-level
connectives, splits outer conjunctions/disjunctions, eliminates uniform
variables with ⊥/⊤, rewrites ``prec`` into its reverse-diamond form, and
splits the consequent into independent members.  Stage 2 introduces the goal
``i0 ≤ ¬i1`` by first approximation and then decomposes inequalities with
residuation, approximation, and splitting rules until every variable can be
removed by an Ackermann substitution (right-handed for ε=1 variables,
left-handed for ε=∂, in descending dependence order).  Stage 3 simplifies
the resulting pure system into a compact pure quasi-inequality.

Every change is recorded as a trace step; the trace replays standalone, and
``check_topological_correctness`` verifies the closed/open discipline of
every Ackermann step during replay.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, replace

from . import classify
from .classify import Certificate, find_certificate
from .syntax import (
    And,
    BBox,
    BDia,
    Bottom,
    Box,
    Dia,
    Formula,
    Imp,
    Inequality,
    Nominal,
    Not,
    Or,
    PropVar,
    QuasiInequality,
    Rel,
    SBBox,
    SBDia,
    SBox,
    SDia,
    TOP,
    TRIVIAL_INEQ,
    free_nominals,
    free_vars,
    parse_statement,
    render,
    substitute,
    substitute_nominal,
)
from .trees import (
    DependenceOrder,
    Eps,
    MINUS,
    OrderType,
    PLUS,
    build_signed_tree,
    has_critical_leaf,
    leaf_signs,
)

BOT = Bottom()


class RuleError(Exception):
    """The addressed inequality does not match the rule's premise pattern."""


class AckermannError(Exception):
    """An Ackermann precondition (shape or polarity) is violated."""


# ---------------------------------------------------------------------------
# Core data types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class System:
    """Work state of one member: inequalities, the fixed goal, fresh counter."""

    inequalities: tuple[Inequality, ...]
    goal: Inequality
    fresh_counter: int


@dataclass(frozen=True)
class RuleInstance:
    rule: str
    index: int
    variant: int = 0
    var: str = ""


@dataclass(frozen=True)
class TraceStep:
    step: int
    stage: str  # preprocess | approx | reduce | simplify
    half: int  # 1 | 2
    rule: str
    member: int | None
    where: str  # ante | cons | system | goal
    consumed: tuple[str, ...]
    produced: tuple[str, ...]
    fresh: tuple[str, ...]

    def to_dict(self) -> dict:
        return {
            "step": self.step,
            "stage": self.stage,
            "half": self.half,
            "rule": self.rule,
            "member": self.member,
            "where": self.where,
            "consumed": list(self.consumed),
            "produced": list(self.produced),
            "fresh": list(self.fresh),
        }

    @staticmethod
    def from_dict(d: dict) -> "TraceStep":
        return TraceStep(
            d["step"], d["stage"], d["half"], d["rule"], d["member"], d["where"],
            tuple(d["consumed"]), tuple(d["produced"]), tuple(d["fresh"]),
        )


@dataclass(frozen=True)
class DerivationTrace:
    input: str
    steps: tuple[TraceStep, ...]

    def to_json_lines(self) -> str:
        lines = [json.dumps({"input": self.input}, sort_keys=True)]
        lines += [json.dumps(s.to_dict(), sort_keys=True) for s in self.steps]
        return "\n".join(lines) + "\n"

    @staticmethod
    def from_json_lines(text: str) -> "DerivationTrace":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        header = json.loads(lines[0])
        steps = tuple(TraceStep.from_dict(json.loads(ln)) for ln in lines[1:])
        return DerivationTrace(header["input"], steps)


@dataclass(frozen=True)
class Success:
    pure_quasis: tuple[QuasiInequality, ...]
    trace: DerivationTrace

    @property
    def success(self) -> bool:
        return True


@dataclass(frozen=True)
class Failure:
    stuck_system: System | None
    unresolved_vars: tuple[str, ...]
    reason: str
    trace: DerivationTrace

    @property
    def success(self) -> bool:
        return False


AlbaOutcome = Success | Failure


class _Recorder:
    """Collects trace steps with a global step counter."""

    def __init__(self):
        self.steps: list[TraceStep] = []

    def add(self, stage, half, rule, member, where, consumed, produced, fresh=()):
        self.steps.append(
            TraceStep(
                len(self.steps), stage, half, rule, member, where,
                tuple(render(i) if isinstance(i, Inequality) else i for i in consumed),
                tuple(render(i) if isinstance(i, Inequality) else i for i in produced),
                tuple(fresh),
            )
        )


# ---------------------------------------------------------------------------
# Small formula helpers
# ---------------------------------------------------------------------------


def _neg(f: Formula) -> Formula:
    """Negation with double-negation cancellation."""
    return f.sub if isinstance(f, Not) else Not(f)


def _or_all(parts) -> Formula:
    parts = list(parts)
    if not parts:
        return BOT
    acc = parts[0]
    for p in parts[1:]:
        acc = Or(acc, p)
    return acc


def _and_all(parts) -> Formula:
    parts = list(parts)
    if not parts:
        return TOP
    acc = parts[0]
    for p in parts[1:]:
        acc = And(acc, p)
    return acc


def _is_pure(f: Formula) -> bool:
    return not free_vars(f)


def _ineq_pure(ineq: Inequality) -> bool:
    return _is_pure(ineq.lhs) and _is_pure(ineq.rhs)


def _subst_ineq(ineq: Inequality, value: Formula, name: str) -> Inequality:
    return Inequality(
        substitute(ineq.lhs, value, name), ineq.rel, substitute(ineq.rhs, value, name)
    )


def _var_signs(f: Formula, name: str, sign: str = PLUS) -> set[str]:
    return leaf_signs(build_signed_tree(sign, f), name)


# ---------------------------------------------------------------------------
# Stage 1: distribution
# ---------------------------------------------------------------------------


def _distribute(sign: str, f: Formula) -> Formula:
    """Exhaustively push Skeleton-level operators over +∨ / −∧.

    Recursion stays inside the Skeleton region: PIA-rooted subtrees are left
    untouched, so guarded disjunctions/conjunctions survive.
    """
    if sign == PLUS:
        if isinstance(f, Dia) or isinstance(f, SDia):
            sub = _distribute(PLUS, f.sub)
            if isinstance(sub, Or):
                ctor = type(f)
                return _distribute(PLUS, Or(ctor(sub.left), ctor(sub.right)))
            return type(f)(sub)
        if isinstance(f, Not):
            sub = _distribute(MINUS, f.sub)
            if isinstance(sub, And):
                return _distribute(PLUS, Or(_neg(sub.left), _neg(sub.right)))
            return Not(sub)
        if isinstance(f, And):
            left = _distribute(PLUS, f.left)
            right = _distribute(PLUS, f.right)
            if isinstance(left, Or):
                return _distribute(
                    PLUS, Or(And(left.left, right), And(left.right, right))
                )
            if isinstance(right, Or):
                return _distribute(
                    PLUS, Or(And(left, right.left), And(left, right.right))
                )
            return And(left, right)
        if isinstance(f, Or):
            return Or(_distribute(PLUS, f.left), _distribute(PLUS, f.right))
        return f
    # sign == MINUS
    if isinstance(f, Box) or isinstance(f, SBox):
        sub = _distribute(MINUS, f.sub)
        if isinstance(sub, And):
            ctor = type(f)
            return _distribute(MINUS, And(ctor(sub.left), ctor(sub.right)))
        return type(f)(sub)
    if isinstance(f, Not):
        sub = _distribute(PLUS, f.sub)
        if isinstance(sub, Or):
            return _distribute(MINUS, And(_neg(sub.left), _neg(sub.right)))
        return Not(sub)
    if isinstance(f, Or):
        left = _distribute(MINUS, f.left)
        right = _distribute(MINUS, f.right)
        if isinstance(left, And):
            return _distribute(MINUS, And(Or(left.left, right), Or(left.right, right)))
        if isinstance(right, And):
            return _distribute(MINUS, And(Or(left, right.left), Or(left, right.right)))
        return Or(left, right)
    if isinstance(f, Imp):
        left = _distribute(PLUS, f.left)
        right = _distribute(MINUS, f.right)
        if isinstance(left, Or):
            return _distribute(MINUS, And(Imp(left.left, right), Imp(left.right, right)))
        if isinstance(right, And):
            return _distribute(MINUS, And(Imp(left, right.left), Imp(left, right.right)))
        return Imp(left, right)
    if isinstance(f, And):
        return And(_distribute(MINUS, f.left), _distribute(MINUS, f.right))
    return f


def _distribute_ineq(ineq: Inequality) -> Inequality:
    return Inequality(
        _distribute(PLUS, ineq.lhs), ineq.rel, _distribute(MINUS, ineq.rhs)
    )


# ---------------------------------------------------------------------------
# Stage 1 driver
# ---------------------------------------------------------------------------


def _split_pass(ineqs: list[Inequality], rec, member, where, stage, half):
    """Exhaustive splitting: θ≤η∧ι and θ∨η≤ι (also for prec)."""
    i = 0
    while i < len(ineqs):
        ineq = ineqs[i]
        if isinstance(ineq.rhs, And):
            parts = [
                Inequality(ineq.lhs, ineq.rel, ineq.rhs.left),
                Inequality(ineq.lhs, ineq.rel, ineq.rhs.right),
            ]
            ineqs[i : i + 1] = parts
            rec.add(stage, half, "split-right", member, where, [ineq], parts)
            continue
        if isinstance(ineq.lhs, Or):
            parts = [
                Inequality(ineq.lhs.left, ineq.rel, ineq.rhs),
                Inequality(ineq.lhs.right, ineq.rel, ineq.rhs),
            ]
            ineqs[i : i + 1] = parts
            rec.add(stage, half, "split-left", member, where, [ineq], parts)
            continue
        i += 1


def _distribute_pass(ineqs: list[Inequality], rec, member, where, half):
    for i, ineq in enumerate(ineqs):
        new = _distribute_ineq(ineq)
        if new != ineq:
            ineqs[i] = new
            rec.add("preprocess", half, "distribute", member, where, [ineq], [new])


def _prec_pass(ineqs: list[Inequality], rec, member, where, half):
    for i, ineq in enumerate(ineqs):
        if ineq.rel is Rel.Prec:
            new = Inequality(SDia(ineq.lhs), Rel.Leq, ineq.rhs)
            ineqs[i] = new
            rec.add("preprocess", half, "prec-rewrite", member, where, [ineq], [new])


def _signs_ok(f: Formula, name: str, allowed: str) -> bool:
    return _var_signs(f, name) <= {allowed}


def _monotone_quasi_pass(
    ante: list[Inequality],
    cons: list[Inequality],
    rec,
    half,
    only: set[str] | None = None,
    ante_where: str = "ante",
):
    """Uniform-variable elimination.  The positive-left/negative-right rows
    (antecedent rows, or the rows of an existential statement) admit the
    ⊥-substitution; consequent rows have the mirrored polarity."""
    names = sorted(
        {n for i in ante + cons for n in free_vars(i.lhs) | free_vars(i.rhs)}
    )
    if only is not None:
        names = [n for n in names if n in only]
    for name in names:
        bot_ok = all(
            _signs_ok(i.lhs, name, PLUS) and _signs_ok(i.rhs, name, MINUS)
            for i in ante
        ) and all(
            _signs_ok(i.lhs, name, MINUS) and _signs_ok(i.rhs, name, PLUS)
            for i in cons
        )
        top_ok = all(
            _signs_ok(i.lhs, name, MINUS) and _signs_ok(i.rhs, name, PLUS)
            for i in ante
        ) and all(
            _signs_ok(i.lhs, name, PLUS) and _signs_ok(i.rhs, name, MINUS)
            for i in cons
        )
        if not (bot_ok or top_ok):
            continue
        value, rule = (BOT, "mono-bot") if bot_ok else (TOP, "mono-top")
        for where, lst in ((ante_where, ante), ("cons", cons)):
            for i, ineq in enumerate(lst):
                new = _subst_ineq(ineq, value, name)
                if new != ineq:
                    lst[i] = new
                    rec.add(
                        "preprocess", half, f"{rule}:{name}", None, where, [ineq], [new]
                    )


def preprocess(q: QuasiInequality) -> tuple[list[QuasiInequality], list[TraceStep]]:
    """Stage 1: distribution, splitting, uniform-variable elimination,
    prec-rewriting, and the split of the consequent into members."""
    rec = _Recorder()
    ante, cons = _preprocess_lists(q, rec, half=2)
    members = [QuasiInequality(tuple(ante), (c,)) for c in cons]
    return members, rec.steps


def _preprocess_lists(q: QuasiInequality, rec: _Recorder, half: int):
    ante = list(q.antecedent)
    cons = list(q.consequent)
    _distribute_pass(ante, rec, None, "ante", half)
    _distribute_pass(cons, rec, None, "cons", half)
    _split_pass(ante, rec, None, "ante", "preprocess", half)
    _split_pass(cons, rec, None, "cons", "preprocess", half)
    _monotone_quasi_pass(ante, cons, rec, half)
    _prec_pass(ante, rec, None, "ante", half)
    _prec_pass(cons, rec, None, "cons", half)
    return ante, cons


# ---------------------------------------------------------------------------
# First approximation
# ---------------------------------------------------------------------------


def _fresh_start(q) -> int:
    """Counter start so that every i<k> we mint is unused in the input."""
    used = set()
    for ineq in tuple(q.antecedent) + tuple(q.consequent):
        used |= free_nominals(ineq.lhs) | free_nominals(ineq.rhs)
    start = 0
    for name in used:
        m = re.fullmatch(r"i(\d+)", name)
        if m:
            start = max(start, int(m.group(1)) + 1)
    return start


def first_approximation(q: QuasiInequality, counter: int | None = None) -> System:
    """Introduce the goal: ante ∪ {i_a ≤ α, β ≤ ¬i_b} with goal i_a ≤ ¬i_b."""
    if len(q.consequent) != 1:
        raise ValueError("first approximation needs a single-consequent member")
    (cons,) = q.consequent
    if cons.rel is not Rel.Leq:
        raise ValueError("consequent must be in ≤ form (preprocess first)")
    if counter is None:
        counter = _fresh_start(q)
    i0 = Nominal(f"i{counter}")
    i1 = Nominal(f"i{counter + 1}")
    pieces = (
        Inequality(i0, Rel.Leq, cons.lhs),
        Inequality(cons.rhs, Rel.Leq, Not(i1)),
    )
    goal = Inequality(i0, Rel.Leq, Not(i1))
    return System(tuple(q.antecedent) + pieces, goal, counter + 2)


# ---------------------------------------------------------------------------
# Stage 2 rules
# ---------------------------------------------------------------------------

_RES_PRODUCTS = {
    "dia-res": lambda l, r: [Inequality(l.sub, Rel.Leq, BBox(r))],
    "box-res": lambda l, r: [Inequality(BDia(l), Rel.Leq, r.sub)],
    "sdia-res": lambda l, r: [Inequality(l.sub, Rel.Leq, SBBox(r))],
    "sbox-res": lambda l, r: [Inequality(SBDia(l), Rel.Leq, r.sub)],
    "neg-res-left": lambda l, r: [Inequality(_neg(r), Rel.Leq, l.sub)],
    "neg-res-right": lambda l, r: [Inequality(r.sub, Rel.Leq, _neg(l))],
    "bbox-res": lambda l, r: [Inequality(Dia(l), Rel.Leq, r.sub)],
    "sbbox-res": lambda l, r: [Inequality(SDia(l), Rel.Leq, r.sub)],
    "rev-dia-res": lambda l, r: [Inequality(Dia(l), Rel.Leq, r.sub)],
    "rev-box-res": lambda l, r: [Inequality(l.sub, Rel.Leq, Box(r))],
    "rev-sdia-res": lambda l, r: [Inequality(SDia(l), Rel.Leq, r.sub)],
    "rev-sbox-res": lambda l, r: [Inequality(l.sub, Rel.Leq, SBox(r))],
}

_RES_PATTERNS = {
    "dia-res": lambda l, r: isinstance(l, Dia),
    "box-res": lambda l, r: isinstance(r, Box),
    "sdia-res": lambda l, r: isinstance(l, SDia),
    "sbox-res": lambda l, r: isinstance(r, SBox),
    "neg-res-left": lambda l, r: isinstance(l, Not),
    "neg-res-right": lambda l, r: isinstance(r, Not),
    "bbox-res": lambda l, r: isinstance(r, BBox),
    "sbbox-res": lambda l, r: isinstance(r, SBBox),
    "rev-dia-res": lambda l, r: isinstance(r, BBox),
    "rev-box-res": lambda l, r: isinstance(l, BDia),
    "rev-sdia-res": lambda l, r: isinstance(r, SBBox),
    "rev-sbox-res": lambda l, r: isinstance(l, SBDia),
}


def _rule_products(s: System, r: RuleInstance):
    """(products, fresh names, counter delta) for the rule at r.index."""
    ineq = s.inequalities[r.index]
    lhs, rhs = ineq.lhs, ineq.rhs
    if r.rule in _RES_PRODUCTS:
        if not _RES_PATTERNS[r.rule](lhs, rhs):
            raise RuleError(f"{r.rule} does not match {render(ineq)}")
        return _RES_PRODUCTS[r.rule](lhs, rhs), [], 0
    if r.rule == "and-res":
        if not isinstance(lhs, And) or r.variant not in (1, 2):
            raise RuleError(f"and-res does not match {render(ineq)}")
        if r.variant == 1:
            return [Inequality(lhs.left, Rel.Leq, Imp(lhs.right, rhs))], [], 0
        return [Inequality(lhs.right, Rel.Leq, Imp(lhs.left, rhs))], [], 0
    if r.rule == "or-res":
        if not isinstance(rhs, Or) or r.variant not in (1, 2):
            raise RuleError(f"or-res does not match {render(ineq)}")
        if r.variant == 1:
            return [Inequality(And(lhs, _neg(rhs.left)), Rel.Leq, rhs.right)], [], 0
        return [Inequality(And(lhs, _neg(rhs.right)), Rel.Leq, rhs.left)], [], 0
    if r.rule == "imp-res":
        if not isinstance(rhs, Imp) or r.variant not in (1, 2):
            raise RuleError(f"imp-res does not match {render(ineq)}")
        if r.variant == 1:
            return [Inequality(And(lhs, rhs.left), Rel.Leq, rhs.right)], [], 0
        return [Inequality(rhs.left, Rel.Leq, Imp(lhs, rhs.right))], [], 0
    if r.rule == "split-right":
        if not isinstance(rhs, And):
            raise RuleError(f"split-right does not match {render(ineq)}")
        return (
            [Inequality(lhs, ineq.rel, rhs.left), Inequality(lhs, ineq.rel, rhs.right)],
            [],
            0,
        )
    if r.rule == "split-left":
        if not isinstance(lhs, Or):
            raise RuleError(f"split-left does not match {render(ineq)}")
        return (
            [Inequality(lhs.left, ineq.rel, rhs), Inequality(lhs.right, ineq.rel, rhs)],
            [],
            0,
        )
    if r.rule in ("dia-approx", "sdia-approx", "bdia-approx", "sbdia-approx"):
        ctor = {
            "dia-approx": Dia, "sdia-approx": SDia,
            "bdia-approx": BDia, "sbdia-approx": SBDia,
        }[r.rule]
        if not isinstance(lhs, Nominal) or not isinstance(rhs, ctor):
            raise RuleError(f"{r.rule} does not match {render(ineq)}")
        j = Nominal(f"i{s.fresh_counter}")
        return (
            [Inequality(j, Rel.Leq, rhs.sub), Inequality(lhs, Rel.Leq, ctor(j))],
            [j.name],
            1,
        )
    if r.rule in ("box-approx", "sbox-approx", "bbox-approx", "sbbox-approx"):
        ctor = {
            "box-approx": Box, "sbox-approx": SBox,
            "bbox-approx": BBox, "sbbox-approx": SBBox,
        }[r.rule]
        if (
            not isinstance(lhs, ctor)
            or not isinstance(rhs, Not)
            or not isinstance(rhs.sub, Nominal)
        ):
            raise RuleError(f"{r.rule} does not match {render(ineq)}")
        j = Nominal(f"i{s.fresh_counter}")
        return (
            [
                Inequality(lhs.sub, Rel.Leq, Not(j)),
                Inequality(ctor(Not(j)), Rel.Leq, rhs),
            ],
            [j.name],
            1,
        )
    if r.rule == "imp-approx":
        if (
            not isinstance(lhs, Imp)
            or not isinstance(rhs, Not)
            or not isinstance(rhs.sub, Nominal)
        ):
            raise RuleError(f"imp-approx does not match {render(ineq)}")
        j = Nominal(f"i{s.fresh_counter}")
        k = Nominal(f"i{s.fresh_counter + 1}")
        return (
            [
                Inequality(j, Rel.Leq, lhs.left),
                Inequality(lhs.right, Rel.Leq, Not(k)),
                Inequality(Imp(j, Not(k)), Rel.Leq, rhs),
            ],
            [j.name, k.name],
            2,
        )
    raise RuleError(f"unknown rule {r.rule}")


def apply_rule(s: System, r: RuleInstance) -> System:
    """Replace the addressed inequality by the rule's conclusions."""
    if r.rule.startswith("ackermann"):
        side = "Right" if r.rule == "ackermann-right" else "Left"
        return eliminate(s, r.var, side)
    products, fresh, delta = _rule_products(s, r)
    for name in fresh:
        for ineq in s.inequalities + (s.goal,):
            if name in free_nominals(ineq.lhs) | free_nominals(ineq.rhs):
                raise RuleError(f"fresh nominal {name} already occurs in the system")
    new = list(s.inequalities)
    new[r.index : r.index + 1] = products
    return System(tuple(new), s.goal, s.fresh_counter + delta)


def eliminate(s: System, p, side: str) -> System:
    """Ackermann elimination of variable p (Right: joins of lower bounds;
    Left: meets of upper bounds), checking the polarity preconditions."""
    name = p.name if isinstance(p, PropVar) else p
    if side not in ("Right", "Left"):
        raise ValueError("side must be 'Right' or 'Left'")
    bounds: list[Formula] = []
    rest: list[Inequality] = []
    for ineq in s.inequalities:
        if (
            side == "Right"
            and ineq.rel is Rel.Leq
            and isinstance(ineq.rhs, PropVar)
            and ineq.rhs.name == name
            and name not in free_vars(ineq.lhs)
        ):
            bounds.append(ineq.lhs)
        elif (
            side == "Left"
            and ineq.rel is Rel.Leq
            and isinstance(ineq.lhs, PropVar)
            and ineq.lhs.name == name
            and name not in free_vars(ineq.rhs)
        ):
            bounds.append(ineq.rhs)
        else:
            rest.append(ineq)
    want_l, want_r = (PLUS, MINUS) if side == "Right" else (MINUS, PLUS)
    for ineq in rest:
        if not (_signs_ok(ineq.lhs, name, want_l) and _signs_ok(ineq.rhs, name, want_r)):
            raise AckermannError(
                f"{side.lower()}-handed Ackermann for {name} blocked by "
                f"'{render(ineq)}'"
            )
    if name in free_vars(s.goal.lhs) | free_vars(s.goal.rhs):
        raise AckermannError(f"goal contains {name}")
    value = _or_all(bounds) if side == "Right" else _and_all(bounds)
    new_rest = [
        _subst_ineq(i, value, name) if name in free_vars(i.lhs) | free_vars(i.rhs) else i
        for i in rest
    ]
    return System(tuple(new_rest), s.goal, s.fresh_counter)


# ---------------------------------------------------------------------------
# Stage 2 strategy
# ---------------------------------------------------------------------------

_BLACK = (BBox, BDia, SBBox, SBDia)


def _crit(sign: str, f: Formula, eps: OrderType) -> bool:
    return has_critical_leaf(build_signed_tree(sign, f), eps)


def _choose_rule(s: System, cert: Certificate) -> RuleInstance | None:
    """First applicable decomposition action in scan order, or None."""
    eps = cert.eps
    for idx, ineq in enumerate(s.inequalities):
        lhs, rhs = ineq.lhs, ineq.rhs
        l_pure, r_pure = _is_pure(lhs), _is_pure(rhs)
        if l_pure and r_pure:
            continue
        if l_pure:
            active = "R"
        elif r_pure:
            active = "L"
        else:
            crit_l = _crit(MINUS, lhs, eps)
            crit_r = _crit(PLUS, rhs, eps)
            if crit_l == crit_r:
                continue
            active = "L" if crit_l else "R"
        r = _active_rule(idx, ineq, active, eps)
        if r is not None:
            return r
    return None


def _active_rule(idx, ineq, active, eps) -> RuleInstance | None:
    lhs, rhs = ineq.lhs, ineq.rhs
    if active == "R":
        if isinstance(rhs, Not):
            return RuleInstance("neg-res-right", idx)
        if isinstance(rhs, And):
            return RuleInstance("split-right", idx)
        if isinstance(rhs, Or):
            c_left = _crit(PLUS, rhs.left, eps)
            c_right = _crit(PLUS, rhs.right, eps)
            if c_right and not c_left:
                return RuleInstance("or-res", idx, variant=1)
            if c_left and not c_right:
                return RuleInstance("or-res", idx, variant=2)
            return None
        if isinstance(rhs, Imp):
            c_left = _crit(MINUS, rhs.left, eps)
            c_right = _crit(PLUS, rhs.right, eps)
            if c_right and not c_left:
                return RuleInstance("imp-res", idx, variant=1)
            if c_left and not c_right:
                return RuleInstance("imp-res", idx, variant=2)
            return None
        if isinstance(rhs, Dia) and isinstance(lhs, Nominal):
            return RuleInstance("dia-approx", idx)
        if isinstance(rhs, SDia) and isinstance(lhs, Nominal):
            return RuleInstance("sdia-approx", idx)
        if isinstance(rhs, Box):
            return RuleInstance("box-res", idx)
        if isinstance(rhs, SBox):
            return RuleInstance("sbox-res", idx)
        if isinstance(rhs, BBox):
            return RuleInstance("rev-dia-res", idx)
        if isinstance(rhs, SBBox):
            return RuleInstance("rev-sdia-res", idx)
        if isinstance(rhs, BDia) and isinstance(lhs, Nominal):
            return RuleInstance("bdia-approx", idx)
        if isinstance(rhs, SBDia) and isinstance(lhs, Nominal):
            return RuleInstance("sbdia-approx", idx)
        return None
    if isinstance(lhs, Not):
        return RuleInstance("neg-res-left", idx)
    if isinstance(lhs, Or):
        return RuleInstance("split-left", idx)
    if isinstance(lhs, And):
        c_left = _crit(MINUS, lhs.left, eps)
        c_right = _crit(MINUS, lhs.right, eps)
        if c_left and not c_right:
            return RuleInstance("and-res", idx, variant=1)
        if c_right and not c_left:
            return RuleInstance("and-res", idx, variant=2)
        return None
    if (
        isinstance(lhs, Imp)
        and isinstance(rhs, Not)
        and isinstance(rhs.sub, Nominal)
    ):
        return RuleInstance("imp-approx", idx)
    if isinstance(lhs, Dia):
        return RuleInstance("dia-res", idx)
    if isinstance(lhs, SDia):
        return RuleInstance("sdia-res", idx)
    if isinstance(lhs, BDia):
        return RuleInstance("rev-box-res", idx)
    if isinstance(lhs, SBDia):
        return RuleInstance("rev-sbox-res", idx)
    if not (isinstance(rhs, Not) and isinstance(rhs.sub, Nominal)):
        return None
    if isinstance(lhs, Box):
        return RuleInstance("box-approx", idx)
    if isinstance(lhs, SBox):
        return RuleInstance("sbox-approx", idx)
    if isinstance(lhs, BBox):
        return RuleInstance("bbox-approx", idx)
    if isinstance(lhs, SBBox):
        return RuleInstance("sbbox-approx", idx)
    return None


def _decompose(s: System, cert, rec, member, half) -> System:
    while True:
        r = _choose_rule(s, cert)
        if r is None:
            return s
        consumed = [s.inequalities[r.index]]
        new = apply_rule(s, r)
        count = len(new.inequalities) - len(s.inequalities) + 1
        produced = list(new.inequalities[r.index : r.index + count])
        fresh = [f"i{k}" for k in range(s.fresh_counter, new.fresh_counter)]
        name = r.rule if r.variant == 0 else f"{r.rule}-{r.variant}"
        stage = "reduce"
        rec.add(stage, half, name, member, "system", consumed, produced, fresh)
        s = new


def _omega_descending(cert: Certificate, names: set[str]) -> list[str]:
    """Variables in descending dependence order (Ω-maximal first)."""

    def key(n):
        return sum(1 for m in names if cert.omega.less(m, n))

    return sorted(names, key=lambda n: (-key(n), n))


def _run_member(
    ante, cons_ineq, member, rec, half, max_vars, counter
) -> tuple[System, Certificate] | Failure:
    member_quasi = QuasiInequality(tuple(ante), (cons_ineq,))
    try:
        cert = find_certificate(member_quasi, max_vars)
    except classify.VariableBoundError:
        cert = None
    if cert is None:
        names = sorted(
            {
                n
                for i in ante + [cons_ineq]
                for n in free_vars(i.lhs) | free_vars(i.rhs)
            }
        )
        cert = Certificate(
            OrderType.all_one(names), DependenceOrder.from_chain(names)
        )
    s = first_approximation(member_quasi, counter)
    rec.add(
        "approx", half, "first-approx", member, "goal",
        [cons_ineq],
        list(s.inequalities[len(ante):]) + [s.goal],
        [f"i{s.fresh_counter - 2}", f"i{s.fresh_counter - 1}"],
    )
    s = _decompose(s, cert, rec, member, half)
    names = {
        n for i in s.inequalities for n in free_vars(i.lhs) | free_vars(i.rhs)
    }
    for name in _omega_descending(cert, names):
        present = {
            n for i in s.inequalities for n in free_vars(i.lhs) | free_vars(i.rhs)
        }
        if name not in present:
            continue
        side = "Right" if cert.eps.get(name) is not Eps.Partial else "Left"
        before = s.inequalities
        try:
            s = eliminate(s, name, side)
        except AckermannError as exc:
            remaining = sorted(present)
            return Failure(s, tuple(remaining), str(exc), DerivationTrace("", ()))
        consumed = [i for i in before if i not in s.inequalities]
        produced = [i for i in s.inequalities if i not in before]
        rec.add(
            "reduce", half, f"ackermann-{side.lower()}:{name}", member, "system",
            consumed, produced,
        )
        s = _decompose(s, cert, rec, member, half)
    leftover = {
        n for i in s.inequalities for n in free_vars(i.lhs) | free_vars(i.rhs)
    }
    if leftover:
        return Failure(
            s, tuple(sorted(leftover)), "undecomposable inequalities remain",
            DerivationTrace("", ()),
        )
    return s, cert


# ---------------------------------------------------------------------------
# Stage 3: simplification of the pure system
# ---------------------------------------------------------------------------

_ADDITIVE = (Dia, SDia, BDia, SBDia, And)

_FOLD_DUALS = {
    Dia: Box, Box: Dia, SDia: SBox, SBox: SDia,
    BDia: BBox, BBox: BDia, SBDia: SBBox, SBBox: SBDia,
}


def _fold(f: Formula) -> Formula:
    """Rewrite ¬ op ¬ θ into the dual operator and cancel ¬¬."""
    if isinstance(f, Not):
        sub = _fold(f.sub)
        if isinstance(sub, Not):
            return sub.sub
        if type(sub) in _FOLD_DUALS and isinstance(sub.sub, Not):
            return _FOLD_DUALS[type(sub)](sub.sub.sub)
        return Not(sub)
    kids = [_fold(c) for c in _children(f)]
    return _rebuild(f, kids)


def _children(f: Formula):
    if isinstance(f, (And, Or, Imp)):
        return [f.left, f.right]
    if hasattr(f, "sub"):
        return [f.sub]
    return []


def _rebuild(f: Formula, kids):
    if isinstance(f, (And, Or, Imp)):
        return type(f)(kids[0], kids[1])
    if hasattr(f, "sub"):
        return type(f)(kids[0])
    return f


def _nominal_count(f: Formula, name: str) -> int:
    if isinstance(f, Nominal):
        return 1 if f.name == name else 0
    return sum(_nominal_count(c, name) for c in _children(f))


def _additive_path(f: Formula, name: str) -> bool:
    """The single occurrence of the nominal is reached through completely
    additive positive operators only."""
    if isinstance(f, Nominal):
        return f.name == name
    if not isinstance(f, _ADDITIVE):
        return False
    kids = _children(f)
    for kid in kids:
        if _nominal_count(kid, name) == 1:
            return _additive_path(kid, name)
    return False


def _simplify_member(s: System, rec, member, half) -> QuasiInequality:
    ineqs = list(s.inequalities)
    goal = s.goal

    def record(rule, consumed, produced, where="system"):
        rec.add("simplify", half, rule, member, where, consumed, produced)

    # reverse residuation: pull black operators back to the other side
    changed = True
    while changed:
        changed = False
        for i, ineq in enumerate(ineqs):
            for rule in ("rev-dia-res", "rev-box-res", "rev-sdia-res", "rev-sbox-res"):
                if _RES_PATTERNS[rule](ineq.lhs, ineq.rhs):
                    (new,) = _RES_PRODUCTS[rule](ineq.lhs, ineq.rhs)
                    ineqs[i] = new
                    record(rule, [ineq], [new])
                    changed = True
                    break
            if changed:
                break

    # goal-nominal elimination
    if isinstance(goal.rhs, Not) and isinstance(goal.rhs.sub, Nominal):
        g1 = goal.rhs.sub.name
        uppers = []
        others = []
        ok = True
        for ineq in ineqs:
            has = g1 in free_nominals(ineq.lhs) | free_nominals(ineq.rhs)
            if not has:
                others.append(ineq)
            elif (
                isinstance(ineq.rhs, Not)
                and isinstance(ineq.rhs.sub, Nominal)
                and ineq.rhs.sub.name == g1
                and g1 not in free_nominals(ineq.lhs)
            ):
                uppers.append(ineq)
            else:
                ok = False
        if ok:
            new_goal = Inequality(goal.lhs, Rel.Leq, _or_all(i.lhs for i in uppers))
            record("goal-elim-right", uppers + [goal], [new_goal], where="goal")
            ineqs, goal = others, new_goal
    if isinstance(goal.lhs, Nominal):
        g0 = goal.lhs.name
        if g0 not in free_nominals(goal.rhs):
            lowers = []
            others = []
            ok = True
            for ineq in ineqs:
                has = g0 in free_nominals(ineq.lhs) | free_nominals(ineq.rhs)
                if not has:
                    others.append(ineq)
                elif (
                    isinstance(ineq.lhs, Nominal)
                    and ineq.lhs.name == g0
                    and g0 not in free_nominals(ineq.rhs)
                ):
                    lowers.append(ineq)
                else:
                    ok = False
            if ok:
                new_goal = Inequality(
                    _and_all(i.rhs for i in lowers), Rel.Leq, goal.rhs
                )
                record("goal-elim-left", lowers + [goal], [new_goal], where="goal")
                ineqs, goal = others, new_goal

    # contraposition and nominal Ackermann
    changed = True
    while changed:
        changed = False
        for i, ineq in enumerate(ineqs):
            if (
                isinstance(ineq.rhs, Not)
                and isinstance(ineq.rhs.sub, Nominal)
                and not isinstance(ineq.lhs, Nominal)
            ):
                new = Inequality(ineq.rhs.sub, Rel.Leq, _neg(ineq.lhs))
                ineqs[i] = new
                record("contrapose", [ineq], [new])
                changed = True
                break
        if changed:
            continue
        goal_noms = free_nominals(goal.lhs) | free_nominals(goal.rhs)
        for name in sorted(
            {n for i in ineqs for n in free_nominals(i.lhs) | free_nominals(i.rhs)}
        ):
            uppers = [
                i
                for i in ineqs
                if isinstance(i.lhs, Nominal) and i.lhs.name == name
            ]
            if len(uppers) != 1 or name in free_nominals(uppers[0].rhs):
                continue
            elsewhere = [
                i for i in ineqs if i is not uppers[0]
                and name in free_nominals(i.lhs) | free_nominals(i.rhs)
            ]
            if elsewhere:
                continue
            if name in free_nominals(goal.rhs):
                continue
            if _nominal_count(goal.lhs, name) != 1:
                continue
            if not _additive_path(goal.lhs, name):
                continue
            new_goal = Inequality(
                substitute_nominal(goal.lhs, uppers[0].rhs, name), Rel.Leq, goal.rhs
            )
            record(
                f"nominal-ackermann:{name}", [uppers[0], goal], [new_goal],
                where="goal",
            )
            ineqs.remove(uppers[0])
            goal = new_goal
            changed = True
            break

    # display folding on the goal
    if (
        isinstance(goal.rhs, Not)
        and isinstance(goal.rhs.sub, Nominal)
        and not isinstance(goal.lhs, Nominal)
    ):
        new_goal = Inequality(goal.rhs.sub, Rel.Leq, _neg(goal.lhs))
        record("contrapose-goal", [goal], [new_goal], where="goal")
        goal = new_goal
    folded = Inequality(_fold(goal.lhs), Rel.Leq, _fold(goal.rhs))
    if folded != goal:
        record("fold", [goal], [folded], where="goal")
        goal = folded
    if isinstance(goal.lhs, Nominal):
        for rule, box_type in (
            ("box-res", Box), ("sbox-res", SBox),
            ("bbox-res", BBox), ("sbbox-res", SBBox),
        ):
            if isinstance(goal.rhs, box_type):
                sys_view = System((goal,), goal, 0)
                (new_goal,) = _rule_products(sys_view, RuleInstance(rule, 0))[0]
                record(rule, [goal], [new_goal], where="goal")
                goal = new_goal
                break

    # canonical nominal renaming (first occurrence order)
    order: list[str] = []

    def visit(f: Formula):
        if isinstance(f, Nominal) and f.name not in order:
            order.append(f.name)
        for c in _children(f):
            visit(c)

    for ineq in ineqs + [goal]:
        visit(ineq.lhs)
        visit(ineq.rhs)
    letters = "ijklmnopqrstuvwxyz"
    mapping = {
        name: (letters[k] if k < len(letters) else f"n{k}")
        for k, name in enumerate(order)
    }
    if any(k != v for k, v in mapping.items()):
        old = ineqs + [goal]

        def ren(f):
            for src, dst in mapping.items():
                f = substitute_nominal(f, Nominal(f"#{dst}"), src)
            for dst in mapping.values():
                f = substitute_nominal(f, Nominal(dst), f"#{dst}")
            return f

        ineqs = [Inequality(ren(i.lhs), Rel.Leq, ren(i.rhs)) for i in ineqs]
        goal = Inequality(ren(goal.lhs), Rel.Leq, ren(goal.rhs))
        record("rename", old, ineqs + [goal], where="goal")

    antecedent = tuple(ineqs) if ineqs else (TRIVIAL_INEQ,)
    return QuasiInequality(antecedent, (goal,))


# ---------------------------------------------------------------------------
# Top-level runs
# ---------------------------------------------------------------------------


def run_alba(q: QuasiInequality | Inequality, max_vars: int = 6) -> AlbaOutcome:
    """Full pipeline on a quasi-inequality."""
    if isinstance(q, Inequality):
        q = QuasiInequality((TRIVIAL_INEQ,), (q,))
    rec = _Recorder()
    outcome = _run_quasi(q, rec, half=2, max_vars=max_vars)
    trace = DerivationTrace(render(q), tuple(rec.steps))
    if isinstance(outcome, Failure):
        return replace(outcome, trace=trace)
    return Success(tuple(outcome), trace)


def _run_quasi(q, rec, half, max_vars):
    """Shared driver: returns list of pure quasis or a Failure (without trace)."""
    ante, cons = _preprocess_lists(q, rec, half)
    rec.add(
        "preprocess", half, "split-members", None, "cons",
        [], [render(c) for c in cons],
    )
    outputs = []
    counter = _fresh_start(QuasiInequality(tuple(ante), tuple(cons)))
    for k, cons_ineq in enumerate(cons):
        result = _run_member(list(ante), cons_ineq, k, rec, half, max_vars, counter)
        if isinstance(result, Failure):
            return result
        system, cert = result
        counter = system.fresh_counter
        pure = _simplify_member(system, rec, k, half)
        rec.add(
            "simplify", half, "output", k, "system",
            [], [render(i) for i in pure.antecedent + pure.consequent],
        )
        outputs.append(pure)
    for quasi in outputs:
        for ineq in quasi.antecedent + quasi.consequent:
            assert _ineq_pure(ineq), "internal error: non-pure output"
    return outputs


# ---------------------------------------------------------------------------
# Topological-correctness monitor (standalone trace replay)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TopoStepVerdict:
    step: int
    rule: str
    ok: bool
    detail: str


@dataclass(frozen=True)
class TopoReport:
    ok: bool
    ackermann_steps: tuple[TopoStepVerdict, ...]
    errors: tuple[str, ...]


class _ReplayState:
    def __init__(self, input_text: str):
        stmt = parse_statement(input_text)
        if isinstance(stmt, Inequality):
            self.ante: list[str] = []
            self.cons: list[str] = [render(stmt)]
        else:
            self.ante = [render(i) for i in stmt.antecedent]
            self.cons = [render(i) for i in stmt.consequent]
        self.members: dict[int, dict] = {}

    def all_strings(self):
        out = list(self.ante) + list(self.cons)
        for m in self.members.values():
            out += m["ineqs"]
            if m["goal"] is not None:
                out.append(m["goal"])
        return out


def _replace_strings(lst: list[str], consumed, produced, errors, step):
    idx = None
    for c in consumed:
        if c not in lst:
            errors.append(f"step {step}: consumed '{c}' not present")
            return
        pos = lst.index(c)
        if idx is None:
            idx = pos
        lst.remove(c)
    if idx is None:
        idx = len(lst)
    lst[idx:idx] = list(produced)


def check_topological_correctness(tr: DerivationTrace) -> TopoReport:
    """Replay the trace; at each Ackermann step check every non-pure
    inequality is syntactically closed on the left and open on the right."""
    errors: list[str] = []
    verdicts: list[TopoStepVerdict] = []
    state = _ReplayState(tr.input)
    for st in tr.steps:
        for name in st.fresh:
            pat = re.compile(rf"@{re.escape(name)}(?![A-Za-z0-9_])")
            for s in state.all_strings():
                if pat.search(s):
                    errors.append(
                        f"step {st.step}: fresh symbol {name} already present"
                    )
        if st.rule.split(":")[0] in ("ackermann-right", "ackermann-left"):
            if st.member is None:
                current = list(state.cons)
            else:
                current = list(state.members[st.member]["ineqs"])
            step_ok = True
            details = []
            for text in current:
                ineq = parse_statement(text)
                if not isinstance(ineq, Inequality):
                    continue
                if _ineq_pure(ineq):
                    continue
                pol_l = classify.syntactic_polarity(ineq.lhs, PLUS)
                pol_r = classify.syntactic_polarity(ineq.rhs, PLUS)
                if not pol_l.closed or not pol_r.open:
                    step_ok = False
                    details.append(
                        f"'{text}' violates closed-left/open-right"
                    )
            verdicts.append(
                TopoStepVerdict(
                    st.step, st.rule, step_ok, "; ".join(details) or "ok"
                )
            )
        _replay_step(state, st, errors)
    ok = not errors and all(v.ok for v in verdicts)
    return TopoReport(ok, tuple(verdicts), tuple(errors))


def _replay_step(state: _ReplayState, st: TraceStep, errors: list[str]):
    if st.rule == "split-members":
        for k, text in enumerate(st.produced):
            if text not in state.cons:
                errors.append(f"step {st.step}: member consequent '{text}' missing")
            state.members[k] = {
                "ineqs": list(state.ante), "goal": None, "pending": text,
            }
        return
    if st.rule == "meta-conjunction":
        if sorted(st.produced) != sorted(state.cons):
            errors.append(f"step {st.step}: meta-conjunction mismatch")
        return
    if st.rule == "first-approx":
        m = state.members.get(st.member)
        if m is None or st.consumed != (m["pending"],):
            errors.append(f"step {st.step}: first-approx premise mismatch")
            return
        m["ineqs"].extend(st.produced[:-1])
        m["goal"] = st.produced[-1]
        return
    if st.rule == "output":
        m = state.members.get(st.member)
        final = sorted(m["ineqs"] + [m["goal"]]) if m else []
        expected = sorted(st.produced)
        if m and m["ineqs"] == [] and len(st.produced) == 2:
            # empty antecedent is rendered as the trivial inequality
            final = sorted(["T <= T", m["goal"]])
        if final != expected:
            errors.append(
                f"step {st.step}: output mismatch ({final} != {expected})"
            )
        return
    if st.member is None:
        target = state.ante if st.where == "ante" else state.cons
        _replace_strings(target, st.consumed, st.produced, errors, st.step)
        return
    m = state.members.get(st.member)
    if m is None:
        errors.append(f"step {st.step}: unknown member {st.member}")
        return
    if st.where == "goal":
        pool = m["ineqs"] + ([m["goal"]] if m["goal"] is not None else [])
        for c in st.consumed:
            if c not in pool:
                errors.append(f"step {st.step}: consumed '{c}' not present")
                return
        for c in st.consumed:
            if c in m["ineqs"]:
                m["ineqs"].remove(c)
        m["goal"] = st.produced[-1]
        m["ineqs"].extend(st.produced[:-1])
        return
    _replace_strings(m["ineqs"], st.consumed, st.produced, errors, st.step)
