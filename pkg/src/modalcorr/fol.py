"""First-order correspondence language and the standard translation.

Modal formulas translate to first-order formulas over two binary predicates:
``R`` (the subordination relation) and ``Rp`` (the modal relation R').  The
reverse modalities translate with swapped argument order: ``sdia p`` at ``x``
becomes ``exists y (R(y,x) & P_p(y))``.  Statements translate to sentences;
nominals are closed under outermost universal individual quantifiers.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import syntax
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
    Pi2Statement,
    PropVar,
    QuasiInequality,
    Rel,
    SBBox,
    SBDia,
    SBox,
    SDia,
    Top,
)


# ---------------------------------------------------------------------------
# FO AST
# ---------------------------------------------------------------------------


class FOFormula:
    """Base class for first-order formulas over R, Rp, unary predicates, =."""

    __slots__ = ()


@dataclass(frozen=True)
class Rel2(FOFormula):
    rel: str  # "R" or "Rp"
    a: str
    b: str


@dataclass(frozen=True)
class Pred(FOFormula):
    name: str  # propositional variable this predicate interprets
    var: str


@dataclass(frozen=True)
class Eq(FOFormula):
    a: str
    b: str


@dataclass(frozen=True)
class FOTrue(FOFormula):
    pass


@dataclass(frozen=True)
class FOFalse(FOFormula):
    pass


@dataclass(frozen=True)
class FONot(FOFormula):
    sub: FOFormula


@dataclass(frozen=True)
class FOAnd(FOFormula):
    left: FOFormula
    right: FOFormula


@dataclass(frozen=True)
class FOOr(FOFormula):
    left: FOFormula
    right: FOFormula


@dataclass(frozen=True)
class FOImp(FOFormula):
    left: FOFormula
    right: FOFormula


@dataclass(frozen=True)
class Forall(FOFormula):
    var: str
    body: FOFormula


@dataclass(frozen=True)
class Exists(FOFormula):
    var: str
    body: FOFormula


FO_TRUE = FOTrue()
FO_FALSE = FOFalse()


def fo_and_all(parts: list[FOFormula]) -> FOFormula:
    if not parts:
        return FO_TRUE
    out = parts[0]
    for p in parts[1:]:
        out = FOAnd(out, p)
    return out


def free_fo_vars(f: FOFormula) -> frozenset[str]:
    """Free individual variables of ``f``."""
    if isinstance(f, Rel2):
        return frozenset((f.a, f.b))
    if isinstance(f, Pred):
        return frozenset((f.var,))
    if isinstance(f, Eq):
        return frozenset((f.a, f.b))
    if isinstance(f, (FOTrue, FOFalse)):
        return frozenset()
    if isinstance(f, FONot):
        return free_fo_vars(f.sub)
    if isinstance(f, (FOAnd, FOOr, FOImp)):
        return free_fo_vars(f.left) | free_fo_vars(f.right)
    if isinstance(f, (Forall, Exists)):
        return free_fo_vars(f.body) - {f.var}
    raise TypeError(f"not an FO formula: {f!r}")


def rename_fo_var(f: FOFormula, old: str, new: str) -> FOFormula:
    """Replace free occurrences of variable ``old`` by ``new``."""

    def sub(v: str) -> str:
        return new if v == old else v

    if isinstance(f, Rel2):
        return Rel2(f.rel, sub(f.a), sub(f.b))
    if isinstance(f, Pred):
        return Pred(f.name, sub(f.var))
    if isinstance(f, Eq):
        return Eq(sub(f.a), sub(f.b))
    if isinstance(f, (FOTrue, FOFalse)):
        return f
    if isinstance(f, FONot):
        return FONot(rename_fo_var(f.sub, old, new))
    if isinstance(f, (FOAnd, FOOr, FOImp)):
        return type(f)(
            rename_fo_var(f.left, old, new), rename_fo_var(f.right, old, new)
        )
    if isinstance(f, (Forall, Exists)):
        if f.var == old or f.var == new:
            # old is shadowed (or new would be captured); leave the body alone.
            return f
        return type(f)(f.var, rename_fo_var(f.body, old, new))
    raise TypeError(f"not an FO formula: {f!r}")


# ---------------------------------------------------------------------------
# Standard translation
# ---------------------------------------------------------------------------


class _FreshVars:
    """Allocates x0, x1, ... skipping any reserved names."""

    def __init__(self, reserved=()):
        self.reserved = set(reserved)
        self.counter = 0

    def __call__(self) -> str:
        while True:
            name = f"x{self.counter}"
            self.counter += 1
            if name not in self.reserved:
                return name


#: (relation, reversed argument order) for each universal/existential modality.
_MODAL_FO = {
    Box: ("Rp", False, Forall),
    Dia: ("Rp", False, Exists),
    BBox: ("Rp", True, Forall),
    BDia: ("Rp", True, Exists),
    SBox: ("R", True, Forall),
    SDia: ("R", True, Exists),
    SBBox: ("R", False, Forall),
    SBDia: ("R", False, Exists),
}


def _st(f: Formula, x: str, fresh: _FreshVars) -> FOFormula:
    if isinstance(f, PropVar):
        return Pred(f.name, x)
    if isinstance(f, Nominal):
        return Eq(x, f.name)
    if isinstance(f, Top):
        return FO_TRUE
    if isinstance(f, Bottom):
        return FO_FALSE
    if isinstance(f, Not):
        return FONot(_st(f.sub, x, fresh))
    if isinstance(f, And):
        return FOAnd(_st(f.left, x, fresh), _st(f.right, x, fresh))
    if isinstance(f, Or):
        return FOOr(_st(f.left, x, fresh), _st(f.right, x, fresh))
    if isinstance(f, Imp):
        return FOImp(_st(f.left, x, fresh), _st(f.right, x, fresh))
    if type(f) in _MODAL_FO:
        rel, reverse, quant = _MODAL_FO[type(f)]
        y = fresh()
        edge = Rel2(rel, y, x) if reverse else Rel2(rel, x, y)
        body = _st(f.sub, y, fresh)
        if quant is Forall:
            return Forall(y, FOImp(edge, body))
        return Exists(y, FOAnd(edge, body))
    raise TypeError(f"not a formula: {f!r}")


def standard_translation_formula(f: Formula, x: str) -> FOFormula:
    """Translate ``f`` at the free individual variable ``x``."""
    reserved = {x} | syntax.free_nominals(f)
    return _st(f, x, _FreshVars(reserved))


def _st_inequality(ineq: Inequality, fresh: _FreshVars) -> FOFormula:
    lhs = ineq.lhs
    if ineq.rel is Rel.Prec:
        lhs = SDia(lhs)
    x = fresh()
    return Forall(x, FOImp(_st(lhs, x, fresh), _st(ineq.rhs, x, fresh)))


def standard_translation_statement(q) -> FOFormula:
    """Translate an inequality, a sequence of inequalities, or a quasi-inequality.

    The result is a sentence: any nominals become outermost universally
    quantified individual variables, reflecting validity under all singleton
    assignments.
    """
    if isinstance(q, Pi2Statement):
        raise TypeError("existential statements have no first-order translation")
    if isinstance(q, Inequality):
        ineqs = [q]
        core_of = lambda fresh: _st_inequality(q, fresh)
    elif isinstance(q, QuasiInequality):
        ineqs = list(q.antecedent) + list(q.consequent)
        core_of = lambda fresh: FOImp(
            fo_and_all([_st_inequality(i, fresh) for i in q.antecedent]),
            fo_and_all([_st_inequality(i, fresh) for i in q.consequent]),
        )
    else:
        ineqs = list(q)
        core_of = lambda fresh: fo_and_all([_st_inequality(i, fresh) for i in ineqs])
    nominals = sorted(
        set().union(
            *(
                syntax.free_nominals(i.lhs) | syntax.free_nominals(i.rhs)
                for i in ineqs
            )
        )
        if ineqs
        else set()
    )
    fresh = _FreshVars(set(nominals))
    out = core_of(fresh)
    for name in reversed(nominals):
        out = Forall(name, out)
    return out


# ---------------------------------------------------------------------------
# Conservative simplifier
# ---------------------------------------------------------------------------


def _flatten_and(f: FOFormula) -> list[FOFormula]:
    if isinstance(f, FOAnd):
        return _flatten_and(f.left) + _flatten_and(f.right)
    return [f]


def _bound_substitution(var: str, conjuncts: list[FOFormula]):
    """Find an equality pinning ``var`` to another variable, if any."""
    for idx, c in enumerate(conjuncts):
        if isinstance(c, Eq):
            if c.a == var and c.b != var:
                return idx, c.b
            if c.b == var and c.a != var:
                return idx, c.a
    return None


def _simplify_once(f: FOFormula) -> FOFormula:
    if isinstance(f, FONot):
        sub = _simplify_once(f.sub)
        if isinstance(sub, FOTrue):
            return FO_FALSE
        if isinstance(sub, FOFalse):
            return FO_TRUE
        return FONot(sub)
    if isinstance(f, (FOAnd, FOOr, FOImp)):
        left = _simplify_once(f.left)
        right = _simplify_once(f.right)
        if isinstance(f, FOAnd):
            if isinstance(left, FOTrue):
                return right
            if isinstance(right, FOTrue):
                return left
            if isinstance(left, FOFalse) or isinstance(right, FOFalse):
                return FO_FALSE
        if isinstance(f, FOOr):
            if isinstance(left, FOFalse):
                return right
            if isinstance(right, FOFalse):
                return left
            if isinstance(left, FOTrue) or isinstance(right, FOTrue):
                return FO_TRUE
        if isinstance(f, FOImp):
            if isinstance(left, FOTrue):
                return right
            if isinstance(left, FOFalse) or isinstance(right, FOTrue):
                return FO_TRUE
        return type(f)(left, right)
    if isinstance(f, Exists):
        body = _simplify_once(f.body)
        conjuncts = _flatten_and(body)
        hit = _bound_substitution(f.var, conjuncts)
        if hit is not None:
            idx, target = hit
            rest = [
                rename_fo_var(c, f.var, target)
                for k, c in enumerate(conjuncts)
                if k != idx
            ]
            return fo_and_all(rest)
        if f.var not in free_fo_vars(body):
            return body
        return Exists(f.var, body)
    if isinstance(f, Forall):
        body = _simplify_once(f.body)
        if isinstance(body, FOImp):
            premises = _flatten_and(body.left)
            hit = _bound_substitution(f.var, premises)
            if hit is not None:
                idx, target = hit
                rest = [
                    rename_fo_var(c, f.var, target)
                    for k, c in enumerate(premises)
                    if k != idx
                ]
                concl = rename_fo_var(body.right, f.var, target)
                if rest:
                    return FOImp(fo_and_all(rest), concl)
                return concl
        if f.var not in free_fo_vars(body):
            return body
        return Forall(f.var, body)
    return f


def simplify_fo(f: FOFormula) -> FOFormula:
    """Equality elimination, trivial-connective removal, quantifier pruning.

    Every rewrite preserves truth on every structure with nonempty domain;
    iterated to a fixpoint.
    """
    for _ in range(100):
        g = _simplify_once(f)
        if g == f:
            return f
        f = g
    return f


# ---------------------------------------------------------------------------
# Rendering
# ---------------------------------------------------------------------------

_FO_PREC_IMP = 0
_FO_PREC_OR = 1
_FO_PREC_AND = 2
_FO_PREC_NOT = 3
_FO_PREC_ATOM = 4


def _fo_level(f: FOFormula) -> int:
    if isinstance(f, (Forall, Exists, FOImp)):
        return _FO_PREC_IMP
    if isinstance(f, FOOr):
        return _FO_PREC_OR
    if isinstance(f, FOAnd):
        return _FO_PREC_AND
    if isinstance(f, FONot):
        return _FO_PREC_NOT
    return _FO_PREC_ATOM


def _fo_child(f: FOFormula, min_level: int) -> str:
    text = render_fo(f)
    if _fo_level(f) < min_level:
        return f"({text})"
    return text


def render_fo(f: FOFormula) -> str:
    """Conventional ASCII rendering of an FO formula."""
    if isinstance(f, Rel2):
        name = "R'" if f.rel == "Rp" else "R"
        return f"{name}({f.a},{f.b})"
    if isinstance(f, Pred):
        return f"P_{f.name}({f.var})"
    if isinstance(f, Eq):
        return f"{f.a} = {f.b}"
    if isinstance(f, FOTrue):
        return "true"
    if isinstance(f, FOFalse):
        return "false"
    if isinstance(f, FONot):
        return "~" + _fo_child(f.sub, _FO_PREC_NOT)
    if isinstance(f, FOAnd):
        return f"{_fo_child(f.left, _FO_PREC_AND)} & {_fo_child(f.right, _FO_PREC_AND + 1)}"
    if isinstance(f, FOOr):
        return f"{_fo_child(f.left, _FO_PREC_OR)} | {_fo_child(f.right, _FO_PREC_OR + 1)}"
    if isinstance(f, FOImp):
        return f"{_fo_child(f.left, _FO_PREC_IMP + 1)} -> {_fo_child(f.right, _FO_PREC_IMP)}"
    if isinstance(f, Forall):
        return f"forall {f.var}. {render_fo(f.body)}"
    if isinstance(f, Exists):
        return f"exists {f.var}. {render_fo(f.body)}"
    raise TypeError(f"not an FO formula: {f!r}")


def to_sexpr(f: FOFormula) -> str:
    """S-expression dump for tooling."""
    if isinstance(f, Rel2):
        return f"({f.rel} {f.a} {f.b})"
    if isinstance(f, Pred):
        return f"(P {f.name} {f.var})"
    if isinstance(f, Eq):
        return f"(= {f.a} {f.b})"
    if isinstance(f, FOTrue):
        return "true"
    if isinstance(f, FOFalse):
        return "false"
    if isinstance(f, FONot):
        return f"(not {to_sexpr(f.sub)})"
    if isinstance(f, FOAnd):
        return f"(and {to_sexpr(f.left)} {to_sexpr(f.right)})"
    if isinstance(f, FOOr):
        return f"(or {to_sexpr(f.left)} {to_sexpr(f.right)})"
    if isinstance(f, FOImp):
        return f"(imp {to_sexpr(f.left)} {to_sexpr(f.right)})"
    if isinstance(f, Forall):
        return f"(forall {f.var} {to_sexpr(f.body)})"
    if isinstance(f, Exists):
        return f"(exists {f.var} {to_sexpr(f.body)})"
    raise TypeError(f"not an FO formula: {f!r}")
