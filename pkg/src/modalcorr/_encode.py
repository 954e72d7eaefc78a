"""Bytecode encoding shared by the compiled and pure evaluation kernels.

Formulas become postfix opcode/argument arrays evaluated with a stack of
bit-parallel lane masks: for a frame of ``n`` worlds and ``k`` free
propositional variables there are ``2**(n*k)`` valuation lanes, and lane
``j`` assigns variable ``m`` the truth set ``{w : bit m*n+w of j}``.  A
statement program bundles the inequalities of one statement; a first-order
program is a tree of nodes over individual-variable slots (closed,
predicate-free sentences only — exactly what pure correspondents produce).
"""

from __future__ import annotations

from dataclasses import dataclass

from . import fol, syntax
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
    Statement,
    Top,
)

# Formula opcodes (postfix).
OP_PROP = 0
OP_NOM = 1
OP_TOP = 2
OP_BOT = 3
OP_NOT = 4
OP_AND = 5
OP_OR = 6
OP_IMP = 7
OP_BOX = 8
OP_DIA = 9
OP_SBOX = 10
OP_SDIA = 11
OP_BBOX = 12
OP_BDIA = 13
OP_SBBOX = 14
OP_SBDIA = 15

_UNARY_OPS = {
    Not: OP_NOT,
    Box: OP_BOX,
    Dia: OP_DIA,
    SBox: OP_SBOX,
    SDia: OP_SDIA,
    BBox: OP_BBOX,
    BDia: OP_BDIA,
    SBBox: OP_SBBOX,
    SBDia: OP_SBDIA,
}
_BINARY_OPS = {And: OP_AND, Or: OP_OR, Imp: OP_IMP}

# First-order node kinds (tree; root is the last node).
FO_R = 0
FO_RP = 1
FO_EQ = 2
FO_TRUE = 3
FO_FALSE = 4
FO_NOT = 5
FO_AND = 6
FO_OR = 7
FO_IMP = 8
FO_ALL = 9
FO_EX = 10


@dataclass
class StmtProgram:
    """A statement compiled for the bit-parallel evaluators."""

    n_free: int
    n_bound: int
    n_noms: int
    ops: list[int]
    args: list[int]
    starts: list[int]  # formula f occupies ops[starts[f]:ends[f]]
    ends: list[int]
    ineqs: list[tuple[int, int, int]]  # (lhs formula, rhs formula, group 0=ante 1=cons)
    max_stack: int


@dataclass
class FOProgram:
    """A closed, predicate-free first-order sentence compiled to node arrays."""

    kinds: list[int]
    a: list[int]
    b: list[int]
    n_slots: int


class EncodingUnsupported(ValueError):
    """The input falls outside what the kernels can evaluate."""


def _encode_formula(
    f: Formula,
    prop_index: dict[str, int],
    nom_index: dict[str, int],
    ops: list[int],
    args: list[int],
) -> int:
    """Append postfix code for ``f``; return its maximum stack depth."""
    if isinstance(f, PropVar):
        ops.append(OP_PROP)
        args.append(prop_index[f.name])
        return 1
    if isinstance(f, Nominal):
        ops.append(OP_NOM)
        args.append(nom_index[f.name])
        return 1
    if isinstance(f, Top):
        ops.append(OP_TOP)
        args.append(0)
        return 1
    if isinstance(f, Bottom):
        ops.append(OP_BOT)
        args.append(0)
        return 1
    cls = type(f)
    if cls in _UNARY_OPS:
        depth = _encode_formula(f.sub, prop_index, nom_index, ops, args)
        ops.append(_UNARY_OPS[cls])
        args.append(0)
        return depth
    if cls in _BINARY_OPS:
        d1 = _encode_formula(f.left, prop_index, nom_index, ops, args)
        d2 = _encode_formula(f.right, prop_index, nom_index, ops, args)
        ops.append(_BINARY_OPS[cls])
        args.append(0)
        return max(d1, d2 + 1)
    raise EncodingUnsupported(f"cannot encode {f!r}")


def encode_statement(stmt: Statement) -> StmtProgram:
    """Compile a statement; bound variables get the highest variable indices."""
    if isinstance(stmt, Inequality):
        ante: tuple[Inequality, ...] = ()
        cons: tuple[Inequality, ...] = (stmt,)
        bound: tuple[str, ...] = ()
    elif isinstance(stmt, QuasiInequality):
        ante, cons, bound = stmt.antecedent, stmt.consequent, ()
    elif isinstance(stmt, Pi2Statement):
        ante, cons, bound = stmt.antecedent, stmt.consequent, stmt.bound_vars
    else:
        raise EncodingUnsupported(f"not a statement: {stmt!r}")

    voc = syntax.analyze_vocabulary(stmt)
    free = sorted(set(voc.prop_vars) - set(bound))
    prop_index = {name: i for i, name in enumerate(free)}
    for name in bound:
        prop_index[name] = len(prop_index)
    nom_index = {name: i for i, name in enumerate(sorted(voc.nominals))}

    ops: list[int] = []
    args: list[int] = []
    starts: list[int] = []
    ends: list[int] = []
    ineqs: list[tuple[int, int, int]] = []
    max_stack = 1

    def add_formula(f: Formula) -> int:
        starts.append(len(ops))
        depth = _encode_formula(f, prop_index, nom_index, ops, args)
        ends.append(len(ops))
        nonlocal max_stack
        max_stack = max(max_stack, depth)
        return len(starts) - 1

    for group, ineq_list in ((0, ante), (1, cons)):
        for ineq in ineq_list:
            lhs = ineq.lhs
            if ineq.rel is Rel.Prec:
                lhs = SDia(lhs)
            ineqs.append((add_formula(lhs), add_formula(ineq.rhs), group))

    return StmtProgram(
        n_free=len(free),
        n_bound=len(bound),
        n_noms=len(nom_index),
        ops=ops,
        args=args,
        starts=starts,
        ends=ends,
        ineqs=ineqs,
        max_stack=max_stack,
    )


def encode_fo(sentence: fol.FOFormula) -> FOProgram:
    """Compile a closed, predicate-free FO sentence to node arrays."""
    kinds: list[int] = []
    a: list[int] = []
    b: list[int] = []
    n_slots = 0

    def emit(kind: int, ai: int, bi: int) -> int:
        kinds.append(kind)
        a.append(ai)
        b.append(bi)
        return len(kinds) - 1

    def walk(f: fol.FOFormula, slots: dict[str, int]) -> int:
        nonlocal n_slots
        if isinstance(f, fol.Rel2):
            if f.a not in slots or f.b not in slots:
                raise EncodingUnsupported("free individual variable in FO formula")
            return emit(FO_R if f.rel == "R" else FO_RP, slots[f.a], slots[f.b])
        if isinstance(f, fol.Eq):
            if f.a not in slots or f.b not in slots:
                raise EncodingUnsupported("free individual variable in FO formula")
            return emit(FO_EQ, slots[f.a], slots[f.b])
        if isinstance(f, fol.Pred):
            raise EncodingUnsupported("predicate symbols are not kernel-evaluable")
        if isinstance(f, fol.FOTrue):
            return emit(FO_TRUE, 0, 0)
        if isinstance(f, fol.FOFalse):
            return emit(FO_FALSE, 0, 0)
        if isinstance(f, fol.FONot):
            return emit(FO_NOT, walk(f.sub, slots), 0)
        if isinstance(f, (fol.FOAnd, fol.FOOr, fol.FOImp)):
            kind = {fol.FOAnd: FO_AND, fol.FOOr: FO_OR, fol.FOImp: FO_IMP}[type(f)]
            left = walk(f.left, slots)
            right = walk(f.right, slots)
            return emit(kind, left, right)
        if isinstance(f, (fol.Forall, fol.Exists)):
            inner = dict(slots)
            if f.var in inner:
                slot = inner[f.var]
            else:
                slot = n_slots
                n_slots += 1
                inner[f.var] = slot
            child = walk(f.body, inner)
            return emit(FO_ALL if isinstance(f, fol.Forall) else FO_EX, slot, child)
        raise EncodingUnsupported(f"cannot encode {f!r}")

    walk(sentence, {})
    return FOProgram(kinds=kinds, a=a, b=b, n_slots=max(n_slots, 1))


def prop_patterns(n: int, n_free: int, n_lanes: int) -> list[int]:
    """Lane mask for each (variable, world) leaf: bit j set iff lane j makes it true."""
    patterns = []
    for m in range(n_free):
        for w in range(n):
            bit = m * n + w
            mask = 0
            for j in range(n_lanes):
                if j >> bit & 1:
                    mask |= 1 << j
            patterns.append(mask)
    return patterns
