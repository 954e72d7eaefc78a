"""Signed generation trees, node classification, and branch analysis.

A signed tree labels every subformula with + or −: the sign propagates
unchanged through the modalities, ∧ and ∨, flips under ¬, and flips on the
first child of →.  Non-leaf nodes belong to classification rows
(Δ-adjoint / SRA / SLR / SRR); some (sign, connective) pairs appear in two
rows, so branch segmentation works with row membership ("Skeleton-capable" =
Δ-adjoint or SLR, "PIA-capable" = SRA or SRR) while ``node_class`` reports a
single display tag with a fixed priority.

A branch is *good* when, read from the leaf upward, a PIA-capable segment is
followed by a Skeleton-capable segment.  The reported split is canonical:
the PIA segment is made as short as possible, so side conditions attach only
to nodes that cannot sit in the Skeleton segment.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .syntax import (
    And,
    BBox,
    BDia,
    Bottom,
    Box,
    Dia,
    Formula,
    Imp,
    Nominal,
    Not,
    Or,
    PropVar,
    SBBox,
    SBDia,
    SBox,
    SDia,
    Top,
)

PLUS = "+"
MINUS = "-"


def flip(sign: str) -> str:
    return MINUS if sign == PLUS else PLUS


class Eps(enum.Enum):
    """Order-type value of one variable."""

    One = "1"
    Partial = "d"

    def flipped(self) -> "Eps":
        return Eps.Partial if self is Eps.One else Eps.One


@dataclass(frozen=True)
class OrderType:
    """Total assignment of Eps values to the variables under consideration."""

    assignment: tuple[tuple[str, Eps], ...]

    @staticmethod
    def of(mapping: dict[str, Eps]) -> "OrderType":
        return OrderType(
            tuple(sorted((k, Eps(v)) for k, v in mapping.items()))
        )

    @staticmethod
    def all_one(names) -> "OrderType":
        return OrderType.of({n: Eps.One for n in names})

    def value(self, name: str) -> Eps:
        for key, eps in self.assignment:
            if key == name:
                return eps
        raise KeyError(name)

    def get(self, name: str) -> Eps | None:
        for key, eps in self.assignment:
            if key == name:
                return eps
        return None

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(k for k, _ in self.assignment)

    def dual(self) -> "OrderType":
        return OrderType(tuple((k, e.flipped()) for k, e in self.assignment))

    def to_dict(self) -> dict[str, str]:
        return {k: e.value for k, e in self.assignment}


@dataclass(frozen=True)
class DependenceOrder:
    """Strict (irreflexive, transitive) dependence relation on variables."""

    edges: frozenset[tuple[str, str]]

    def __post_init__(self):
        for a, b in self.edges:
            if a == b:
                raise ValueError(f"dependence order must be irreflexive: {a}")
            for c, d in self.edges:
                if b == c and (a, d) not in self.edges:
                    raise ValueError(
                        f"dependence order must be transitive: {a}<{b}<{d}"
                    )

    @staticmethod
    def from_chain(names) -> "DependenceOrder":
        names = list(names)
        return DependenceOrder(
            frozenset(
                (names[i], names[j])
                for i in range(len(names))
                for j in range(i + 1, len(names))
            )
        )

    def less(self, a: str, b: str) -> bool:
        return (a, b) in self.edges

    def to_list(self) -> list[list[str]]:
        return sorted([a, b] for a, b in self.edges)


# ---------------------------------------------------------------------------
# Node classification
# ---------------------------------------------------------------------------


class NodeClass(enum.Enum):
    DeltaAdjoint = "delta"
    SRA = "sra"
    SLR = "slr"
    SRR = "srr"
    Leaf = "leaf"


_LEAF_TYPES = (PropVar, Nominal, Top, Bottom)

_DELTA = {(PLUS, Or), (MINUS, And)}
_SRA = {
    (PLUS, And), (PLUS, Not), (PLUS, Box), (PLUS, BBox), (PLUS, SBox), (PLUS, SBBox),
    (MINUS, Or), (MINUS, Not), (MINUS, Dia), (MINUS, BDia), (MINUS, SDia), (MINUS, SBDia),
}
_SLR = {
    (PLUS, And), (PLUS, Not), (PLUS, Dia), (PLUS, BDia), (PLUS, SDia), (PLUS, SBDia),
    (MINUS, Or), (MINUS, Not), (MINUS, Box), (MINUS, BBox), (MINUS, SBox), (MINUS, SBBox),
    (MINUS, Imp),
}
_SRR = {(PLUS, Or), (PLUS, Imp), (MINUS, And)}


def _conn(connective) -> type:
    return connective if isinstance(connective, type) else type(connective)


def classify_node(sign: str, connective) -> NodeClass:
    """Single display tag for a non-leaf signed node (priority Δ > SRA > SLR > SRR)."""
    key = (sign, _conn(connective))
    if key in _DELTA:
        return NodeClass.DeltaAdjoint
    if key in _SRA:
        return NodeClass.SRA
    if key in _SLR:
        return NodeClass.SLR
    if key in _SRR:
        return NodeClass.SRR
    raise ValueError(f"unclassifiable node: {sign}{connective}")


def skeleton_capable(sign: str, connective) -> bool:
    """Membership in the Skeleton rows (Δ-adjoint or SLR)."""
    key = (sign, _conn(connective))
    return key in _DELTA or key in _SLR


def pia_capable(sign: str, connective) -> bool:
    """Membership in the PIA rows (SRA or SRR)."""
    key = (sign, _conn(connective))
    return key in _SRA or key in _SRR


def is_srr(sign: str, connective) -> bool:
    return (sign, _conn(connective)) in _SRR


# ---------------------------------------------------------------------------
# Signed trees
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SignedTree:
    sign: str
    formula: Formula
    node_class: NodeClass
    children: tuple["SignedTree", ...]

    @property
    def is_leaf(self) -> bool:
        return self.node_class is NodeClass.Leaf


def build_signed_tree(sign: str, f: Formula) -> SignedTree:
    """Signed generation tree of ``f`` with the given root sign."""
    if isinstance(f, _LEAF_TYPES):
        return SignedTree(sign, f, NodeClass.Leaf, ())
    if isinstance(f, Not):
        child = build_signed_tree(flip(sign), f.sub)
        return SignedTree(sign, f, classify_node(sign, f), (child,))
    if isinstance(f, Imp):
        left = build_signed_tree(flip(sign), f.left)
        right = build_signed_tree(sign, f.right)
        return SignedTree(sign, f, classify_node(sign, f), (left, right))
    if isinstance(f, (And, Or)):
        left = build_signed_tree(sign, f.left)
        right = build_signed_tree(sign, f.right)
        return SignedTree(sign, f, classify_node(sign, f), (left, right))
    # unary modalities preserve the sign
    child = build_signed_tree(sign, f.sub)
    return SignedTree(sign, f, classify_node(sign, f), (child,))


def render_tree(t: SignedTree, indent: int = 0) -> str:
    """Indented dump for debugging."""
    label = type(t.formula).__name__
    if isinstance(t.formula, (PropVar, Nominal)):
        label = f"{label}({t.formula.name})"
    line = "  " * indent + f"{t.sign}{label} [{t.node_class.value}]"
    return "\n".join([line] + [render_tree(c, indent + 1) for c in t.children])


# ---------------------------------------------------------------------------
# Branches
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Branch:
    """Path from a leaf to the root: the leaf plus (ancestor, child-index) pairs."""

    leaf: SignedTree
    path: tuple[tuple[SignedTree, int], ...]  # ordered leaf → root

    @property
    def leaf_sign(self) -> str:
        return self.leaf.sign

    @property
    def leaf_var(self) -> str | None:
        if isinstance(self.leaf.formula, PropVar):
            return self.leaf.formula.name
        return None


def branches(t: SignedTree) -> list[Branch]:
    """All leaf-to-root branches, leaves in left-to-right order."""
    out: list[Branch] = []

    def walk(node: SignedTree, ancestors: list[tuple[SignedTree, int]]):
        if node.is_leaf:
            out.append(Branch(node, tuple(reversed(ancestors))))
            return
        for idx, child in enumerate(node.children):
            ancestors.append((node, idx))
            walk(child, ancestors)
            ancestors.pop()

    walk(t, [])
    return out


def is_critical_leaf(leaf: SignedTree, eps: OrderType, dual: bool = False) -> bool:
    """+p is critical when ε(p)=1, −p when ε(p)=∂ (with ε flipped when dual).

    Leaves whose variable is outside the order-type's domain are never
    critical; this lets an order type over bound variables ignore free ones.
    """
    if not isinstance(leaf.formula, PropVar):
        return False
    value = eps.get(leaf.formula.name)
    if value is None:
        return False
    if dual:
        value = value.flipped()
    return (leaf.sign == PLUS) == (value is Eps.One)


def critical_branches(t: SignedTree, eps: OrderType) -> list[Branch]:
    """Branches whose leaf is ε-critical."""
    return [b for b in branches(t) if is_critical_leaf(b.leaf, eps)]


def is_eps_uniform(t: SignedTree, eps: OrderType, dual: bool = False) -> bool:
    """True iff every propositional-variable leaf is critical (constants ignored)."""
    return all(
        is_critical_leaf(b.leaf, eps, dual)
        for b in branches(t)
        if isinstance(b.leaf.formula, PropVar)
    )


def has_critical_leaf(t: SignedTree, eps: OrderType) -> bool:
    """True iff some leaf of the tree is ε-critical."""
    return any(is_critical_leaf(b.leaf, eps) for b in branches(t))


def leaf_signs(t: SignedTree, name: str) -> set[str]:
    """Signs under which the named variable occurs as a leaf of the tree."""
    return {
        b.leaf.sign
        for b in branches(t)
        if isinstance(b.leaf.formula, PropVar) and b.leaf.formula.name == name
    }


# ---------------------------------------------------------------------------
# Branch kinds
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Good:
    pia_len: int
    skel_len: int


@dataclass(frozen=True)
class PIA:
    length: int


@dataclass(frozen=True)
class Skeleton:
    length: int


@dataclass(frozen=True)
class Bad:
    reason: str


BranchKind = Good | PIA | Skeleton | Bad


def split_point(b: Branch) -> int | None:
    """Canonical segmentation index: nodes below it are PIA, above Skeleton.

    Returns the shortest PIA-prefix length such that everything above is
    Skeleton-capable, or None when no split exists (bad branch).
    """
    nodes = [node for node, _ in b.path]
    pia_len = 0
    for idx, node in enumerate(nodes):
        if not skeleton_capable(node.sign, node.formula):
            pia_len = idx + 1
    for node in nodes[:pia_len]:
        if not pia_capable(node.sign, node.formula):
            return None
    return pia_len


def branch_kind(b: Branch) -> BranchKind:
    """Good / PIA / Skeleton / Bad classification of one branch."""
    pia_len = split_point(b)
    n = len(b.path)
    if pia_len is None:
        nodes = [node for node, _ in b.path]
        first_skel_only = next(
            i for i, x in enumerate(nodes) if not pia_capable(x.sign, x.formula)
        )
        culprit = next(
            type(x.formula).__name__
            for x in nodes[first_skel_only:]
            if not skeleton_capable(x.sign, x.formula)
        )
        return Bad(f"PIA-only node ({culprit}) above a Skeleton-only node")
    if n == 0 or (0 < pia_len < n):
        return Good(pia_len, n - pia_len)
    if pia_len == n and n > 0:
        return PIA(n)
    return Skeleton(n)


def is_good(kind: BranchKind) -> bool:
    return not isinstance(kind, Bad)


def is_pia(kind: BranchKind) -> bool:
    """PIA branches: good with an empty Skeleton segment (leaf-only counts)."""
    return isinstance(kind, PIA) or (isinstance(kind, Good) and kind.skel_len == 0)
