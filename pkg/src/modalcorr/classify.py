"""Inductiveness classification and certificate search.

A certificate is a pair (Ω, ε): a strict dependence order on the variables
and an order type assigning 1 or ∂ to each.  A quasi-inequality is inductive
for a certificate when every antecedent inequality is *receiving* (both
analysis trees ε∂-uniform) or *solvable* (exactly one side ε∂-uniform, the
other inductive with PIA critical branches and Ω-larger critical leaves),
and the consequent trees are inductive.  ``find_certificate`` searches
lexicographically over order types and linear dependence orders.

The restricted variants additionally constrain the vocabulary (no nominals,
no reverse or backward modalities) and, for existential statements, ask the
bound-variable criticality and Skeleton-shape conditions checked by
``check_restricted_first_round_good``.
"""

from __future__ import annotations

import enum
import itertools
import json
from dataclasses import dataclass

from .syntax import (
    BBox,
    BDia,
    ExistsStatement,
    Formula,
    Inequality,
    Nominal,
    Pi2Statement,
    QuasiInequality,
    SBDia,
    SBBox,
    SBox,
    SDia,
    analyze_vocabulary,
    free_vars,
    render,
)
from .trees import (
    Branch,
    DependenceOrder,
    Eps,
    MINUS,
    OrderType,
    PLUS,
    SignedTree,
    branch_kind,
    branches,
    build_signed_tree,
    critical_branches,
    is_critical_leaf,
    is_eps_uniform,
    is_good,
    is_pia,
    is_srr,
    split_point,
)


class VariableBoundError(Exception):
    """Raised when a certificate search would exceed the variable bound."""


@dataclass(frozen=True)
class Certificate:
    """An order type together with a (linear) dependence order."""

    eps: OrderType
    omega: DependenceOrder

    def to_dict(self) -> dict:
        return {"eps": self.eps.to_dict(), "omega": self.omega.to_list()}


class IneqTag(enum.Enum):
    Receiving = "receiving"
    Solvable = "solvable"
    Neither = "neither"
    ConsequentInductive = "consequent-inductive"


@dataclass(frozen=True)
class SyntacticPolarity:
    """Closed/open flags; both hold when no flagged connective occurs."""

    closed: bool
    open: bool


@dataclass(frozen=True)
class ClassificationReport:
    verdict: str  # "accepted" | "rejected"
    certificate: Certificate | None
    tags: tuple[tuple[str, str], ...]  # (inequality text, tag)
    diagnostics: str | None

    @property
    def accepted(self) -> bool:
        return self.verdict == "accepted"

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "certificate": self.certificate.to_dict() if self.certificate else None,
            "tags": [list(pair) for pair in self.tags],
            "diagnostics": self.diagnostics,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


def _accepted(cert, tags):
    return ClassificationReport("accepted", cert, tuple(tags), None)


def _rejected(diagnostics, tags=()):
    return ClassificationReport("rejected", None, tuple(tags), diagnostics)


def describe_branch(b: Branch) -> str:
    """Human-readable branch witness: leaf then the leaf-to-root path."""
    leaf = b.leaf_var or type(b.leaf.formula).__name__
    path = ",".join(f"{node.sign}{type(node.formula).__name__}" for node, _ in b.path)
    return f"{b.leaf_sign}{leaf}[{path}]"


# ---------------------------------------------------------------------------
# Inductive trees
# ---------------------------------------------------------------------------


def tree_violation(t: SignedTree, cert: Certificate) -> str | None:
    """First clause of the inductive-tree definition violated, or None.

    Checks that every critical branch is good and that every SRR node in the
    PIA segment of a critical branch has an ε∂-uniform side tree whose
    variables are Ω-below the critical leaf.
    """
    for b in critical_branches(t, cert.eps):
        kind = branch_kind(b)
        if not is_good(kind):
            return f"critical branch {describe_branch(b)} is bad: {kind.reason}"
        pia_len = split_point(b)
        for node, child_idx in b.path[:pia_len]:
            if not is_srr(node.sign, node.formula):
                continue
            side = node.children[1 - child_idx]
            if not is_eps_uniform(side, cert.eps, dual=True):
                return (
                    f"side tree {side.sign}{render(side.formula)} of SRR node on "
                    f"branch {describe_branch(b)} is not ε∂-uniform"
                )
            for name in sorted(free_vars(side.formula)):
                if not cert.omega.less(name, b.leaf_var):
                    return (
                        f"side variable {name} of SRR node is not Ω-below "
                        f"critical leaf {b.leaf_var}"
                    )
    return None


def check_inductive_tree(t: SignedTree, cert: Certificate) -> bool:
    """True iff every ε-critical branch is good with valid SRR side conditions."""
    return tree_violation(t, cert) is None


# ---------------------------------------------------------------------------
# Inequality tagging
# ---------------------------------------------------------------------------


def _analysis_trees(ineq: Inequality) -> tuple[SignedTree, SignedTree]:
    """The (−lhs, +rhs) trees used for receiving/solvable analysis."""
    return build_signed_tree(MINUS, ineq.lhs), build_signed_tree(PLUS, ineq.rhs)


def _tag_with_reason(ineq: Inequality, cert: Certificate) -> tuple[IneqTag, str | None]:
    minus_lhs, plus_rhs = _analysis_trees(ineq)
    uniform_l = is_eps_uniform(minus_lhs, cert.eps, dual=True)
    uniform_r = is_eps_uniform(plus_rhs, cert.eps, dual=True)
    if uniform_l and uniform_r:
        return IneqTag.Receiving, None
    if not uniform_l and not uniform_r:
        return (
            IneqTag.Neither,
            "neither side is ε∂-uniform "
            f"(−{render(ineq.lhs)} and +{render(ineq.rhs)})",
        )
    if uniform_l:
        uniform_tree, active_tree = minus_lhs, plus_rhs
        uniform_formula = ineq.lhs
    else:
        uniform_tree, active_tree = plus_rhs, minus_lhs
        uniform_formula = ineq.rhs
    violation = tree_violation(active_tree, cert)
    if violation is not None:
        return IneqTag.Neither, f"solvable side not inductive: {violation}"
    for b in critical_branches(active_tree, cert.eps):
        if not is_pia(branch_kind(b)):
            return (
                IneqTag.Neither,
                f"critical branch {describe_branch(b)} of the solvable side "
                "is not a PIA branch",
            )
        for name in sorted(free_vars(uniform_formula)):
            if not cert.omega.less(name, b.leaf_var):
                return (
                    IneqTag.Neither,
                    f"variable {name} of the uniform side is not Ω-below "
                    f"critical leaf {b.leaf_var}",
                )
    return IneqTag.Solvable, None


def tag_inequality(ineq: Inequality, cert: Certificate) -> IneqTag:
    """Receiving / Solvable / Neither for one antecedent inequality."""
    return _tag_with_reason(ineq, cert)[0]


# ---------------------------------------------------------------------------
# Quasi-inequalities
# ---------------------------------------------------------------------------


def check_inductive_quasi(q: QuasiInequality, cert: Certificate) -> ClassificationReport:
    """Accepted iff antecedents are receiving/solvable and consequent trees inductive."""
    tags = []
    for ineq in q.antecedent:
        tag, reason = _tag_with_reason(ineq, cert)
        if tag is IneqTag.Neither:
            return _rejected(
                f"antecedent '{render(ineq)}': {reason}",
                tags + [(render(ineq), tag.value)],
            )
        tags.append((render(ineq), tag.value))
    for ineq in q.consequent:
        for sign, side in ((PLUS, ineq.lhs), (MINUS, ineq.rhs)):
            violation = tree_violation(build_signed_tree(sign, side), cert)
            if violation is not None:
                return _rejected(
                    f"consequent '{render(ineq)}', tree {sign}{render(side)}: "
                    f"{violation}",
                    tags + [(render(ineq), IneqTag.Neither.value)],
                )
        tags.append((render(ineq), IneqTag.ConsequentInductive.value))
    return _accepted(cert, tags)


def _statement_vars(q) -> list[str]:
    names: set[str] = set()
    for ineq in tuple(q.antecedent) + tuple(q.consequent):
        names |= free_vars(ineq.lhs) | free_vars(ineq.rhs)
    return sorted(names)


def candidate_certificates(names, max_vars: int = 6):
    """Deterministic stream of certificates: ε lexicographic, then Ω permutations."""
    names = sorted(names)
    if len(names) > max_vars:
        raise VariableBoundError(
            f"{len(names)} variables exceed the search bound {max_vars}"
        )
    for values in itertools.product((Eps.One, Eps.Partial), repeat=len(names)):
        eps = OrderType.of(dict(zip(names, values)))
        for chain in itertools.permutations(names):
            yield Certificate(eps, DependenceOrder.from_chain(chain))


def find_certificate(q: QuasiInequality, max_vars: int = 6) -> Certificate | None:
    """First certificate (in search order) accepted by check_inductive_quasi."""
    for cert in candidate_certificates(_statement_vars(q), max_vars):
        if check_inductive_quasi(q, cert).accepted:
            return cert
    return None


# ---------------------------------------------------------------------------
# Syntactic polarity
# ---------------------------------------------------------------------------

_DIA_LIKE = (BDia, SDia, SBDia)
_BOX_LIKE = (BBox, SBox, SBBox)


def syntactic_polarity(f: Formula, sign: str = PLUS) -> SyntacticPolarity:
    """Closed: nominals and backward/reverse diamonds positive, boxes negative.

    Open is the mirror.  Unflagged connectives leave both flags true.
    """
    closed = True
    open_ = True
    stack = [build_signed_tree(sign, f)]
    while stack:
        node = stack.pop()
        stack.extend(node.children)
        if isinstance(node.formula, (Nominal, *_DIA_LIKE)):
            closed = closed and node.sign == PLUS
            open_ = open_ and node.sign == MINUS
        elif isinstance(node.formula, _BOX_LIKE):
            closed = closed and node.sign == MINUS
            open_ = open_ and node.sign == PLUS
    return SyntacticPolarity(closed, open_)


# ---------------------------------------------------------------------------
# Restricted classes
# ---------------------------------------------------------------------------


def _restricted_vocabulary_violation(stmt) -> str | None:
    vocab = analyze_vocabulary(stmt)
    if vocab.nominals:
        return f"contains nominals: {sorted(vocab.nominals)}"
    if vocab.has_black:
        return "contains backward modalities (bbox/bdia/sbbox/sbdia)"
    if vocab.has_dotted:
        return "contains reverse modalities (sbox/sdia)"
    return None


def check_restricted_inductive_quasi(
    q: QuasiInequality, max_vars: int = 6
) -> ClassificationReport:
    """Inductive and free of nominals, reverse, and backward modalities."""
    violation = _restricted_vocabulary_violation(q)
    if violation is not None:
        return _rejected(violation)
    cert = find_certificate(q, max_vars)
    if cert is None:
        return _rejected("no certificate found")
    return check_inductive_quasi(q, cert)


def _is_skeleton_branch(b: Branch) -> bool:
    return split_point(b) == 0


def _bound_uniform(t: SignedTree, eps_q: OrderType) -> bool:
    """All branches ending with a bound variable are ε∂-critical."""
    domain = set(eps_q.names)
    return all(
        is_critical_leaf(b.leaf, eps_q, dual=True)
        for b in branches(t)
        if b.leaf_var in domain
    )


def _mirror_skeleton_violation(ineq: Inequality) -> str | None:
    """All branches of +lhs and −rhs must be Skeleton branches."""
    for sign, side in ((PLUS, ineq.lhs), (MINUS, ineq.rhs)):
        for b in branches(build_signed_tree(sign, side)):
            if not _is_skeleton_branch(b):
                return (
                    f"branch {describe_branch(b)} of {sign}{render(side)} "
                    "is not a Skeleton branch"
                )
    return None


def _restricted_receiving_reason(ineq: Inequality, eps_q: OrderType) -> str | None:
    minus_lhs, plus_rhs = _analysis_trees(ineq)
    for tree, label in ((minus_lhs, f"−{render(ineq.lhs)}"), (plus_rhs, f"+{render(ineq.rhs)}")):
        if not _bound_uniform(tree, eps_q):
            return f"bound-variable branch of {label} is not ε∂-critical"
    return _mirror_skeleton_violation(ineq)


def _restricted_solvable_reason(
    ineq: Inequality, eps_q: OrderType, omega: DependenceOrder
) -> str | None:
    minus_lhs, plus_rhs = _analysis_trees(ineq)
    uniform_l = _bound_uniform(minus_lhs, eps_q)
    uniform_r = _bound_uniform(plus_rhs, eps_q)
    if uniform_l == uniform_r:
        return (
            "need exactly one side with all bound-variable branches ε∂-critical"
        )
    if uniform_l:
        rho_formula, kappa = ineq.lhs, plus_rhs
    else:
        rho_formula, kappa = ineq.rhs, minus_lhs
    critical = critical_branches(kappa, eps_q)
    if not critical:
        return "the non-uniform side has no ε-critical branch"
    violation = tree_violation(kappa, Certificate(eps_q, omega))
    if violation is not None:
        return f"the non-uniform side is not inductive: {violation}"
    for b in critical:
        if not is_pia(branch_kind(b)):
            return (
                f"critical branch {describe_branch(b)} of the non-uniform side "
                "is not a PIA branch"
            )
        for name in sorted(free_vars(rho_formula)):
            if not omega.less(name, b.leaf_var):
                return (
                    f"variable {name} of the uniform side is not Ω-below "
                    f"critical leaf {b.leaf_var}"
                )
    # non-critical branches must be Skeleton branches in the mirror tree
    for tree, mirror_sign, side in (
        (minus_lhs, PLUS, ineq.lhs),
        (plus_rhs, MINUS, ineq.rhs),
    ):
        mirror = build_signed_tree(mirror_sign, side)
        for b, mb in zip(branches(tree), branches(mirror)):
            if is_critical_leaf(b.leaf, eps_q):
                continue
            if not _is_skeleton_branch(mb):
                return (
                    f"non-critical branch {describe_branch(b)} is not a "
                    f"Skeleton branch in {mirror_sign}{render(side)}"
                )
    return None


def check_restricted_first_round_good(
    e: ExistsStatement, eps_q: OrderType, omega: DependenceOrder
) -> ClassificationReport:
    """Every inequality must be restricted receiving or restricted solvable."""
    tags = []
    for ineq in e.inequalities:
        receiving_reason = _restricted_receiving_reason(ineq, eps_q)
        if receiving_reason is None:
            tags.append((render(ineq), IneqTag.Receiving.value))
            continue
        solvable_reason = _restricted_solvable_reason(ineq, eps_q, omega)
        if solvable_reason is None:
            tags.append((render(ineq), IneqTag.Solvable.value))
            continue
        return _rejected(
            f"'{render(ineq)}': not restricted receiving ({receiving_reason}); "
            f"not restricted solvable ({solvable_reason})",
            tags + [(render(ineq), IneqTag.Neither.value)],
        )
    return _accepted(Certificate(eps_q, omega), tags)


def _pi2_certificates(s: Pi2Statement, max_vars: int):
    """Certificates over free ∪ bound vars with every free var Ω-below every bound var."""
    free = sorted(
        set(_statement_vars(QuasiInequality(s.antecedent, s.consequent)))
        - set(s.bound_vars)
    )
    bound = sorted(s.bound_vars)
    if len(free) + len(bound) > max_vars:
        raise VariableBoundError(
            f"{len(free) + len(bound)} variables exceed the search bound {max_vars}"
        )
    for values in itertools.product((Eps.One, Eps.Partial), repeat=len(free) + len(bound)):
        eps = OrderType.of(dict(zip(free + bound, values)))
        for free_chain in itertools.permutations(free):
            for bound_chain in itertools.permutations(bound):
                omega = DependenceOrder.from_chain(free_chain + bound_chain)
                yield eps, omega


def check_restricted_inductive_pi2(
    s: Pi2Statement, max_vars: int = 6
) -> ClassificationReport:
    """Restricted vocabulary + restricted first-round good + tagged antecedents."""
    violation = _restricted_vocabulary_violation(s)
    if violation is not None:
        return _rejected(violation)
    exists = s.exists_part()
    last = None
    for eps, omega in _pi2_certificates(s, max_vars):
        eps_q = OrderType.of({n: eps.value(n) for n in s.bound_vars})
        report = check_restricted_first_round_good(exists, eps_q, omega)
        if not report.accepted:
            last = report.diagnostics
            continue
        cert = Certificate(eps, omega)
        tags = []
        ok = True
        for ineq in s.antecedent:
            tag, reason = _tag_with_reason(ineq, cert)
            if tag is IneqTag.Neither:
                last = f"antecedent '{render(ineq)}': {reason}"
                ok = False
                break
            tags.append((render(ineq), tag.value))
        if ok:
            return _accepted(cert, tags + list(report.tags))
    return _rejected(last or "no certificate found")


def check_inductive_pi2(s: Pi2Statement, max_vars: int = 6) -> ClassificationReport:
    """Algorithm-defined class: the existential half must reduce, then the
    resulting quasi-inequality must admit a certificate."""
    if not s.bound_vars:
        quasi = QuasiInequality(s.antecedent, s.consequent)
        cert = find_certificate(quasi, max_vars)
        if cert is None:
            return _rejected("no certificate found")
        return check_inductive_quasi(quasi, cert)
    violation = _restricted_vocabulary_violation_black_only(s)
    if violation is not None:
        return _rejected(violation)
    from . import alba_pi2

    outcome = alba_pi2.first_half(s)
    if not outcome.success:
        return _rejected(f"first half failed: {outcome.reason}")
    quasi = QuasiInequality(s.antecedent, outcome.meta_con_ineq)
    cert = find_certificate(quasi, max_vars)
    if cert is None:
        return _rejected("reduced quasi-inequality admits no certificate")
    report = check_inductive_quasi(quasi, cert)
    return report


def _restricted_vocabulary_violation_black_only(stmt) -> str | None:
    vocab = analyze_vocabulary(stmt)
    if vocab.nominals:
        return f"contains nominals: {sorted(vocab.nominals)}"
    if vocab.has_black:
        return "contains backward modalities (bbox/bdia/sbbox/sbdia)"
    return None
