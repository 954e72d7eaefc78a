"""Finite birelational frames and the brute-force semantic oracle.

A frame carries two relations on worlds 0..n-1: ``R`` (subordination) and
``Rp`` (the modal relation R').  Formulas of the expanded language are model
checked by truth sets; statements by the displayed satisfaction clauses;
existential statements by enumerating witness subsets.  The equivalence
oracle enumerates every frame up to a size bound and compares statement
validity with first-order truth.

This module is deliberately self-contained and direct: it is the reference
against which the rewriting engine and the compiled kernel are judged, so it
favours transparency over speed.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field

from . import fol, syntax
from .fol import (
    Eq,
    Exists,
    FOAnd,
    FOFalse,
    FOFormula,
    FOImp,
    FONot,
    FOOr,
    Forall,
    FOTrue,
    Pred,
    Rel2,
)
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
    analyze_vocabulary,
)


class BudgetExceededError(ValueError):
    """Raised when an enumeration request exceeds the configured budget."""


class UnboundSymbolError(KeyError):
    """Raised when a formula mentions a symbol the valuation does not define."""


# ---------------------------------------------------------------------------
# Frames and valuations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FiniteFrame:
    """Worlds 0..size-1 with subordination relation R and modal relation Rp."""

    size: int
    R: frozenset[tuple[int, int]]
    Rp: frozenset[tuple[int, int]]
    _succ: dict = field(default_factory=dict, compare=False, repr=False, hash=False)

    def __post_init__(self):
        for u, v in self.R | self.Rp:
            if not (0 <= u < self.size and 0 <= v < self.size):
                raise ValueError(f"edge ({u},{v}) outside worlds 0..{self.size - 1}")
        succ: dict[str, tuple[tuple[int, ...], ...]] = {}
        for key, rel, forward in (
            ("r_succ", self.R, True),
            ("r_pred", self.R, False),
            ("rp_succ", self.Rp, True),
            ("rp_pred", self.Rp, False),
        ):
            table = [[] for _ in range(self.size)]
            for u, v in rel:
                if forward:
                    table[u].append(v)
                else:
                    table[v].append(u)
            succ[key] = tuple(tuple(sorted(row)) for row in table)
        self._succ.update(succ)

    @property
    def worlds(self) -> range:
        return range(self.size)

    def r_succ(self, w: int) -> tuple[int, ...]:
        return self._succ["r_succ"][w]

    def r_pred(self, w: int) -> tuple[int, ...]:
        return self._succ["r_pred"][w]

    def rp_succ(self, w: int) -> tuple[int, ...]:
        return self._succ["rp_succ"][w]

    def rp_pred(self, w: int) -> tuple[int, ...]:
        return self._succ["rp_pred"][w]

    def r_image(self, worlds) -> frozenset[int]:
        """R[U] = all worlds reachable from U by one R step."""
        return frozenset(v for u in worlds for v in self.r_succ(u))

    def to_dict(self) -> dict:
        return {
            "size": self.size,
            "R": sorted([u, v] for u, v in self.R),
            "Rp": sorted([u, v] for u, v in self.Rp),
        }

    @staticmethod
    def from_dict(data: dict) -> "FiniteFrame":
        return FiniteFrame(
            size=int(data["size"]),
            R=frozenset((int(u), int(v)) for u, v in data.get("R", ())),
            Rp=frozenset((int(u), int(v)) for u, v in data.get("Rp", ())),
        )


@dataclass
class Valuation:
    """Assignment of subsets to propositional variables and worlds to nominals."""

    props: dict[str, frozenset[int]] = field(default_factory=dict)
    noms: dict[str, int] = field(default_factory=dict)

    def extended(self, extra_props: dict[str, frozenset[int]]) -> "Valuation":
        merged = dict(self.props)
        merged.update(extra_props)
        return Valuation(merged, dict(self.noms))


@dataclass(frozen=True)
class AdmissibleFamily:
    """A field of subsets closed under the operations the language can express."""

    sets: frozenset[frozenset[int]]

    @staticmethod
    def full_powerset(size: int) -> "AdmissibleFamily":
        worlds = list(range(size))
        sets = []
        for mask in range(1 << size):
            sets.append(frozenset(w for w in worlds if mask >> w & 1))
        return AdmissibleFamily(frozenset(sets))

    def validate(self, frame: FiniteFrame) -> None:
        """Raise ValueError unless the family satisfies its closure invariants."""
        everything = frozenset(frame.worlds)
        if frozenset() not in self.sets or everything not in self.sets:
            raise ValueError("admissible family must contain the empty set and X")
        for u_set in self.sets:
            if everything - u_set not in self.sets:
                raise ValueError("admissible family not closed under complement")
            dia = frozenset(w for w in frame.worlds if set(frame.rp_succ(w)) & u_set)
            if dia not in self.sets:
                raise ValueError("admissible family not closed under Rp-preimage")
            for v_set in self.sets:
                if u_set | v_set not in self.sets:
                    raise ValueError("admissible family not closed under union")
                if u_set & v_set not in self.sets:
                    raise ValueError("admissible family not closed under intersection")


# ---------------------------------------------------------------------------
# Model checking
# ---------------------------------------------------------------------------


def truth_set(frame: FiniteFrame, val: Valuation, f: Formula) -> frozenset[int]:
    """Worlds at which ``f`` holds."""
    everything = frozenset(frame.worlds)
    if isinstance(f, PropVar):
        try:
            return frozenset(val.props[f.name])
        except KeyError:
            raise UnboundSymbolError(f.name) from None
    if isinstance(f, Nominal):
        try:
            return frozenset((val.noms[f.name],))
        except KeyError:
            raise UnboundSymbolError(f.name) from None
    if isinstance(f, Top):
        return everything
    if isinstance(f, Bottom):
        return frozenset()
    if isinstance(f, Not):
        return everything - truth_set(frame, val, f.sub)
    if isinstance(f, And):
        return truth_set(frame, val, f.left) & truth_set(frame, val, f.right)
    if isinstance(f, Or):
        return truth_set(frame, val, f.left) | truth_set(frame, val, f.right)
    if isinstance(f, Imp):
        return (everything - truth_set(frame, val, f.left)) | truth_set(
            frame, val, f.right
        )
    neighbours = {
        Box: frame.rp_succ,
        Dia: frame.rp_succ,
        BBox: frame.rp_pred,
        BDia: frame.rp_pred,
        SBox: frame.r_pred,
        SDia: frame.r_pred,
        SBBox: frame.r_succ,
        SBDia: frame.r_succ,
    }.get(type(f))
    if neighbours is not None:
        sub = truth_set(frame, val, f.sub)
        if isinstance(f, (Box, BBox, SBox, SBBox)):
            return frozenset(
                w for w in frame.worlds if all(v in sub for v in neighbours(w))
            )
        return frozenset(
            w for w in frame.worlds if any(v in sub for v in neighbours(w))
        )
    raise TypeError(f"not a formula: {f!r}")


def eval_formula(frame: FiniteFrame, val: Valuation, w: int, f: Formula) -> bool:
    """Truth of ``f`` at world ``w``."""
    return w in truth_set(frame, val, f)


def holds_inequality(frame: FiniteFrame, val: Valuation, ineq: Inequality) -> bool:
    lhs = truth_set(frame, val, ineq.lhs)
    rhs = truth_set(frame, val, ineq.rhs)
    if ineq.rel is Rel.Prec:
        return frame.r_image(lhs) <= rhs
    return lhs <= rhs


def _witness_sets(frame: FiniteFrame, family: AdmissibleFamily | None):
    if family is not None:
        return sorted(family.sets, key=lambda s: sorted(s))
    return [
        frozenset(w for w in frame.worlds if mask >> w & 1)
        for mask in range(1 << frame.size)
    ]


def holds_statement(
    frame: FiniteFrame,
    val: Valuation,
    stmt: Statement,
    family: AdmissibleFamily | None = None,
) -> bool:
    """Satisfaction of a statement under one valuation.

    For existential statements the consequent witnesses range over all
    subsets of X, or over ``family`` when one is supplied.
    """
    if isinstance(stmt, Inequality):
        return holds_inequality(frame, val, stmt)
    if isinstance(stmt, QuasiInequality):
        if all(holds_inequality(frame, val, i) for i in stmt.antecedent):
            return all(holds_inequality(frame, val, i) for i in stmt.consequent)
        return True
    if isinstance(stmt, Pi2Statement):
        if not all(holds_inequality(frame, val, i) for i in stmt.antecedent):
            return True
        pool = _witness_sets(frame, family)
        for combo in itertools.product(pool, repeat=len(stmt.bound_vars)):
            extended = val.extended(dict(zip(stmt.bound_vars, combo)))
            if all(holds_inequality(frame, extended, i) for i in stmt.consequent):
                return True
        return False
    raise TypeError(f"not a statement: {stmt!r}")


def statement_symbols(stmt: Statement) -> tuple[tuple[str, ...], tuple[str, ...]]:
    """Free propositional variables and nominals of a statement, sorted."""
    voc = analyze_vocabulary(stmt)
    prop_vars = set(voc.prop_vars)
    if isinstance(stmt, Pi2Statement):
        prop_vars -= set(stmt.bound_vars)
    return tuple(sorted(prop_vars)), tuple(sorted(voc.nominals))


def valid(
    frame: FiniteFrame,
    stmt: Statement,
    family: AdmissibleFamily | None = None,
    max_size: int = 4,
    max_vars: int = 3,
) -> bool:
    """Validity: truth under every valuation and every nominal assignment.

    Propositional variables range over all subsets (or over ``family`` when
    supplied); nominal assignments always range over all worlds.
    """
    prop_vars, nominals = statement_symbols(stmt)
    if frame.size > max_size:
        raise BudgetExceededError(f"frame size {frame.size} exceeds budget {max_size}")
    if len(prop_vars) > max_vars:
        raise BudgetExceededError(
            f"{len(prop_vars)} free variables exceed budget {max_vars}"
        )
    pool = _witness_sets(frame, family)
    for assignment in itertools.product(pool, repeat=len(prop_vars)):
        props = dict(zip(prop_vars, assignment))
        for points in itertools.product(frame.worlds, repeat=len(nominals)):
            val = Valuation(props, dict(zip(nominals, points)))
            if not holds_statement(frame, val, stmt, family):
                return False
    return True


# ---------------------------------------------------------------------------
# First-order evaluation
# ---------------------------------------------------------------------------


def eval_fo(
    frame: FiniteFrame,
    f: FOFormula,
    env: dict[str, int] | None = None,
    valuation: dict[str, frozenset[int]] | None = None,
) -> bool:
    """Tarskian truth of ``f`` with R, Rp read from the frame."""
    env = dict(env or {})

    def ev(g: FOFormula) -> bool:
        if isinstance(g, Rel2):
            try:
                pair = (env[g.a], env[g.b])
            except KeyError as exc:
                raise UnboundSymbolError(str(exc)) from None
            return pair in (frame.Rp if g.rel == "Rp" else frame.R)
        if isinstance(g, Pred):
            if valuation is None or g.name not in valuation:
                raise UnboundSymbolError(g.name)
            try:
                return env[g.var] in valuation[g.name]
            except KeyError as exc:
                raise UnboundSymbolError(str(exc)) from None
        if isinstance(g, Eq):
            try:
                return env[g.a] == env[g.b]
            except KeyError as exc:
                raise UnboundSymbolError(str(exc)) from None
        if isinstance(g, FOTrue):
            return True
        if isinstance(g, FOFalse):
            return False
        if isinstance(g, FONot):
            return not ev(g.sub)
        if isinstance(g, FOAnd):
            return ev(g.left) and ev(g.right)
        if isinstance(g, FOOr):
            return ev(g.left) or ev(g.right)
        if isinstance(g, FOImp):
            return (not ev(g.left)) or ev(g.right)
        if isinstance(g, (Forall, Exists)):
            shadowed = env.get(g.var)
            hit = False
            for w in frame.worlds:
                env[g.var] = w
                value = ev(g.body)
                if isinstance(g, Forall) and not value:
                    hit = False
                    break
                if isinstance(g, Exists) and value:
                    hit = True
                    break
            else:
                hit = isinstance(g, Forall)
            if shadowed is None:
                env.pop(g.var, None)
            else:
                env[g.var] = shadowed
            return hit
        raise TypeError(f"not an FO formula: {g!r}")

    return ev(f)


# ---------------------------------------------------------------------------
# Frame enumeration and the equivalence oracle
# ---------------------------------------------------------------------------


def frame_from_masks(size: int, r_mask: int, rp_mask: int) -> FiniteFrame:
    """Decode relations from bitmasks: bit u*size+v set means (u,v) in the relation."""
    pairs = lambda mask: frozenset(
        (u, v)
        for u in range(size)
        for v in range(size)
        if mask >> (u * size + v) & 1
    )
    return FiniteFrame(size, pairs(r_mask), pairs(rp_mask))


def frame_to_masks(frame: FiniteFrame) -> tuple[int, int]:
    """Encode a frame's relations as (R mask, Rp mask)."""
    r_mask = sum(1 << (u * frame.size + v) for u, v in frame.R)
    rp_mask = sum(1 << (u * frame.size + v) for u, v in frame.Rp)
    return r_mask, rp_mask


def all_frames(size: int):
    """All frames on ``size`` worlds, lexicographic in (R mask, Rp mask)."""
    total = 1 << (size * size)
    for r_mask in range(total):
        for rp_mask in range(total):
            yield frame_from_masks(size, r_mask, rp_mask)


def frames_up_to(max_size: int):
    """All frames of size 1..max_size in lexicographic (size, R, Rp) order."""
    for size in range(1, max_size + 1):
        yield from all_frames(size)


def sampled_masks(size: int, count: int, seed: int = 0):
    """Deterministic sample of relation bitmask pairs on ``size`` worlds."""
    rng = random.Random(seed)
    total = 1 << (size * size)
    return [(rng.randrange(total), rng.randrange(total)) for _ in range(count)]


def sampled_frames(size: int, count: int, seed: int = 0):
    """Deterministic sample of frames on ``size`` worlds."""
    for r_mask, rp_mask in sampled_masks(size, count, seed):
        yield frame_from_masks(size, r_mask, rp_mask)


@dataclass(frozen=True)
class Equivalent:
    frames_checked: int


@dataclass(frozen=True)
class Counterexample:
    frame: FiniteFrame
    statement_holds: bool
    fo_holds: bool


Verdict = Equivalent | Counterexample


def _oracle_frames(max_size: int, sample_size4: int, seed: int):
    yield from frames_up_to(min(max_size, 3))
    if max_size >= 4 and sample_size4 > 0:
        yield from sampled_frames(4, sample_size4, seed)


def equivalence_oracle(
    stmt: Statement,
    fo: FOFormula,
    max_size: int = 3,
    sample_size4: int = 0,
    seed: int = 0,
    backend: str = "auto",
) -> Verdict:
    """Compare statement validity against a closed FO formula on every frame.

    Enumerates all frames with at most ``max_size`` worlds (at most 3
    exhaustively; size 4 is sampled).  Returns the first mismatching frame in
    enumeration order, if any.
    """
    if backend != "reference":
        from . import kernel

        verdict = kernel.equivalence_oracle_fast(
            stmt, fo, max_size=max_size, sample_size4=sample_size4, seed=seed
        )
        if verdict is not None:
            return verdict
    count = 0
    for frame in _oracle_frames(max_size, sample_size4, seed):
        count += 1
        sv = valid(frame, stmt)
        fv = eval_fo(frame, fo, {})
        if sv != fv:
            return Counterexample(frame, sv, fv)
    return Equivalent(count)


def statement_equivalence_oracle(
    a: Statement,
    b: Statement,
    max_size: int = 3,
    sample_size4: int = 0,
    seed: int = 0,
    backend: str = "auto",
) -> Verdict:
    """Compare the validity of two statements frame by frame."""
    if backend != "reference":
        from . import kernel

        verdict = kernel.statement_equivalence_fast(
            a, b, max_size=max_size, sample_size4=sample_size4, seed=seed
        )
        if verdict is not None:
            return verdict
    count = 0
    for frame in _oracle_frames(max_size, sample_size4, seed):
        count += 1
        va = valid(frame, a)
        vb = valid(frame, b)
        if va != vb:
            return Counterexample(frame, va, vb)
    return Equivalent(count)


# ---------------------------------------------------------------------------
# Dual algebra of a frame
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DualAlgebraReport:
    carrier: tuple[frozenset[int], ...]
    prec_pairs: tuple[tuple[frozenset[int], frozenset[int]], ...]
    dia_map: tuple[tuple[frozenset[int], frozenset[int]], ...]
    verdicts: tuple[tuple[str, bool], ...]

    def verdict(self, name: str) -> bool:
        return dict(self.verdicts)[name]


def dual_algebra(frame: FiniteFrame, family: AdmissibleFamily) -> DualAlgebraReport:
    """The algebra of admissible sets with U ≺ V iff R[U] ⊆ V and ◇U = R'⁻¹[U]."""
    family.validate(frame)
    everything = frozenset(frame.worlds)
    carrier = tuple(sorted(family.sets, key=lambda s: (len(s), sorted(s))))

    def dia(u_set: frozenset[int]) -> frozenset[int]:
        return frozenset(w for w in frame.worlds if set(frame.rp_succ(w)) & u_set)

    def prec(u_set, v_set) -> bool:
        return frame.r_image(u_set) <= v_set

    prec_pairs = tuple(
        (u_set, v_set) for u_set in carrier for v_set in carrier if prec(u_set, v_set)
    )
    dia_map = tuple((u_set, dia(u_set)) for u_set in carrier)

    subordination = (
        prec(frozenset(), frozenset())
        and prec(everything, everything)
        and all(
            prec(a, b & c)
            for a in carrier
            for b in carrier
            for c in carrier
            if prec(a, b) and prec(a, c)
        )
        and all(
            prec(b | c, a)
            for a in carrier
            for b in carrier
            for c in carrier
            if prec(b, a) and prec(c, a)
        )
        and all(
            prec(a, d)
            for a in carrier
            for b in carrier
            for c in carrier
            for d in carrier
            if a <= b and prec(b, c) and c <= d
        )
    )
    normality = dia(frozenset()) == frozenset()
    additivity = all(
        dia(a | b) == dia(a) | dia(b) for a in carrier for b in carrier
    )
    contact_reflexive = all(
        a <= b for a in carrier for b in carrier if prec(a, b)
    )
    contact_symmetric = all(
        prec(everything - b, everything - a)
        for a in carrier
        for b in carrier
        if prec(a, b)
    )
    compingent = all(
        any(prec(a, c) and prec(c, b) for c in carrier)
        for a in carrier
        for b in carrier
        if prec(a, b)
    )
    proximity_preserving = all(
        prec(dia(a), dia(b)) for a in carrier for b in carrier if prec(a, b)
    )

    return DualAlgebraReport(
        carrier=carrier,
        prec_pairs=prec_pairs,
        dia_map=dia_map,
        verdicts=(
            ("subordination_axioms", subordination),
            ("normality", normality),
            ("additivity", additivity),
            ("contact_reflexive", contact_reflexive),
            ("contact_symmetric", contact_symmetric),
            ("compingent_interpolation", compingent),
            ("proximity_preserving", proximity_preserving),
        ),
    )
