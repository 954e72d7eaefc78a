"""Concrete and abstract syntax for the modal subordination language.

The input language has propositional variables, constants T/F, the boolean
connectives ~ /\\ \\/ ->, the forward modalities ``box``/``dia`` over the
accessibility relation R', and the reverse modalities ``sbox``/``sdia`` over
the subordination relation R.  The expanded language additionally has
nominals (``@i``), the backward modalities ``bbox``/``bdia`` over R', and the
forward modalities ``sbbox``/``sbdia`` over R.

Statements are inequalities (``phi <= psi`` or ``phi prec psi``),
quasi-inequalities (``ineqs => ineqs``), and existential statements
(``ineqs => E q1 q2 . ineqs``).
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass


# ---------------------------------------------------------------------------
# Formula AST
# ---------------------------------------------------------------------------


class Formula:
    """Base class for all formula constructors."""

    __slots__ = ()


@dataclass(frozen=True)
class PropVar(Formula):
    name: str


@dataclass(frozen=True)
class Nominal(Formula):
    name: str


@dataclass(frozen=True)
class Bottom(Formula):
    pass


@dataclass(frozen=True)
class Top(Formula):
    pass


@dataclass(frozen=True)
class Not(Formula):
    sub: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Imp(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Box(Formula):
    """Universal forward modality over R'."""

    sub: Formula


@dataclass(frozen=True)
class Dia(Formula):
    """Existential forward modality over R'."""

    sub: Formula


@dataclass(frozen=True)
class SBox(Formula):
    """Universal reverse modality over R (true at w iff sub holds at every R-predecessor)."""

    sub: Formula


@dataclass(frozen=True)
class SDia(Formula):
    """Existential reverse modality over R (true at w iff sub holds at some R-predecessor)."""

    sub: Formula


@dataclass(frozen=True)
class BBox(Formula):
    """Universal backward modality over R'."""

    sub: Formula


@dataclass(frozen=True)
class BDia(Formula):
    """Existential backward modality over R'."""

    sub: Formula


@dataclass(frozen=True)
class SBBox(Formula):
    """Universal forward modality over R."""

    sub: Formula


@dataclass(frozen=True)
class SBDia(Formula):
    """Existential forward modality over R."""

    sub: Formula


TOP = Top()
BOT = Bottom()

#: Unary modal constructors and their surface keywords.
MODAL_KEYWORDS = {
    Box: "box",
    Dia: "dia",
    SBox: "sbox",
    SDia: "sdia",
    BBox: "bbox",
    BDia: "bdia",
    SBBox: "sbbox",
    SBDia: "sbdia",
}
KEYWORD_MODALS = {kw: cls for cls, kw in MODAL_KEYWORDS.items()}

MODAL_TYPES = tuple(MODAL_KEYWORDS)
BLACK_TYPES = (BBox, BDia, SBBox, SBDia)
DOTTED_TYPES = (SBox, SDia)
BINARY_TYPES = (And, Or, Imp)


def children(f: Formula) -> tuple[Formula, ...]:
    """Immediate subformulas of ``f`` (left to right)."""
    if isinstance(f, Not):
        return (f.sub,)
    if isinstance(f, BINARY_TYPES):
        return (f.left, f.right)
    if isinstance(f, MODAL_TYPES):
        return (f.sub,)
    return ()


def subformulas(f: Formula):
    """Yield every node of ``f`` in pre-order."""
    stack = [f]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(children(node)))


def rebuild(f: Formula, new_children: tuple[Formula, ...]) -> Formula:
    """Rebuild ``f`` with replaced immediate subformulas."""
    if isinstance(f, Not):
        return Not(new_children[0])
    if isinstance(f, BINARY_TYPES):
        return type(f)(new_children[0], new_children[1])
    if isinstance(f, MODAL_TYPES):
        return type(f)(new_children[0])
    return f


# ---------------------------------------------------------------------------
# Statements
# ---------------------------------------------------------------------------


class Rel(enum.Enum):
    Leq = "<="
    Prec = "prec"


@dataclass(frozen=True)
class Inequality:
    lhs: Formula
    rel: Rel
    rhs: Formula


@dataclass(frozen=True)
class QuasiInequality:
    antecedent: tuple[Inequality, ...]
    consequent: tuple[Inequality, ...]


@dataclass(frozen=True)
class Pi2Statement:
    antecedent: tuple[Inequality, ...]
    bound_vars: tuple[str, ...]
    consequent: tuple[Inequality, ...]

    def exists_part(self) -> "ExistsStatement":
        return ExistsStatement(self.bound_vars, self.consequent)


@dataclass(frozen=True)
class ExistsStatement:
    """Existentially quantified meta-conjunction ``E q1 .. qn . (ineqs)``."""

    bound_vars: tuple[str, ...]
    inequalities: tuple[Inequality, ...]


Statement = Inequality | QuasiInequality | Pi2Statement

#: Degenerate antecedent used to represent "no assumptions".
TRIVIAL_INEQ = Inequality(TOP, Rel.Leq, TOP)


def leq(lhs: Formula, rhs: Formula) -> Inequality:
    return Inequality(lhs, Rel.Leq, rhs)


def prec(lhs: Formula, rhs: Formula) -> Inequality:
    return Inequality(lhs, Rel.Prec, rhs)


def statement_inequalities(stmt: Statement) -> tuple[Inequality, ...]:
    """All inequalities of a statement (antecedent first)."""
    if isinstance(stmt, Inequality):
        return (stmt,)
    if isinstance(stmt, ExistsStatement):
        return tuple(stmt.inequalities)
    return tuple(stmt.antecedent) + tuple(stmt.consequent)


# ---------------------------------------------------------------------------
# Vocabulary
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class VocabularyReport:
    prop_vars: frozenset[str]
    nominals: frozenset[str]
    has_black: bool
    has_dotted: bool
    is_pure: bool


def analyze_vocabulary(f: Formula | Statement) -> VocabularyReport:
    """Collect occurring symbols and language-fragment flags.

    ``has_dotted`` reports the reverse modalities sbox/sdia; ``has_black``
    reports any of bbox/bdia/sbbox/sbdia; ``is_pure`` holds iff no
    propositional variable occurs (nominals are allowed).
    """
    prop_vars: set[str] = set()
    nominals: set[str] = set()
    has_black = False
    has_dotted = False
    formulas: list[Formula] = []
    if isinstance(f, Formula):
        formulas.append(f)
    else:
        for ineq in statement_inequalities(f):
            formulas.append(ineq.lhs)
            formulas.append(ineq.rhs)
    for root in formulas:
        for node in subformulas(root):
            if isinstance(node, PropVar):
                prop_vars.add(node.name)
            elif isinstance(node, Nominal):
                nominals.add(node.name)
            elif isinstance(node, BLACK_TYPES):
                has_black = True
            elif isinstance(node, DOTTED_TYPES):
                has_dotted = True
    return VocabularyReport(
        prop_vars=frozenset(prop_vars),
        nominals=frozenset(nominals),
        has_black=has_black,
        has_dotted=has_dotted,
        is_pure=not prop_vars,
    )


def free_vars(f: Formula) -> frozenset[str]:
    """Propositional variables occurring in ``f``."""
    return frozenset(n.name for n in subformulas(f) if isinstance(n, PropVar))


def free_nominals(f: Formula) -> frozenset[str]:
    """Nominals occurring in ``f``."""
    return frozenset(n.name for n in subformulas(f) if isinstance(n, Nominal))


# ---------------------------------------------------------------------------
# Substitution
# ---------------------------------------------------------------------------


def substitute(theta: Formula, eta: Formula, p: str | PropVar) -> Formula:
    """Uniformly substitute ``eta`` for the propositional variable ``p`` in ``theta``."""
    name = p.name if isinstance(p, PropVar) else p
    return _subst(theta, name, eta, PropVar)


def substitute_nominal(theta: Formula, eta: Formula, i: str | Nominal) -> Formula:
    """Uniformly substitute ``eta`` for the nominal ``i`` in ``theta``."""
    name = i.name if isinstance(i, Nominal) else i
    return _subst(theta, name, eta, Nominal)


def _subst(theta: Formula, name: str, eta: Formula, leaf_type: type) -> Formula:
    if isinstance(theta, leaf_type) and theta.name == name:
        return eta
    kids = children(theta)
    if not kids:
        return theta
    new_kids = tuple(_subst(k, name, eta, leaf_type) for k in kids)
    if all(a is b for a, b in zip(kids, new_kids)):
        return theta
    return rebuild(theta, new_kids)


def substitute_in_inequality(ineq: Inequality, eta: Formula, p: str | PropVar) -> Inequality:
    return Inequality(substitute(ineq.lhs, eta, p), ineq.rel, substitute(ineq.rhs, eta, p))


# ---------------------------------------------------------------------------
# Tokenizer
# ---------------------------------------------------------------------------


class ParseError(ValueError):
    """Lexical or syntax error with position information."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


_KEYWORDS = frozenset(KEYWORD_MODALS) | {"T", "F", "E", "prec"}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<at>@)
  | (?P<andop>/\\)
  | (?P<orop>\\/)
  | (?P<arrow>->)
  | (?P<darrow>=>)
  | (?P<leq><=)
  | (?P<amp>&)
  | (?P<tilde>~)
  | (?P<lpar>\()
  | (?P<rpar>\))
  | (?P<dot>\.)
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str
    value: str
    line: int
    column: int


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    line = 1
    line_start = 0
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(
                f"unexpected character {text[pos]!r}", line, pos - line_start + 1
            )
        kind = m.lastgroup
        value = m.group()
        if kind == "ws":
            nl = value.count("\n")
            if nl:
                line += nl
                line_start = pos + value.rfind("\n") + 1
        else:
            col = pos - line_start + 1
            if kind == "ident" and value in _KEYWORDS:
                kind = value
            tokens.append(_Token(kind, value, line, col))
        pos = m.end()
    tokens.append(_Token("eof", "", line, len(text) - line_start + 1))
    return tokens


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


class _Parser:
    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind: str, what: str) -> _Token:
        tok = self.peek()
        if tok.kind != kind:
            self.fail(f"expected {what}")
        return self.advance()

    def fail(self, message: str):
        tok = self.peek()
        shown = "end of input" if tok.kind == "eof" else repr(tok.value)
        raise ParseError(f"{message}, found {shown}", tok.line, tok.column)

    # formulas ---------------------------------------------------------------

    def formula(self) -> Formula:
        return self.imp()

    def imp(self) -> Formula:
        left = self.disj()
        if self.peek().kind == "arrow":
            self.advance()
            return Imp(left, self.imp())
        return left

    def disj(self) -> Formula:
        f = self.conj()
        while self.peek().kind == "orop":
            self.advance()
            f = Or(f, self.conj())
        return f

    def conj(self) -> Formula:
        f = self.unary()
        while self.peek().kind == "andop":
            self.advance()
            f = And(f, self.unary())
        return f

    def unary(self) -> Formula:
        tok = self.peek()
        if tok.kind == "tilde":
            self.advance()
            return Not(self.unary())
        if tok.kind in KEYWORD_MODALS:
            self.advance()
            return KEYWORD_MODALS[tok.kind](self.unary())
        return self.atom()

    def atom(self) -> Formula:
        tok = self.peek()
        if tok.kind == "T":
            self.advance()
            return TOP
        if tok.kind == "F":
            self.advance()
            return BOT
        if tok.kind == "ident":
            self.advance()
            return PropVar(tok.value)
        if tok.kind == "at":
            self.advance()
            name = self.expect("ident", "nominal name after '@'")
            return Nominal(name.value)
        if tok.kind == "lpar":
            self.advance()
            f = self.formula()
            self.expect("rpar", "')'")
            return f
        self.fail("expected a formula")

    # inequalities -----------------------------------------------------------

    def inequality(self) -> Inequality:
        lhs = self.formula()
        tok = self.peek()
        if tok.kind == "leq":
            self.advance()
            return Inequality(lhs, Rel.Leq, self.formula())
        if tok.kind == "prec":
            self.advance()
            rel_tok = tok
            rhs = self.formula()
            ineq = Inequality(lhs, Rel.Prec, rhs)
            for side in (lhs, rhs):
                voc = analyze_vocabulary(side)
                if voc.nominals or voc.has_black:
                    raise ParseError(
                        "'prec' requires input-language sides "
                        "(no nominals or black modalities)",
                        rel_tok.line,
                        rel_tok.column,
                    )
            return ineq
        self.fail("expected '<=' or 'prec'")

    def inequalities(self) -> tuple[Inequality, ...]:
        ineqs = [self.inequality_group()]
        while self.peek().kind == "amp":
            self.advance()
            ineqs.append(self.inequality_group())
        return tuple(i for group in ineqs for i in group)

    def inequality_group(self) -> tuple[Inequality, ...]:
        """One inequality, or a parenthesized conjunction of inequalities."""
        if self.peek().kind == "lpar":
            saved = self.pos
            try:
                self.advance()
                inner = self.inequalities()
                self.expect("rpar", "')'")
                return inner
            except ParseError:
                self.pos = saved
        return (self.inequality(),)

    # statements -------------------------------------------------------------

    def statement(self) -> Statement:
        antecedent = self.inequalities()
        if self.peek().kind != "darrow":
            self.expect("eof", "'=>' or end of input")
            if len(antecedent) == 1:
                return antecedent[0]
            return QuasiInequality((TRIVIAL_INEQ,), antecedent)
        self.advance()
        if self.peek().kind == "E":
            etok = self.advance()
            names: list[str] = []
            while self.peek().kind == "ident":
                names.append(self.advance().value)
            if not names:
                self.fail("expected bound variable names after 'E'")
            self.expect("dot", "'.' after bound variables")
            consequent = self.inequalities()
            self.expect("eof", "end of input")
            if len(set(names)) != len(names):
                raise ParseError(
                    "bound variables must be pairwise distinct", etok.line, etok.column
                )
            bound = set(names)
            for ineq in antecedent:
                used = free_vars(ineq.lhs) | free_vars(ineq.rhs)
                clash = sorted(bound & used)
                if clash:
                    raise ParseError(
                        f"bound variable {clash[0]!r} occurs in the antecedent",
                        etok.line,
                        etok.column,
                    )
            return Pi2Statement(antecedent, tuple(names), consequent)
        consequent = self.inequalities()
        self.expect("eof", "end of input")
        return QuasiInequality(antecedent, consequent)


def parse_statement(text: str) -> Statement:
    """Parse an inequality, quasi-inequality, or existential statement."""
    return _Parser(_tokenize(text)).statement()


def parse_formula(text: str) -> Formula:
    """Parse a bare formula."""
    parser = _Parser(_tokenize(text))
    f = parser.formula()
    parser.expect("eof", "end of input")
    return f


# ---------------------------------------------------------------------------
# Rendering
# ---------------------------------------------------------------------------

_PREC_IMP = 0
_PREC_OR = 1
_PREC_AND = 2
_PREC_UNARY = 3
_PREC_ATOM = 4


def _level(f: Formula) -> int:
    if isinstance(f, Imp):
        return _PREC_IMP
    if isinstance(f, Or):
        return _PREC_OR
    if isinstance(f, And):
        return _PREC_AND
    if isinstance(f, (Not, *MODAL_TYPES)):
        return _PREC_UNARY
    return _PREC_ATOM


def _render_formula(f: Formula) -> str:
    if isinstance(f, PropVar):
        return f.name
    if isinstance(f, Nominal):
        return "@" + f.name
    if isinstance(f, Top):
        return "T"
    if isinstance(f, Bottom):
        return "F"
    if isinstance(f, Not):
        return "~" + _render_child(f.sub, _PREC_UNARY)
    if isinstance(f, MODAL_TYPES):
        return MODAL_KEYWORDS[type(f)] + " " + _render_child(f.sub, _PREC_UNARY)
    if isinstance(f, And):
        left = _render_child(f.left, _PREC_AND)
        right = _render_child(f.right, _PREC_AND + 1)
        return f"{left} /\\ {right}"
    if isinstance(f, Or):
        left = _render_child(f.left, _PREC_OR)
        right = _render_child(f.right, _PREC_OR + 1)
        return f"{left} \\/ {right}"
    if isinstance(f, Imp):
        left = _render_child(f.left, _PREC_IMP + 1)
        right = _render_child(f.right, _PREC_IMP)
        return f"{left} -> {right}"
    raise TypeError(f"not a formula: {f!r}")


def _render_child(f: Formula, min_level: int) -> str:
    text = _render_formula(f)
    if _level(f) < min_level:
        return f"({text})"
    return text


def _render_inequality(ineq: Inequality) -> str:
    op = "<=" if ineq.rel is Rel.Leq else "prec"
    return f"{_render_formula(ineq.lhs)} {op} {_render_formula(ineq.rhs)}"


def _render_ineqs(ineqs) -> str:
    return " & ".join(_render_inequality(i) for i in ineqs)


def render(node) -> str:
    """Canonical text for a formula, inequality, statement, or FO formula."""
    if isinstance(node, Formula):
        return _render_formula(node)
    if isinstance(node, Inequality):
        return _render_inequality(node)
    if isinstance(node, QuasiInequality):
        return f"{_render_ineqs(node.antecedent)} => {_render_ineqs(node.consequent)}"
    if isinstance(node, Pi2Statement):
        cons = _render_ineqs(node.consequent)
        if len(node.consequent) > 1:
            cons = f"({cons})"
        bound = " ".join(node.bound_vars)
        return f"{_render_ineqs(node.antecedent)} => E {bound}. {cons}"
    if isinstance(node, ExistsStatement):
        cons = _render_ineqs(node.inequalities)
        if len(node.inequalities) > 1:
            cons = f"({cons})"
        return f"E {' '.join(node.bound_vars)}. {cons}"
    from . import fol

    if isinstance(node, fol.FOFormula):
        return fol.render_fo(node)
    raise TypeError(f"cannot render {node!r}")
