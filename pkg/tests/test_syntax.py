import random

import pytest

from modalcorr.syntax import (
    And,
    BDia,
    Bottom,
    Box,
    Dia,
    Imp,
    Inequality,
    Nominal,
    Not,
    Or,
    ParseError,
    Pi2Statement,
    PropVar,
    QuasiInequality,
    Rel,
    SBox,
    SDia,
    Top,
    TRIVIAL_INEQ,
    analyze_vocabulary,
    free_vars,
    parse_formula,
    parse_statement,
    render,
    substitute,
)

p, q, r, s = PropVar("p"), PropVar("q"), PropVar("r"), PropVar("s")


class TestParsing:
    def test_quasi(self):
        stmt = parse_statement("sdia p <= q  =>  p <= q")
        assert stmt == QuasiInequality(
            (Inequality(SDia(p), Rel.Leq, q),),
            (Inequality(p, Rel.Leq, q),),
        )

    def test_pi2(self):
        stmt = parse_statement("p prec q => E c. (p prec c & c prec q)")
        c = PropVar("c")
        assert stmt == Pi2Statement(
            (Inequality(p, Rel.Prec, q),),
            ("c",),
            (Inequality(p, Rel.Prec, c), Inequality(c, Rel.Prec, q)),
        )

    def test_bare_inequality(self):
        assert parse_statement("p <= q") == Inequality(p, Rel.Leq, q)

    def test_bare_conjunction_gets_trivial_antecedent(self):
        stmt = parse_statement("p <= q & q <= p")
        assert isinstance(stmt, QuasiInequality)
        assert stmt.antecedent == (TRIVIAL_INEQ,)
        assert len(stmt.consequent) == 2

    def test_error_position(self):
        with pytest.raises(ParseError) as err:
            parse_statement("p <= ")
        assert err.value.line == 1

    def test_truncated_input(self):
        with pytest.raises(ParseError):
            parse_statement("p")
        with pytest.raises(ParseError):
            parse_formula("p /\\")

    def test_bound_var_in_antecedent_rejected(self):
        with pytest.raises(ParseError, match="antecedent"):
            parse_statement("p prec c => E c. p prec c")

    def test_duplicate_bound_vars_rejected(self):
        with pytest.raises(ParseError, match="distinct"):
            parse_statement("p prec q => E c c. p prec c")

    def test_prec_requires_input_language(self):
        with pytest.raises(ParseError, match="prec"):
            parse_statement("@i prec q")
        with pytest.raises(ParseError, match="prec"):
            parse_statement("bdia p prec q")

    def test_precedence(self):
        assert parse_formula("p /\\ q \\/ r") == Or(And(p, q), r)
        assert parse_formula("p -> q -> r") == Imp(p, Imp(q, r))
        assert parse_formula("~p /\\ q") == And(Not(p), q)
        assert parse_formula("box p /\\ q") == And(Box(p), q)
        assert parse_formula("box (p /\\ q)") == Box(And(p, q))
        assert parse_formula("sdia ~p") == SDia(Not(p))

    def test_constants_and_nominals(self):
        assert parse_formula("T") == Top()
        assert parse_formula("F") == Bottom()
        assert parse_formula("@i0") == Nominal("i0")


class TestRendering:
    def test_examples(self):
        assert render(And(p, Or(q, r))) == "p /\\ (q \\/ r)"
        assert render(SDia(Not(p))) == "sdia ~p"
        assert render(Nominal("i")) == "@i"

    def test_roundtrip_random_asts(self):
        rng = random.Random(7)
        leaves = [p, q, Nominal("i"), Top(), Bottom()]
        unary = [Not, Box, Dia, SBox, SDia, BDia]
        binary = [And, Or, Imp]

        def gen(depth):
            if depth == 0 or rng.random() < 0.3:
                return rng.choice(leaves)
            if rng.random() < 0.5:
                return rng.choice(unary)(gen(depth - 1))
            ctor = rng.choice(binary)
            return ctor(gen(depth - 1), gen(depth - 1))

        for _ in range(300):
            f = gen(4)
            assert parse_formula(render(f)) == f

    def test_roundtrip_statements(self):
        texts = [
            "sdia p <= q => p <= q",
            "p prec q => ~q prec ~p",
            "p prec q => E c. (p prec c & c prec q)",
            "T <= T => @i0 <= ~@i1",
        ]
        for text in texts:
            stmt = parse_statement(text)
            assert parse_statement(render(stmt)) == stmt


class TestSubstitution:
    def test_examples(self):
        assert substitute(Dia(p), Top(), "p") == Dia(Top())
        assert substitute(And(p, q), Or(r, s), "p") == And(Or(r, s), q)
        assert substitute(q, Dia(p), "p") == q

    def test_composition(self):
        theta = And(p, Or(q, Dia(p)))
        eta = Box(q)
        iota = Not(r)
        left = substitute(substitute(theta, eta, "p"), iota, "q")
        right = substitute(
            substitute(theta, iota, "q"), substitute(eta, iota, "q"), "p"
        )
        assert left == right

    def test_free_vars(self):
        theta = And(p, q)
        result = substitute(theta, Or(r, s), "p")
        assert free_vars(result) == {"q", "r", "s"}


class TestVocabulary:
    def test_dotted(self):
        voc = analyze_vocabulary(SDia(p))
        assert voc.prop_vars == {"p"}
        assert voc.has_dotted and not voc.has_black and not voc.is_pure

    def test_black_pure(self):
        voc = analyze_vocabulary(And(BDia(Nominal("j")), Top()))
        assert voc.nominals == {"j"}
        assert voc.has_black and voc.is_pure and not voc.has_dotted

    def test_bottom(self):
        voc = analyze_vocabulary(Bottom())
        assert voc.prop_vars == frozenset() and voc.nominals == frozenset()
        assert voc.is_pure
