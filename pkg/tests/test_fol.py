import itertools
import random

from modalcorr import fol, semantics
from modalcorr.fol import (
    Eq,
    Exists,
    FOAnd,
    FOImp,
    Forall,
    Pred,
    Rel2,
    render_fo,
    simplify_fo,
    standard_translation_formula,
    standard_translation_statement,
    to_sexpr,
)
from modalcorr.semantics import FiniteFrame, Valuation, eval_fo, eval_formula
from modalcorr.syntax import parse_formula, parse_statement


class TestTranslationClauses:
    def test_dia(self):
        out = standard_translation_formula(parse_formula("dia p"), "x")
        assert out == Exists("x0", FOAnd(Rel2("Rp", "x", "x0"), Pred("p", "x0")))

    def test_sdia_reversed(self):
        out = standard_translation_formula(parse_formula("sdia p"), "x")
        assert out == Exists("x0", FOAnd(Rel2("R", "x0", "x"), Pred("p", "x0")))

    def test_nominal(self):
        out = standard_translation_formula(parse_formula("@i"), "x")
        assert out == Eq("x", "i")

    def test_black_directions(self):
        bdia = standard_translation_formula(parse_formula("bdia p"), "x")
        assert bdia == Exists("x0", FOAnd(Rel2("Rp", "x0", "x"), Pred("p", "x0")))
        sbdia = standard_translation_formula(parse_formula("sbdia p"), "x")
        assert sbdia == Exists("x0", FOAnd(Rel2("R", "x", "x0"), Pred("p", "x0")))

    def test_inequality(self):
        out = standard_translation_statement(parse_statement("p <= p"))
        assert out == Forall("x0", FOImp(Pred("p", "x0"), Pred("p", "x0")))

    def test_pure_closes_over_nominals(self):
        out = standard_translation_statement(parse_statement("@i <= sdia @i"))
        assert isinstance(out, Forall) and out.var == "i"
        simplified = simplify_fo(out)
        assert simplified == Forall("i", Rel2("R", "i", "i"))


class TestSimplifier:
    def test_equality_resolution(self):
        f = Exists("y", FOAnd(Eq("y", "i"), Rel2("R", "y", "y")))
        assert simplify_fo(f) == Rel2("R", "i", "i")

    def test_fixpoint(self):
        f = Forall("i", Rel2("R", "i", "i"))
        assert simplify_fo(f) == f

    def test_unused_quantifier(self):
        f = Forall("z", Rel2("R", "i", "i"))
        assert simplify_fo(Forall("i", f)) == Forall("i", Rel2("R", "i", "i"))

    def test_preserves_truth_on_all_small_frames(self):
        rng = random.Random(3)
        stmts = [
            "@i <= sdia @i",
            "sbdia @j <= sdia @j",
            "sdia dia @k <= dia sdia @k",
            "sdia sdia @k <= sdia @k",
            "T <= T => @i0 <= ~@i1",
        ]
        for text in stmts:
            fo_raw = standard_translation_statement(parse_statement(text))
            fo_simpl = simplify_fo(fo_raw)
            for size in (1, 2):
                for frame in semantics.all_frames(size):
                    assert eval_fo(frame, fo_raw, {}) == eval_fo(frame, fo_simpl, {})
            for frame in semantics.sampled_frames(3, 60, seed=rng.randrange(999)):
                assert eval_fo(frame, fo_raw, {}) == eval_fo(frame, fo_simpl, {})


class TestTranslationCorrectness:
    def test_formula_level_small_sweep(self):
        formulas = [
            "p", "~p", "p /\\ q", "p \\/ q", "p -> q",
            "box p", "dia p", "sbox p", "sdia p",
            "bbox p", "bdia p", "sbbox p", "sbdia p",
            "dia (p /\\ ~q)", "sdia sdia p", "box sdia p", "~sbdia ~p",
        ]
        frames = list(semantics.all_frames(2))
        for text in formulas:
            f = parse_formula(text)
            fo = standard_translation_formula(f, "x")
            for frame in frames:
                for p_set, q_set in itertools.product(
                    [frozenset(), frozenset([0]), frozenset([1]), frozenset([0, 1])],
                    repeat=2,
                ):
                    val = Valuation({"p": p_set, "q": q_set})
                    fo_val = {"p": p_set, "q": q_set}
                    for w in frame.worlds:
                        assert eval_formula(frame, val, w, f) == eval_fo(
                            frame, fo, {"x": w}, fo_val
                        ), (text, frame, p_set, q_set, w)

    def test_statement_level(self):
        stmt = parse_statement("sdia p <= q => p <= q")
        fo = standard_translation_statement(stmt)
        for size in (1, 2):
            for frame in semantics.all_frames(size):
                subsets = [
                    frozenset(w for w in frame.worlds if mask >> w & 1)
                    for mask in range(1 << frame.size)
                ]
                ok_stmt = all(
                    semantics.holds_statement(frame, Valuation({"p": a, "q": b}), stmt)
                    for a in subsets
                    for b in subsets
                )
                # the FO sentence still has free predicates; check per valuation
                ok_fo = all(
                    eval_fo(frame, fo, {}, {"p": a, "q": b})
                    for a in subsets
                    for b in subsets
                )
                assert ok_stmt == ok_fo


class TestRendering:
    def test_ascii(self):
        f = Forall("i", Rel2("R", "i", "i"))
        assert render_fo(f) == "forall i. R(i,i)"
        g = Exists("y", FOAnd(Rel2("Rp", "x", "y"), Pred("p", "y")))
        assert render_fo(g) == "exists y. R'(x,y) & P_p(y)"

    def test_sexpr(self):
        f = Forall("i", Rel2("R", "i", "i"))
        assert to_sexpr(f) == "(forall i (R i i))"
