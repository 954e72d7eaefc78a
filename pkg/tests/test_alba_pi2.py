"""Tests for the two-stage reduction of existentially quantified statements."""

import pytest

from modalcorr.alba import Failure, Success, check_topological_correctness
from modalcorr.alba_pi2 import first_half, run_alba_pi2
from modalcorr.fol import fo_and_all, simplify_fo, standard_translation_statement
from modalcorr.semantics import (
    Equivalent,
    equivalence_oracle,
    statement_equivalence_oracle,
)
from modalcorr.syntax import (
    ExistsStatement,
    Pi2Statement,
    QuasiInequality,
    TRIVIAL_INEQ,
    parse_statement,
    render,
)


def pi2(text: str) -> Pi2Statement:
    stmt = parse_statement(text)
    if isinstance(stmt, ExistsStatement):
        stmt = Pi2Statement((TRIVIAL_INEQ,), stmt.bound_vars, stmt.inequalities)
    assert isinstance(stmt, Pi2Statement)
    return stmt


class TestFirstHalf:
    def test_density_witness(self):
        out = first_half(pi2("p prec q => E c. p prec c & c prec q"))
        assert out.success
        assert [render(i) for i in out.meta_con_ineq] == ["sdia sdia p <= q"]
        assert out.certificate is not None

    def test_two_witnesses(self):
        out = first_half(pi2("p prec q => E c d. p prec c & c prec d & d prec q"))
        assert out.success
        assert [render(i) for i in out.meta_con_ineq] == ["sdia sdia sdia p <= q"]

    def test_uniform_witness_eliminated(self):
        out = first_half(pi2("T <= T => E c. dia c <= ~dia c"))
        assert out.success
        assert [render(i) for i in out.meta_con_ineq] == ["dia F <= ~dia F"]

    def test_vacuous_witness(self):
        out = first_half(pi2("T <= T => E c. T <= T"))
        assert out.success
        assert [render(i) for i in out.meta_con_ineq] == ["T <= T"]

    def test_contradictory_row_is_stuck(self):
        out = first_half(pi2("T <= T => E c. c /\\ ~c <= p"))
        assert not out.success
        assert "c" in out.reason
        assert out.stuck_rows

    def test_nominals_rejected(self):
        out = first_half(pi2("T <= T => E c. @i <= c"))
        assert not out.success
        assert "nominal" in out.reason

    @pytest.mark.parametrize(
        "text",
        [
            "p prec q => E c. p prec c & c prec q",
            "p prec q => E c d. p prec c & c prec d & d prec q",
            "T <= T => E c. dia c <= ~dia c",
            "dia p <= q => E c. dia p <= c & dia c <= dia q",
        ],
    )
    def test_success_is_equivalent_under_subset_witnesses(self, text):
        stmt = pi2(text)
        out = first_half(stmt)
        assert out.success
        reduced = QuasiInequality(stmt.antecedent, out.meta_con_ineq)
        verdict = statement_equivalence_oracle(stmt, reduced, max_size=2)
        assert isinstance(verdict, Equivalent), verdict


class TestFullRun:
    def test_density_golden(self):
        out = run_alba_pi2(pi2("p prec q => E c. p prec c & c prec q"))
        assert isinstance(out, Success)
        assert [render(p) for p in out.pure_quasis] == [
            "T <= T => sdia sdia @i <= sdia @i"
        ]

    def test_density_is_transitivity(self):
        stmt = pi2("p prec q => E c. p prec c & c prec q")
        out = run_alba_pi2(stmt)
        fo = simplify_fo(
            fo_and_all([standard_translation_statement(p) for p in out.pure_quasis])
        )
        verdict = equivalence_oracle(stmt, fo, max_size=2)
        assert isinstance(verdict, Equivalent), verdict

    def test_failure_carries_bound_vars(self):
        out = run_alba_pi2(pi2("T <= T => E c. c /\\ ~c <= p"))
        assert isinstance(out, Failure)
        assert out.unresolved_vars == ("c",)
        assert out.trace.input == "T <= T => E c. c /\\ ~c <= p"
        assert "stuck" in out.reason

    def test_trace_replays_and_is_deterministic(self):
        text = "p prec q => E c. p prec c & c prec q"
        first = run_alba_pi2(pi2(text))
        second = run_alba_pi2(pi2(text))
        assert first.trace.to_json_lines() == second.trace.to_json_lines()
        report = check_topological_correctness(first.trace)
        assert report.ok, report
        halves = {s.half for s in first.trace.steps}
        assert halves == {1, 2}

    def test_plain_quasi_passthrough(self):
        out = run_alba_pi2(parse_statement("p <= q => dia p <= dia q"))
        assert isinstance(out, Success)
