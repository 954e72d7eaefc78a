"""Engine tests: golden runs, per-rule soundness, traces, and the monitor."""

import json
from functools import partial

import pytest

from modalcorr import semantics
from modalcorr.alba import (
    AckermannError,
    DerivationTrace,
    Failure,
    RuleError,
    RuleInstance,
    Success,
    System,
    TraceStep,
    apply_rule,
    check_topological_correctness,
    eliminate,
    first_approximation,
    preprocess,
    run_alba,
)
from modalcorr.fol import (
    fo_and_all,
    simplify_fo,
    standard_translation_statement,
)
from modalcorr.semantics import (
    Equivalent,
    equivalence_oracle,
    statement_equivalence_oracle,
)
from modalcorr.syntax import (
    Inequality,
    QuasiInequality,
    Rel,
    TRIVIAL_INEQ,
    parse_formula,
    parse_statement,
    render,
)


def ineq(text: str) -> Inequality:
    stmt = parse_statement(text)
    assert isinstance(stmt, Inequality)
    return stmt


def system(*texts: str, goal: str = "@i0 <= ~@i1", counter: int = 2) -> System:
    return System(tuple(ineq(t) for t in texts), ineq(goal), counter)


def as_quasi(s: System) -> QuasiInequality:
    return QuasiInequality(s.inequalities, (s.goal,))


def assert_system_equivalent(before: System, after: System):
    verdict = statement_equivalence_oracle(as_quasi(before), as_quasi(after), max_size=2)
    assert isinstance(verdict, Equivalent), verdict


def assert_statement_equivalent(a, b):
    verdict = statement_equivalence_oracle(a, b, max_size=2)
    assert isinstance(verdict, Equivalent), verdict


class TestGoldenRuns:
    def test_reflexivity(self):
        out = run_alba(parse_statement("a prec b => a <= b"))
        assert isinstance(out, Success)
        assert [render(p) for p in out.pure_quasis] == ["T <= T => @i <= sdia @i"]

    def test_symmetry(self):
        out = run_alba(parse_statement("a prec b => ~b prec ~a"))
        assert isinstance(out, Success)
        assert [render(p) for p in out.pure_quasis] == [
            "T <= T => sbdia @i <= sdia @i"
        ]

    def test_proximity(self):
        out = run_alba(parse_statement("a prec b => dia a prec dia b"))
        assert isinstance(out, Success)
        assert [render(p) for p in out.pure_quasis] == [
            "T <= T => sdia dia @i <= dia sdia @i"
        ]

    def test_failure_keeps_variable(self):
        out = run_alba(parse_statement("box dia p <= dia box p"))
        assert isinstance(out, Failure)
        assert out.unresolved_vars == ("p",)
        assert "Ackermann" in out.reason
        stuck = [render(i) for i in out.stuck_system.inequalities]
        assert "bdia @i0 <= dia p" in stuck

    def test_output_equivalent_to_input(self):
        for text in (
            "a prec b => a <= b",
            "a prec b => ~b prec ~a",
            "a prec b => dia a prec dia b",
            "p <= q => box p <= box q",
        ):
            stmt = parse_statement(text)
            out = run_alba(stmt)
            assert isinstance(out, Success)
            fo = simplify_fo(
                fo_and_all(
                    [standard_translation_statement(p) for p in out.pure_quasis]
                )
            )
            verdict = equivalence_oracle(stmt, fo, max_size=2)
            assert isinstance(verdict, Equivalent), verdict

    def test_multi_member_output(self):
        out = run_alba(parse_statement("T <= T => p /\\ q <= p"))
        assert isinstance(out, Success)

    def test_pure_outputs_have_no_variables(self):
        out = run_alba(parse_statement("a prec b => dia a prec dia b"))
        for quasi in out.pure_quasis:
            for i in quasi.antecedent + quasi.consequent:
                assert not semantics.statement_symbols(i)[0]


class TestPreprocess:
    def test_distribution_and_split(self):
        members, steps = preprocess(
            parse_statement("dia p \\/ dia q <= r => dia (p \\/ q) <= r")
        )
        assert [render(m.consequent[0]) for m in members] == [
            "dia p <= r",
            "dia q <= r",
        ]
        for m in members:
            assert [render(i) for i in m.antecedent] == ["dia p <= r", "dia q <= r"]
        rules = [s.rule for s in steps]
        assert "distribute" in rules and "split-left" in rules

    def test_monotone_elimination(self):
        members, steps = preprocess(parse_statement("T <= T => p <= q \\/ r"))
        assert [render(m.consequent[0]) for m in members] == ["T <= F \\/ F"]
        rules = {s.rule for s in steps}
        assert rules == {"mono-top:p", "mono-bot:q", "mono-bot:r"}

    def test_prec_rewrite(self):
        members, steps = preprocess(parse_statement("a prec b => a <= b"))
        assert render(members[0].antecedent[0]) == "sdia a <= b"

    def test_splitting_consequent_multiplies_members(self):
        members, _ = preprocess(parse_statement("p <= q => p <= q /\\ (q \\/ p)"))
        assert len(members) == 2


RESIDUATION_CASES = (
    ("dia-res", 0, "dia a <= b"),
    ("box-res", 0, "a <= box b"),
    ("sdia-res", 0, "sdia a <= b"),
    ("sbox-res", 0, "a <= sbox b"),
    ("neg-res-left", 0, "~a <= b"),
    ("neg-res-right", 0, "a <= ~b"),
    ("and-res", 1, "a /\\ b <= c"),
    ("and-res", 2, "a /\\ b <= c"),
    ("or-res", 1, "a <= b \\/ c"),
    ("or-res", 2, "a <= b \\/ c"),
    ("imp-res", 1, "a <= b -> c"),
    ("imp-res", 2, "a <= b -> c"),
)

APPROXIMATION_CASES = (
    ("dia-approx", "@i0 <= dia a"),
    ("sdia-approx", "@i0 <= sdia a"),
    ("box-approx", "box a <= ~@i1"),
    ("sbox-approx", "sbox a <= ~@i1"),
    ("imp-approx", "a -> b <= ~@i1"),
)

SPLIT_CASES = ("a <= b /\\ c", "a \\/ b <= c", "a prec b /\\ c", "a \\/ b prec c")

DISTRIBUTION_CASES = (
    ("dia (a \\/ b) <= c", "dia a \\/ dia b <= c"),
    ("c <= box (a /\\ b)", "c <= box a /\\ box b"),
)

MONO_CASES = (
    ("T <= T => p <= q \\/ r", "T <= T => T <= F \\/ F"),
    ("T <= T => p /\\ r <= p", "T <= T => p /\\ T <= p"),
)


def check_residuation(rule: str, variant: int, premise: str):
    before = system(premise)
    after = apply_rule(before, RuleInstance(rule, 0, variant=variant))
    assert_system_equivalent(before, after)


def check_approximation(rule: str, premise: str):
    before = system(premise)
    after = apply_rule(before, RuleInstance(rule, 0))
    assert len(after.inequalities) > len(before.inequalities)
    assert after.fresh_counter > before.fresh_counter
    assert_system_equivalent(before, after)


def check_splitting(text: str):
    src = ineq(text)
    single = QuasiInequality((TRIVIAL_INEQ,), (src,))
    if isinstance(src.rhs, type(parse_formula("a /\\ b"))):
        parts = (
            Inequality(src.lhs, src.rel, src.rhs.left),
            Inequality(src.lhs, src.rel, src.rhs.right),
        )
    else:
        parts = (
            Inequality(src.lhs.left, src.rel, src.rhs),
            Inequality(src.lhs.right, src.rel, src.rhs),
        )
    double = QuasiInequality((TRIVIAL_INEQ,), parts)
    assert_statement_equivalent(single, double)


def check_distribution(before: str, after: str):
    assert_statement_equivalent(ineq(before), ineq(after))


def check_monotone_elimination(before: str, after: str):
    members, _ = preprocess(parse_statement(before))
    assert [render(m) for m in members] == [after]
    assert_statement_equivalent(parse_statement(before), parse_statement(after))


def check_prec_rewrite():
    assert_statement_equivalent(ineq("a prec b"), ineq("sdia a <= b"))


def check_first_approximation():
    quasi = parse_statement("sdia a <= b => a <= b")
    approximated = as_quasi(first_approximation(quasi))
    assert_statement_equivalent(quasi, approximated)


def check_ackermann_right():
    before = system("dia a <= p", "p <= b")
    after = eliminate(before, "p", "Right")
    assert [render(i) for i in after.inequalities] == ["dia a <= b"]
    assert_system_equivalent(before, after)


def check_ackermann_left():
    before = system("p <= box b", "a <= p")
    after = eliminate(before, "p", "Left")
    assert [render(i) for i in after.inequalities] == ["a <= box b"]
    assert_system_equivalent(before, after)


def check_double_negation():
    assert_statement_equivalent(ineq("~~a <= b"), ineq("a <= b"))


def catalogue_cases() -> tuple[tuple[str, object], ...]:
    """The fixed per-rule soundness catalogue as (label, check) pairs."""
    cases: list[tuple[str, object]] = []
    for rule, variant, premise in RESIDUATION_CASES:
        label = rule if variant == 0 else f"{rule}:{variant}"
        cases.append((label, partial(check_residuation, rule, variant, premise)))
    for rule, premise in APPROXIMATION_CASES:
        cases.append((rule, partial(check_approximation, rule, premise)))
    for k, text in enumerate(SPLIT_CASES, 1):
        cases.append((f"split:{k}", partial(check_splitting, text)))
    for k, (before, after) in enumerate(DISTRIBUTION_CASES, 1):
        cases.append((f"distribute:{k}", partial(check_distribution, before, after)))
    for k, (before, after) in enumerate(MONO_CASES, 1):
        cases.append(
            (f"mono-elim:{k}", partial(check_monotone_elimination, before, after))
        )
    cases.append(("prec-rewrite", check_prec_rewrite))
    cases.append(("first-approx", check_first_approximation))
    cases.append(("ackermann-right", check_ackermann_right))
    cases.append(("ackermann-left", check_ackermann_left))
    cases.append(("double-negation", check_double_negation))
    return tuple(cases)


CATALOGUE = catalogue_cases()


class TestRuleCatalogue:
    """Each rewriting rule preserves quasi-validity on every frame with at
    most two worlds (all valuations, all nominal placements)."""

    @pytest.mark.parametrize(
        "label,check", CATALOGUE, ids=[label for label, _ in CATALOGUE]
    )
    def test_case(self, label, check):
        check()

    def test_catalogue_size(self):
        assert len(CATALOGUE) >= 30


class TestAckermannPreconditions:
    def test_empty_bounds_right_gives_bottom(self):
        before = system("p <= dia b")
        after = eliminate(before, "p", "Right")
        assert [render(i) for i in after.inequalities] == ["F <= dia b"]

    def test_empty_bounds_left_gives_top(self):
        before = system("dia b <= p")
        after = eliminate(before, "p", "Left")
        assert [render(i) for i in after.inequalities] == ["dia b <= T"]

    def test_polarity_violation_is_reported(self):
        before = system("a <= dia p")
        with pytest.raises(AckermannError, match="dia p"):
            eliminate(before, "p", "Right")

    def test_self_dependent_bound_is_not_a_bound(self):
        before = system("dia p <= p")
        with pytest.raises(AckermannError):
            eliminate(before, "p", "Right")

    def test_multiple_bounds_join(self):
        before = system("a <= p", "dia b <= p", "p <= c")
        after = eliminate(before, "p", "Right")
        assert [render(i) for i in after.inequalities] == ["a \\/ dia b <= c"]


class TestApplyRulePatterns:
    def test_mismatch_raises(self):
        with pytest.raises(RuleError):
            apply_rule(system("a <= b"), RuleInstance("dia-res", 0))

    def test_fresh_collision_raises(self):
        s = System((ineq("@i2 <= dia a"),), ineq("@i2 <= ~@i1"), 2)
        with pytest.raises(RuleError, match="i2"):
            apply_rule(s, RuleInstance("dia-approx", 0))

    def test_first_approximation_skips_used_names(self):
        quasi = parse_statement("@i0 <= a => @i0 <= a")
        s = first_approximation(quasi)
        names = {render(i) for i in s.inequalities}
        assert s.goal == ineq("@i1 <= ~@i2")
        assert "@i1 <= @i0" in names


class TestTraces:
    def test_byte_identical_across_runs(self):
        text = "a prec b => dia a prec dia b"
        t1 = run_alba(parse_statement(text)).trace.to_json_lines()
        t2 = run_alba(parse_statement(text)).trace.to_json_lines()
        assert t1 == t2

    def test_round_trip(self):
        out = run_alba(parse_statement("a prec b => ~b prec ~a"))
        text = out.trace.to_json_lines()
        back = DerivationTrace.from_json_lines(text)
        assert back == out.trace

    def test_json_lines_shape(self):
        out = run_alba(parse_statement("a prec b => a <= b"))
        lines = out.trace.to_json_lines().splitlines()
        header = json.loads(lines[0])
        assert header == {"input": "a prec b => a <= b"}
        for k, line in enumerate(lines[1:]):
            d = json.loads(line)
            assert d["step"] == k
            assert set(d) == {
                "step", "stage", "half", "rule", "member", "where",
                "consumed", "produced", "fresh",
            }

    def test_fresh_symbols_are_new(self):
        out = run_alba(parse_statement("a prec b => dia a prec dia b"))
        seen = set()
        for st in out.trace.steps:
            for name in st.fresh:
                assert name not in seen
                seen.add(name)
        assert seen == {"i0", "i1", "i2", "i3"}


class TestTopologicalMonitor:
    def test_passes_on_golden_runs(self):
        for text in (
            "a prec b => a <= b",
            "a prec b => ~b prec ~a",
            "a prec b => dia a prec dia b",
        ):
            out = run_alba(parse_statement(text))
            report = check_topological_correctness(out.trace)
            assert report.ok, (text, report)
            assert report.ackermann_steps

    def test_flags_bad_ackermann_shape(self):
        steps = (
            TraceStep(0, "preprocess", 2, "split-members", None, "cons", (),
                      ("p <= q",), ()),
            TraceStep(
                1, "approx", 2, "first-approx", 0, "goal", ("p <= q",),
                ("@i0 <= p", "q <= ~@i1", "@i0 <= ~@i1"), ("i0", "i1"),
            ),
            TraceStep(
                2, "reduce", 2, "neg-res-left", 0, "system", ("@i0 <= p",),
                ("~sdia @i0 <= p",), (),
            ),
            TraceStep(
                3, "reduce", 2, "ackermann-right:p", 0, "system",
                ("~sdia @i0 <= p", "q <= ~@i1"), ("q <= ~@i1",), (),
            ),
        )
        tr = DerivationTrace("p <= q", steps)
        report = check_topological_correctness(tr)
        assert not report.ok
        flagged = [v for v in report.ackermann_steps if not v.ok]
        assert flagged and "~sdia @i0 <= p" in flagged[0].detail

    def test_flags_stale_fresh_symbol(self):
        steps = (
            TraceStep(0, "preprocess", 2, "split-members", None, "cons", (),
                      ("@i0 <= p",), ()),
            TraceStep(
                1, "approx", 2, "first-approx", 0, "goal", ("@i0 <= p",),
                ("@i0 <= @i0", "p <= ~@i1", "@i0 <= ~@i1"), ("i0", "i1"),
            ),
        )
        tr = DerivationTrace("@i0 <= p", steps)
        report = check_topological_correctness(tr)
        assert not report.ok
        assert any("fresh symbol i0" in e for e in report.errors)

    def test_flags_missing_consumed(self):
        steps = (
            TraceStep(0, "preprocess", 2, "prec-rewrite", None, "cons",
                      ("a prec a",), ("sdia a <= a",), ()),
        )
        tr = DerivationTrace("a prec b", steps)
        report = check_topological_correctness(tr)
        assert not report.ok
        assert any("not present" in e for e in report.errors)


class TestEndToEndSoundness:
    CASES = [
        "p <= q => dia p <= dia q",
        "p <= q => box p <= box q",
        "p <= q => sdia p <= sdia q",
        "dia box p <= box dia p",
        "dia p <= q => dia dia p <= dia q",
        "T <= T => dia (p \\/ q) <= dia p \\/ dia q",
        "p prec q => p <= box q",
    ]

    @pytest.mark.parametrize("text", CASES)
    def test_success_and_equivalence(self, text):
        stmt = parse_statement(text)
        out = run_alba(stmt)
        assert isinstance(out, Success), getattr(out, "reason", None)
        fo = simplify_fo(
            fo_and_all([standard_translation_statement(p) for p in out.pure_quasis])
        )
        verdict = equivalence_oracle(stmt, fo, max_size=2)
        assert isinstance(verdict, Equivalent), verdict
