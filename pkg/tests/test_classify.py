"""Certificate checking and search for inductive / restricted-inductive statements."""

import itertools
import json
import random

import pytest

from modalcorr.classify import (
    Certificate,
    IneqTag,
    VariableBoundError,
    candidate_certificates,
    check_inductive_pi2,
    check_inductive_quasi,
    check_inductive_tree,
    check_restricted_first_round_good,
    check_restricted_inductive_pi2,
    check_restricted_inductive_quasi,
    find_certificate,
    syntactic_polarity,
    tag_inequality,
)
from modalcorr.syntax import (
    Pi2Statement, QuasiInequality, free_vars, parse_formula, parse_statement,
)
from modalcorr.trees import (
    DependenceOrder, Eps, MINUS, OrderType, PLUS, build_signed_tree,
)


def cert(eps_map, chain):
    return Certificate(
        OrderType.of({k: Eps.One if v == 1 else Eps.Partial for k, v in eps_map.items()}),
        DependenceOrder.from_chain(chain),
    )


def quasi(text):
    stmt = parse_statement(text)
    assert isinstance(stmt, QuasiInequality)
    return stmt


def tag_of(text, eps_map, chain=()):
    stmt = parse_statement(text)
    return tag_inequality(stmt, cert(eps_map, chain))


class TestInductiveTree:
    def test_pia_below_skeleton_accepted(self):
        t = build_signed_tree(PLUS, parse_formula("sdia box p"))
        assert check_inductive_tree(t, cert({"p": 1}, ["p"]))

    def test_skeleton_below_pia_rejected(self):
        t = build_signed_tree(PLUS, parse_formula("box dia p"))
        assert not check_inductive_tree(t, cert({"p": 1}, ["p"]))

    def test_bad_branch_ignored_when_not_critical(self):
        t = build_signed_tree(PLUS, parse_formula("box dia p"))
        assert check_inductive_tree(t, cert({"p": 0}, ["p"]))

    def test_srr_in_skeleton_region_needs_no_side_condition(self):
        # the ∨ above the critical p sits in the Skeleton segment
        t = build_signed_tree(PLUS, parse_formula("q \\/ box p"))
        assert check_inductive_tree(t, cert({"p": 1, "q": 1}, ["q", "p"]))
        assert check_inductive_tree(t, cert({"p": 1, "q": 0}, ["q", "p"]))

    def test_srr_inside_pia_segment_checks_side_tree(self):
        # □ forces the ∨ into the PIA segment: side +q must be ε∂-uniform
        t = build_signed_tree(PLUS, parse_formula("box (q \\/ p)"))
        assert check_inductive_tree(t, cert({"p": 1, "q": 0}, ["q", "p"]))
        assert not check_inductive_tree(t, cert({"p": 1, "q": 1}, ["q", "p"]))

    def test_srr_inside_pia_segment_checks_dependence(self):
        t = build_signed_tree(PLUS, parse_formula("box (q \\/ p)"))
        assert not check_inductive_tree(t, cert({"p": 1, "q": 0}, ["p", "q"]))

    def test_implication_is_srr_on_positive_side(self):
        # +(q → p): the → is SRR-only, side −q must be ε∂-uniform: ε(q)=1
        t = build_signed_tree(PLUS, parse_formula("q -> p"))
        assert check_inductive_tree(t, cert({"p": 1, "q": 1}, ["q", "p"]))
        assert not check_inductive_tree(t, cert({"p": 1, "q": 0}, ["q", "p"]))


class TestTagInequality:
    def test_receiving_both_sides_dual_uniform(self):
        assert tag_of("dia p <= q", {"p": 1, "q": 0}) is IneqTag.Receiving

    def test_not_receiving_when_lhs_eps_partial(self):
        assert tag_of("dia p <= q", {"p": 0, "q": 0}) is not IneqTag.Receiving

    def test_solvable_box_rhs(self):
        assert tag_of("p <= box q", {"p": 1, "q": 1}, ["p", "q"]) is IneqTag.Solvable

    def test_solvable_requires_dependence(self):
        assert tag_of("p <= box q", {"p": 1, "q": 1}, ["q", "p"]) is IneqTag.Neither

    def test_solvable_atomic_rhs(self):
        assert tag_of("dia p <= q", {"p": 1, "q": 1}, ["p", "q"]) is IneqTag.Solvable

    def test_neither_when_variable_on_both_sides(self):
        for p_eps in (0, 1):
            assert tag_of("dia p <= box p", {"p": p_eps}, ["p"]) is IneqTag.Neither

    def test_prec_receiving(self):
        assert tag_of("p prec q", {"p": 1, "q": 0}) is IneqTag.Receiving

    def test_prec_solvable(self):
        assert tag_of("p prec q", {"p": 1, "q": 1}, ["p", "q"]) is IneqTag.Solvable

    def test_trivial_inequality_is_receiving(self):
        assert tag_of("T <= T", {}) is IneqTag.Receiving


class TestInductiveQuasi:
    def test_reflexivity_accepted(self):
        q = quasi("p prec q => p <= q")
        report = check_inductive_quasi(q, cert({"p": 1, "q": 1}, ["p", "q"]))
        assert report.accepted
        assert dict(report.tags)["p prec q"] == "solvable"
        assert dict(report.tags)["p <= q"] == "consequent-inductive"

    def test_symmetry_accepted(self):
        q = quasi("p prec q => ~q prec ~p")
        assert check_inductive_quasi(q, cert({"p": 1, "q": 1}, ["p", "q"])).accepted

    def test_proximity_accepted(self):
        q = quasi("p prec q => dia p prec dia q")
        assert check_inductive_quasi(q, cert({"p": 1, "q": 1}, ["p", "q"])).accepted

    def test_mckinsey_rejected_with_witness(self):
        q = quasi("T <= T => box dia p <= dia box p")
        report = check_inductive_quasi(q, cert({"p": 1}, ["p"]))
        assert not report.accepted
        assert "+p[+Dia,+Box]" in report.diagnostics

    def test_neither_antecedent_rejects(self):
        q = quasi("dia p <= box p => p <= p")
        report = check_inductive_quasi(q, cert({"p": 1}, ["p"]))
        assert not report.accepted
        assert "antecedent" in report.diagnostics

    def test_report_round_trips_through_json(self):
        q = quasi("p prec q => p <= q")
        report = check_inductive_quasi(q, cert({"p": 1, "q": 1}, ["p", "q"]))
        data = json.loads(report.to_json())
        assert data["verdict"] == "accepted"
        assert data["certificate"]["eps"] == {"p": "1", "q": "1"}
        assert data["certificate"]["omega"] == [["p", "q"]]


class TestFindCertificate:
    def test_reflexivity_first_hit_is_deterministic(self):
        found = find_certificate(quasi("p prec q => p <= q"))
        assert found == cert({"p": 1, "q": 1}, ["p", "q"])

    def test_symmetry_has_certificate(self):
        assert find_certificate(quasi("p prec q => ~q prec ~p")) is not None

    def test_mckinsey_has_no_certificate(self):
        assert find_certificate(quasi("T <= T => box dia p <= dia box p")) is None

    def test_variable_bound_enforced(self):
        ineqs = " & ".join(f"p{i} <= F" for i in range(7))
        q = quasi(f"{ineqs} => p0 <= p0")
        with pytest.raises(VariableBoundError):
            find_certificate(q)
        assert find_certificate(q, max_vars=7) is not None

    def test_candidate_order_is_lexicographic(self):
        stream = candidate_certificates(["q", "p"])
        first = next(stream)
        assert first.eps.to_dict() == {"p": "1", "q": "1"}
        assert first.omega.to_list() == [["p", "q"]]
        second = next(stream)
        assert second.omega.to_list() == [["q", "p"]]

    def test_linear_search_agrees_with_partial_order_search(self):
        # any certificate with a partial Ω extends to a linear one
        cases = {
            "p prec q => p <= q": True,
            "dia p <= q => p <= q": True,
            "q <= q => box dia p <= dia box p": False,
            "T <= T => box dia p <= dia box p": False,
        }
        for text, expected in cases.items():
            q = quasi(text)
            assert (find_certificate(q) is not None) is expected
            assert self._partial_order_search(q) is expected

    @staticmethod
    def _partial_order_search(q):
        names = sorted({
            name
            for ineq in q.antecedent + q.consequent
            for side in (ineq.lhs, ineq.rhs)
            for name in free_vars(side)
        })
        pairs = [(a, b) for a in names for b in names if a != b]
        orders = []
        for bits in itertools.product([False, True], repeat=len(pairs)):
            chosen = frozenset(p for p, keep in zip(pairs, bits) if keep)
            try:
                orders.append(DependenceOrder(chosen))
            except ValueError:
                continue
        for values in itertools.product((Eps.One, Eps.Partial), repeat=len(names)):
            eps = OrderType.of(dict(zip(names, values)))
            for om in orders:
                if check_inductive_quasi(q, Certificate(eps, om)).accepted:
                    return True
        return False


class TestSyntacticPolarity:
    def test_positive_reverse_diamond_is_closed_only(self):
        pol = syntactic_polarity(parse_formula("sdia p"), PLUS)
        assert pol.closed and not pol.open

    def test_unflagged_formula_is_both(self):
        pol = syntactic_polarity(parse_formula("box (p -> q)"), PLUS)
        assert pol.closed and pol.open

    def test_negated_reverse_diamond_nominal_is_open_only(self):
        pol = syntactic_polarity(parse_formula("~ sdia @j"), PLUS)
        assert not pol.closed and pol.open

    def test_backward_box_negative_is_closed(self):
        pol = syntactic_polarity(parse_formula("~ bbox p"), PLUS)
        assert pol.closed and not pol.open

    def test_mirror_symmetry_on_random_formulas(self):
        rng = random.Random(11)
        leaves = ["p", "q", "@i", "T", "F"]
        unary = ["~", "box", "dia", "sbox", "sdia", "bbox", "bdia", "sbbox", "sbdia"]

        def gen(depth):
            if depth == 0 or rng.random() < 0.3:
                return rng.choice(leaves)
            kind = rng.random()
            if kind < 0.5:
                return f"{rng.choice(unary)} ({gen(depth - 1)})"
            op = rng.choice(["/\\", "\\/", "->"])
            return f"({gen(depth - 1)}) {op} ({gen(depth - 1)})"

        for _ in range(200):
            f = parse_formula(gen(4))
            plus, minus = syntactic_polarity(f, PLUS), syntactic_polarity(f, MINUS)
            assert plus.closed == minus.open
            assert plus.open == minus.closed


class TestRestrictedQuasi:
    def test_reflexivity_accepted(self):
        report = check_restricted_inductive_quasi(quasi("p prec q => p <= q"))
        assert report.accepted
        assert report.certificate == find_certificate(quasi("p prec q => p <= q"))

    def test_explicit_reverse_modality_rejected(self):
        report = check_restricted_inductive_quasi(quasi("sdia p <= q => p <= q"))
        assert not report.accepted
        assert "reverse" in report.diagnostics

    def test_nominal_rejected(self):
        report = check_restricted_inductive_quasi(quasi("@i <= p => p <= p"))
        assert not report.accepted

    def test_backward_modality_rejected(self):
        report = check_restricted_inductive_quasi(quasi("bdia p <= q => p <= q"))
        assert not report.accepted
        assert "backward" in report.diagnostics

    def test_no_certificate_rejected(self):
        report = check_restricted_inductive_quasi(
            quasi("T <= T => box dia p <= dia box p")
        )
        assert not report.accepted
        assert "certificate" in report.diagnostics

    def test_restricted_accept_implies_inductive_accept_same_cert(self):
        for text in ["p prec q => p <= q", "p prec q => dia p prec dia q",
                     "p prec q => ~q prec ~p"]:
            q = quasi(text)
            report = check_restricted_inductive_quasi(q)
            assert report.accepted
            assert check_inductive_quasi(q, report.certificate).accepted


def exists(text):
    stmt = parse_statement("T <= T => " + text)
    assert isinstance(stmt, Pi2Statement)
    return stmt.exists_part()


class TestRestrictedFirstRoundGood:
    def test_transitivity_exists_part_accepted(self):
        e = exists("E c. (p prec c & c prec q)")
        eps_c = OrderType.of({"c": Eps.One})
        omega = DependenceOrder.from_chain(["p", "q", "c"])
        report = check_restricted_first_round_good(e, eps_c, omega)
        assert report.accepted
        assert dict(report.tags) == {"p prec c": "solvable", "c prec q": "receiving"}

    def test_bound_variable_on_both_sides_rejected(self):
        e = exists("E c. dia c <= c")
        omega = DependenceOrder.from_chain(["c"])
        for eps_val in (Eps.One, Eps.Partial):
            eps_c = OrderType.of({"c": eps_val})
            report = check_restricted_first_round_good(e, eps_c, omega)
            assert not report.accepted

    def test_vacuous_statement_accepted(self):
        e = exists("E c. T <= T")
        report = check_restricted_first_round_good(
            e, OrderType.of({"c": Eps.One}), DependenceOrder.from_chain(["c"])
        )
        assert report.accepted

    def test_non_skeleton_mirror_rejected(self):
        # receiving needs all branches of +θ/−η Skeleton: −(□c) mirror +□c is PIA
        e = exists("E c. box c <= q")
        omega = DependenceOrder.from_chain(["q", "c"])
        report = check_restricted_first_round_good(
            e, OrderType.of({"c": Eps.One}), omega
        )
        assert not report.accepted
        assert "Skeleton" in report.diagnostics
        assert not check_restricted_first_round_good(
            e, OrderType.of({"c": Eps.Partial}), omega
        ).accepted


class TestRestrictedPi2:
    def test_transitivity_statement_accepted(self):
        s = parse_statement("p prec q => E c. (p prec c & c prec q)")
        report = check_restricted_inductive_pi2(s)
        assert report.accepted
        assert report.certificate is not None

    def test_reverse_modality_rejected(self):
        s = parse_statement("p <= q => E c. sdia p <= c")
        assert not check_restricted_inductive_pi2(s).accepted

    def test_degenerate_pi2_delegates_to_quasi(self):
        s = Pi2Statement(
            quasi("p prec q => p <= q").antecedent,
            (),
            quasi("p prec q => p <= q").consequent,
        )
        assert check_inductive_pi2(s).accepted
