import itertools

import pytest
from hypothesis import given, settings, strategies as st

from fsmreq.exhaustive import exhaustive_req_suite, h_suite
from fsmreq.fsm import Alphabet, check_properties, language_equivalent
from fsmreq.harness import (
    CoverageReport,
    SplitMix64,
    coverage_experiment,
    enumerate_machines,
    mutate,
    run_suite_equiv,
    run_suite_reduction,
    suite_passed,
    universe_size,
)
from fsmreq.requirements import equivalence_requirement

from conftest import outs, tr
from test_requirements import sut_for


class TestRunEquiv:
    def test_s_passes_four_cases(self, M, S, R):
        res = run_suite_equiv(S, M, exhaustive_req_suite(M, R, 0))
        assert suite_passed(res)
        assert all(r.verdict == "pass" and r.first_divergence is None for r in res)

    def test_s_fails_a_a_a(self, M, S):
        (res,) = run_suite_equiv(S, M, [tr(M, "a.a.a")])
        assert not res.passed
        assert res.first_divergence == 2
        assert outs(M, res.observed) == "1.0.1"
        assert outs(M, res.expected) == "1.0.0"

    def test_reference_passes_anything(self, M):
        assert suite_passed(run_suite_equiv(M, M, h_suite(M, 1)))

    def test_alphabet_mismatch(self, M, fsb):
        with pytest.raises(ValueError):
            run_suite_equiv(fsb, M, [()])


class TestRunReduction:
    def test_s_prime_passes_four_cases(self, M, R, S_prime, m1p):
        assert suite_passed(run_suite_reduction(S_prime, m1p, exhaustive_req_suite(M, R, 0)))

    def test_s_prime_fails_b_a_a_b(self, M, S_prime, m1p):
        (res,) = run_suite_reduction(S_prime, m1p, [tr(M, "b.a.a.b")])
        assert res.first_divergence == 3
        assert M.outputs[res.observed[3]] == "1"
        assert {M.outputs[y] for y in res.expected[3]} == {"0", "2"}

    def test_reference_passes(self, M, m1p):
        assert suite_passed(run_suite_reduction(M, m1p, h_suite(M, 1)))

    @given(st.data())
    def test_strict_pass_implies_reduction_pass(self, M, m1p, data):
        s = data.draw(sut_for(M))
        cases = data.draw(st.lists(st.lists(st.integers(0, 1), max_size=6), max_size=5))
        for a, b in zip(run_suite_equiv(s, M, cases), run_suite_reduction(s, m1p, cases)):
            if a.passed:
                assert b.passed
            if b.first_divergence is not None:
                i = b.first_divergence
                assert all(y in z for y, z in zip(b.observed[:i], b.expected[:i]))
                assert b.observed[i] not in b.expected[i]


class TestEnumerate:
    def test_counts(self):
        assert universe_size(3, 2, 3) == 9 ** 6
        one = list(enumerate_machines(1, Alphabet("a"), Alphabet("0")))
        assert len(one) == 1

    def test_small_universe_is_complete_and_distinct(self):
        ms = list(enumerate_machines(2, Alphabet("ab"), Alphabet("01")))
        assert len(ms) == 4 ** 4
        keys = {(m.delta, m.omega) for m in ms}
        assert len(keys) == len(ms)
        assert keys == {
            (tuple(c // 2 for c in cells), tuple(c % 2 for c in cells))
            for cells in itertools.product(range(4), repeat=4)
        }

    def test_order_stable(self):
        a = [m.omega + m.delta for m in enumerate_machines(2, Alphabet("a"), Alphabet("01"))]
        b = [m.omega + m.delta for m in enumerate_machines(2, Alphabet("a"), Alphabet("01"))]
        assert a == b

    def test_cap(self):
        with pytest.raises(ValueError):
            next(enumerate_machines(3, Alphabet("ab"), Alphabet("012"), cap=1000))


class TestMutate:
    def test_splitmix_reference_values(self):
        # first outputs for seed 0 of the standard split-mix 64 generator
        g = SplitMix64(0)
        assert [g.next() for _ in range(3)] == [
            0xE220A8397B1DCDAF, 0x6E789E6AA1B965F4, 0x06C45D188009454F,
        ]

    def test_empty(self, fsb):
        assert mutate(fsb, 1, 0) == []

    def test_deterministic(self, fsb):
        assert mutate(fsb, 1, 50) == mutate(fsb, 1, 50)
        assert mutate(fsb, 1, 50) != mutate(fsb, 2, 50)

    def test_within_fault_domain(self, fsb):
        ms = mutate(fsb, 1, 100)
        assert len(ms) == 100
        for m in ms:
            assert check_properties(m) == (True, True, True)
            assert fsb.n_states <= m.n_states <= fsb.n_states + 1
            assert m.inputs == fsb.inputs and m.outputs == fsb.outputs
            common = fsb.n_states * len(fsb.inputs)
            changed = sum(
                (a, b) != (c, d)
                for a, b, c, d in zip(m.delta[:common], m.omega[:common], fsb.delta, fsb.omega)
            )
            assert 1 <= changed <= 3 or (changed == 0 and m.n_states > fsb.n_states)

    def test_some_mutants_add_a_state(self, fsb):
        grown = [m for m in mutate(fsb, 7, 200) if m.n_states > fsb.n_states]
        assert grown
        # a later target change may cut the new edge again, but rarely
        with_edge = sum(m.n_states - 1 in m.delta for m in grown)
        assert with_edge >= 0.9 * len(grown)


class TestReport:
    def test_line_format(self):
        rep = CoverageReport("exhaustive", universe=10, examined=10, pass_sat=1, pass_viol=0,
                             fail_sat=4, fail_viol=5, seed=3)
        assert rep.line() == "universe=10 pass_sat=1 pass_viol=0 fail_sat=4 fail_viol=5 seed=3"
        assert rep.ok
        assert "all clear" in rep.text()

    def test_violations_by_strategy(self):
        assert CoverageReport("exhaustive", fail_sat=2).ok
        assert not CoverageReport("complete", fail_sat=2).ok
        assert not CoverageReport("exhaustive", oracle="equivalence", fail_sat=2).ok
        assert not CoverageReport("exhaustive", pass_viol=1).ok


class TestExperiment:
    def test_two_state_universe(self, M, R):
        # a small universe with a 2-input alphabet: all machines with up to 2 states
        ms = list(enumerate_machines(2, M.inputs, M.outputs))
        rep = coverage_experiment(M, R, 0, "exhaustive", ms)
        assert rep.examined == len(ms) == 6 ** 4
        assert rep.pass_sat + rep.pass_viol + rep.fail_sat + rep.fail_viol == rep.examined
        assert rep.pass_viol == 0 and rep.oracle_disagreements == 0
        rep = coverage_experiment(M, R, 0, "complete", ms)
        assert rep.pass_viol == 0 and rep.fail_sat == 0

    def test_req_eq_bridge(self, M):
        ms = list(enumerate_machines(2, M.inputs, M.outputs))
        rep = coverage_experiment(M, equivalence_requirement(M), 0, "exhaustive", ms,
                                  oracle="equivalence")
        assert rep.ok
        assert rep.pass_sat == sum(language_equivalent(s, M) is None for s in ms)

    def test_counterexamples_are_recorded(self, M, R, S_prime):
        rep = coverage_experiment(M, R, 0, "exhaustive", [S_prime])
        assert rep.fail_viol == 1
        rep = coverage_experiment(M, R, None, "exhaustive", [S_prime])
        assert rep.suite_sizes == {0: 4}

    def test_unknown_strategy(self, M, R):
        with pytest.raises(ValueError):
            coverage_experiment(M, R, 0, "bogus", [])

    def test_per_machine_extra(self, fsb, R1):
        ms = mutate(fsb, 3, 40)
        rep = coverage_experiment(fsb, R1, None, "exhaustive", ms, seed=3)
        assert rep.ok
        assert set(rep.suite_sizes) <= {0, 1}
        assert rep.seed == 3 and rep.universe == 40
