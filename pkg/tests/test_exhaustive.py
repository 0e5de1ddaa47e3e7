import pytest
from hypothesis import given, settings, strategies as st

from fsmreq.exhaustive import (
    SuiteVerificationError,
    compute_pair_sets,
    exhaustive_req_suite,
    h_suite,
    length_bound,
    size_bound,
    verify_exhaustive_suite,
)
from fsmreq.fsm import DFSM, Alphabet, after, minimize, omega_trace, parse_fsm, state_cover
from fsmreq.harness import run_suite_equiv, suite_passed
from fsmreq.requirements import build_m1, equivalence_requirement, satisfies_oracle
from fsmreq.suite import (
    TestSuite,
    expected_results,
    prefix_closure,
    prune_prefixes,
    read_suite,
    write_expected,
    write_suite,
)

from conftest import outs, tr
from test_requirements import requirement_for, sut_for


def names(m, ts):
    return [".".join(m.inputs[x] for x in c) for c in ts]


@st.composite
def prime_machines(draw, max_states=4, max_inputs=2, max_outputs=3):
    n = draw(st.integers(1, max_states))
    k = draw(st.integers(1, max_inputs))
    o = draw(st.integers(2, max_outputs))
    delta = draw(st.lists(st.integers(0, n - 1), min_size=n * k, max_size=n * k))
    omega = draw(st.lists(st.integers(0, o - 1), min_size=n * k, max_size=n * k))
    m = DFSM([f"q{i}" for i in range(n)], 0, Alphabet("abc"[:k]), Alphabet("012"[:o]), delta, omega)
    return minimize(m)[0]


class TestExamples:
    def test_golden_requirement_suite(self, M, R):
        ts = exhaustive_req_suite(M, R, 0)
        assert names(M, ts) == ["a.a.b", "a.b.b", "b.a.b", "b.b.a"]
        assert ts.method == "req-exh"

    def test_h_suite_example(self, M, S):
        ts = h_suite(M, 0)
        assert 4 <= len(ts) <= 8
        assert not suite_passed(run_suite_equiv(S, M, ts))

    def test_single_state(self):
        m = parse_fsm("state,a,b\ns0,s0/0,s0/1\n")
        assert names(m, h_suite(m, 0)) == ["a", "b"]

    def test_fsb_r1_smaller_than_h(self, fsb, R1):
        r1 = exhaustive_req_suite(fsb, R1, 0)
        assert 97 <= len(r1) <= 386
        assert len(r1) < len(h_suite(fsb, 0))

    def test_req_eq_matches_h(self, M, fsb):
        for m in (M, fsb):
            a = exhaustive_req_suite(m, equivalence_requirement(m), 0)
            assert a.cases == h_suite(m, 0).cases

    def test_rejects_bad_arguments(self, M, R):
        with pytest.raises(ValueError):
            h_suite(M, -1)
        not_prime = parse_fsm("state,a\np,q/0\nq,p/0\n")
        with pytest.raises(ValueError):
            h_suite(not_prime, 0)


class TestPairSets:
    def test_example(self, M, R):
        ps = compute_pair_sets(M, build_m1(M, R), state_cover(M), 0)
        a, b = tr(M, "a"), tr(M, "b")
        assert (a, b) in ps.A_M
        assert ps.witness[(a, b)] in (tr(M, "a"), tr(M, "b"))
        assert all(x != y for x, y in ps.filtered())
        assert ps.A_M <= ps.A and ps.B_M1 <= ps.B and ps.C_M1 <= ps.C
        assert len(ps.A) == 9

    def test_witnesses_distinguish_in_m(self, M, R):
        ps = compute_pair_sets(M, build_m1(M, R), None, 1)
        for (x, y), g in ps.witness.items():
            p, q = after(M, 0, x), after(M, 0, y)
            assert omega_trace(M, p, g) != omega_trace(M, q, g)

    def test_fsb_r1_no_b_or_c_pairs(self, fsb, R1):
        ps = compute_pair_sets(fsb, build_m1(fsb, R1), None, 0)
        assert ps.B_M1 == set() and ps.C_M1 == set()
        assert len(ps.A_M) == 24 * 23

    def test_c_pairs_are_prefix_pairs(self, M, R):
        ps = compute_pair_sets(M, build_m1(M, R), None, 1)
        assert ps.C
        assert all(len(a) < len(b) and b[: len(a)] == a for a, b in ps.C)


class TestVerifier:
    def test_dropping_a_case_is_caught(self, M, R):
        ts = exhaustive_req_suite(M, R, 0)
        m1 = build_m1(M, R).machine
        for i in range(len(ts)):
            broken = TestSuite(ts.cases[:i] + ts.cases[i + 1:])
            with pytest.raises(SuiteVerificationError):
                verify_exhaustive_suite(M, m1, broken, 0)

    def test_reuse_never_exceeds_length_bound(self):
        # reusing deep branches used to yield a 6-symbol case here (bound 5)
        m = DFSM(["q0", "q1", "q2"], 0, Alphabet("ab"), Alphabet("01"),
                 (0, 1, 0, 2, 0, 1), (0, 0, 0, 1, 1, 1))
        ts = h_suite(m, 0)
        assert ts.max_length <= length_bound(3, 0) == 5

    def test_core_set_alone_is_not_enough(self, M):
        core = prune_prefixes(v + (x,) for v in state_cover(M) for x in (0, 1))
        with pytest.raises(SuiteVerificationError):
            verify_exhaustive_suite(M, M, TestSuite(core), 0)

    @given(prime_machines(), st.integers(0, 1), st.data())
    @settings(max_examples=60, deadline=None)
    def test_generated_suites_verify_and_respect_bounds(self, m, extra, data):
        n, k = m.n_states, len(m.inputs)
        ts = h_suite(m, extra)  # runs the verifier internally
        assert ts.max_length <= length_bound(n, extra)
        assert len(ts) <= size_bound(n, k, extra)
        assert prune_prefixes(ts.cases) == ts.cases
        rs = exhaustive_req_suite(m, data.draw(requirement_for(m)), extra)
        assert rs.max_length <= length_bound(n, extra)
        assert len(rs) <= size_bound(n, k, extra)


class TestExhaustiveness:
    @given(prime_machines(max_states=3), st.data())
    @settings(max_examples=150, deadline=None)
    def test_passing_implies_satisfaction(self, m, data):
        r = data.draw(requirement_for(m))
        extra = data.draw(st.integers(0, 1))
        ts = exhaustive_req_suite(m, r, extra)
        s = data.draw(sut_for(m, max_states=m.n_states + extra))
        if suite_passed(run_suite_equiv(s, m, ts)):
            assert satisfies_oracle(s, m, r) is None


class TestSuiteFiles:
    def test_expected_results(self, M, fsb):
        (res,) = expected_results(M, [tr(M, "a.a.b")])
        assert outs(M, res.outputs) == "1.0.2"
        assert expected_results(M, [()])[0].outputs == ()
        assert outs(fsb, expected_results(fsb, [tr(fsb, "d1.d0")])[0].outputs) == "10.00"

    def test_suite_file_round_trip(self, M, R):
        ts = exhaustive_req_suite(M, R, 0)
        text = write_suite(ts, M.inputs)
        assert text == "a.a.b\na.b.b\nb.a.b\nb.b.a\n"
        assert read_suite(text, M.inputs) == ts.cases
        assert write_expected(M, ts) == "a.a.b/1.0.2\na.b.b/1.2.0\nb.a.b/2.0.0\nb.b.a/2.0.1\n"

    def test_empty_case_rendering(self, M):
        assert write_suite([()], M.inputs) == "eps\n"
        assert read_suite("eps\n", M.inputs) == ((),)

    @given(st.lists(st.lists(st.integers(0, 2), max_size=5).map(tuple), max_size=20))
    def test_prune(self, traces):
        kept = prune_prefixes(traces)
        assert prefix_closure(kept) == prefix_closure(traces)
        for a in kept:
            for b in kept:
                assert a == b or b[: len(a)] != a
