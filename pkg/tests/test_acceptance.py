"""Acceptance criteria 1-10, each at its stated tolerance and time budget.

Every criterion prints one ``criterion N: PASS|FAIL ...`` line, both live and in
the terminal summary. Run standalone with ``python3 tests/test_acceptance.py``.
"""

import contextlib
import functools
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

from conftest import ACCEPTANCE  # noqa: E402

from fsmreq import kernels  # noqa: E402
from fsmreq.complete import filter_requirement_suite, reduction_suite  # noqa: E402
from fsmreq.exhaustive import exhaustive_req_suite, h_suite, length_bound, size_bound  # noqa: E402
from fsmreq.fixtures import load_model, load_requirement  # noqa: E402
from fsmreq.fsm import format_trace, language_equivalent, minimize, omega_trace  # noqa: E402
from fsmreq.harness import (  # noqa: E402
    coverage_experiment,
    enumerate_machines,
    mutate,
    run_suite_equiv,
    run_suite_reduction,
    suite_passed,
    universe_size,
)
from fsmreq.requirements import (  # noqa: E402
    build_m1,
    build_m1_prime,
    build_m2,
    equivalence_requirement,
    satisfies_by_reduction,
    satisfies_direct,
    satisfies_oracle,
)

UNIVERSE = 9 ** 6

# Suite-size bands per m - n = 0, 1, 2
BANDS = {
    "H": [(259, 1036), (2035, 8138), (17663, 70650)],
    "R1": [(97, 386), (869, 3474), (7817, 31266)],
    "R2": [(169, 674), (1518, 6070), (13664, 54654)],
}


@contextlib.contextmanager
def criterion(number, title):
    """Record a PASS/FAIL line for the enclosed checks, then re-raise failures."""
    notes = []
    t0 = time.perf_counter()
    try:
        yield notes
    except BaseException as exc:
        line = f"criterion {number}: FAIL {title} ({time.perf_counter() - t0:.1f}s) {exc!s:.200}"
        ACCEPTANCE.append(line)
        print(line)
        raise
    line = f"criterion {number}: PASS {title} ({time.perf_counter() - t0:.1f}s) {'; '.join(notes)}"
    ACCEPTANCE.append(line)
    print(line)


@functools.lru_cache(maxsize=None)
def example():
    m = load_model("example_m.csv")
    return (m, load_model("example_s.csv", like=m), load_model("example_s_prime.csv", like=m),
            load_requirement("example_r.req", m))


@functools.lru_cache(maxsize=None)
def fsb():
    m = load_model("fsbrts.csv")
    return m, load_requirement("fsbrts_r1.req", m), load_requirement("fsbrts_r2.req", m)


@functools.lru_cache(maxsize=None)
def fsb_suite(kind, extra):
    """(suite, seconds to generate and verify)."""
    m, r1, r2 = fsb()
    t0 = time.perf_counter()
    if kind == "H":
        ts = h_suite(m, extra)
    else:
        ts = exhaustive_req_suite(m, r1 if kind == "R1" else r2, extra)
    return ts, time.perf_counter() - t0


def universe(m):
    return enumerate_machines(3, m.inputs, m.outputs)


def test_criterion_01_fsb_structure():
    with criterion(1, "FSB/RTS structure") as notes:
        t0 = time.perf_counter()
        m = load_model("fsbrts.csv")
        r1 = load_requirement("fsbrts_r1.req", m)
        prime, _ = minimize(m)
        m2 = build_m2(build_m1(m, r1))
        elapsed = time.perf_counter() - t0
        assert (m.n_states, len(m.inputs), len(m.outputs)) == (24, 9, 3)
        assert prime.n_states == 24
        assert m2.n_classes == 1
        assert elapsed < 1.0, f"took {elapsed:.2f}s"
        notes.append(f"24 states/9 inputs/3 outputs, prime 24, M2 1 state, {elapsed:.3f}s")


def test_criterion_02_suite_size_bands():
    with criterion(2, "suite-size bands and ordering") as notes:
        for extra in (0, 1, 2):
            sizes = {}
            for kind in ("R1", "R2", "H"):
                ts, secs = fsb_suite(kind, extra)
                lo, hi = BANDS[kind][extra]
                sizes[kind] = len(ts)
                assert lo <= len(ts) <= hi, f"{kind} m-n={extra}: {len(ts)} not in [{lo},{hi}]"
                budget = 60 if extra <= 1 else 900
                assert secs < budget, f"{kind} m-n={extra} took {secs:.0f}s"
            assert sizes["R1"] < sizes["R2"] < sizes["H"], f"ordering broken at m-n={extra}: {sizes}"
            notes.append(f"m-n={extra}: R1={sizes['R1']} R2={sizes['R2']} H={sizes['H']}")


def test_criterion_03_example_reproduction():
    with criterion(3, "small example reproduction") as notes:
        m, s, _, r = example()
        ts = exhaustive_req_suite(m, r, 0)
        assert len(ts) <= 6
        assert suite_passed(run_suite_equiv(s, m, ts))
        failing = [res for res in run_suite_equiv(s, m, h_suite(m, 0)) if not res.passed]
        assert failing, "equivalence suite does not fail S"
        res = failing[0]
        i = res.first_divergence
        prefix = res.case[: i + 1]
        got = ".".join(m.outputs[y] for y in res.observed[: i + 1])
        want = ".".join(m.outputs[y] for y in res.expected[: i + 1])
        assert (format_trace(m.inputs, prefix), got, want) == ("a.a.a", "1.0.1", "1.0.0")
        notes.append(f"{len(ts)} cases pass; S fails on a.a.a/{got}, expected a.a.a/{want}")


def test_criterion_04_exhaustive_brute_force():
    with criterion(4, "exhaustive suite over all 3-state machines") as notes:
        m, _, _, r = example()
        t0 = time.perf_counter()
        rep = coverage_experiment(m, r, 0, "exhaustive", universe(m), UNIVERSE)
        secs = time.perf_counter() - t0
        assert rep.examined == UNIVERSE == universe_size(3, 2, 3)
        assert rep.pass_viol == 0, rep.text()
        assert secs < 600
        notes.append(rep.line() + f" [{kernels.BACKEND}]")


def test_criterion_05_complete_brute_force():
    with criterion(5, "complete suite over all 3-state machines") as notes:
        m, _, _, r = example()
        t0 = time.perf_counter()
        rep = coverage_experiment(m, r, 0, "complete", universe(m), UNIVERSE)
        secs = time.perf_counter() - t0
        assert rep.examined == UNIVERSE
        assert rep.pass_viol == 0 and rep.fail_sat == 0, rep.text()
        assert secs < 900
        notes.append(rep.line() + f" suite={rep.suite_sizes[0]}")


def test_criterion_06_cross_oracle():
    with criterion(6, "direct and inclusion oracles agree") as notes:
        m, _, _, r = example()
        m1p = build_m1_prime(m, r)
        disagree = violated = 0
        for s in universe(m):
            a = satisfies_direct(s, m, r)
            b = satisfies_by_reduction(s, m1p)
            disagree += a != b
            violated += a is not None
        assert disagree == 0, f"{disagree} disagreements"
        notes.append(f"0 disagreements, {violated} violators of {UNIVERSE}")


def test_criterion_07_equivalence_bridge():
    with criterion(7, "equivalence-requirement suite pass set") as notes:
        m, _, _, _ = example()
        ts = exhaustive_req_suite(m, equivalence_requirement(m), 0)
        disagree = equivalent = 0
        for s in universe(m):
            passed = all(omega_trace(s, 0, c) == omega_trace(m, 0, c) for c in ts)
            same = language_equivalent(s, m) is None
            disagree += passed != same
            equivalent += same
        assert disagree == 0, f"{disagree} disagreements"
        notes.append(f"pass set = equivalence set ({equivalent} machines), suite={len(ts)}")


def test_criterion_08_negative_control():
    with criterion(8, "negative control under the reduction criterion") as notes:
        m, _, s_prime, r = example()
        four = exhaustive_req_suite(m, r, 0)
        assert len(four) == 4
        assert suite_passed(run_suite_reduction(s_prime, build_m1_prime(m, r), four))
        w = satisfies_oracle(s_prime, m, r)
        assert w is not None
        assert format_trace(m.inputs, w.inputs) == "b.a.a.b"
        notes.append(f"passes 4 cases, witness b.a.a.b/{'.'.join(m.outputs[y] for y in w.outputs)}")


def test_criterion_09_bounds():
    with criterion(9, "length, size and reduction-formula bounds") as notes:
        m, _, _, r = example()
        checked = 0
        generated = [(m, e, h_suite(m, e)) for e in (0, 1, 2)]
        generated += [(m, e, exhaustive_req_suite(m, r, e)) for e in (0, 1, 2)]
        f, _, _ = fsb()
        generated += [(f, e, fsb_suite(kind, e)[0]) for kind in ("H", "R1", "R2") for e in (0, 1, 2)]
        for mm, e, ts in generated:
            n, k = mm.n_states, len(mm.inputs)
            assert ts.max_length <= length_bound(n, e), (ts.method, e, ts.max_length)
            assert len(ts) <= size_bound(n, k, e), (ts.method, e, len(ts))
            checked += 1
        # reduction suite for the example setting: n'=2, m=3, depth m*n'-n'+1 = 5
        cm = build_m2(build_m1(m, r))
        rs = reduction_suite(build_m1_prime(m, r), cm, 3)
        formula = cm.n_classes * len(m.inputs) ** rs.depth
        full = {v + t for v in rs.cover for t in _words(len(m.inputs), rs.depth)}
        assert (cm.n_classes, rs.depth, formula, len(full)) == (2, 5, 64, 64)
        # prefix pruning merges eps.b.Sigma^4 into b.Sigma^5, leaving 48 <= 64
        assert len(rs) == 48 and len(rs) <= formula
        assert rs.max_length <= 3 * 3
        filt = filter_requirement_suite(rs, m, r)
        assert filt.max_length <= rs.max_length
        notes.append(f"{checked} exhaustive suites in bounds; |V.Sigma^5|={len(full)}=formula, "
                     f"pruned reduction suite {len(rs)} <= {formula}")


def _words(k, n):
    out = [()]
    for _ in range(n):
        out = [w + (x,) for w in out for x in range(k)]
    return out


def test_criterion_10_sampled_mutants():
    with criterion(10, "10000 seeded FSB/RTS mutants") as notes:
        m, r1, _ = fsb()
        t0 = time.perf_counter()
        mutants = mutate(m, 1, 10_000)
        rep = coverage_experiment(m, r1, None, "exhaustive", mutants, len(mutants), seed=1)
        secs = time.perf_counter() - t0
        assert rep.examined == 10_000
        assert rep.pass_viol == 0 and rep.oracle_disagreements == 0, rep.text()
        assert secs < 300
        notes.append(rep.line() + f" suites={rep.suite_sizes}")


if __name__ == "__main__":
    failed = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn()
            except BaseException:  # noqa: BLE001 - line already printed
                failed += 1
    sys.exit(1 if failed else 0)
