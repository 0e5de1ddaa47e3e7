"""Suite execution under both pass criteria, machine universes and coverage experiments."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, NamedTuple, Optional

from fsmreq import kernels
from fsmreq.complete import filter_requirement_suite, reduction_suite
from fsmreq.exhaustive import exhaustive_req_suite
from fsmreq.fsm import DFSM, Alphabet, _reachable, omega_trace
from fsmreq.requirements import (
    CompositeRequirement,
    NondetAbstraction,
    build_m1,
    build_m1_prime,
    build_m2,
    requirement_masks,
)

__all__ = [
    "CaseResult",
    "CoverageReport",
    "SplitMix64",
    "run_suite_equiv",
    "run_suite_reduction",
    "suite_passed",
    "enumerate_machines",
    "universe_size",
    "mutate",
    "coverage_experiment",
    "STRATEGIES",
]

STRATEGIES = ("exhaustive", "complete")
MAX_COUNTEREXAMPLES = 5


class CaseResult(NamedTuple):
    case: tuple
    observed: tuple
    expected: tuple  # outputs (pass=>) or allowed sets (pass<=>)
    passed: bool
    first_divergence: Optional[int]

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"


def _check_alphabets(s: DFSM, inputs: Alphabet, outputs: Alphabet) -> None:
    if s.inputs != inputs or s.outputs != outputs:
        raise ValueError("alphabet mismatch between implementation and reference")


def run_suite_equiv(s: DFSM, m: DFSM, ts) -> list:
    """pass=>: observed outputs must equal the reference outputs at every step."""
    _check_alphabets(s, m.inputs, m.outputs)
    results = []
    for case in ts:
        case = tuple(case)
        got = omega_trace(s, s.initial, case)
        want = omega_trace(m, m.initial, case)
        div = next((i for i, (a, b) in enumerate(zip(got, want)) if a != b), None)
        results.append(CaseResult(case, got, want, div is None, div))
    return results


def run_suite_reduction(s: DFSM, m1p: NondetAbstraction, ts) -> list:
    """pass<=>: each observed output must lie in the set M1' allows at that step."""
    _check_alphabets(s, m1p.fsm.inputs, m1p.fsm.outputs)
    results = []
    for case in ts:
        case = tuple(case)
        got = omega_trace(s, s.initial, case)
        sets = m1p.allowed_trace(case)
        div = next((i for i, (y, z) in enumerate(zip(got, sets)) if y not in z), None)
        results.append(CaseResult(case, got, sets, div is None, div))
    return results


def suite_passed(results: Iterable[CaseResult]) -> bool:
    return all(r.passed for r in results)


# ---------------------------------------------------------------------------
# universes


def universe_size(states: int, n_inputs: int, n_outputs: int) -> int:
    return (states * n_outputs) ** (states * n_inputs)


def enumerate_machines(
    states: int, inputs: Alphabet, outputs: Alphabet, cap: Optional[int] = 10_000_000
) -> Iterator[DFSM]:
    """Every complete DFSM with ``states`` states over the given alphabets.

    Cells are filled in row-major order; a cell value ``c`` means target
    ``c // |outputs|`` and output ``c % |outputs|``. The last cell varies
    fastest. State 0 is initial; unreachable and equivalent states are kept.
    """
    k, o = len(inputs), len(outputs)
    total = universe_size(states, k, o)
    if cap is not None and total > cap:
        raise ValueError(f"universe of {total} machines exceeds cap {cap}")
    names = tuple(f"s{i}" for i in range(states))
    tgt = [c // o for c in range(states * o)]
    out = [c % o for c in range(states * o)]
    trusted = DFSM._trusted
    for cells in itertools.product(range(states * o), repeat=states * k):
        yield trusted(
            names, 0, inputs, outputs,
            tuple([tgt[c] for c in cells]), tuple([out[c] for c in cells]),
        )


class SplitMix64:
    """64-bit split-mix generator.

    ``state += 0x9E3779B97F4A7C15``; ``z = (z ^ z >> 30) * 0xBF58476D1CE4E5B9``;
    ``z = (z ^ z >> 27) * 0x94D049BB133111EB``; ``return z ^ z >> 31``
    (all arithmetic modulo 2**64).
    """

    MASK = (1 << 64) - 1

    def __init__(self, seed: int):
        self.state = seed & self.MASK

    def next(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & self.MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & self.MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & self.MASK
        return z ^ (z >> 31)

    def below(self, n: int) -> int:
        """Uniform-ish integer in ``[0, n)`` (plain modulo reduction)."""
        return self.next() % n


def _new_state_name(states) -> str:
    name = f"s{len(states)}"
    while name in states:
        name += "'"
    return name


def mutate(m: DFSM, seed: int, count: int) -> list:
    """``count`` mutants of ``m``, each with 1-3 operations drawn from
    output change, target change and (at most once) an added state.

    An added state copies the row of a random existing state and receives one
    redirected cell of a reachable state, so it is reachable itself.
    """
    if count < 0:
        raise ValueError("count must be >= 0")
    rng = SplitMix64(seed)
    k, o = len(m.inputs), len(m.outputs)
    mutants = []
    for _ in range(count):
        states = list(m.states)
        delta, omega = list(m.delta), list(m.omega)
        added = False
        for _ in range(1 + rng.below(3)):
            kind = rng.below(3)
            if kind == 2 and added:
                kind = rng.below(2)
            if kind == 1 and len(states) == 1:
                kind = 0
            if kind == 0 and o == 1:
                kind = 1 if len(states) > 1 else 2
            if kind == 2 and added:
                continue
            n = len(states)
            if kind == 0:
                i = rng.below(n * k)
                omega[i] = (omega[i] + 1 + rng.below(o - 1)) % o
            elif kind == 1:
                i = rng.below(n * k)
                delta[i] = (delta[i] + 1 + rng.below(n - 1)) % n
            else:
                src = rng.below(n)
                delta.extend(delta[src * k:(src + 1) * k])
                omega.extend(omega[src * k:(src + 1) * k])
                states.append(_new_state_name(states))
                tmp = DFSM._trusted(tuple(states), m.initial, m.inputs, m.outputs,
                                    tuple(delta), tuple(omega))
                reach = [q for q in _reachable(tmp) if q != n]
                q = reach[rng.below(len(reach))]
                delta[q * k + rng.below(k)] = n
                added = True
        mutants.append(DFSM(states, m.initial, m.inputs, m.outputs, delta, omega))
    return mutants


# ---------------------------------------------------------------------------
# experiments


@dataclass
class CoverageReport:
    """Outcome tallies of one suite over a machine universe.

    ``pass_viol`` counts machines passing the suite while violating the
    requirement; ``fail_sat`` counts machines failing it while satisfying it.
    """

    strategy: str
    oracle: str = "requirement"
    universe: int = 0
    examined: int = 0
    pass_sat: int = 0
    pass_viol: int = 0
    fail_sat: int = 0
    fail_viol: int = 0
    oracle_disagreements: int = 0
    seed: int = 0
    suite_sizes: dict = field(default_factory=dict)
    counterexamples: list = field(default_factory=list)

    @property
    def violations(self) -> int:
        """Outcomes forbidden by the strategy's guarantee.

        Failing a satisfying machine is allowed for exhaustive suites, except
        when the oracle is language equivalence itself.
        """
        bad = self.pass_viol + self.oracle_disagreements
        if self.strategy != "exhaustive" or self.oracle == "equivalence":
            bad += self.fail_sat
        return bad

    @property
    def ok(self) -> bool:
        return self.violations == 0

    def line(self) -> str:
        return (
            f"universe={self.universe} pass_sat={self.pass_sat} pass_viol={self.pass_viol} "
            f"fail_sat={self.fail_sat} fail_viol={self.fail_viol} seed={self.seed}"
        )

    def text(self) -> str:
        rows = [
            f"strategy: {self.strategy} (oracle: {self.oracle})",
            f"machines examined: {self.examined} of {self.universe}",
            f"  pass and satisfied: {self.pass_sat}",
            f"  pass and violated:  {self.pass_viol}",
            f"  fail and satisfied: {self.fail_sat}",
            f"  fail and violated:  {self.fail_viol}",
            f"oracle disagreements: {self.oracle_disagreements}",
            f"suite sizes by extra states: {dict(sorted(self.suite_sizes.items()))}",
            f"verdict: {'all clear' if self.ok else 'GUARANTEE VIOLATED'}",
        ]
        for idx, why, machine in self.counterexamples:
            rows.append(f"counterexample #{idx} ({why}): {machine!r}")
        return "\n".join(rows) + "\n"


def _flatten(cases) -> tuple:
    flat, offsets = [], [0]
    for c in cases:
        flat.extend(c)
        offsets.append(len(flat))
    return tuple(flat), tuple(offsets)


class _Runner:
    """Suite plus precomputed per-step expectations for one extra-state count."""

    def __init__(self, m: DFSM, r, m1p, strategy: str, extra: int):
        self.strategy = strategy
        if strategy == "exhaustive":
            self.suite = exhaustive_req_suite(m, r, extra)
        else:
            rs = reduction_suite(m1p, build_m2(build_m1(m, r)), m.n_states + extra)
            self.suite = filter_requirement_suite(rs, m, r)
        cases = self.suite.cases
        self.flat, self.offsets = _flatten(cases)
        if strategy == "exhaustive":
            self.expected = tuple(y for c in cases for y in omega_trace(m, m.initial, c))
        else:
            masks = []
            for c in cases:
                for z in m1p.allowed_trace(c):
                    masks.append(sum(1 << y for y in z))
            self.expected = tuple(masks)

    def passes(self, backend, s: DFSM) -> bool:
        k = len(s.inputs)
        if self.strategy == "exhaustive":
            hit = backend.first_failure_equiv(
                s.delta, s.omega, k, s.initial, self.flat, self.offsets, self.expected
            )
        else:
            hit = backend.first_failure_reduction(
                s.delta, s.omega, k, s.initial, self.flat, self.offsets, self.expected
            )
        return hit < 0


def coverage_experiment(
    m: DFSM,
    r: CompositeRequirement,
    extra: Optional[int],
    strategy: str,
    universe: Iterable[DFSM],
    universe_count: Optional[int] = None,
    seed: int = 0,
    oracle: str = "requirement",
) -> CoverageReport:
    """Run the strategy's suite on every machine and tally against the oracle.

    ``extra=None`` sizes the fault domain per machine as ``max(0, |S| - n)``.
    ``oracle="requirement"`` judges satisfaction of ``r`` with both oracle
    routes (disagreements are counted); ``oracle="equivalence"`` judges
    language equivalence with the reference instead.
    """
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}")
    if oracle not in ("requirement", "equivalence"):
        raise ValueError(f"unknown oracle {oracle!r}")
    backend = kernels.for_outputs(len(m.outputs))
    m1p = build_m1_prime(m, r)
    masks = requirement_masks(m, r)
    table = m1p.next_table()
    k, n_out, n = len(m.inputs), len(m.outputs), m.n_states
    runners: dict = {}
    report = CoverageReport(strategy, oracle, seed=seed)

    def runner(e: int) -> _Runner:
        if e not in runners:
            runners[e] = _Runner(m, r, m1p, strategy, e)
            report.suite_sizes[e] = len(runners[e].suite)
        return runners[e]

    if extra is not None:
        runner(extra)
    md, mo, mn, mi = m.delta, m.omega, m.n_states, m.initial
    for idx, s in enumerate(universe):
        if s.inputs != m.inputs or s.outputs != m.outputs:
            raise ValueError("universe machine alphabet differs from the reference")
        e = extra if extra is not None else max(0, s.n_states - n)
        passed = runner(e).passes(backend, s)
        sd, so, sn, si = s.delta, s.omega, s.n_states, s.initial
        if oracle == "requirement":
            direct = backend.violation_direct(sd, so, sn, si, md, mn, mi, k, masks)
            reduced = backend.violation_inclusion(sd, so, sn, si, table, mn, mi, k, n_out)
            if direct != reduced:
                report.oracle_disagreements += 1
                _note(report, idx, "oracle disagreement", s)
            satisfied = direct is None
        else:
            satisfied = backend.first_difference(sd, so, sn, si, md, mo, mn, mi, k) is None
        if passed and satisfied:
            report.pass_sat += 1
        elif passed:
            report.pass_viol += 1
            _note(report, idx, "passes but violates", s)
        elif satisfied:
            report.fail_sat += 1
            if strategy != "exhaustive" or oracle == "equivalence":
                _note(report, idx, "fails but satisfies", s)
        else:
            report.fail_viol += 1
        report.examined += 1
    report.universe = universe_count if universe_count is not None else report.examined
    return report


def _note(report: CoverageReport, idx: int, why: str, s: DFSM) -> None:
    if len(report.counterexamples) < MAX_COUNTEREXAMPLES:
        report.counterexamples.append((idx, why, s))
