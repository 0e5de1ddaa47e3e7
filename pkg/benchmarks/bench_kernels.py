"""Compare the compiled and pure-Python kernels on the desk-scale workloads.

    python3 benchmarks/bench_kernels.py [--machines N]

Each row times one kernel over the first N machines of the 3-state universe
(2 inputs, 3 outputs) against the bundled example model and requirement.
"""

import argparse
import itertools
import time

from fsmreq import kernels
from fsmreq.complete import filter_requirement_suite, reduction_suite
from fsmreq.exhaustive import exhaustive_req_suite
from fsmreq.fixtures import load_model, load_requirement
from fsmreq.fsm import omega_trace
from fsmreq.harness import enumerate_machines
from fsmreq.requirements import build_m1, build_m1_prime, build_m2, requirement_masks


def workloads(n_machines):
    m = load_model("example_m.csv")
    r = load_requirement("example_r.req", m)
    m1p = build_m1_prime(m, r)
    masks = requirement_masks(m, r)
    table = m1p.next_table()
    k, o = len(m.inputs), len(m.outputs)
    machines = list(itertools.islice(enumerate_machines(3, m.inputs, m.outputs), n_machines))

    ts = exhaustive_req_suite(m, r, 0)
    cmp_ts = filter_requirement_suite(reduction_suite(m1p, build_m2(build_m1(m, r)), 3), m, r)

    def pack(cases, sets):
        flat, offsets, exp = [], [0], []
        for c in cases:
            flat.extend(c)
            offsets.append(len(flat))
            if sets:
                exp.extend(sum(1 << y for y in z) for z in m1p.allowed_trace(c))
            else:
                exp.extend(omega_trace(m, m.initial, c))
        return tuple(flat), tuple(offsets), tuple(exp)

    eq = pack(ts, False)
    red = pack(cmp_ts, True)
    return {
        "first_difference": lambda b, s: b.first_difference(
            s.delta, s.omega, 3, 0, m.delta, m.omega, 3, 0, k),
        "violation_direct": lambda b, s: b.violation_direct(
            s.delta, s.omega, 3, 0, m.delta, 3, 0, k, masks),
        "violation_inclusion": lambda b, s: b.violation_inclusion(
            s.delta, s.omega, 3, 0, table, 3, 0, k, o),
        "first_failure_equiv": lambda b, s: b.first_failure_equiv(
            s.delta, s.omega, k, 0, *eq),
        "first_failure_reduction": lambda b, s: b.first_failure_reduction(
            s.delta, s.omega, k, 0, *red),
    }, machines


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--machines", type=int, default=50_000)
    args = ap.parse_args()
    jobs, machines = workloads(args.machines)
    found = kernels.backends()
    print(f"{'kernel':<26}" + "".join(f"{name:>12}" for name in found) + "     speedup")
    for name, job in jobs.items():
        times = {}
        for bname, backend in found.items():
            t = time.perf_counter()
            for s in machines:
                job(backend, s)
            times[bname] = time.perf_counter() - t
        row = f"{name:<26}" + "".join(f"{times[b]:>11.3f}s" for b in found)
        if "cython" in times:
            row += f"  {times['python'] / times['cython']:>8.1f}x"
        print(row)
    print(f"machines per kernel: {len(machines)}")


if __name__ == "__main__":
    main()
