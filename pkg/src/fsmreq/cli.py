"""Command-line front end.

    fsmreq generate  [-h | -s | --method M] -a K MODEL [REQ.req | M1.csv] [-o DIR]
    fsmreq check     [-h | -s | --method M] MODEL SUT SUITE [REQ.req | M1.csv]
    fsmreq experiment [-h | -s | --method M] -a K MODEL [REQ] [--seed S --count N] [-o DIR]
    fsmreq abstract  MODEL REQ.req [-o DIR]

``-h`` selects equivalence testing and ``-s`` the exhaustive requirements
method; use ``--help`` for usage. Exit codes: 0 pass, 1 test failure or
guarantee violation, 2 usage error, 3 input format error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from fsmreq.complete import SuiteTooLarge, filter_requirement_suite, reduction_suite
from fsmreq.exhaustive import exhaustive_req_suite, h_suite
from fsmreq.fsm import (
    DFSM,
    Alphabet,
    ModelFormatError,
    format_trace,
    parse_fsm,
    relabel,
    serialize_fsm,
)
from fsmreq.harness import (
    coverage_experiment,
    enumerate_machines,
    mutate,
    run_suite_equiv,
    run_suite_reduction,
    universe_size,
)
from fsmreq.requirements import (
    RequirementError,
    build_m1,
    build_m1_prime,
    build_m2,
    equivalence_requirement,
    parse_requirements,
    requirement_from_m1,
    serialize_requirements,
    validate_requirement,
)
from fsmreq.suite import read_suite, write_expected, write_expected_sets, write_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_FORMAT = 0, 1, 2, 3
METHODS = ("equiv", "req-exh", "req-cmp")
ENUMERATION_LIMIT = 2_000_000


class UsageError(Exception):
    pass


class InputFormatError(Exception):
    pass


def _method_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_mutually_exclusive_group()
    g.add_argument("--method", choices=METHODS)
    g.add_argument("-h", dest="method", action="store_const", const="equiv",
                   help="equivalence testing (H-method style suite)")
    g.add_argument("-s", dest="method", action="store_const", const="req-exh",
                   help="exhaustive requirements-based suite")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fsmreq", add_help=False)
    parser.add_argument("--help", action="help", help="show this help and exit")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", add_help=False, help="generate a test suite")
    g.add_argument("--help", action="help")
    _method_flags(g)
    g.add_argument("-a", "--extra-states", type=int, required=True, dest="extra")
    g.add_argument("model")
    g.add_argument("requirement", nargs="?")
    g.add_argument("-o", "--outdir", default=".")

    c = sub.add_parser("check", add_help=False, help="run a suite against an implementation model")
    c.add_argument("--help", action="help")
    _method_flags(c)
    c.add_argument("model")
    c.add_argument("sut")
    c.add_argument("suite")
    c.add_argument("requirement", nargs="?")

    e = sub.add_parser("experiment", add_help=False, help="coverage experiment")
    e.add_argument("--help", action="help")
    _method_flags(e)
    e.add_argument("-a", "--extra-states", type=int, default=0, dest="extra")
    e.add_argument("model")
    e.add_argument("requirement", nargs="?")
    e.add_argument("--seed", type=int, default=None, help="sample mutants instead of enumerating")
    e.add_argument("--count", type=int, default=10_000)
    e.add_argument("-o", "--outdir", default=".")

    a = sub.add_parser("abstract", add_help=False, help="write M1, M2 and M1' files")
    a.add_argument("--help", action="help")
    a.add_argument("model")
    a.add_argument("requirement")
    a.add_argument("-o", "--outdir", default=".")
    return parser


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _load_model(path: str) -> DFSM:
    try:
        return parse_fsm(_read(path))
    except ModelFormatError as exc:
        raise InputFormatError(f"{path}: {exc}") from None


def _load_requirement(m: DFSM, path: str | None):
    if path is None:
        raise UsageError("this method needs a requirement file or a pre-built abstraction")
    text = _read(path)
    try:
        if path.endswith(".csv"):
            r = requirement_from_m1(m, parse_fsm(text))
        else:
            r = parse_requirements(text, m)
        validate_requirement(m, r)
    except (ModelFormatError, RequirementError) as exc:
        raise InputFormatError(f"{path}: {exc}") from None
    return r


def _method(args) -> str:
    if args.method is None:
        return "req-exh" if getattr(args, "requirement", None) else "equiv"
    return args.method


def _write(outdir: Path, name: str, text: str) -> None:
    outdir.mkdir(parents=True, exist_ok=True)
    (outdir / name).write_text(text, encoding="utf-8", newline="\n")


def _suite_for(method: str, m: DFSM, r, extra: int):
    if method == "equiv":
        return h_suite(m, extra)
    if method == "req-exh":
        return exhaustive_req_suite(m, r, extra)
    rs = reduction_suite(build_m1_prime(m, r), build_m2(build_m1(m, r)), m.n_states + extra)
    return filter_requirement_suite(rs, m, r)


def cmd_generate(args, out) -> int:
    if args.extra < 0:
        raise UsageError("-a must be >= 0")
    method = _method(args)
    m = _load_model(args.model)
    r = _load_requirement(m, args.requirement) if method != "equiv" else None
    try:
        ts = _suite_for(method, m, r, args.extra)
    except SuiteTooLarge as exc:
        raise UsageError(str(exc)) from None
    outdir = Path(args.outdir)
    stem = Path(args.model).stem
    _write(outdir, f"{stem}.{method}.suite", write_suite(ts, m.inputs))
    if method == "req-cmp":
        _write(outdir, f"{stem}.{method}.expected", write_expected_sets(build_m1_prime(m, r), ts))
    else:
        _write(outdir, f"{stem}.{method}.expected", write_expected(m, ts))
    print(f"cases={len(ts)} max_len={ts.max_length}", file=out)
    return EXIT_OK


def _align(m: DFSM, s: DFSM) -> tuple:
    if set(s.inputs) != set(m.inputs):
        raise InputFormatError("implementation and reference use different inputs")
    extra = [y for y in s.outputs if y not in m.outputs.index]
    outputs = Alphabet(list(m.outputs) + extra)
    return relabel(m, outputs=outputs), relabel(s, inputs=m.inputs, outputs=outputs)


def cmd_check(args, out) -> int:
    method = _method(args)
    m = _load_model(args.model)
    s = _load_model(args.sut)
    r = _load_requirement(m, args.requirement) if method == "req-cmp" else None
    try:
        cases = read_suite(_read(args.suite), m.inputs)
    except ValueError as exc:
        raise InputFormatError(f"{args.suite}: {exc}") from None
    m_al, s_al = _align(m, s)
    if method == "req-cmp":
        r_al = parse_requirements(serialize_requirements(r, m), m_al)
        results = run_suite_reduction(s_al, build_m1_prime(m_al, r_al), cases)
    else:
        results = run_suite_equiv(s_al, m_al, cases)
    failed = [res for res in results if not res.passed]
    names = m_al.outputs
    for res in failed:
        i = res.first_divergence
        got = ".".join(names[y] for y in res.observed)
        if method == "req-cmp":
            want = ";".join("{" + "|".join(names[y] for y in sorted(z)) + "}" for z in res.expected)
        else:
            want = ".".join(names[y] for y in res.expected)
        print(
            f"FAIL {format_trace(m.inputs, res.case)} step={i + 1} observed={got} expected={want}",
            file=out,
        )
    print(f"cases={len(results)} passed={len(results) - len(failed)} failed={len(failed)}", file=out)
    return EXIT_OK if not failed else EXIT_FAIL


def cmd_experiment(args, out) -> int:
    if args.extra < 0 or args.count < 0:
        raise UsageError("-a and --count must be >= 0")
    method = _method(args)
    m = _load_model(args.model)
    if method == "equiv":
        r, oracle = equivalence_requirement(m), "equivalence"
        strategy = "exhaustive"
    else:
        r, oracle = _load_requirement(m, args.requirement), "requirement"
        strategy = "complete" if method == "req-cmp" else "exhaustive"
    try:
        if args.seed is None:
            states = m.n_states + args.extra
            total = universe_size(states, len(m.inputs), len(m.outputs))
            if total > ENUMERATION_LIMIT:
                raise UsageError(f"universe of {total} machines is too large; use --seed")
            universe = enumerate_machines(states, m.inputs, m.outputs, cap=None)
            report = coverage_experiment(m, r, args.extra, strategy, universe, total, oracle=oracle)
        else:
            mutants = mutate(m, args.seed, args.count)
            report = coverage_experiment(
                m, r, None, strategy, mutants, len(mutants), seed=args.seed, oracle=oracle
            )
    except SuiteTooLarge as exc:
        raise UsageError(str(exc)) from None
    outdir = Path(args.outdir)
    _write(outdir, f"{Path(args.model).stem}.{method}.report", report.line() + "\n" + report.text())
    print(report.line(), file=out)
    return EXIT_OK if report.ok else EXIT_FAIL


def _serialize_m1_prime(m1p) -> str:
    f = m1p.fsm
    rows = sorted(f.transitions)
    return "".join(
        f"{f.states[q]},{f.inputs[x]},{f.outputs[y]},{f.states[t]}\n" for q, x, y, t in rows
    )


def cmd_abstract(args, out) -> int:
    m = _load_model(args.model)
    r = _load_requirement(m, args.requirement)
    m1 = build_m1(m, r)
    m2 = build_m2(m1)
    stem = Path(args.model).stem
    outdir = Path(args.outdir)
    _write(outdir, f"{stem}.m1.csv", serialize_fsm(m1.machine))
    _write(outdir, f"{stem}.m2.csv", serialize_fsm(m2.prime))
    _write(outdir, f"{stem}.m1prime.txt", _serialize_m1_prime(build_m1_prime(m, r)))
    print(f"m1_states={m1.machine.n_states} m2_states={m2.n_classes}", file=out)
    return EXIT_OK


COMMANDS = {
    "generate": cmd_generate,
    "check": cmd_check,
    "experiment": cmd_experiment,
    "abstract": cmd_abstract,
}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        return COMMANDS[args.command](args, out)
    except UsageError as exc:
        print(f"fsmreq: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InputFormatError as exc:
        print(f"fsmreq: format error: {exc}", file=sys.stderr)
        return EXIT_FORMAT


if __name__ == "__main__":
    sys.exit(main())
