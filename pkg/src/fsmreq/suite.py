"""Test suites, prefix pruning and the suite / expected-results file formats."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from fsmreq.fsm import DFSM, Alphabet, IOTrace, format_trace, omega_trace, parse_trace, serialize_fsm

__all__ = [
    "TestSuite",
    "prune_prefixes",
    "prefix_closure",
    "model_digest",
    "expected_results",
    "write_suite",
    "read_suite",
    "write_expected",
    "write_expected_sets",
    "EMPTY_TRACE",
]

EMPTY_TRACE = "eps"


@dataclass(frozen=True)
class TestSuite:
    """A finite set of input traces plus provenance.

    ``cases`` is sorted by symbol indices and contains no duplicates.
    """

    __test__ = False  # not a pytest class

    cases: tuple
    method: str = ""
    extra_states: int = 0
    model_digest: str = ""
    info: dict = field(default_factory=dict, compare=False)

    def __len__(self) -> int:
        return len(self.cases)

    def __iter__(self):
        return iter(self.cases)

    @property
    def max_length(self) -> int:
        return max((len(c) for c in self.cases), default=0)


def prune_prefixes(traces: Iterable[Sequence[int]]) -> tuple:
    """Drop every trace that is a proper prefix of another one; sorted output."""
    ordered = sorted(set(tuple(t) for t in traces))
    kept = []
    for i, t in enumerate(ordered):
        if i + 1 < len(ordered):
            nxt = ordered[i + 1]
            if len(nxt) > len(t) and nxt[: len(t)] == t:
                continue
        kept.append(t)
    return tuple(kept)


def prefix_closure(traces: Iterable[Sequence[int]]) -> set:
    out = set()
    for t in traces:
        t = tuple(t)
        for i in range(len(t), -1, -1):
            if t[:i] in out:
                break
            out.add(t[:i])
    return out


def model_digest(m: DFSM) -> str:
    return hashlib.sha256(serialize_fsm(m).encode("utf-8")).hexdigest()[:16]


def expected_results(m: DFSM, ts) -> list:
    """Reference output trace for every case, in suite order."""
    return [IOTrace(tuple(c), omega_trace(m, m.initial, c)) for c in ts]


# ---------------------------------------------------------------------------
# files


def _render(alphabet: Alphabet, trace) -> str:
    return format_trace(alphabet, trace) if trace else EMPTY_TRACE


def write_suite(ts, inputs: Alphabet) -> str:
    """One case per line, symbols joined by ``.``, lines sorted lexicographically."""
    return "".join(line + "\n" for line in sorted(_render(inputs, c) for c in ts))


def read_suite(text: str, inputs: Alphabet) -> tuple:
    cases = []
    for line in text.replace("\r\n", "\n").split("\n"):
        line = line.strip()
        if line:
            cases.append(parse_trace(inputs, line))
    return tuple(cases)


def write_expected(m: DFSM, ts) -> str:
    """``<case>/<outputs joined by .>`` lines in suite-file order."""
    rows = []
    for c in ts:
        outs = omega_trace(m, m.initial, c)
        rows.append(
            f"{_render(m.inputs, c)}/{'.'.join(m.outputs[y] for y in outs) if c else EMPTY_TRACE}"
        )
    return "".join(r + "\n" for r in sorted(rows, key=lambda r: r.split("/", 1)[0]))


def write_expected_sets(m1p, ts) -> str:
    """``<case>/{y|y};{y|y};...`` lines: allowed outputs per step from M1'."""
    inputs, outputs = m1p.fsm.inputs, m1p.fsm.outputs
    rows = []
    for c in ts:
        sets = m1p.allowed_trace(c)
        rendered = ";".join("{" + "|".join(outputs[y] for y in sorted(s)) + "}" for s in sets)
        rows.append(f"{_render(inputs, c)}/{rendered if c else EMPTY_TRACE}")
    return "".join(r + "\n" for r in sorted(rows, key=lambda r: r.split("/", 1)[0]))
