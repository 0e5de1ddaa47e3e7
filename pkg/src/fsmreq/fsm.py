"""Finite state machines: representation, model files, simulation and analysis.

States, inputs and outputs are handled internally as 0-based indices into the
machine's name tables. Traces are tuples of indices. Names only appear at the
I/O boundary (model files, trace strings, reports).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

from fsmreq import kernels

__all__ = [
    "Alphabet",
    "FSM",
    "DFSM",
    "IOTrace",
    "Properties",
    "StateCover",
    "ModelFormatError",
    "parse_fsm",
    "serialize_fsm",
    "after",
    "omega_trace",
    "check_properties",
    "minimize",
    "state_cover",
    "distinguishing_trace",
    "language_equivalent",
    "parse_trace",
    "format_trace",
    "relabel",
]

Trace = tuple  # tuple[int, ...]


class ModelFormatError(ValueError):
    """Malformed model file. Carries the 1-based line and column."""

    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.line = line
        self.column = column
        where = f"line {line}, column {column}: " if line else ""
        super().__init__(where + message)
        self.reason = message


class Alphabet:
    """Ordered set of symbol names."""

    __slots__ = ("symbols", "index")

    def __init__(self, symbols: Iterable[str]):
        symbols = tuple(symbols)
        if not symbols:
            raise ValueError("alphabet must not be empty")
        index = {}
        for i, s in enumerate(symbols):
            if not isinstance(s, str) or not s:
                raise ValueError(f"invalid symbol name {s!r}")
            if s in index:
                raise ValueError(f"duplicate symbol {s!r}")
            index[s] = i
        self.symbols = symbols
        self.index = index

    def __len__(self) -> int:
        return len(self.symbols)

    def __iter__(self):
        return iter(self.symbols)

    def __getitem__(self, i: int) -> str:
        return self.symbols[i]

    def __eq__(self, other) -> bool:
        return isinstance(other, Alphabet) and self.symbols == other.symbols

    def __hash__(self) -> int:
        return hash(self.symbols)

    def __repr__(self) -> str:
        return f"Alphabet({list(self.symbols)!r})"


class IOTrace(NamedTuple):
    inputs: tuple
    outputs: tuple


@dataclass(frozen=True)
class FSM:
    """General (possibly nondeterministic) FSM with an explicit transition set.

    ``transitions`` holds ``(q, x, y, q')`` index quadruples.
    """

    states: tuple
    initial: int
    inputs: Alphabet
    outputs: Alphabet
    transitions: frozenset

    def __post_init__(self):
        n = len(self.states)
        if n == 0:
            raise ValueError("an FSM needs at least one state")
        if not 0 <= self.initial < n:
            raise ValueError("initial state out of range")
        k, o = len(self.inputs), len(self.outputs)
        for q, x, y, t in self.transitions:
            if not (0 <= q < n and 0 <= t < n and 0 <= x < k and 0 <= y < o):
                raise ValueError(f"transition {(q, x, y, t)} out of range")


class DFSM:
    """Deterministic, completely specified FSM.

    ``delta`` and ``omega`` are flat row-major tuples: the cell for state ``q``
    and input ``x`` lives at ``q * len(inputs) + x``. Instances are immutable.
    """

    __slots__ = ("states", "initial", "inputs", "outputs", "delta", "omega", "_cache")

    def __init__(self, states, initial, inputs, outputs, delta, omega):
        states = tuple(states)
        delta = tuple(delta)
        omega = tuple(omega)
        n, k, o = len(states), len(inputs), len(outputs)
        if n == 0:
            raise ValueError("a DFSM needs at least one state")
        if len(set(states)) != n:
            raise ValueError("duplicate state names")
        if not 0 <= initial < n:
            raise ValueError("initial state out of range")
        if len(delta) != n * k or len(omega) != n * k:
            raise ValueError("delta/omega must have one entry per (state, input)")
        if any(not 0 <= t < n for t in delta):
            raise ValueError("transition target out of range")
        if any(not 0 <= y < o for y in omega):
            raise ValueError("output index out of range")
        self._set(states, initial, inputs, outputs, delta, omega)

    def _set(self, states, initial, inputs, outputs, delta, omega):
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "initial", initial)
        object.__setattr__(self, "inputs", inputs)
        object.__setattr__(self, "outputs", outputs)
        object.__setattr__(self, "delta", delta)
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "_cache", {})

    @classmethod
    def _trusted(cls, states, initial, inputs, outputs, delta, omega) -> "DFSM":
        # Skips validation; callers guarantee well-formed tuples.
        obj = cls.__new__(cls)
        obj._set(states, initial, inputs, outputs, delta, omega)
        return obj

    def __setattr__(self, name, value):
        raise AttributeError("DFSM is immutable")

    @property
    def n_states(self) -> int:
        return len(self.states)

    @property
    def n_inputs(self) -> int:
        return len(self.inputs)

    def step(self, q: int, x: int) -> tuple[int, int]:
        """Return ``(target, output)`` for one transition."""
        i = q * len(self.inputs) + x
        return self.delta[i], self.omega[i]

    def transitions(self) -> frozenset:
        k = len(self.inputs)
        return frozenset(
            (q, x, self.omega[q * k + x], self.delta[q * k + x])
            for q in range(len(self.states))
            for x in range(k)
        )

    def to_fsm(self) -> FSM:
        return FSM(self.states, self.initial, self.inputs, self.outputs, self.transitions())

    def state_index(self, name: str) -> int:
        try:
            return self.states.index(name)
        except ValueError:
            raise KeyError(f"unknown state {name!r}") from None

    def __eq__(self, other) -> bool:
        if not isinstance(other, DFSM):
            return NotImplemented
        return (
            self.states == other.states
            and self.initial == other.initial
            and self.inputs == other.inputs
            and self.outputs == other.outputs
            and self.delta == other.delta
            and self.omega == other.omega
        )

    def __hash__(self) -> int:
        return hash((self.states, self.initial, self.delta, self.omega))

    def __repr__(self) -> str:
        return (
            f"DFSM(states={len(self.states)}, inputs={list(self.inputs)}, "
            f"outputs={list(self.outputs)})"
        )


class Properties(NamedTuple):
    deterministic: bool
    completely_specified: bool
    observable: bool


@dataclass(frozen=True)
class StateCover:
    traces: tuple  # BFS order, starts with the empty trace
    target: dict = field(compare=False)

    def __iter__(self):
        return iter(self.traces)

    def __len__(self) -> int:
        return len(self.traces)

    def __contains__(self, trace) -> bool:
        return tuple(trace) in self.target


# ---------------------------------------------------------------------------
# model files


def parse_fsm(text: str) -> DFSM:
    """Parse a model file into a validated DFSM.

    Line 1 is ``state,<in1>,...,<inK>``; every further line is
    ``<state>,<target>/<output>,...``. The first data row is the initial state
    and the output alphabet is ordered by first appearance. An output may be a
    braced class label such as ``{0|1}`` (abstraction files); any other ``|``
    marks a non-deterministic cell and is rejected.
    """
    lines = text.replace("\r\n", "\n").split("\n")
    while lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise ModelFormatError("empty model file", 1, 1)

    header = lines[0].split(",")
    if len(header) < 2 or header[0].strip() != "state":
        raise ModelFormatError("header must be 'state,<input>,...'", 1, 1)
    inputs = [h.strip() for h in header[1:]]
    col = len(header[0]) + 2
    seen_inputs = set()
    for name in inputs:
        if not name or "/" in name:
            raise ModelFormatError(f"bad input name {name!r}", 1, col)
        if name in seen_inputs:
            raise ModelFormatError(f"duplicate input {name!r}", 1, col)
        seen_inputs.add(name)
        col += len(name) + 1
    k = len(inputs)

    rows = []  # (lineno, state name, [(target, output, column)])
    row_of = {}
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        fields = line.split(",")
        name = fields[0].strip()
        if not name or "/" in name:
            raise ModelFormatError("missing or invalid state name", lineno, 1)
        if name in row_of:
            raise ModelFormatError(f"duplicate state row {name!r}", lineno, 1)
        if len(fields) - 1 < k:
            raise ModelFormatError(
                f"missing cell: state {name!r} defines {len(fields) - 1} of {k} inputs "
                "(incompletely specified)",
                lineno,
                len(line) + 1,
            )
        if len(fields) - 1 > k:
            raise ModelFormatError("more cells than inputs in header", lineno, 1)
        cells = []
        col = len(fields[0]) + 2
        for cell in fields[1:]:
            raw = cell.strip()
            if not raw:
                raise ModelFormatError(
                    f"missing cell for state {name!r} (incompletely specified)", lineno, col
                )
            target, _, out = raw.partition("/")
            braced = out.startswith("{") and out.endswith("}")
            if "|" in target or ("|" in out and not braced):
                raise ModelFormatError(
                    f"non-deterministic cell {raw!r} for state {name!r}", lineno, col
                )
            parts = raw.split("/")
            if len(parts) != 2 or not parts[0].strip() or not parts[1].strip():
                raise ModelFormatError(f"cell {raw!r} is not '<target>/<output>'", lineno, col)
            cells.append((parts[0].strip(), parts[1].strip(), col))
            col += len(cell) + 1
        row_of[name] = len(rows)
        rows.append((lineno, name, cells))

    if not rows:
        raise ModelFormatError("model has no states", 2, 1)

    outputs = {}
    delta, omega = [], []
    for lineno, name, cells in rows:
        for target, out, col in cells:
            if target not in row_of:
                raise ModelFormatError(f"unknown target state {target!r}", lineno, col)
            delta.append(row_of[target])
            omega.append(outputs.setdefault(out, len(outputs)))

    return DFSM(
        [r[1] for r in rows], 0, Alphabet(inputs), Alphabet(outputs), delta, omega
    )


def serialize_fsm(m: DFSM) -> str:
    """Render ``m`` in the model file format (initial state first, LF endings)."""
    k = len(m.inputs)
    order = [m.initial] + [q for q in range(m.n_states) if q != m.initial]
    lines = [",".join(["state", *m.inputs.symbols])]
    for q in order:
        cells = (
            f"{m.states[m.delta[q * k + x]]}/{m.outputs[m.omega[q * k + x]]}" for x in range(k)
        )
        lines.append(",".join([m.states[q], *cells]))
    return "\n".join(lines) + "\n"


def relabel(m: DFSM, inputs: Alphabet | None = None, outputs: Alphabet | None = None) -> DFSM:
    """Re-index ``m`` over other input/output orderings.

    ``inputs`` must hold the same symbols as ``m.inputs``; ``outputs`` must
    contain every output of ``m`` and may add unused ones.
    """
    inputs = inputs or m.inputs
    outputs = outputs or m.outputs
    if set(inputs) != set(m.inputs):
        raise ValueError("input alphabets differ")
    missing = set(m.outputs) - set(outputs)
    if missing:
        raise ValueError(f"outputs {sorted(missing)} missing from target alphabet")
    k = len(inputs)
    src = [m.inputs.index[s] for s in inputs]
    ymap = [outputs.index[s] for s in m.outputs]
    ko = len(m.inputs)
    delta, omega = [], []
    for q in range(m.n_states):
        for x in src:
            delta.append(m.delta[q * ko + x])
            omega.append(ymap[m.omega[q * ko + x]])
    return DFSM._trusted(m.states, m.initial, inputs, outputs, tuple(delta), tuple(omega))


def parse_trace(alphabet: Alphabet, text: str) -> Trace:
    """``"a.b.a"`` -> input indices. The empty string and ``"eps"`` mean the empty trace."""
    text = text.strip()
    if text in ("", "eps", "ε"):
        return ()
    try:
        return tuple(alphabet.index[s] for s in text.split("."))
    except KeyError as exc:
        raise ValueError(f"unknown symbol {exc.args[0]!r} in trace {text!r}") from None


def format_trace(alphabet: Alphabet, trace: Sequence[int]) -> str:
    return ".".join(alphabet[i] for i in trace)


# ---------------------------------------------------------------------------
# simulation


def after(m: DFSM, q: int, trace: Sequence[int]) -> int:
    k = len(m.inputs)
    delta = m.delta
    for x in trace:
        q = delta[q * k + x]
    return q


def omega_trace(m: DFSM, q: int, trace: Sequence[int]) -> tuple:
    k = len(m.inputs)
    delta, omega = m.delta, m.omega
    out = []
    for x in trace:
        i = q * k + x
        out.append(omega[i])
        q = delta[i]
    return tuple(out)


def check_properties(m) -> Properties:
    """Judge determinism, complete specification and observability of ``m``."""
    if isinstance(m, DFSM):
        return Properties(True, True, True)
    per_pair: dict = {}
    per_label: dict = {}
    for q, x, y, t in m.transitions:
        per_pair.setdefault((q, x), set()).add((y, t))
        per_label.setdefault((q, x, y), set()).add(t)
    n, k = len(m.states), len(m.inputs)
    deterministic = all(len(v) <= 1 for v in per_pair.values())
    complete = all((q, x) in per_pair for q in range(n) for x in range(k))
    observable = all(len(v) == 1 for v in per_label.values())
    return Properties(deterministic, complete, observable)


# ---------------------------------------------------------------------------
# minimization and covers


def _reachable(m: DFSM) -> list:
    k = len(m.inputs)
    seen = [False] * m.n_states
    seen[m.initial] = True
    order = [m.initial]
    for q in order:
        for x in range(k):
            t = m.delta[q * k + x]
            if not seen[t]:
                seen[t] = True
                order.append(t)
    return order


def equivalence_classes(m: DFSM) -> list:
    """Block id for every state; equal ids mean language-equivalent states.

    Iterated refinement starting from the partition by output rows. Block ids
    are numbered by the smallest state index they contain.
    """
    n, k = m.n_states, len(m.inputs)
    delta, omega = m.delta, m.omega

    def renumber(keys):
        ids: dict = {}
        return [ids.setdefault(key, len(ids)) for key in keys]

    block = renumber(omega[q * k:(q + 1) * k] for q in range(n))
    while True:
        refined = renumber(
            (block[q], tuple(block[delta[q * k + x]] for x in range(k))) for q in range(n)
        )
        if max(refined) == max(block):
            return refined
        block = refined


def minimize(m: DFSM) -> tuple[DFSM, tuple]:
    """Return the prime machine of ``m`` and the state -> class map.

    Classes are numbered in order of their smallest reachable member and named
    after it. States whose class is unreachable map to ``None``.
    """
    k = len(m.inputs)
    block = equivalence_classes(m)
    reach = sorted(_reachable(m))
    cls_of_block: dict = {}
    reps = []
    for q in reach:
        if block[q] not in cls_of_block:
            cls_of_block[block[q]] = len(reps)
            reps.append(q)
    delta, omega = [], []
    for r in reps:
        for x in range(k):
            delta.append(cls_of_block[block[m.delta[r * k + x]]])
            omega.append(m.omega[r * k + x])
    prime = DFSM(
        [m.states[r] for r in reps],
        cls_of_block[block[m.initial]],
        m.inputs,
        m.outputs,
        delta,
        omega,
    )
    return prime, tuple(cls_of_block.get(block[q]) for q in range(m.n_states))


def state_cover(m: DFSM) -> StateCover:
    """Breadth-first minimal state cover; inputs explored in alphabet order."""
    k = len(m.inputs)
    target = {(): m.initial}
    reached = {m.initial: ()}
    queue = deque([()])
    traces = [()]
    while queue:
        v = queue.popleft()
        q = target[v]
        for x in range(k):
            t = m.delta[q * k + x]
            if t not in reached:
                w = v + (x,)
                reached[t] = w
                target[w] = t
                traces.append(w)
                queue.append(w)
    return StateCover(tuple(traces), target)


# ---------------------------------------------------------------------------
# distinguishing traces


class _DistTable:
    """Shortest lexicographically-least distinguishing traces for all state pairs."""

    def __init__(self, m: DFSM):
        n, k = m.n_states, len(m.inputs)
        delta, omega = m.delta, m.omega
        length = [[0] * n for _ in range(n)]  # 0 = not (yet) distinguished
        count = [[0] * n for _ in range(n)]
        first = [[-1] * n for _ in range(n)]
        frontier = []
        for p in range(n):
            for q in range(p + 1, n):
                xs = [x for x in range(k) if omega[p * k + x] != omega[q * k + x]]
                if xs:
                    length[p][q] = length[q][p] = 1
                    count[p][q] = count[q][p] = len(xs)
                    first[p][q] = first[q][p] = xs[0]
                    frontier.append((p, q))
        level = 1
        while frontier:
            level += 1
            frontier = []
            for p in range(n):
                for q in range(p + 1, n):
                    if length[p][q]:
                        continue
                    total, best = 0, -1
                    for x in range(k):
                        a, b = delta[p * k + x], delta[q * k + x]
                        if a != b and length[a][b] == level - 1:
                            total += count[a][b]
                            if best < 0:
                                best = x
                    if best >= 0:
                        frontier.append((p, q))
                        count[p][q] = count[q][p] = total
                        first[p][q] = first[q][p] = best
            for p, q in frontier:
                length[p][q] = length[q][p] = level
        self.length = length
        self.count = count
        self._first = first
        self._m = m
        self._memo: dict = {}

    def trace(self, p: int, q: int):
        if p == q or not self.length[p][q]:
            return None
        key = (p, q) if p < q else (q, p)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        m, k = self._m, len(self._m.inputs)
        out = []
        while True:
            x = self._first[p][q]
            out.append(x)
            if self.length[p][q] == 1:
                break
            p, q = m.delta[p * k + x], m.delta[q * k + x]
        result = tuple(out)
        self._memo[key] = result
        return result


def distinguishing_table(m: DFSM) -> _DistTable:
    table = m._cache.get("dist")
    if table is None:
        table = _DistTable(m)
        m._cache["dist"] = table
    return table


def distinguishing_trace(m: DFSM, p: int, q: int):
    """Shortest (then lexicographically least) input trace separating ``p`` and ``q``.

    Returns ``None`` when the states are equivalent.
    """
    return distinguishing_table(m).trace(p, q)


def language_equivalent(a: DFSM, b: DFSM):
    """``None`` if ``L(a) == L(b)``, else a shortest input trace on which outputs differ."""
    if a.inputs != b.inputs or a.outputs != b.outputs:
        raise ValueError("alphabet mismatch")
    return kernels.first_difference(
        a.delta, a.omega, a.n_states, a.initial,
        b.delta, b.omega, b.n_states, b.initial,
        len(a.inputs),
    )
