"""Requirements on a reference DFSM and the abstractions they induce.

An elementary requirement ``(q, x, Z)`` says: whenever the implementation is in
a state corresponding to reference state ``q`` and receives ``x``, it must
answer with an output from ``Z``. A composite requirement is a conjunction of
elementary ones.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from fsmreq import kernels
from fsmreq.fsm import DFSM, FSM, Alphabet, IOTrace, after, minimize

__all__ = [
    "ElementaryRequirement",
    "CompositeRequirement",
    "RequirementError",
    "AllowedSetIsFullAlphabet",
    "ExpectedOutputNotAllowed",
    "DuplicateStateInputPair",
    "UnknownState",
    "UnknownInput",
    "UnknownOutput",
    "EmptyRequirement",
    "RequirementFormatError",
    "AbstractDFSM",
    "ClassMap",
    "NondetAbstraction",
    "parse_requirements",
    "serialize_requirements",
    "validate_requirement",
    "equivalence_requirement",
    "build_m1",
    "build_m2",
    "build_m1_prime",
    "requirement_from_m1",
    "satisfies_oracle",
    "satisfies_direct",
    "satisfies_by_reduction",
    "is_requirement_trace",
    "OracleDisagreement",
]

DONT_CARE = "*"


class RequirementError(ValueError):
    pass


class AllowedSetIsFullAlphabet(RequirementError):
    pass


class ExpectedOutputNotAllowed(RequirementError):
    pass


class DuplicateStateInputPair(RequirementError):
    pass


class UnknownState(RequirementError):
    pass


class UnknownInput(RequirementError):
    pass


class UnknownOutput(RequirementError):
    pass


class EmptyRequirement(RequirementError):
    pass


class RequirementFormatError(RequirementError):
    def __init__(self, message: str, line: int):
        self.line = line
        super().__init__(f"line {line}: {message}")


class OracleDisagreement(AssertionError):
    """The direct and the reduction-based satisfaction checks disagreed."""


@dataclass(frozen=True)
class ElementaryRequirement:
    state: int
    input: int
    allowed: frozenset


@dataclass(frozen=True)
class CompositeRequirement:
    items: tuple

    def __len__(self) -> int:
        return len(self.items)

    def __iter__(self):
        return iter(self.items)

    def lookup(self) -> dict:
        """``(state, input) -> allowed`` for all items."""
        return {(r.state, r.input): r.allowed for r in self.items}


# ---------------------------------------------------------------------------
# requirement files


def _render_set(outputs: Alphabet, ys) -> str:
    return "{" + "|".join(outputs[y] for y in sorted(ys)) + "}"


def parse_requirements(text: str, m: DFSM) -> CompositeRequirement:
    """Parse ``<state>,<input>,{<out>|<out>...}`` lines against the names of ``m``.

    Blank lines and ``#`` comments are skipped. Names are resolved, not
    validated; see :func:`validate_requirement`.
    """
    state_index = {name: i for i, name in enumerate(m.states)}
    items = []
    for lineno, raw in enumerate(text.replace("\r\n", "\n").split("\n"), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split(",", 2)
        if len(parts) != 3:
            raise RequirementFormatError("expected '<state>,<input>,{<outputs>}'", lineno)
        state, inp, outs = (p.strip() for p in parts)
        if not (outs.startswith("{") and outs.endswith("}")):
            raise RequirementFormatError(f"allowed set {outs!r} must be braced", lineno)
        if state not in state_index:
            raise UnknownState(f"line {lineno}: unknown state {state!r}")
        if inp not in m.inputs.index:
            raise UnknownInput(f"line {lineno}: unknown input {inp!r}")
        names = [o.strip() for o in outs[1:-1].split("|") if o.strip()]
        if not names:
            raise EmptyRequirement(f"line {lineno}: empty allowed set")
        try:
            allowed = frozenset(m.outputs.index[o] for o in names)
        except KeyError as exc:
            raise UnknownOutput(f"line {lineno}: unknown output {exc.args[0]!r}") from None
        items.append(ElementaryRequirement(state_index[state], m.inputs.index[inp], allowed))
    return CompositeRequirement(tuple(items))


def serialize_requirements(r: CompositeRequirement, m: DFSM) -> str:
    return "".join(
        f"{m.states[i.state]},{m.inputs[i.input]},{_render_set(m.outputs, i.allowed)}\n"
        for i in r.items
    )


def _describe(m: DFSM, item: ElementaryRequirement) -> str:
    return f"R({m.states[item.state]},{m.inputs[item.input]},{_render_set(m.outputs, item.allowed)})"


def validate_requirement(m: DFSM, r: CompositeRequirement) -> None:
    """Raise a :class:`RequirementError` subclass unless ``r`` is well formed on ``m``."""
    if not r.items:
        raise EmptyRequirement("a composite requirement needs at least one item")
    n, k, o = m.n_states, len(m.inputs), len(m.outputs)
    seen = set()
    for item in r.items:
        if not 0 <= item.state < n:
            raise UnknownState(f"state index {item.state} out of range")
        if not 0 <= item.input < k:
            raise UnknownInput(f"input index {item.input} out of range")
        if not item.allowed:
            raise EmptyRequirement(f"empty allowed set in {_describe(m, item)}")
        if any(not 0 <= y < o for y in item.allowed):
            raise UnknownOutput(f"output index out of range in requirement item {item}")
        if len(item.allowed) == o:
            raise AllowedSetIsFullAlphabet(f"{_describe(m, item)} allows every output")
        expected = m.omega[item.state * k + item.input]
        if expected not in item.allowed:
            raise ExpectedOutputNotAllowed(
                f"{_describe(m, item)}: reference output {m.outputs[expected]} is not allowed"
            )
        key = (item.state, item.input)
        if key in seen:
            raise DuplicateStateInputPair(f"{_describe(m, item)} repeats a (state, input) pair")
        seen.add(key)


def equivalence_requirement(m: DFSM) -> CompositeRequirement:
    """The requirement pinning every transition to its reference output."""
    k = len(m.inputs)
    return CompositeRequirement(
        tuple(
            ElementaryRequirement(q, x, frozenset([m.omega[q * k + x]]))
            for q in range(m.n_states)
            for x in range(k)
        )
    )


# ---------------------------------------------------------------------------
# abstractions


@dataclass(frozen=True)
class AbstractDFSM:
    """Output abstraction M1 of a reference model.

    ``machine`` has the reference's states and transitions; its output
    alphabet holds class labels (``*`` first, then each distinct allowed set in
    item order). ``allowed[q * k + x]`` is the concrete output set of a cell,
    the full output alphabet for don't-care cells.
    """

    machine: DFSM
    reference: DFSM
    requirement: CompositeRequirement
    classes: tuple  # label index -> frozenset of concrete outputs
    allowed: tuple

    def label(self, q: int, x: int) -> str:
        return self.machine.outputs[self.machine.omega[q * len(self.machine.inputs) + x]]


def build_m1(m: DFSM, r: CompositeRequirement) -> AbstractDFSM:
    k = len(m.inputs)
    full = frozenset(range(len(m.outputs)))
    classes = [full]
    labels = [DONT_CARE]
    label_of = {}
    omega = [0] * (m.n_states * k)
    for item in r.items:
        z = frozenset(item.allowed)
        if z not in label_of:
            label_of[z] = len(classes)
            classes.append(z)
            labels.append(_render_set(m.outputs, z))
        omega[item.state * k + item.input] = label_of[z]
    machine = DFSM(m.states, m.initial, m.inputs, Alphabet(labels), m.delta, omega)
    allowed = tuple(classes[c] for c in omega)
    return AbstractDFSM(machine, m, r, tuple(classes), allowed)


def requirement_from_m1(m: DFSM, m1: DFSM) -> CompositeRequirement:
    """Recover the requirement encoded by a pre-built M1 model.

    ``m1`` must share states, inputs and transitions with ``m``; its outputs are
    ``*`` or braced sets of ``m``'s output names.
    """
    if m1.states != m.states or m1.inputs != m.inputs or m1.delta != m.delta:
        raise RequirementError("abstraction does not match the reference model's transitions")
    k = len(m.inputs)
    items = []
    for q in range(m.n_states):
        for x in range(k):
            label = m1.outputs[m1.omega[q * k + x]]
            if label == DONT_CARE:
                continue
            if not (label.startswith("{") and label.endswith("}")):
                raise RequirementError(f"abstract output {label!r} is neither '*' nor a set")
            names = [s for s in label[1:-1].split("|") if s]
            try:
                allowed = frozenset(m.outputs.index[s] for s in names)
            except KeyError as exc:
                raise UnknownOutput(f"unknown output {exc.args[0]!r} in abstraction") from None
            items.append(ElementaryRequirement(q, x, allowed))
    return CompositeRequirement(tuple(items))


@dataclass(frozen=True)
class ClassMap:
    """Prime machine M2 of M1 with the state -> class map.

    ``requirements_of[c]`` lists the ``(input, allowed)`` pairs carried by the
    members of class ``c``.
    """

    prime: DFSM
    class_of: tuple
    members: tuple
    requirements_of: tuple

    @property
    def n_classes(self) -> int:
        return self.prime.n_states


def build_m2(m1: AbstractDFSM) -> ClassMap:
    prime, class_of = minimize(m1.machine)
    members = [[] for _ in range(prime.n_states)]
    for q, c in enumerate(class_of):
        if c is not None:
            members[c].append(q)
    carried = [set() for _ in range(prime.n_states)]
    for item in m1.requirement.items:
        c = class_of[item.state]
        if c is not None:
            carried[c].add((item.input, item.allowed))
    return ClassMap(
        prime,
        class_of,
        tuple(tuple(ms) for ms in members),
        tuple(tuple(sorted(c, key=lambda p: (p[0], sorted(p[1])))) for c in carried),
    )


@dataclass(frozen=True)
class NondetAbstraction:
    """Observable nondeterministic abstraction M1' over the concrete outputs."""

    fsm: FSM
    target: tuple  # deterministic target per (q, x), shared with the reference
    allowed: tuple  # allowed concrete outputs per (q, x)

    def next_table(self) -> tuple:
        """``(q * k + x) * |outputs| + y -> target`` or -1 when no such transition."""
        cached = self.__dict__.get("_next")
        if cached is None:
            o = len(self.fsm.outputs)
            k = len(self.fsm.inputs)
            table = [-1] * (len(self.fsm.states) * k * o)
            for q, x, y, t in self.fsm.transitions:
                table[(q * k + x) * o + y] = t
            cached = tuple(table)
            object.__setattr__(self, "_next", cached)
        return cached

    def allowed_trace(self, trace: Sequence[int]) -> tuple:
        """Per-step allowed output sets along ``trace`` from the initial state."""
        k = len(self.fsm.inputs)
        q = self.fsm.initial
        out = []
        for x in trace:
            out.append(self.allowed[q * k + x])
            q = self.target[q * k + x]
        return tuple(out)


def build_m1_prime(m: DFSM, r: CompositeRequirement) -> NondetAbstraction:
    k = len(m.inputs)
    full = frozenset(range(len(m.outputs)))
    allowed = [full] * (m.n_states * k)
    for item in r.items:
        allowed[item.state * k + item.input] = frozenset(item.allowed)
    transitions = frozenset(
        (q, x, y, m.delta[q * k + x])
        for q in range(m.n_states)
        for x in range(k)
        for y in allowed[q * k + x]
    )
    fsm = FSM(m.states, m.initial, m.inputs, m.outputs, transitions)
    return NondetAbstraction(fsm, m.delta, tuple(allowed))


# ---------------------------------------------------------------------------
# satisfaction


def _mask(ys) -> int:
    out = 0
    for y in ys:
        out |= 1 << y
    return out


def requirement_masks(m: DFSM, r: CompositeRequirement) -> tuple:
    """Allowed-output bitmask per reference cell, 0 where unconstrained."""
    k = len(m.inputs)
    masks = [0] * (m.n_states * k)
    for item in r.items:
        masks[item.state * k + item.input] = _mask(item.allowed)
    return tuple(masks)


def _check_alphabets(s: DFSM, m: DFSM) -> None:
    if s.inputs != m.inputs or s.outputs != m.outputs:
        raise ValueError("alphabet mismatch")


def satisfies_direct(s: DFSM, m: DFSM, r: CompositeRequirement, masks=None):
    """Check every item against all implementation states paired with its reference state."""
    _check_alphabets(s, m)
    if masks is None:
        masks = requirement_masks(m, r)
    backend = kernels.for_outputs(len(m.outputs))
    hit = backend.violation_direct(
        s.delta, s.omega, s.n_states, s.initial,
        m.delta, m.n_states, m.initial, len(m.inputs), masks,
    )
    return None if hit is None else IOTrace(*hit)


def satisfies_by_reduction(s: DFSM, m1p: NondetAbstraction, table=None):
    """Language inclusion of ``s`` in M1'; returns the shortest escaping I/O trace."""
    f = m1p.fsm
    if s.inputs != f.inputs or s.outputs != f.outputs:
        raise ValueError("alphabet mismatch")
    if table is None:
        table = m1p.next_table()
    backend = kernels.for_outputs(len(f.outputs))
    out = backend.violation_inclusion(
        s.delta, s.omega, s.n_states, s.initial,
        table, len(f.states), f.initial, len(f.inputs), len(f.outputs),
    )
    return None if out is None else IOTrace(*out)


def satisfies_oracle(s: DFSM, m: DFSM, r: CompositeRequirement, m1p=None):
    """``None`` if ``s`` satisfies ``r``; otherwise a shortest violating I/O trace of ``s``.

    Runs the direct check and the language-inclusion check against M1' and
    raises :class:`OracleDisagreement` if they differ.
    """
    if m1p is None:
        m1p = build_m1_prime(m, r)
    direct = satisfies_direct(s, m, r)
    reduced = satisfies_by_reduction(s, m1p)
    if direct != reduced:
        raise OracleDisagreement(f"direct={direct} reduction={reduced}")
    return direct


def is_requirement_trace(m: DFSM, r: CompositeRequirement, trace: Sequence[int]) -> bool:
    """True iff ``trace = pi.x`` where ``pi`` reaches some ``q_i`` and ``x = x_i``."""
    if not trace:
        return False
    q = after(m, m.initial, trace[:-1])
    return (q, trace[-1]) in r.lookup()
