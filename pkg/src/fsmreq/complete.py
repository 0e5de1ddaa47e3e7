"""Complete requirements suites: basic reduction suite against M1' and its requirement filter."""

from __future__ import annotations

from dataclasses import dataclass

from fsmreq.fsm import DFSM, state_cover
from fsmreq.requirements import ClassMap, CompositeRequirement, NondetAbstraction
from fsmreq.suite import TestSuite, prune_prefixes

__all__ = [
    "ReductionSuite",
    "SuiteTooLarge",
    "reduction_suite",
    "reduction_depth",
    "filter_requirement_suite",
    "requirement_prefixes",
]

MAX_CASES = 2_000_000


class SuiteTooLarge(ValueError):
    pass


@dataclass(frozen=True)
class ReductionSuite(TestSuite):
    n_prime: int = 0
    bound: int = 0
    depth: int = 0
    cover: tuple = ()


def reduction_depth(n_prime: int, m: int) -> int:
    return m * n_prime - n_prime + 1


def reduction_suite(
    m1p: NondetAbstraction, classmap: ClassMap, m: int, max_cases: int = MAX_CASES
) -> ReductionSuite:
    """``V.Sigma^0..d`` with ``d = m*n' - n' + 1``, pruned to its maximal traces.

    ``V`` is a breadth-first cover of the deterministic target function of
    M1' quotiented by the class map, so ``|V| = n'``. ``m`` bounds the number
    of states of the implementation.
    """
    n_prime = classmap.n_classes
    if m < n_prime:
        raise ValueError(f"state bound m={m} is below n'={n_prime}")
    depth = reduction_depth(n_prime, m)
    k = len(m1p.fsm.inputs)
    cover = state_cover(classmap.prime).traces
    if n_prime * k ** depth > max_cases:
        raise SuiteTooLarge(
            f"{n_prime} * {k}^{depth} cases exceed the limit of {max_cases}"
        )
    layer = [()]
    for _ in range(depth):
        layer = [t + (x,) for t in layer for x in range(k)]
    cases = prune_prefixes(v + t for v in cover for t in layer)
    return ReductionSuite(
        cases,
        method="req-cmp",
        extra_states=m - n_prime,
        n_prime=n_prime,
        bound=m,
        depth=depth,
        cover=cover,
    )


def requirement_prefixes(cases, m: DFSM, r: CompositeRequirement) -> set:
    """All prefixes ``pi.x`` of cases with ``(after(pi), x)`` a requirement pair."""
    k = len(m.inputs)
    pairs = set(r.lookup())
    delta = m.delta
    out = set()
    trie: dict = {}
    for case in cases:
        node = trie
        for x in case:
            node = node.setdefault(x, {})
    stack = [(trie, m.initial, ())]
    while stack:
        node, q, t = stack.pop()
        for x, child in node.items():
            tx = t + (x,)
            if (q, x) in pairs:
                out.add(tx)
            stack.append((child, delta[q * k + x], tx))
    return out


def filter_requirement_suite(ts, m: DFSM, r: CompositeRequirement) -> TestSuite:
    """Keep exactly the requirement traces among the prefixes of ``ts``, then prune."""
    kept = prune_prefixes(requirement_prefixes(ts, m, r))
    extra = ts.extra_states if isinstance(ts, TestSuite) else 0
    return TestSuite(
        kept,
        method="req-cmp",
        extra_states=extra,
        model_digest=ts.model_digest if isinstance(ts, TestSuite) else "",
    )
