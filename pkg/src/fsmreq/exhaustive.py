"""Language-equivalence (H-method style) and exhaustive requirements-based suites.

Both generators share one construction. Starting from a breadth-first state
cover ``V`` of the reference model and the fault-domain bound
``m = n + extra_states``:

* the core set ``V.Sigma^i`` for ``i = 0..m-n+1`` is added first;
* every trace pair in ``A = V x V`` whose targets differ in the reference, and
  every pair in ``B = V x W`` and ``C = {(a, b) in W x W | a proper prefix of b}``
  (``W = V.Sigma^i``, ``i = 1..m-n+1``) whose targets differ in the class map,
  gets a separating extension ``g`` with both ``a.g`` and ``b.g`` in the suite.

For equivalence testing the class map is the reference itself; for
requirements testing it is the prime machine of the output abstraction M1.
Extensions always separate the two targets in the reference model.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from fsmreq.fsm import DFSM, after, distinguishing_table, minimize, omega_trace, state_cover
from fsmreq.requirements import (
    AbstractDFSM,
    CompositeRequirement,
    build_m1,
    build_m2,
    validate_requirement,
)
from fsmreq.suite import TestSuite, model_digest

__all__ = [
    "PairSets",
    "compute_pair_sets",
    "h_suite",
    "exhaustive_req_suite",
    "verify_exhaustive_suite",
    "SuiteVerificationError",
    "length_bound",
    "size_bound",
]

# Nodes of the union subtree below a pair that are examined for reusable
# separating extensions.
SEARCH_BUDGET = 48


class SuiteVerificationError(AssertionError):
    pass


def length_bound(n: int, extra: int) -> int:
    return n + (n + extra) - 1


def size_bound(n: int, k: int, extra: int) -> int:
    return n * n * k ** (extra + 1)


@dataclass
class PairSets:
    """Trace-pair sets for one (reference, abstraction, cover, extra) setting.

    Pairs are stored once as ``(a, b)`` with ``a`` before ``b`` in the
    enumeration order; the separating set is symmetric. ``witness`` maps every
    filtered pair to the shortest, lexicographically least separating trace.
    """

    A: set
    B: set
    C: set
    A_M: set
    B_M1: set
    C_M1: set
    witness: dict = field(repr=False)

    def filtered(self) -> set:
        return self.A_M | self.B_M1 | self.C_M1


def _extensions(k: int, depth: int, lo: int = 1):
    """All input traces with length in ``lo..depth``, shortest first."""
    layer = [()]
    out = [()] if lo == 0 else []
    for d in range(1, depth + 1):
        layer = [t + (x,) for t in layer for x in range(k)]
        if d >= lo:
            out.extend(layer)
    return out


def _cover_and_tails(m: DFSM, extra: int):
    v = state_cover(m)
    ext = _extensions(len(m.inputs), extra + 1)
    seen = set()
    tails = []
    for a in v.traces:
        for e in ext:
            t = a + e
            if t not in seen:
                seen.add(t)
                tails.append(t)
    return v, tails


def compute_pair_sets(m: DFSM, m1, v=None, extra_states: int = 0) -> PairSets:
    """Enumerate A, B, C and their filtered variants.

    ``m1`` is an :class:`AbstractDFSM` (or any DFSM with the reference's
    states and transitions whose outputs define the abstraction).
    """
    if extra_states < 0:
        raise ValueError("extra_states must be >= 0")
    machine = m1.machine if isinstance(m1, AbstractDFSM) else m1
    _, class_of = minimize(machine)
    if v is None:
        v = state_cover(m)
    traces = list(v.traces)
    tails = []
    seen = set()
    for a in traces:
        for e in _extensions(len(m.inputs), extra_states + 1):
            t = a + e
            if t not in seen:
                seen.add(t)
                tails.append(t)
    tail_set = set(tails)
    table = distinguishing_table(m)
    target = {}

    def tgt(t):
        q = target.get(t)
        if q is None:
            q = target[t] = after(m, m.initial, t)
        return q

    A = {(a, b) for a in traces for b in traces}
    B = {(a, b) for a in traces for b in tails}
    C = set()
    for b in tails:
        for i in range(1, len(b)):
            if b[:i] in tail_set:
                C.add((b[:i], b))
    A_M = {(a, b) for a, b in A if table.length[tgt(a)][tgt(b)]}

    def sep_m1(pair):
        a, b = pair
        return class_of[tgt(a)] != class_of[tgt(b)]

    B_M1 = set(filter(sep_m1, B))
    C_M1 = set(filter(sep_m1, C))
    witness = {}
    for a, b in A_M | B_M1 | C_M1:
        witness[(a, b)] = table.trace(tgt(a), tgt(b))
    return PairSets(A, B, C, A_M, B_M1, C_M1, witness)


# ---------------------------------------------------------------------------
# generation


class _Tree:
    """Prefix tree of the suite under construction; node 0 is the empty trace."""

    def __init__(self, m: DFSM):
        self.m = m
        self.k = len(m.inputs)
        self.children = [{}]
        self.state = [m.initial]

    def add(self, node: int, trace) -> int:
        children, state, k, delta = self.children, self.state, self.k, self.m.delta
        for x in trace:
            nxt = children[node].get(x)
            if nxt is None:
                nxt = len(children)
                children.append({})
                state.append(delta[state[node] * k + x])
                children[node][x] = nxt
            node = nxt
        return node

    def cost(self, node: int, trace) -> tuple:
        """``(new cases, new symbols)`` incurred by adding ``trace`` below ``node``."""
        children = self.children
        for i, x in enumerate(trace):
            nxt = children[node].get(x)
            if nxt is None:
                leaf = not children[node] and node != 0
                return (0 if leaf else 1, len(trace) - i)
            node = nxt
        return (0, 0)

    def leaves(self) -> list:
        out = []
        stack = [(0, ())]
        while stack:
            node, t = stack.pop()
            kids = self.children[node]
            if not kids:
                out.append(t)
            for x, c in kids.items():
                stack.append((c, t + (x,)))
        return out


def _attach_cost(tree: _Tree, side, tail) -> tuple:
    node, attach, missing = side
    if node >= 0:
        return tree.cost(node, tail)
    leaf = not tree.children[attach] and attach != 0
    return (0 if leaf else 1, missing + len(tail))


def _choose_extension(tree: _Tree, table, na: int, nb: int, limit: int):
    """Cheapest separating extension for the pair at tree nodes ``na``/``nb``.

    Candidates are separating traces running through the existing subtrees
    below either node, completed by a shortest separating suffix, and no
    longer than ``limit``. Ranked by new cases, then new symbols, then length,
    then symbol order.
    """
    m, k = tree.m, tree.k
    delta, omega, children = m.delta, m.omega, tree.children
    best = None
    queue = [((na, na, 0), (nb, nb, 0), tree.state[na], tree.state[nb], ())]
    budget = SEARCH_BUDGET
    for sa, sb, p, q, g in queue:
        if best is not None and best[0] == 0 and best[1] == 0 and len(g) >= best[2]:
            break
        d = table.trace(p, q)
        gamma = g + d
        if len(gamma) <= limit:
            ca = _attach_cost(tree, sa, d)
            cb = _attach_cost(tree, sb, d)
            key = (ca[0] + cb[0], ca[1] + cb[1], len(gamma), gamma)
            if best is None or key < best:
                best = key
        if budget <= 0 or len(g) >= limit:
            continue
        budget -= 1
        xs = set()
        if sa[0] >= 0:
            xs.update(children[sa[0]])
        if sb[0] >= 0:
            xs.update(children[sb[0]])
        for x in sorted(xs):
            i, j = p * k + x, q * k + x
            step = g + (x,)
            if omega[i] != omega[j]:
                ca = _attach_cost(tree, sa, (x,))
                cb = _attach_cost(tree, sb, (x,))
                key = (ca[0] + cb[0], ca[1] + cb[1], len(step), step)
                if best is None or key < best:
                    best = key
                continue
            p2, q2 = delta[i], delta[j]
            if p2 == q2:
                continue
            queue.append((_descend(children, sa, x), _descend(children, sb, x), p2, q2, step))
    return best[3]


def _descend(children, side, x):
    node, attach, missing = side
    if node >= 0:
        nxt = children[node].get(x)
        if nxt is not None:
            return (nxt, nxt, 0)
        return (-1, node, 1)
    return (-1, attach, missing + 1)


def _check_prime(m: DFSM) -> None:
    prime, _ = minimize(m)
    if prime.n_states != m.n_states:
        raise ValueError("the reference model must be prime (reachable and minimal)")


def _generate(m: DFSM, class_of, extra: int, method: str) -> tuple:
    if extra < 0:
        raise ValueError("extra_states must be >= 0")
    _check_prime(m)
    table = distinguishing_table(m)
    v, tails = _cover_and_tails(m, extra)
    tree = _Tree(m)
    node_of = {}
    for t in v.traces:
        node_of[t] = tree.add(0, t)
    for t in tails:
        node_of[t] = tree.add(0, t)
    tail_set = set(tails)

    state = tree.state
    pairs = {}

    def push(a, b):
        na, nb = node_of[a], node_of[b]
        if na == nb:
            return
        key = (na, nb) if na < nb else (nb, na)
        if key not in pairs:
            pairs[key] = len(pairs)

    cover = v.traces
    for i, a in enumerate(cover):
        for b in cover[i + 1:]:
            if table.length[state[node_of[a]]][state[node_of[b]]]:
                push(a, b)
    for a in cover:
        ca = class_of[state[node_of[a]]]
        for b in tails:
            if class_of[state[node_of[b]]] != ca:
                push(a, b)
    for b in tails:
        cb = class_of[state[node_of[b]]]
        for i in range(1, len(b)):
            a = b[:i]
            if a in tail_set and class_of[state[node_of[a]]] != cb:
                push(a, b)

    count = table.count
    order = sorted(pairs, key=lambda pr: (count[state[pr[0]]][state[pr[1]]], pairs[pr]))
    # a tail is at most n + extra long and a shortest separator at most n - 1,
    # so the root candidate always fits under the case-length bound
    bound = length_bound(m.n_states, extra)
    depth = {node_of[t]: len(t) for t in node_of}
    for na, nb in order:
        limit = bound - max(depth[na], depth[nb])
        gamma = _choose_extension(tree, table, na, nb, limit)
        tree.add(na, gamma)
        tree.add(nb, gamma)

    cases = tuple(sorted(tree.leaves()))
    return TestSuite(
        cases,
        method=method,
        extra_states=extra,
        model_digest=model_digest(m),
        info={"pairs": len(pairs)},
    )


def h_suite(m: DFSM, extra_states: int = 0, verify: bool = True) -> TestSuite:
    """Suite complete for language equivalence over DFSMs with ``n + extra_states`` states."""
    suite = _generate(m, tuple(range(m.n_states)), extra_states, "equiv")
    if verify:
        verify_exhaustive_suite(m, m, suite, extra_states)
    return suite


def exhaustive_req_suite(
    m: DFSM, r: CompositeRequirement, extra_states: int = 0, verify: bool = True
) -> TestSuite:
    """Suite whose pass under strict output equality implies satisfaction of ``r``."""
    validate_requirement(m, r)
    m1 = build_m1(m, r)
    classes = build_m2(m1).class_of
    suite = _generate(m, classes, extra_states, "req-exh")
    if verify:
        verify_exhaustive_suite(m, m1.machine, suite, extra_states)
    return suite


# ---------------------------------------------------------------------------
# independent structural check


def _m1_separable(abstraction: DFSM) -> list:
    """Pairwise separability in the abstraction, by product search per state pair."""
    from fsmreq import kernels

    n, k = abstraction.n_states, len(abstraction.inputs)
    sep = [[False] * n for _ in range(n)]
    for p in range(n):
        for q in range(p + 1, n):
            hit = kernels.first_difference(
                abstraction.delta, abstraction.omega, n, p,
                abstraction.delta, abstraction.omega, n, q, k,
            )
            sep[p][q] = sep[q][p] = hit is not None
    return sep


def verify_exhaustive_suite(m: DFSM, abstraction: DFSM, suite, extra_states: int) -> None:
    """Re-check the core-set and pair-extension conditions from scratch.

    Every core trace must be a prefix of a case, and every pair in
    ``A(M) | B(M1) | C(M1)`` must have some extension ``g`` separating the
    targets in ``m`` with ``a.g`` and ``b.g`` both prefixes of cases.
    Also enforces the case-length and suite-size bounds. Raises
    :class:`SuiteVerificationError`.
    """
    n, k = m.n_states, len(m.inputs)
    trie: dict = {}
    for case in suite:
        node = trie
        for x in case:
            node = node.setdefault(x, {})

    def find(t):
        node = trie
        for x in t:
            node = node.get(x)
            if node is None:
                return None
        return node

    cover = state_cover(m).traces
    for t in cover:
        if find(t) is None:
            raise SuiteVerificationError(f"state cover trace {t} missing")
    depth = extra_states + 1
    tails = set()
    for a in cover:
        frontier = [a]
        for _ in range(depth):
            frontier = [t + (x,) for t in frontier for x in range(k)]
            for t in frontier:
                if find(t) is None:
                    raise SuiteVerificationError(f"core trace {t} missing")
            tails.update(frontier)

    m1_sep = _m1_separable(abstraction)
    delta, omega = m.delta, m.omega

    def separated(a, b) -> bool:
        p, q = after(m, m.initial, a), after(m, m.initial, b)
        stack = [(find(a), find(b), p, q)]
        while stack:
            ta, tb, p, q = stack.pop()
            for x, child in ta.items():
                other = tb.get(x)
                if other is None:
                    continue
                if omega[p * k + x] != omega[q * k + x]:
                    return True
                stack.append((child, other, delta[p * k + x], delta[q * k + x]))
        return False

    checked = set()

    def check(a, b):
        if a == b or (a, b) in checked or (b, a) in checked:
            return
        checked.add((a, b))
        if not separated(a, b):
            raise SuiteVerificationError(f"pair {a} / {b} lacks a separating extension")

    for i, a in enumerate(cover):
        for b in cover[i + 1:]:
            check(a, b)
    tgt = {t: after(m, m.initial, t) for t in tails | set(cover)}
    for a in cover:
        for b in tails:
            if m1_sep[tgt[a]][tgt[b]]:
                check(a, b)
    for b in tails:
        for i in range(1, len(b)):
            a = b[:i]
            if a in tails and m1_sep[tgt[a]][tgt[b]]:
                check(a, b)

    longest = suite.max_length if isinstance(suite, TestSuite) else max(map(len, suite), default=0)
    if longest > length_bound(n, extra_states):
        raise SuiteVerificationError(f"case of length {longest} exceeds n + m - 1")
    if len(suite) > size_bound(n, k, extra_states):
        raise SuiteVerificationError("suite exceeds the n^2 |I|^(m-n+1) size bound")


def run_expected(m: DFSM, suite) -> list:
    return [omega_trace(m, m.initial, c) for c in suite]
