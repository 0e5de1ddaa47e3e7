"""Pure-Python hot kernels. ``_ckernels.pyx`` mirrors these signatures exactly.

Machines are passed as flat row-major tuples (``delta[q * k + x]``). Suites are
packed as one flat tuple of inputs plus ``offsets`` (case ``i`` spans
``flat[offsets[i]:offsets[i + 1]]``) and a parallel tuple of expected outputs
or allowed-output bitmasks.
"""

BACKEND = "python"


def _path(parent, via, node):
    out = []
    while parent[node] >= 0:
        out.append(via[node])
        node = parent[node]
    out.reverse()
    return tuple(out)


def first_difference(ad, ao, an, ai, bd, bo, bn, bi, k):
    """Shortest lexicographically-least input trace on which two DFSMs differ."""
    size = an * bn
    parent = [-2] * size
    via = [0] * size
    start = ai * bn + bi
    parent[start] = -1
    queue = [start]
    for node in queue:
        a, b = divmod(node, bn)
        for x in range(k):
            i, j = a * k + x, b * k + x
            if ao[i] != bo[j]:
                return _path(parent, via, node) + (x,)
            nxt = ad[i] * bn + bd[j]
            if parent[nxt] == -2:
                parent[nxt] = node
                via[nxt] = x
                queue.append(nxt)
    return None


def _io(sd, so, si, k, inputs):
    out = []
    s = si
    for x in inputs:
        out.append(so[s * k + x])
        s = sd[s * k + x]
    return inputs, tuple(out)


def violation_direct(sd, so, sn, si, md, mn, mi, k, req_mask):
    """Shortest witness that ``s`` answers a constrained ``(q, x)`` outside its allowed set.

    ``req_mask[q * k + x]`` is 0 for unconstrained pairs, else the bitmask of
    allowed outputs. Returns ``(inputs, outputs)`` of ``s`` or ``None``.
    """
    size = sn * mn
    parent = [-2] * size
    via = [0] * size
    start = si * mn + mi
    parent[start] = -1
    queue = [start]
    for node in queue:
        s, q = divmod(node, mn)
        for x in range(k):
            i, j = s * k + x, q * k + x
            mask = req_mask[j]
            if mask and not (mask >> so[i]) & 1:
                return _io(sd, so, si, k, _path(parent, via, node) + (x,))
            nxt = sd[i] * mn + md[j]
            if parent[nxt] == -2:
                parent[nxt] = node
                via[nxt] = x
                queue.append(nxt)
    return None


def violation_inclusion(sd, so, sn, si, tnext, tn, ti, k, n_out):
    """Shortest I/O trace of ``s`` outside the language of an observable FSM.

    ``tnext[(q * k + x) * n_out + y]`` is the unique target of ``(q, x, y)`` or
    -1 when that transition does not exist.
    """
    size = sn * tn
    parent = [-2] * size
    via = [0] * size
    start = si * tn + ti
    parent[start] = -1
    queue = [start]
    for node in queue:
        s, q = divmod(node, tn)
        for x in range(k):
            i = s * k + x
            t = tnext[(q * k + x) * n_out + so[i]]
            if t < 0:
                return _io(sd, so, si, k, _path(parent, via, node) + (x,))
            nxt = sd[i] * tn + t
            if parent[nxt] == -2:
                parent[nxt] = node
                via[nxt] = x
                queue.append(nxt)
    return None


def first_failure_equiv(d, o, k, init, flat, offsets, expected):
    """Index of the first case whose outputs differ from ``expected``, or -1."""
    for c in range(len(offsets) - 1):
        s = init
        for p in range(offsets[c], offsets[c + 1]):
            i = s * k + flat[p]
            if o[i] != expected[p]:
                return c
            s = d[i]
    return -1


def first_failure_reduction(d, o, k, init, flat, offsets, masks):
    """Index of the first case with an output outside its allowed bitmask, or -1."""
    for c in range(len(offsets) - 1):
        s = init
        for p in range(offsets[c], offsets[c + 1]):
            i = s * k + flat[p]
            if not (masks[p] >> o[i]) & 1:
                return c
            s = d[i]
    return -1
