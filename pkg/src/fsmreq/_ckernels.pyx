# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False
"""Compiled hot kernels; same signatures and results as ``_pykernels``."""

from libc.stdlib cimport malloc, free

BACKEND = "cython"


cdef tuple _path(int* parent, int* via, int node):
    cdef list out = []
    while parent[node] >= 0:
        out.append(via[node])
        node = parent[node]
    out.reverse()
    return tuple(out)


cdef tuple _io(tuple sd, tuple so, int si, int k, tuple inputs):
    cdef list out = []
    cdef int s = si
    cdef int x
    for x in inputs:
        out.append(so[s * k + x])
        s = <int>sd[s * k + x]
    return (inputs, tuple(out))


cdef long long* _copy_masks(tuple t) except NULL:
    cdef Py_ssize_t n = len(t), i
    cdef long long* buf = <long long*>malloc((n if n > 0 else 1) * sizeof(long long))
    if buf == NULL:
        raise MemoryError()
    for i in range(n):
        buf[i] = <long long>t[i]
    return buf


cdef int* _copy(tuple t) except NULL:
    cdef Py_ssize_t n = len(t), i
    cdef int* buf = <int*>malloc((n if n > 0 else 1) * sizeof(int))
    if buf == NULL:
        raise MemoryError()
    for i in range(n):
        buf[i] = <int>t[i]
    return buf


def first_difference(tuple ad, tuple ao, int an, int ai,
                     tuple bd, tuple bo, int bn, int bi, int k):
    cdef int size = an * bn
    cdef int* a_d = _copy(ad)
    cdef int* a_o = _copy(ao)
    cdef int* b_d = _copy(bd)
    cdef int* b_o = _copy(bo)
    cdef int* parent = <int*>malloc(size * sizeof(int))
    cdef int* via = <int*>malloc(size * sizeof(int))
    cdef int* queue = <int*>malloc(size * sizeof(int))
    cdef int head = 0, tail = 0, node, a, b, x, i, j, nxt, n
    result = None
    try:
        for n in range(size):
            parent[n] = -2
        node = ai * bn + bi
        parent[node] = -1
        queue[tail] = node
        tail += 1
        while head < tail:
            node = queue[head]
            head += 1
            a = node // bn
            b = node % bn
            for x in range(k):
                i = a * k + x
                j = b * k + x
                if a_o[i] != b_o[j]:
                    result = _path(parent, via, node) + (x,)
                    return result
                nxt = a_d[i] * bn + b_d[j]
                if parent[nxt] == -2:
                    parent[nxt] = node
                    via[nxt] = x
                    queue[tail] = nxt
                    tail += 1
        return None
    finally:
        free(a_d); free(a_o); free(b_d); free(b_o)
        free(parent); free(via); free(queue)


def violation_direct(tuple sd, tuple so, int sn, int si,
                     tuple md, int mn, int mi, int k, tuple req_mask):
    cdef int size = sn * mn
    cdef int* s_d = _copy(sd)
    cdef int* s_o = _copy(so)
    cdef int* m_d = _copy(md)
    cdef long long* mask = _copy_masks(req_mask)
    cdef int* parent = <int*>malloc(size * sizeof(int))
    cdef int* via = <int*>malloc(size * sizeof(int))
    cdef int* queue = <int*>malloc(size * sizeof(int))
    cdef int head = 0, tail = 0, node, s, q, x, i, j, nxt, n
    cdef long long mk
    try:
        for n in range(size):
            parent[n] = -2
        node = si * mn + mi
        parent[node] = -1
        queue[tail] = node
        tail += 1
        while head < tail:
            node = queue[head]
            head += 1
            s = node // mn
            q = node % mn
            for x in range(k):
                i = s * k + x
                j = q * k + x
                mk = mask[j]
                if mk != 0 and not ((mk >> s_o[i]) & 1):
                    return _io(sd, so, si, k, _path(parent, via, node) + (x,))
                nxt = s_d[i] * mn + m_d[j]
                if parent[nxt] == -2:
                    parent[nxt] = node
                    via[nxt] = x
                    queue[tail] = nxt
                    tail += 1
        return None
    finally:
        free(s_d); free(s_o); free(m_d); free(mask)
        free(parent); free(via); free(queue)


def violation_inclusion(tuple sd, tuple so, int sn, int si,
                        tuple tnext, int tn, int ti, int k, int n_out):
    cdef int size = sn * tn
    cdef int* s_d = _copy(sd)
    cdef int* s_o = _copy(so)
    cdef int* t_next = _copy(tnext)
    cdef int* parent = <int*>malloc(size * sizeof(int))
    cdef int* via = <int*>malloc(size * sizeof(int))
    cdef int* queue = <int*>malloc(size * sizeof(int))
    cdef int head = 0, tail = 0, node, s, q, x, i, t, nxt, n
    try:
        for n in range(size):
            parent[n] = -2
        node = si * tn + ti
        parent[node] = -1
        queue[tail] = node
        tail += 1
        while head < tail:
            node = queue[head]
            head += 1
            s = node // tn
            q = node % tn
            for x in range(k):
                i = s * k + x
                t = t_next[(q * k + x) * n_out + s_o[i]]
                if t < 0:
                    return _io(sd, so, si, k, _path(parent, via, node) + (x,))
                nxt = s_d[i] * tn + t
                if parent[nxt] == -2:
                    parent[nxt] = node
                    via[nxt] = x
                    queue[tail] = nxt
                    tail += 1
        return None
    finally:
        free(s_d); free(s_o); free(t_next)
        free(parent); free(via); free(queue)


def first_failure_equiv(tuple d, tuple o, int k, int init,
                        tuple flat, tuple offsets, tuple expected):
    cdef int* dd = _copy(d)
    cdef int* oo = _copy(o)
    cdef Py_ssize_t c, p, n_cases = len(offsets) - 1
    cdef int s, i
    try:
        for c in range(n_cases):
            s = init
            for p in range(<Py_ssize_t>offsets[c], <Py_ssize_t>offsets[c + 1]):
                i = s * k + <int>flat[p]
                if oo[i] != <int>expected[p]:
                    return c
                s = dd[i]
        return -1
    finally:
        free(dd); free(oo)


def first_failure_reduction(tuple d, tuple o, int k, int init,
                            tuple flat, tuple offsets, tuple masks):
    cdef int* dd = _copy(d)
    cdef int* oo = _copy(o)
    cdef Py_ssize_t c, p, n_cases = len(offsets) - 1
    cdef int s, i
    cdef long long mk
    try:
        for c in range(n_cases):
            s = init
            for p in range(<Py_ssize_t>offsets[c], <Py_ssize_t>offsets[c + 1]):
                i = s * k + <int>flat[p]
                mk = <long long>masks[p]
                if not ((mk >> oo[i]) & 1):
                    return c
                s = dd[i]
        return -1
    finally:
        free(dd); free(oo)
