# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot loops in ``_pykernels``.

Inputs that could overflow 64-bit arithmetic are handed back to the
pure-Python implementation, so results are always exact.
"""

from libc.stdlib cimport malloc, free
from libc.stdint cimport int64_t

from . import _pykernels

LIMIT = 2 ** 62


cdef int64_t _find(int64_t* parent, int64_t i) nogil:
    cdef int64_t root = i
    cdef int64_t nxt
    while parent[root] != root:
        root = parent[root]
    while parent[i] != root:
        nxt = parent[i]
        parent[i] = root
        i = nxt
    return root


def cluster_labels(points, qint, threshold, window):
    cdef Py_ssize_t n = len(points)
    if n == 0:
        return []
    cdef Py_ssize_t l = len(qint)
    spread = 0
    for p in points:
        for c in p:
            if abs(c) > spread:
                spread = abs(c)
    qmax = max(abs(v) for row in qint for v in row)
    # |d_a q_ab d_b| summed over l*l terms must stay below 2**62
    if (2 * spread + 1) ** 2 * (qmax + 1) * l * l >= LIMIT or abs(threshold) >= LIMIT or abs(window) >= LIMIT:
        return _pykernels.cluster_labels(points, qint, threshold, window)

    cdef int64_t* xs = <int64_t*> malloc(n * l * sizeof(int64_t))
    cdef int64_t* q = <int64_t*> malloc(l * l * sizeof(int64_t))
    cdef int64_t* parent = <int64_t*> malloc(n * sizeof(int64_t))
    cdef int64_t* d = <int64_t*> malloc(l * sizeof(int64_t))
    if xs == NULL or q == NULL or parent == NULL or d == NULL:
        free(xs); free(q); free(parent); free(d)
        raise MemoryError()
    cdef Py_ssize_t i, j, a, b
    cdef int64_t t = threshold
    cdef int64_t w = window
    cdef int64_t acc, ri, rj
    try:
        for i in range(n):
            p = points[i]
            for a in range(l):
                xs[i * l + a] = p[a]
            parent[i] = i
        for a in range(l):
            for b in range(l):
                q[a * l + b] = qint[a][b]
        with nogil:
            for i in range(n):
                for j in range(i + 1, n):
                    if xs[j * l] - xs[i * l] > w:
                        break
                    for a in range(l):
                        d[a] = xs[j * l + a] - xs[i * l + a]
                    acc = 0
                    for a in range(l):
                        if d[a] != 0:
                            for b in range(l):
                                acc += d[a] * q[a * l + b] * d[b]
                    if acc <= t:
                        ri = _find(parent, i)
                        rj = _find(parent, j)
                        if ri < rj:
                            parent[rj] = ri
                        elif rj < ri:
                            parent[ri] = rj
        return [_find(parent, i) for i in range(n)]
    finally:
        free(xs); free(q); free(parent); free(d)


cdef struct Node:
    int64_t v
    int64_t prefix
    int64_t s
    int64_t e
    int64_t level


def walk_step_tables(tables, roots, base, depth, max_report=100):
    cdef Py_ssize_t nv = len(tables)
    max_lo = 0
    total = 0
    for steps in tables:
        total += len(steps)
        for st in steps:
            max_lo = max(max_lo, abs(st[1]), abs(st[2]), abs(st[3]))
    for r in roots:
        max_lo = max(max_lo, abs(r[1]), abs(r[2]))
    # the largest head is below (max_lo + 1) * base**(depth + 1)
    if (max_lo + 2) * (base + 1) ** (depth + 2) >= LIMIT or nv == 0:
        return _pykernels.walk_step_tables(tables, roots, base, depth, max_report)

    cdef int64_t* start = <int64_t*> malloc((nv + 1) * sizeof(int64_t))
    cdef int64_t* tab = <int64_t*> malloc((total * 6 + 1) * sizeof(int64_t))
    cdef int64_t maxdeg = 1
    cdef Py_ssize_t k, v, q
    for v in range(nv):
        if len(tables[v]) > maxdeg:
            maxdeg = len(tables[v])
    # DFS stack holds at most depth * maxdeg + roots entries
    cdef Py_ssize_t cap = (depth + 1) * maxdeg + len(roots) + 1
    cdef Node* stack = <Node*> malloc(cap * sizeof(Node))
    cdef int64_t* sa = <int64_t*> malloc(maxdeg * sizeof(int64_t))
    cdef int64_t* sb = <int64_t*> malloc(maxdeg * sizeof(int64_t))
    cdef int64_t* sq = <int64_t*> malloc(maxdeg * sizeof(int64_t))
    if start == NULL or tab == NULL or stack == NULL or sa == NULL or sb == NULL or sq == NULL:
        free(start); free(tab); free(stack); free(sa); free(sb); free(sq)
        raise MemoryError()

    cdef int64_t B = base
    cdef int64_t D = depth
    cdef Py_ssize_t top = 0
    cdef Node cur
    cdef int64_t head, a, b, plo, phi, reach, ta, tb, tq
    cdef int64_t nodes = 0
    cdef int64_t violations = 0
    cdef Py_ssize_t nsteps, base_idx, m, pos, nchild
    cdef bint gap, unsorted
    report = []
    try:
        k = 0
        for v in range(nv):
            start[v] = k
            for st in tables[v]:
                for m in range(6):
                    tab[k * 6 + m] = int(st[m])
                k += 1
        start[nv] = k
        for r in reversed(list(roots)):
            stack[top].v = r[0]
            stack[top].prefix = 0
            stack[top].s = r[1]
            stack[top].e = r[2]
            stack[top].level = 0
            top += 1
        while top > 0:
            top -= 1
            cur = stack[top]
            nodes += 1
            if cur.level >= D:
                continue
            plo = (cur.prefix * B + cur.s) * B
            phi = (cur.prefix * B + cur.e) * B + B - 1
            base_idx = start[cur.v]
            nsteps = start[cur.v + 1] - base_idx
            nchild = 0
            for q in range(nsteps):
                pos = (base_idx + q) * 6
                head = cur.prefix * B + cur.s + tab[pos + 1]
                a = head * B + tab[pos + 2]
                b = head * B + tab[pos + 3]
                sa[q] = a
                sb[q] = b
                sq[q] = q
                if b - a + 1 != tab[pos + 4]:
                    violations += 1
                    if len(report) < max_report:
                        report.append((_pykernels.COUNT, cur.v, cur.level, q))
                if a < plo or b > phi:
                    violations += 1
                    if len(report) < max_report:
                        report.append((_pykernels.ESCAPE, cur.v, cur.level, q))
            # children pushed in reverse so they pop in table order
            for q in range(nsteps - 1, -1, -1):
                pos = (base_idx + q) * 6
                if tab[pos + 5] == 0:
                    if top >= cap:
                        raise RuntimeError("step-table walk stack overflow")
                    stack[top].v = tab[pos]
                    stack[top].prefix = cur.prefix * B + cur.s + tab[pos + 1]
                    stack[top].s = tab[pos + 2]
                    stack[top].e = tab[pos + 3]
                    stack[top].level = cur.level + 1
                    top += 1
            # insertion sort by (a, b, q); tables are normally already ordered
            unsorted = False
            for q in range(1, nsteps):
                if sa[q] < sa[q - 1] or (sa[q] == sa[q - 1] and sb[q] < sb[q - 1]):
                    unsorted = True
                    break
            if unsorted:
                for q in range(1, nsteps):
                    ta = sa[q]; tb = sb[q]; tq = sq[q]
                    m = q - 1
                    while m >= 0 and (sa[m] > ta or (sa[m] == ta and (sb[m] > tb or (sb[m] == tb and sq[m] > tq)))):
                        sa[m + 1] = sa[m]; sb[m + 1] = sb[m]; sq[m + 1] = sq[m]
                        m -= 1
                    sa[m + 1] = ta; sb[m + 1] = tb; sq[m + 1] = tq
            gap = False
            if nsteps > 0:
                reach = sb[0]
            for q in range(1, nsteps):
                if sa[q] <= reach:
                    violations += 1
                    if len(report) < max_report:
                        report.append((_pykernels.OVERLAP, cur.v, cur.level, sq[q]))
                elif sa[q] != reach + 1:
                    gap = True
                if sb[q] > reach:
                    reach = sb[q]
            if nsteps == 0 or gap or sa[0] != plo or reach != phi:
                violations += 1
                if len(report) < max_report:
                    report.append((_pykernels.COVER, cur.v, cur.level, -1))
        return nodes, violations, report
    finally:
        free(start); free(tab); free(stack); free(sa); free(sb); free(sq)
