"""Pure-Python implementations of the hot loops.

The compiled module ``_ckernels`` exposes the same functions with the same
signatures and results; :mod:`bilipfrac.kernels` picks one at import time.
"""

from __future__ import annotations

COUNT, ESCAPE, OVERLAP, COVER = 0, 1, 2, 3


def _find(parent, i):
    root = i
    while parent[root] != root:
        root = parent[root]
    while parent[i] != root:
        parent[i], i = root, parent[i]
    return root


def cluster_labels(points, qint, threshold, window):
    """Union-find over points closer than ``threshold`` in the form ``qint``.

    ``points`` must be sorted by first coordinate.  Two points are joined when
    ``d^T qint d <= threshold`` with ``d`` their difference; ``window`` bounds
    the first-coordinate gap of any such pair.  Returns, for every point, the
    smallest index in its component.
    """
    n = len(points)
    parent = list(range(n))
    l = len(qint)
    for i in range(n):
        pi = points[i]
        x0 = pi[0]
        for j in range(i + 1, n):
            pj = points[j]
            if pj[0] - x0 > window:
                break
            d = [pj[k] - pi[k] for k in range(l)]
            q = 0
            for a in range(l):
                da = d[a]
                if da:
                    row = qint[a]
                    for b in range(l):
                        q += da * row[b] * d[b]
            if q <= threshold:
                ri, rj = _find(parent, i), _find(parent, j)
                if ri != rj:
                    if ri < rj:
                        parent[rj] = ri
                    else:
                        parent[ri] = rj
    return [_find(parent, i) for i in range(n)]


def walk_step_tables(tables, roots, base, depth, max_report=100):
    """Exhaustive check of an interval-encoded cylinder map.

    ``tables[v]`` lists the steps out of vertex ``v`` as tuples
    ``(target, offset, lo, hi, count, leaf)``.  A node is ``(v, P, s, e)``
    whose image is the integer interval ``[P*base + s, P*base + e]`` of
    words written in base ``base``.  Step ``q`` has image
    ``[H*base + lo, H*base + hi]`` with ``H = P*base + s + offset``, one
    letter longer.  ``roots`` are ``(v, s, e)`` with ``P = 0``.

    Every node above ``depth`` is checked: each step spans ``count`` words,
    stays inside the parent image, siblings are disjoint and together cover
    the parent image exactly.  Returns ``(nodes, violations, report)``;
    ``report`` holds up to ``max_report`` tuples ``(kind, vertex, level, q)``.
    """
    report = []
    violations = 0
    nodes = 0
    stack = [(v, 0, s, e, 0) for v, s, e in reversed(roots)]
    while stack:
        v, prefix, s, e, level = stack.pop()
        nodes += 1
        if level >= depth:
            continue
        parent_lo = (prefix * base + s) * base
        parent_hi = (prefix * base + e) * base + base - 1
        spans = []
        children = []
        for q, (target, offset, slo, shi, count, leaf) in enumerate(tables[v]):
            head = prefix * base + s + offset
            a = head * base + slo
            b = head * base + shi
            spans.append((a, b, q))
            if b - a + 1 != count:
                violations += 1
                if len(report) < max_report:
                    report.append((COUNT, v, level, q))
            if a < parent_lo or b > parent_hi:
                violations += 1
                if len(report) < max_report:
                    report.append((ESCAPE, v, level, q))
            if not leaf:
                children.append((target, head, slo, shi, level + 1))
        stack.extend(reversed(children))
        spans.sort()
        gap = False
        reach = None
        for a, b, q in spans:
            if reach is not None:
                if a <= reach:
                    violations += 1
                    if len(report) < max_report:
                        report.append((OVERLAP, v, level, q))
                elif a != reach + 1:
                    gap = True
            reach = b if reach is None else max(reach, b)
        if not spans or gap or spans[0][0] != parent_lo or reach != parent_hi:
            violations += 1
            if len(report) < max_report:
                report.append((COVER, v, level, -1))
    return nodes, violations, report
