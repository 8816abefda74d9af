"""Complete-overlap detection by reachability in the difference-state graph.

A state ``(x, g, g')`` records the scaled gap between two partial
compositions.  Reading letters ``(i, j)`` moves it to
``(n x + g(b_i) - g'(b_j), g g_i, g' g_j)``.  The system has complete
overlaps exactly when some *original* state ``(b_i - b_j, g_i, g_j)``,
``i != j``, reaches a *boundary* state ``(0, h, h)``.  Every state on such a
path obeys ``|x| <= M = 2 max|b_i| / (n-1)``, so targets outside that ball are
dropped.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Optional

from .config import enumeration_cap
from .errors import CapExceeded
from .ifs import IfsSystem, compose_word, derived_constants, iter_words
from .lattice import enumerate_ball, norm_sq, scale, sub


@dataclass(frozen=True)
class OverlapVerdict:
    overlaps: bool
    witness: Optional[tuple] = None  # (word_i, word_j), equal length, 1-based

    def __str__(self):
        if not self.overlaps:
            return "NoOverlaps"
        a, b = self.witness
        return f"Overlaps {a} ~ {b}"


@dataclass
class StateGraph:
    system: IfsSystem
    m_bound_sq: object
    points: list
    vertices: list = field(default_factory=list)
    edges: list = field(default_factory=list)  # (from, to, (i, j)) with vertex indices
    originals: dict = field(default_factory=dict)  # vertex index -> first (i, j)
    boundary: list = field(default_factory=list)

    def index(self, vertex):
        return self._index[vertex]

    @property
    def group_elided(self) -> bool:
        return self.system.group.is_trivial


class _Stepper:
    """Precomputed transition data shared by graph construction and search."""

    def __init__(self, sys: IfsSystem):
        self.sys = sys
        self.m_bound_sq = derived_constants(sys).m_bound_sq
        group = sys.group
        self.acted = [[group.act(h, b) for _, b in sys.maps] for h in range(len(group))]
        self.pairs = [(i, j) for i in range(sys.m) for j in range(sys.m)]
        self._norm_cache = {}

    def inside(self, x) -> bool:
        ok = self._norm_cache.get(x)
        if ok is None:
            ok = norm_sq(self.sys.lattice, x) <= self.m_bound_sq
            self._norm_cache[x] = ok
        return ok

    def step(self, vertex, i, j):
        x, g, gp = vertex
        sys = self.sys
        nx = scale(sys.n, x)
        bi = self.acted[g][i]
        bj = self.acted[gp][j]
        target = tuple(a + b - c for a, b, c in zip(nx, bi, bj))
        comp = sys.group.compose
        return (target, comp(g, sys.maps[i][0]), comp(gp, sys.maps[j][0]))

    def originals(self):
        """Original states in ``(i, j)`` order, first label wins."""
        seen = {}
        sys = self.sys
        for i, j in self.pairs:
            if i == j:
                continue
            (gi, bi), (gj, bj) = sys.maps[i], sys.maps[j]
            x = sub(bi, bj)
            if not self.inside(x):
                continue
            vertex = (x, gi, gj)
            if vertex not in seen:
                seen[vertex] = (i + 1, j + 1)
        return seen

    @staticmethod
    def is_boundary(vertex) -> bool:
        x, g, gp = vertex
        return g == gp and not any(x)


def build_state_graph(sys: IfsSystem, cap=None) -> StateGraph:
    """Materialize the full state graph (for export and inspection)."""
    st = _Stepper(sys)
    points = enumerate_ball(sys.lattice, st.m_bound_sq)
    handles = range(len(sys.group))
    count = len(points) * len(sys.group) ** 2
    cap = enumeration_cap(cap)
    if count > cap:
        raise CapExceeded(f"state graph has {count} vertices, cap is {cap}")
    graph = StateGraph(sys, st.m_bound_sq, points)
    graph.vertices = [(x, g, gp) for x in points for g in handles for gp in handles]
    graph._index = {v: k for k, v in enumerate(graph.vertices)}
    for k, v in enumerate(graph.vertices):
        for i, j in st.pairs:
            t = st.step(v, i, j)
            idx = graph._index.get(t)
            if idx is not None:
                graph.edges.append((k, idx, (i + 1, j + 1)))
    for v, label in st.originals().items():
        graph.originals[graph._index[v]] = label
    graph.boundary = [k for k, v in enumerate(graph.vertices) if st.is_boundary(v)]
    return graph


def detect_complete_overlaps(sys: IfsSystem) -> OverlapVerdict:
    """Breadth-first search from the original states to a boundary state.

    The returned witness is a shortest one (in number of letters).
    """
    st = _Stepper(sys)
    origins = st.originals()
    parent = {}
    queue = deque()
    for v, label in origins.items():
        if st.is_boundary(v):
            return OverlapVerdict(True, ((label[0],), (label[1],)))
        parent[v] = (None, label)
        queue.append(v)
    while queue:
        v = queue.popleft()
        for i, j in st.pairs:
            t = st.step(v, i, j)
            if t in parent or not st.inside(t[0]):
                continue
            parent[t] = (v, (i + 1, j + 1))
            if st.is_boundary(t):
                return OverlapVerdict(True, _unwind(parent, t))
            queue.append(t)
    return OverlapVerdict(False)


def _unwind(parent, vertex):
    labels = []
    while vertex is not None:
        prev, label = parent[vertex]
        labels.append(label)
        vertex = prev
    labels.reverse()
    return tuple(a for a, _ in labels), tuple(b for _, b in labels)


def witness_is_valid(sys: IfsSystem, witness) -> bool:
    a, b = witness
    return len(a) == len(b) and a != b and compose_word(sys, a) == compose_word(sys, b)


def brute_force_overlap(sys: IfsSystem, max_depth: int, cap=None) -> OverlapVerdict:
    """Compare the exact affine data of all equal-length words up to ``max_depth``.

    Any collision between distinct words is trimmed to its first differing
    letter, since ``S_i`` is injective.
    """
    cap = enumeration_cap(cap)
    if sys.m ** max_depth > cap:
        raise CapExceeded(f"{sys.m}^{max_depth} words exceed cap {cap}")
    for depth in range(1, max_depth + 1):
        seen = {}
        found = None
        for w in iter_words(sys.m, depth):
            key = compose_word(sys, w)
            other = seen.get(key)
            if other is None:
                seen[key] = w
                continue
            k = next(t for t in range(depth) if other[t] != w[t])
            cand = (other[k:], w[k:])
            if found is None or (len(cand[0]), cand) < (len(found[0]), found):
                found = cand
        if found is not None:
            return OverlapVerdict(True, found)
    return OverlapVerdict(False)


def state_graph_to_dot(graph: StateGraph) -> str:
    """Graphviz rendering; originals are boxes, boundary states double circles."""
    lines = ["digraph overlap_states {"]
    boundary = set(graph.boundary)
    for k, (x, g, gp) in enumerate(graph.vertices):
        label = ",".join(str(c) for c in x)
        if not graph.group_elided:
            label = f"{label};{g};{gp}"
        attrs = [f'label="{label}"']
        if k in graph.originals:
            attrs.append("shape=box")
            attrs.append('color="blue"')
        if k in boundary:
            attrs.append("shape=doublecircle")
        lines.append(f"  v{k} [{', '.join(attrs)}];")
    for a, b, (i, j) in graph.edges:
        lines.append(f'  v{a} -> v{b} [label="{i},{j}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"

