"""Finite marked metric graphs, spanning-tree collapse and path rewriting.

A graph holds its oriented edges in an :class:`~lamtool.words.EdgeAlphabet`;
edge lengths are exact :class:`~fractions.Fraction` values so metric tables
reproduce bit-exactly across runs.  Collapsing a maximal subtree onto a rose
comes with the two path-rewriting maps used to compare complexity functions:
``project_path`` deletes tree letters, ``lift_path`` reinserts tree geodesics.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import DomainError, MalformedInputError, PreconditionError
from .words import EdgeAlphabet, EdgePath, is_reduced

__all__ = [
    "MarkedMetricGraph",
    "ValidationReport",
    "CollapseData",
    "validate",
    "maximal_subtree",
    "project_path",
    "lift_path",
    "metric_length",
]


def _parse_length(value) -> Fraction:
    length = Fraction(value) if not isinstance(value, Fraction) else value
    if length <= 0:
        raise MalformedInputError(f"edge length must be positive, got {value!r}")
    return length


class MarkedMetricGraph:
    """Finite connected graph with positive edge lengths.

    ``edges`` is a sequence of ``(name, origin, terminus, length)`` with one
    entry per positive edge; inverse edges are implicit.  Vertices and edges
    are kept in canonical sorted order so every derived enumeration is
    deterministic.
    """

    __slots__ = ("vertices", "alphabet", "lengths", "_origin", "_vindex", "intermediate")

    def __init__(self, vertices: Iterable[str], edges: Sequence[tuple], intermediate: bool = False):
        self.vertices = tuple(sorted(set(vertices)))
        if not self.vertices:
            raise MalformedInputError("graph needs at least one vertex")
        self._vindex = {v: i for i, v in enumerate(self.vertices)}
        specs = sorted(edges, key=lambda spec: spec[0])
        self.alphabet = EdgeAlphabet([spec[0] for spec in specs])
        origin = []
        lengths = []
        for name, o, t, length in specs:
            if o not in self._vindex or t not in self._vindex:
                raise MalformedInputError(f"edge {name!r} references unknown vertex")
            origin.append(self._vindex[o])
            origin.append(self._vindex[t])  # origin of the inverse letter
            lengths.append(_parse_length(length))
        self._origin = tuple(origin)
        self.lengths = tuple(lengths)
        self.intermediate = intermediate

    # -- basic incidence ---------------------------------------------------

    def origin(self, code: int) -> int:
        return self._origin[code]

    def terminus(self, code: int) -> int:
        return self._origin[code ^ 1]

    def vertex_name(self, index: int) -> str:
        return self.vertices[index]

    def degree(self, vertex: int) -> int:
        return sum(1 for c in self.alphabet.letters() if self._origin[c] == vertex)

    @property
    def num_topological_edges(self) -> int:
        return len(self.lengths)

    def betti(self) -> int:
        return self.num_topological_edges - len(self.vertices) + 1

    def edge_length(self, code: int) -> Fraction:
        return self.lengths[code >> 1]

    def min_length(self) -> Fraction:
        return min(self.lengths)

    def max_length(self) -> Fraction:
        return max(self.lengths)

    def comparability_constant(self) -> Fraction:
        """C >= 1 with |path|/C <= metric length <= C * |path|."""
        return max(self.max_length(), 1 / self.min_length(), Fraction(1))

    def is_rose(self) -> bool:
        return len(self.vertices) == 1

    # -- paths ---------------------------------------------------------------

    def is_edge_path(self, codes) -> bool:
        codes = tuple(codes)
        if not all(self.alphabet.contains(c) for c in codes):
            return False
        return all(self.terminus(codes[i]) == self.origin(codes[i + 1])
                   for i in range(len(codes) - 1))

    def metric_length(self, codes) -> Fraction:
        total = Fraction(0)
        for c in codes:
            if not self.alphabet.contains(c):
                raise DomainError(f"letter code {c} does not belong to this graph")
            total += self.lengths[c >> 1]
        return total

    def path(self, text: str) -> EdgePath:
        return EdgePath.from_text(self.alphabet, text)

    def base_vertex(self) -> int:
        """Deterministic basepoint: the lexicographically least vertex."""
        return 0

    def _connected(self) -> bool:
        seen = {0}
        queue = deque([0])
        while queue:
            v = queue.popleft()
            for c in self.alphabet.letters():
                if self._origin[c] == v and self.terminus(c) not in seen:
                    seen.add(self.terminus(c))
                    queue.append(self.terminus(c))
        return len(seen) == len(self.vertices)

    def __repr__(self):
        return (f"MarkedMetricGraph(|V|={len(self.vertices)}, "
                f"edges={self.alphabet.names}, rank={self.betti()})")


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    rank: int
    violations: tuple[str, ...]


def validate(graph: MarkedMetricGraph) -> ValidationReport:
    """Structural checks; returns violations instead of raising."""
    violations = []
    if not graph._connected():
        violations.append("graph is not connected")
    rank = graph.betti()
    if rank < 2:
        violations.append(f"first Betti number {rank} is below the minimum rank 2")
    if not graph.intermediate:
        for i, v in enumerate(graph.vertices):
            deg = graph.degree(i)
            if deg < 3:
                violations.append(f"vertex {v} has degree {deg} < 3")
    for i, length in enumerate(graph.lengths):
        if length <= 0:
            violations.append(f"edge {graph.alphabet.names[i]} has nonpositive length")
    return ValidationReport(ok=not violations, rank=rank, violations=tuple(violations))


@dataclass(frozen=True)
class CollapseData:
    """A maximal subtree Y of ``base`` and the rose obtained by collapsing it.

    ``diameter`` is the combinatorial diameter of Y.  ``lift_stretch`` bounds
    the length growth of ``lift_path``: a rose path of length n lifts to at
    most ``lift_stretch * n`` letters (n + (n-1)*diameter <= (diameter+1)*n).
    ``multiplicity_bound`` bounds the fibers of ``project_path`` over any
    nonempty rose word: a choice of erased tree prefix and tree suffix, each
    determined by its starting/ending vertex.
    """

    base: MarkedMetricGraph
    subtree: frozenset[int]  # topological edge indices of Y
    rose: MarkedMetricGraph
    diameter: int
    multiplicity_bound: int
    rose_to_base: dict[int, int] = field(repr=False)
    base_to_rose: dict[int, int] = field(repr=False)
    geodesics: dict[tuple[int, int], tuple[int, ...]] = field(repr=False)

    @property
    def lift_stretch(self) -> int:
        return self.diameter + 1 if self.diameter >= 1 else 1


def _tree_geodesics(graph: MarkedMetricGraph, tree_edges: frozenset[int]):
    """All-pairs geodesics inside the subtree, as base letter sequences."""
    n = len(graph.vertices)
    paths = {}
    for root in range(n):
        # BFS restricted to tree letters
        prev = {root: ()}
        queue = deque([root])
        while queue:
            v = queue.popleft()
            for c in graph.alphabet.letters():
                if (c >> 1) in tree_edges and graph.origin(c) == v:
                    w = graph.terminus(c)
                    if w not in prev:
                        prev[w] = prev[v] + (c,)
                        queue.append(w)
        for target, path in prev.items():
            paths[(root, target)] = path
    return paths


def maximal_subtree(graph: MarkedMetricGraph) -> CollapseData:
    """Deterministic spanning tree (BFS from the least vertex, edges in
    canonical order) together with its collapse rose.

    For a rose input the subtree is a single vertex, the diameter is 0 and
    the rose is the graph itself.
    """
    report = validate(graph)
    if not report.ok:
        raise PreconditionError(
            "cannot collapse an invalid graph: " + "; ".join(report.violations))

    tree: set[int] = set()
    seen = {graph.base_vertex()}
    queue = deque([graph.base_vertex()])
    while queue:
        v = queue.popleft()
        for c in graph.alphabet.letters():
            if graph.origin(c) == v and graph.terminus(c) not in seen:
                seen.add(graph.terminus(c))
                tree.add(c >> 1)
                queue.append(graph.terminus(c))
    tree = frozenset(tree)

    geodesics = _tree_geodesics(graph, tree)
    diameter = max((len(p) for p in geodesics.values()), default=0)
    n_vertices = len(graph.vertices)
    multiplicity = n_vertices * n_vertices if tree else 1

    if not tree:
        identity = {c: c for c in graph.alphabet.letters()}
        return CollapseData(graph, tree, graph, 0, 1, identity, identity, geodesics)

    rose_names = [graph.alphabet.names[i] for i in range(graph.num_topological_edges)
                  if i not in tree]
    rose_vertex = graph.vertex_name(graph.base_vertex())
    rose = MarkedMetricGraph(
        [rose_vertex],
        [(name, rose_vertex, rose_vertex, Fraction(1)) for name in rose_names])

    rose_to_base = {}
    base_to_rose = {}
    for name in rose_names:
        b = graph.alphabet.index(name)
        r = rose.alphabet.index(name)
        rose_to_base[r] = b
        rose_to_base[r ^ 1] = b ^ 1
        base_to_rose[b] = r
        base_to_rose[b ^ 1] = r ^ 1
    return CollapseData(graph, tree, rose, diameter, multiplicity,
                        rose_to_base, base_to_rose, geodesics)


def project_path(cd: CollapseData, codes) -> tuple[int, ...]:
    """Delete every subtree letter; the image of a reduced path is reduced.

    May return the empty tuple (paths lying entirely inside the subtree).
    """
    codes = tuple(codes)
    if not cd.base.is_edge_path(codes):
        raise PreconditionError("project_path expects an edge path in the base graph")
    if not is_reduced(codes):
        raise PreconditionError("project_path expects a reduced path")
    out = tuple(cd.base_to_rose[c] for c in codes if (c >> 1) not in cd.subtree)
    assert is_reduced(out), "projection of a reduced path must be reduced"
    return out


def lift_path(cd: CollapseData, codes) -> tuple[int, ...]:
    """Reinsert the tree geodesic between consecutive rose letters.

    Injective, with ``project_path(lift_path(w)) == w`` and
    ``len(lift) <= lift_stretch * len(w)``.
    """
    codes = tuple(codes)
    if not cd.rose.is_edge_path(codes):
        raise PreconditionError("lift_path expects an edge path in the rose")
    if not is_reduced(codes):
        raise PreconditionError("lift_path expects a reduced path")
    out: list[int] = []
    for i, c in enumerate(codes):
        base_letter = cd.rose_to_base[c]
        if i > 0:
            gap = cd.geodesics[(cd.base.terminus(cd.rose_to_base[codes[i - 1]]),
                                cd.base.origin(base_letter))]
            out.extend(gap)
        out.append(base_letter)
    result = tuple(out)
    assert is_reduced(result), "lift of a reduced rose path must be reduced"
    return result


def metric_length(graph: MarkedMetricGraph, path) -> Fraction:
    """Sum of edge lengths along ``path`` (0 for the empty path)."""
    codes = path.letters if isinstance(path, EdgePath) else path
    return graph.metric_length(codes)
