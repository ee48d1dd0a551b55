"""
Exact shortest paths between vertices of a CAT(0) cube complex, planned on
its PIP, in the cost (l1) and time (linf) metrics, plus breadth-first
oracles over the complex itself.

To go from ideal I to ideal J every element of I - J must be removed and
every element of J - I added. Removals go from the top down, additions from
the bottom up, and an element of I - J inconsistent with an element of J - I
has to be removed before that element is added. Any topological order of
these constraints is an l1 geodesic; taking every ready crossing at once
(the normal cube path) is an linf geodesic.
"""

import logging
from dataclasses import dataclass
from itertools import combinations
from typing import Dict, FrozenSet, Iterable, List, Literal, NamedTuple, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from cubeplan.cube_complex import CubeComplex, VertexId, vertex_name
from cubeplan.errors import ComplexError, DisconnectedError, InvalidIdealError, InvariantViolation
from cubeplan.pip_core import ElementId, Ideal, Pip, is_consistent_ideal
from cubeplan.states import PlanDocument

logger = logging.getLogger(__name__)

Metric = Literal["l1", "linf"]
METRICS: Tuple[str, ...] = ("l1", "linf")


class Crossing(NamedTuple):
    kind: Literal["remove", "add"]
    element: ElementId

    def __str__(self) -> str:
        return f"{self.kind}({self.element})"


def _crossing_key(c: Crossing) -> str:
    return c.element


@dataclass(frozen=True, eq=False)
class CrossingDag:
    source: Ideal
    target: Ideal
    graph: nx.DiGraph

    @property
    def nodes(self) -> FrozenSet[Crossing]:
        return frozenset(self.graph.nodes)

    @property
    def arcs(self) -> FrozenSet[Tuple[Crossing, Crossing]]:
        return frozenset(self.graph.edges)

    def __len__(self) -> int:
        return self.graph.number_of_nodes()


@dataclass(frozen=True)
class GeodesicPlan:
    metric: Metric
    batches: Tuple[FrozenSet[Crossing], ...]
    vertex_trace: Tuple[Ideal, ...]
    distance: int

    def elements(self) -> List[List[ElementId]]:
        return [sorted(c.element for c in batch) for batch in self.batches]


def _check_ideal(pip: Pip, s: Iterable[ElementId], which: str) -> Ideal:
    ideal = frozenset(s)
    if not is_consistent_ideal(pip, ideal):
        raise InvalidIdealError(f"{which} is not a consistent order ideal: {{{', '.join(sorted(ideal))}}}")
    return ideal


def crossing_dag(pip: Pip, i: Iterable[ElementId], j: Iterable[ElementId]) -> CrossingDag:
    source = _check_ideal(pip, i, "source")
    target = _check_ideal(pip, j, "target")
    removals = source - target
    additions = target - source

    g = nx.DiGraph()
    g.add_nodes_from(Crossing("remove", p) for p in sorted(removals))
    g.add_nodes_from(Crossing("add", a) for a in sorted(additions))
    for q in removals:
        for p in pip.down[q] & removals:
            g.add_edge(Crossing("remove", q), Crossing("remove", p))
    for q in additions:
        for p in pip.down[q] & additions:
            g.add_edge(Crossing("add", p), Crossing("add", q))
    for p in removals:
        for a in pip.conflicts[p] & additions:
            g.add_edge(Crossing("remove", p), Crossing("add", a))
    return CrossingDag(source, target, nx.freeze(g))


def _spans_cube(pip: Pip, ideal: Ideal, elements: Sequence[ElementId]) -> bool:
    for k in range(len(elements) + 1):
        for part in combinations(elements, k):
            if not is_consistent_ideal(pip, ideal.symmetric_difference(part)):
                return False
    return True


def _execute(pip: Pip, dag: CrossingDag, batches: List[FrozenSet[Crossing]], metric: Metric) -> GeodesicPlan:
    current = dag.source
    trace = [current]
    for batch in batches:
        elements = sorted(c.element for c in batch)
        # mandatory: a failing batch means the input was not CAT(0)
        if not _spans_cube(pip, current, elements):
            raise InvariantViolation(
                f"crossing {elements} from {{{', '.join(sorted(current))}}} does not span a cube",
                (current, tuple(elements)))
        current = current.symmetric_difference(elements)
        trace.append(current)
    if current != dag.target:
        raise InvariantViolation("plan does not reach its target", (current, dag.target))
    logger.debug("%s plan of length %d over %d crossings", metric, len(batches), len(dag))
    return GeodesicPlan(metric, tuple(batches), tuple(trace), len(batches))


def l1_geodesic(pip: Pip, i: Iterable[ElementId], j: Iterable[ElementId]) -> GeodesicPlan:
    """One crossing per step, in lexicographic topological order of the crossing DAG."""
    dag = crossing_dag(pip, i, j)
    order = nx.lexicographical_topological_sort(dag.graph, key=_crossing_key)
    return _execute(pip, dag, [frozenset([c]) for c in order], "l1")


def linf_geodesic(pip: Pip, i: Iterable[ElementId], j: Iterable[ElementId]) -> GeodesicPlan:
    """All ready crossings at once: the levels of the crossing DAG."""
    dag = crossing_dag(pip, i, j)
    levels = [frozenset(level) for level in nx.topological_generations(dag.graph)]
    return _execute(pip, dag, levels, "linf")


def geodesic(pip: Pip, i: Iterable[ElementId], j: Iterable[ElementId], metric: str) -> GeodesicPlan:
    if metric == "l1":
        return l1_geodesic(pip, i, j)
    if metric == "linf":
        return linf_geodesic(pip, i, j)
    if metric == "l2":
        raise ValueError("Euclidean (l2) geodesics are not supported; use l1 or linf")
    raise ValueError(f"metric must be one of {', '.join(METRICS)}, got {metric!r}")


def plan_document(plan: GeodesicPlan, states: Optional[Sequence[str]] = None) -> PlanDocument:
    return PlanDocument(
        metric=plan.metric,
        distance=plan.distance,
        batches=plan.elements(),
        vertices=[sorted(ideal) for ideal in plan.vertex_trace],
        states=list(states) if states is not None else None,
    )


def plan_to_json(plan: GeodesicPlan, states: Optional[Sequence[str]] = None) -> str:
    return plan_document(plan, states).model_dump_json(exclude_none=True)


def point_distance(x: Sequence[float], y: Sequence[float], metric: str) -> float:
    """Distance between two points of the same unit cube, given by their coordinates."""
    a = np.asarray(x, dtype=float)
    b = np.asarray(y, dtype=float)
    if a.ndim != 1 or a.shape != b.shape:
        raise ValueError("points must be coordinate vectors of the same cube")
    if np.any((a < 0) | (a > 1)) or np.any((b < 0) | (b > 1)):
        raise ValueError("coordinates must lie in [0, 1]")
    diff = np.abs(a - b)
    if metric == "l1":
        return float(diff.sum())
    if metric == "linf":
        return float(diff.max()) if diff.size else 0.0
    raise ValueError(f"metric must be one of {', '.join(METRICS)}, got {metric!r}")


# ---------------------------------------------------------------------------
# oracles
# ---------------------------------------------------------------------------

def _oracle_graph(x: CubeComplex, metric: str) -> nx.Graph:
    if metric == "l1":
        return x.skeleton
    if metric == "linf":
        return x.diagonal_graph
    raise ValueError(f"metric must be one of {', '.join(METRICS)}, got {metric!r}")


def _bfs_distance(g: nx.Graph, u: VertexId, w: VertexId) -> int:
    for v in (u, w):
        if v not in g:
            raise ComplexError(f"{vertex_name(v)} is not a vertex")
    try:
        return nx.shortest_path_length(g, u, w)
    except nx.NetworkXNoPath as e:
        raise DisconnectedError(f"{vertex_name(u)} and {vertex_name(w)} are not connected") from e


def oracle_l1(x: CubeComplex, u: VertexId, w: VertexId) -> int:
    return _bfs_distance(x.skeleton, u, w)


def oracle_linf(x: CubeComplex, u: VertexId, w: VertexId) -> int:
    return _bfs_distance(x.diagonal_graph, u, w)


def oracle_distances(x: CubeComplex, source: VertexId, metric: str) -> Dict[VertexId, int]:
    g = _oracle_graph(x, metric)
    if source not in g:
        raise ComplexError(f"{vertex_name(source)} is not a vertex")
    return nx.single_source_shortest_path_length(g, source)
