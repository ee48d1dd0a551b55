"""
Finite cubical complexes: construction from a PIP, hyperplanes, extraction of
the PIP of a rooted complex, vertex links and CAT(0) certification.

Cubes are described by a base vertex and the labels of the edges at the base
that span them. Parallel edges of a cube carry the same label, so walking a
label from any corner stays inside the cube. Only maximal cubes are stored;
faces are generated on demand.
"""

import logging
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from types import MappingProxyType
from typing import (Dict, FrozenSet, Hashable, Iterable, Iterator, List, Mapping, NamedTuple, Optional,
                    Sequence, Tuple, Union)

import networkx as nx
from networkx.utils import UnionFind

from cubeplan.errors import ComplexError, DisconnectedError, NotCat0Error
from cubeplan.pip_core import EMPTY_IDEAL, ElementId, Ideal, Pip, consistent_ideals, validate
from cubeplan.states import ComplexDocument, CubeDocument, EdgeDocument

logger = logging.getLogger(__name__)

VertexId = Hashable
EdgeKey = FrozenSet[VertexId]


def vertex_sort_key(v: VertexId):
    if isinstance(v, frozenset):
        return (1, len(v), tuple(sorted(v)))
    return (0, 0, (v,))


def vertex_name(v: VertexId) -> str:
    if isinstance(v, frozenset):
        return "{" + ",".join(sorted(v)) + "}"
    return str(v)


def _edge_sort_key(e: EdgeKey):
    return tuple(sorted(vertex_sort_key(v) for v in e))


def _subsets(items: Sequence, min_size: int = 0) -> Iterator[FrozenSet]:
    for k in range(min_size, len(items) + 1):
        for combo in combinations(items, k):
            yield frozenset(combo)


class Cube(NamedTuple):
    base: VertexId
    labels: FrozenSet[str]

    @property
    def dimension(self) -> int:
        return len(self.labels)


@dataclass(frozen=True, eq=False)
class CubeComplex:
    vertices: Tuple[VertexId, ...]
    edges: Mapping[EdgeKey, str]
    cubes: FrozenSet[Cube]
    root: Optional[VertexId] = None
    steps: Mapping[VertexId, Mapping[str, VertexId]] = field(default=None, repr=False)

    @classmethod
    def build(cls, vertices: Iterable[VertexId], edges: Iterable[Tuple[VertexId, VertexId, str]],
              cubes: Iterable[Tuple[VertexId, Iterable[str]]] = (), root: Optional[VertexId] = None,
              check: bool = True) -> "CubeComplex":
        """
        Assemble a complex. With check=True every structural invariant is
        verified: simple connected labelled graph, one edge per label at each
        vertex, and every cube present with matching parallel labels.
        """
        vertex_list = sorted(set(vertices), key=vertex_sort_key)
        if not vertex_list:
            raise ComplexError("a complex needs at least one vertex")
        known = set(vertex_list)
        steps: Dict[VertexId, Dict[str, VertexId]] = {v: {} for v in vertex_list}
        edge_map: Dict[EdgeKey, str] = {}
        for u, w, label in edges:
            if u not in known or w not in known:
                raise ComplexError(f"edge {vertex_name(u)} -- {vertex_name(w)} has an unknown endpoint")
            if u == w:
                raise ComplexError(f"loop at {vertex_name(u)}")
            key = frozenset((u, w))
            if key in edge_map:
                if edge_map[key] != label:
                    raise ComplexError(f"edge {vertex_name(u)} -- {vertex_name(w)} listed twice with different labels")
                continue
            for a, b in ((u, w), (w, u)):
                if label in steps[a]:
                    raise ComplexError(f"label {label} appears on two edges at {vertex_name(a)}")
                steps[a][label] = b
            edge_map[key] = label
        cube_set = frozenset(Cube(base, frozenset(labels)) for base, labels in cubes)
        if root is not None and root not in known:
            raise ComplexError(f"root {vertex_name(root)} is not a vertex")

        x = cls(tuple(vertex_list), MappingProxyType(edge_map), cube_set, root,
                MappingProxyType({v: MappingProxyType(s) for v, s in steps.items()}))
        if check:
            x.check()
        return x

    def check(self) -> None:
        for cube in sorted(self.cubes, key=lambda c: (vertex_sort_key(c.base), sorted(c.labels))):
            if cube.base not in self.steps:
                raise ComplexError(f"cube base {vertex_name(cube.base)} is not a vertex")
            if len(cube.labels) < 2:
                raise ComplexError(f"cube at {vertex_name(cube.base)} must span at least two labels")
            corners = self.corners(cube)
            if len(set(corners.values())) != len(corners):
                raise ComplexError(f"cube at {vertex_name(cube.base)} on {sorted(cube.labels)} has repeated corners")
            for subset, v in corners.items():
                for label in cube.labels:
                    if self.steps[v].get(label) != corners[subset ^ {label}]:
                        raise ComplexError(f"cube at {vertex_name(cube.base)} on {sorted(cube.labels)}: "
                                           f"edge {label} at {vertex_name(v)} leaves the cube")
        if not nx.is_connected(self.skeleton):
            raise DisconnectedError("the 1-skeleton is not connected")

    def __len__(self) -> int:
        return len(self.vertices)

    def neighbor(self, v: VertexId, label: str) -> Optional[VertexId]:
        return self.steps[v].get(label)

    def corners(self, cube: Cube) -> Dict[FrozenSet[str], VertexId]:
        """Map each subset of the cube's labels to the corner reached by toggling it from the base."""
        result: Dict[FrozenSet[str], VertexId] = {frozenset(): cube.base}
        for label in sorted(cube.labels):
            for subset, v in list(result.items()):
                w = self.steps[v].get(label)
                if w is None:
                    raise ComplexError(f"cube at {vertex_name(cube.base)} on {sorted(cube.labels)}: "
                                       f"no edge {label} at {vertex_name(v)}")
                result[subset | {label}] = w
        return result

    @cached_property
    def skeleton(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(self.vertices)
        for key, label in self.edges.items():
            u, w = tuple(key)
            g.add_edge(u, w, label=label)
        return nx.freeze(g)

    @cached_property
    def diagonal_graph(self) -> nx.Graph:
        """Joins every two distinct vertices lying in a common cube."""
        g = nx.Graph(self.skeleton)
        for cube in self.cubes:
            g.add_edges_from(combinations(self.corners(cube).values(), 2))
        return nx.freeze(g)

    @cached_property
    def cubes_at(self) -> Mapping[VertexId, Tuple[FrozenSet[str], ...]]:
        """Label sets of the stored cubes having each vertex as a corner."""
        table: Dict[VertexId, set] = {v: set() for v in self.vertices}
        for cube in self.cubes:
            for v in self.corners(cube).values():
                table[v].add(cube.labels)
        return MappingProxyType({v: tuple(sorted(s, key=sorted)) for v, s in table.items()})

    def cube_faces(self, min_dim: int = 2) -> FrozenSet[FrozenSet[VertexId]]:
        """Corner sets of every face, of dimension at least min_dim (>= 2), of the stored cubes."""
        faces = set()
        for cube in self.cubes:
            corners = self.corners(cube)
            labels = sorted(cube.labels)
            for face_labels in _subsets(labels, max(min_dim, 2)):
                rest = [label for label in labels if label not in face_labels]
                inner = list(_subsets(sorted(face_labels)))
                for offset in _subsets(rest):
                    faces.add(frozenset(corners[offset | part] for part in inner))
        return frozenset(faces)

    def cube_counts(self) -> Dict[int, int]:
        counts = {0: len(self.vertices), 1: len(self.edges)}
        for face in self.cube_faces(2):
            dim = len(face).bit_length() - 1
            counts[dim] = counts.get(dim, 0) + 1
        return counts

    def max_dimension(self) -> int:
        if self.cubes:
            return max(cube.dimension for cube in self.cubes)
        return 1 if self.edges else 0


def euler_characteristic(x: CubeComplex) -> int:
    return sum((-1) ** dim * count for dim, count in x.cube_counts().items())


# ---------------------------------------------------------------------------
# PIP -> complex
# ---------------------------------------------------------------------------

def _addable(pip: Pip, ideal: Ideal) -> List[ElementId]:
    return [x for x in pip.elements
            if x not in ideal and pip.down[x] <= ideal and not (pip.conflicts[x] & ideal)]


def from_pip(pip: Pip, limit: int = None) -> CubeComplex:
    """
    The rooted CAT(0) cube complex X(pip): one vertex per consistent ideal,
    an edge labelled x between I and I + x, and every cube whose edges are
    present. The cube spanned at I by a pairwise consistent set S of addable
    elements is maximal exactly when S is a maximal such set and every
    maximal element of I lies below some member of S.
    """
    ideals = consistent_ideals(pip, limit=limit)
    edges = []
    cubes = []
    for ideal in ideals:
        addable = _addable(pip, ideal)
        edges.extend((ideal, ideal | {a}, a) for a in addable)
        if len(addable) < 2:
            continue
        compatible = nx.Graph()
        compatible.add_nodes_from(addable)
        compatible.add_edges_from((a, b) for a, b in combinations(addable, 2) if b not in pip.conflicts[a])
        removable = [r for r in ideal if not (pip.up[r] & ideal)]
        for clique in nx.find_cliques(compatible):
            if len(clique) < 2:
                continue
            if all(any(r in pip.down[s] for s in clique) for r in removable):
                cubes.append((ideal, clique))
    logger.info("built X(P): %d vertices, %d edges, %d maximal cubes", len(ideals), len(edges), len(cubes))
    return CubeComplex.build(ideals, edges, cubes, root=EMPTY_IDEAL, check=False)


# ---------------------------------------------------------------------------
# hyperplanes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Hyperplane:
    id: int
    edges: FrozenSet[EdgeKey]
    labels: FrozenSet[str]


def hyperplanes(x: CubeComplex) -> List[Hyperplane]:
    """Edge classes of the 'opposite sides of a square' relation, numbered by their smallest edge."""
    uf = UnionFind(x.edges.keys())
    for cube in x.cubes:
        corners = x.corners(cube)
        for label in cube.labels:
            parallel = [frozenset((v, corners[subset | {label}]))
                        for subset, v in corners.items() if label not in subset]
            uf.union(*parallel)
    classes = sorted((frozenset(s) for s in uf.to_sets()), key=lambda s: min(_edge_sort_key(e) for e in s))
    return [Hyperplane(k, cls, frozenset(x.edges[e] for e in cls)) for k, cls in enumerate(classes)]


def hyperplane_names(planes: Sequence[Hyperplane]) -> Dict[int, str]:
    """A hyperplane is named by its label when that label is its own; otherwise h<id>."""
    owners: Dict[str, int] = {}
    for h in planes:
        for label in h.labels:
            owners[label] = owners.get(label, 0) + 1
    names: Dict[int, str] = {}
    for h in planes:
        if len(h.labels) == 1:
            (label,) = h.labels
            if owners[label] == 1:
                names[h.id] = label
    used = set(names.values())
    for h in planes:
        if h.id not in names:
            candidate = f"h{h.id}"
            while candidate in used:
                candidate += "_"
            names[h.id] = candidate
            used.add(candidate)
    return names


# ---------------------------------------------------------------------------
# certification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Refutation:
    kind: str  # 'bad-link', 'path-dependent', 'non-injective', 'invalid-pip', 'mismatch'
    message: str
    witness: Tuple = ()

    def __bool__(self) -> bool:
        return False


@dataclass(frozen=True, eq=False)
class Extraction:
    pip: Pip
    root: VertexId
    ideal_of: Mapping[VertexId, Ideal]
    vertex_of: Mapping[Ideal, VertexId]
    edge_element: Mapping[EdgeKey, ElementId]
    hyperplanes: Tuple[Hyperplane, ...]


@dataclass(frozen=True, eq=False)
class Certificate:
    pip: Pip
    extraction: Extraction
    hyperplane_count: int
    max_dimension: int
    euler_characteristic: int

    def __bool__(self) -> bool:
        return True


def _refute(kind: str, message: str, witness: Tuple = ()) -> NotCat0Error:
    return NotCat0Error(Refutation(kind, message, witness))


def extract_pip(x: CubeComplex, root: Optional[VertexId] = None) -> Extraction:
    """
    Read the PIP of x rooted at root off its hyperplanes. Raises NotCat0Error
    when the crossing sets depend on the path, the vertex map is not
    injective, or the relations read off are not a valid PIP.
    """
    root = x.root if root is None else root
    if root is None or root not in x.steps:
        raise ComplexError("extraction needs a root vertex of the complex")
    planes = hyperplanes(x)
    names = hyperplane_names(planes)
    edge_element = {e: names[h.id] for h in planes for e in h.edges}

    g = x.skeleton
    if not nx.is_connected(g):
        raise DisconnectedError("the 1-skeleton is not connected")
    ideal_of: Dict[VertexId, Ideal] = {root: EMPTY_IDEAL}
    for u, w in nx.bfs_edges(g, root, sort_neighbors=lambda vs: sorted(vs, key=vertex_sort_key)):
        ideal_of[w] = ideal_of[u] ^ {edge_element[frozenset((u, w))]}

    for key in sorted(x.edges, key=_edge_sort_key):
        u, w = sorted(key, key=vertex_sort_key)
        if ideal_of[u] ^ ideal_of[w] != {edge_element[key]}:
            raise _refute("path-dependent",
                          f"crossing sets at {vertex_name(u)} and {vertex_name(w)} disagree with the "
                          f"hyperplane {edge_element[key]} of the edge joining them", (u, w))
    distance = nx.single_source_shortest_path_length(g, root)
    for v in x.vertices:
        if len(ideal_of[v]) != distance[v]:
            raise _refute("path-dependent",
                          f"a shortest path to {vertex_name(v)} crosses a hyperplane twice", (v,))

    vertex_of: Dict[Ideal, VertexId] = {}
    for v in x.vertices:
        other = vertex_of.setdefault(ideal_of[v], v)
        if other != v:
            raise _refute("non-injective",
                          f"{vertex_name(other)} and {vertex_name(v)} are separated from the root "
                          f"by the same hyperplanes", (other, v))

    elements = [names[h.id] for h in planes]
    bit = {e: 1 << k for k, e in enumerate(elements)}
    full = (1 << len(elements)) - 1
    together = {e: 0 for e in elements}
    below = {e: full for e in elements}
    for ideal in ideal_of.values():
        mask = sum(bit[e] for e in ideal)
        for e in ideal:
            together[e] |= mask
            below[e] &= mask
    order = [(a, e) for e in elements for a in elements if a != e and below[e] & bit[a]]
    conflicts = [(a, b) for a, b in combinations(elements, 2) if not together[a] & bit[b]]
    pip = Pip.build(elements, order, conflicts)
    report = validate(pip)
    if not report.valid:
        first = report.violations[0]
        raise _refute("invalid-pip", f"extracted relations are not a PIP ({first.check}): {first.message}",
                      first.witness)
    logger.info("extracted PIP with %d elements and %d inconsistent pairs", len(pip), len(pip.inconsistent))
    return Extraction(pip, root, MappingProxyType(ideal_of), MappingProxyType(vertex_of),
                      MappingProxyType(edge_element), tuple(planes))


def is_cat0(x: CubeComplex, root: Optional[VertexId] = None, limit: int = None) -> Union[Certificate, Refutation]:
    """
    Certify x as CAT(0): every vertex link is flag, and rebuilding the complex
    from the extracted PIP gives back x through the vertex-to-ideal map, with
    the same vertices, edges, labels and cubes.
    """
    for v in x.vertices:
        check = is_flag(link(x, v))
        if not check:
            return Refutation("bad-link",
                              f"link of {vertex_name(v)} has an empty simplex on {sorted(check.witness)}",
                              (v, tuple(sorted(check.witness))))
    try:
        extraction = extract_pip(x, root)
    except NotCat0Error as e:
        return e.refutation

    rebuilt = from_pip(extraction.pip, limit=limit)
    ideal_of = extraction.ideal_of
    missing = set(rebuilt.vertices) - set(extraction.vertex_of)
    if missing:
        ideal = min(missing, key=vertex_sort_key)
        return Refutation("mismatch", f"consistent ideal {vertex_name(ideal)} has no vertex", (ideal,))
    for key, element in extraction.edge_element.items():
        u, w = tuple(key)
        if rebuilt.edges.get(frozenset((ideal_of[u], ideal_of[w]))) != element:
            return Refutation("mismatch", f"edge {vertex_name(u)} -- {vertex_name(w)} is not a PIP move",
                              (u, w))
    if len(rebuilt.edges) != len(x.edges):
        return Refutation("mismatch", "the PIP has moves with no edge in the complex")
    ours = {frozenset(ideal_of[v] for v in face) for face in x.cube_faces(2)}
    theirs = set(rebuilt.cube_faces(2))
    if ours != theirs:
        unfilled = sorted(theirs - ours, key=len)
        if unfilled:
            face = unfilled[0]
            return Refutation("mismatch", f"a {len(face).bit_length() - 1}-cube boundary is not filled",
                              tuple(sorted((extraction.vertex_of[i] for i in face), key=vertex_sort_key)))
        return Refutation("mismatch", "the complex has a cube the PIP does not")

    return Certificate(extraction.pip, extraction, len(extraction.pip), x.max_dimension(),
                       euler_characteristic(x))


# ---------------------------------------------------------------------------
# links
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LinkComplex:
    vertex: VertexId
    points: FrozenSet[str]
    facets: FrozenSet[FrozenSet[str]]

    def is_simplex(self, s: Iterable[str]) -> bool:
        s = frozenset(s)
        if not s <= self.points:
            return False
        return len(s) <= 1 or any(s <= f for f in self.facets)

    def edges(self) -> List[Tuple[str, str]]:
        return sorted({pair for f in self.facets for pair in combinations(sorted(f), 2)})


class FlagCheck(NamedTuple):
    flag: bool
    witness: Optional[FrozenSet[str]] = None

    def __bool__(self) -> bool:
        return self.flag


def link(x: CubeComplex, v: VertexId) -> LinkComplex:
    """One link point per edge at v; a set of points is a simplex when a cube at v contains those edges."""
    if v not in x.steps:
        raise ComplexError(f"{vertex_name(v)} is not a vertex")
    return LinkComplex(v, frozenset(x.steps[v]), frozenset(x.cubes_at[v]))


def is_flag(lk: LinkComplex) -> FlagCheck:
    g = nx.Graph()
    g.add_nodes_from(sorted(lk.points))
    g.add_edges_from(lk.edges())
    # cliques come in order of size, so the first failure is a minimal witness
    for clique in nx.enumerate_all_cliques(g):
        if len(clique) >= 3 and not lk.is_simplex(clique):
            return FlagCheck(False, frozenset(clique))
    return FlagCheck(True)


# ---------------------------------------------------------------------------
# fixtures and interchange
# ---------------------------------------------------------------------------

def square_fan(k: int) -> CubeComplex:
    """k squares glued cyclically around the vertex 'c', with nothing filled in between."""
    if k < 3:
        raise ComplexError("a square fan needs at least three squares")
    vertices = ["c"] + [f"a{i}" for i in range(k)] + [f"q{i}" for i in range(k)]
    edges = []
    cubes = []
    for i in range(k):
        j = (i + 1) % k
        edges.append(("c", f"a{i}", f"l{i}"))
        edges.append((f"a{i}", f"q{i}", f"l{j}"))
        edges.append((f"a{j}", f"q{i}", f"l{i}"))
        cubes.append(("c", (f"l{i}", f"l{j}")))
    return CubeComplex.build(vertices, edges, cubes, root="c")


def to_document(x: CubeComplex) -> ComplexDocument:
    edges = []
    for e in sorted(x.edges, key=_edge_sort_key):
        u, w = sorted(e, key=vertex_sort_key)
        edges.append(EdgeDocument(ends=[vertex_name(u), vertex_name(w)], label=x.edges[e]))
    cubes = [CubeDocument(base=vertex_name(c.base), labels=sorted(c.labels))
             for c in sorted(x.cubes, key=lambda c: (vertex_sort_key(c.base), sorted(c.labels)))]
    return ComplexDocument(
        vertices=[vertex_name(v) for v in x.vertices],
        edges=edges,
        cubes=cubes,
        root=vertex_name(x.root) if x.root is not None else None,
    )


def from_document(doc: ComplexDocument) -> CubeComplex:
    return CubeComplex.build(
        doc.vertices,
        ((e.ends[0], e.ends[1], e.label) for e in doc.edges),
        ((c.base, c.labels) for c in doc.cubes),
        root=doc.root,
    )


def to_json(x: CubeComplex) -> str:
    return to_document(x).model_dump_json(indent=2)


def from_json(text: str) -> CubeComplex:
    return from_document(ComplexDocument.model_validate_json(text))


def to_dot(x: CubeComplex) -> str:
    """1-skeleton with edges coloured by hyperplane."""
    colour = {e: h.id for h in hyperplanes(x) for e in h.edges}
    lines = ["graph complex {"]
    for v in x.vertices:
        style = ", shape=doublecircle" if v == x.root else ""
        lines.append(f'  "{vertex_name(v)}" [label="{vertex_name(v)}"{style}];')
    for e in sorted(x.edges, key=_edge_sort_key):
        u, w = sorted(e, key=vertex_sort_key)
        lines.append(f'  "{vertex_name(u)}" -- "{vertex_name(w)}" '
                     f'[label="{x.edges[e]}", colorscheme=set312, color={colour[e] % 12 + 1}];')
    lines.append("}")
    return "\n".join(lines) + "\n"
