"""
Posets with inconsistent pairs (PIPs), the "remote controls" of rooted CAT(0)
cube complexes.

A PIP is a finite poset together with a symmetric, irreflexive inconsistency
relation that is closed upward under the order. Its consistent order ideals
are the vertices of the associated complex, and the elements that can be
added to or removed from an ideal are the hyperplanes a particle at that
vertex can cross.
"""

import logging
import random
from dataclasses import dataclass, replace
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, Iterator, List, Literal, NamedTuple, Sequence, Tuple, Union

import networkx as nx

from cubeplan.errors import InvalidIdealError, PipError, ResourceGuardError, UnknownElementError
from cubeplan.settings import resource_limit
from cubeplan.states import PipDocument

logger = logging.getLogger(__name__)

ElementId = str
Ideal = FrozenSet[ElementId]
Pair = Tuple[ElementId, ElementId]

EMPTY_IDEAL: Ideal = frozenset()


def _pair(a: ElementId, b: ElementId) -> Pair:
    return (a, b) if a <= b else (b, a)


@dataclass(frozen=True)
class Pip:
    """Immutable PIP. Inconsistent pairs are stored sorted, so symmetry is structural."""

    elements: Tuple[ElementId, ...]
    covers: FrozenSet[Pair]
    inconsistent: FrozenSet[Pair]

    @classmethod
    def build(cls, elements: Iterable[ElementId], covers: Iterable[Sequence[ElementId]] = (),
              inconsistent: Iterable[Sequence[ElementId]] = ()) -> "Pip":
        names = list(elements)
        for name in names:
            if not isinstance(name, str) or not name:
                raise PipError(f"element names must be non-empty strings, got {name!r}")
        if len(set(names)) != len(names):
            duplicates = sorted({n for n in names if names.count(n) > 1})
            raise PipError(f"duplicate element(s): {', '.join(duplicates)}")
        cover_pairs = set()
        for pair in covers:
            lower, upper = _two(pair, "cover")
            cover_pairs.add((lower, upper))
        conflict_pairs = set()
        for pair in inconsistent:
            a, b = _two(pair, "inconsistent pair")
            conflict_pairs.add(_pair(a, b))
        return cls(tuple(sorted(names)), frozenset(cover_pairs), frozenset(conflict_pairs))

    def __len__(self) -> int:
        return len(self.elements)

    def unknown_names(self) -> FrozenSet[ElementId]:
        known = set(self.elements)
        used = {x for pair in self.covers | self.inconsistent for x in pair}
        return frozenset(used - known)

    @cached_property
    def order_graph(self) -> nx.DiGraph:
        g = nx.DiGraph()
        g.add_nodes_from(self.elements)
        g.add_edges_from(self.covers)
        return g

    @cached_property
    def down(self) -> Dict[ElementId, FrozenSet[ElementId]]:
        """Strict lower set of every element."""
        unknown = self.unknown_names()
        if unknown:
            raise UnknownElementError(unknown)
        g = self.order_graph
        if not nx.is_directed_acyclic_graph(g):
            cycle = [u for u, _ in nx.find_cycle(g)]
            raise PipError(f"cover relation has a cycle: {' < '.join(cycle + cycle[:1])}")
        return {e: frozenset(nx.ancestors(g, e)) for e in self.elements}

    @cached_property
    def up(self) -> Dict[ElementId, FrozenSet[ElementId]]:
        """Strict upper set of every element."""
        above: Dict[ElementId, set] = {e: set() for e in self.elements}
        for e, lower in self.down.items():
            for d in lower:
                above[d].add(e)
        return {e: frozenset(s) for e, s in above.items()}

    @cached_property
    def conflicts(self) -> Dict[ElementId, FrozenSet[ElementId]]:
        """Elements inconsistent with each element, as stored (complete once closed)."""
        table: Dict[ElementId, set] = {e: set() for e in self.elements}
        for a, b in self.inconsistent:
            if a != b and a in table and b in table:
                table[a].add(b)
                table[b].add(a)
        return {e: frozenset(s) for e, s in table.items()}

    def leq(self, a: ElementId, b: ElementId) -> bool:
        return a == b or a in self.down[b]

    def is_inconsistent(self, a: ElementId, b: ElementId) -> bool:
        return _pair(a, b) in self.inconsistent

    @cached_property
    def _bit_index(self) -> Tuple[List[ElementId], List[int], List[int]]:
        # Positions follow a linear extension, so every lower set sits at smaller positions.
        order = list(nx.lexicographical_topological_sort(self.order_graph))
        pos = {e: k for k, e in enumerate(order)}
        down = [sum(1 << pos[d] for d in self.down[e]) for e in order]
        conflict = [sum(1 << pos[c] for c in self.conflicts[e]) for e in order]
        return order, down, conflict


def _two(pair: Sequence[ElementId], what: str) -> Pair:
    items = list(pair)
    if len(items) != 2:
        raise PipError(f"{what} must have exactly two entries, got {items!r}")
    return items[0], items[1]


# ---------------------------------------------------------------------------
# validation and closure
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Violation:
    check: str
    witness: Tuple
    message: str


@dataclass(frozen=True)
class ValidationReport:
    violations: Tuple[Violation, ...]
    warnings: Tuple[Violation, ...] = ()

    @property
    def valid(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.valid

    def checks_failed(self) -> FrozenSet[str]:
        return frozenset(v.check for v in self.violations)


def validate(pip: Pip, permissive: bool = False) -> ValidationReport:
    """
    Check every PIP invariant and report each violation with its witness.

    Checks: element names known, cover digraph acyclic, inconsistency
    irreflexive (symmetry holds by construction), upward closure, and no
    inconsistent pair of comparable elements. With permissive=True the last
    check is downgraded to a warning.
    """
    violations: List[Violation] = []
    warnings: List[Violation] = []

    for name in sorted(pip.unknown_names()):
        violations.append(Violation("unknown-element", (name,), f"{name} is not an element"))

    for a, b in sorted(pip.inconsistent):
        if a == b:
            violations.append(Violation("irreflexive", (a, a), f"{a} is declared inconsistent with itself"))

    known = set(pip.elements)
    g = nx.DiGraph()
    g.add_nodes_from(pip.elements)
    g.add_edges_from((lo, hi) for lo, hi in pip.covers if lo in known and hi in known)
    if not nx.is_directed_acyclic_graph(g):
        cycle = tuple(u for u, _ in nx.find_cycle(g))
        violations.append(Violation("acyclic", cycle, f"cover relation has a cycle through {', '.join(cycle)}"))
        return ValidationReport(tuple(violations), tuple(warnings))

    if violations:
        # order data is undefined with unknown names; the remaining checks need it
        return ValidationReport(tuple(violations), tuple(warnings))

    missing = set()
    for p, q in sorted(pip.inconsistent):
        if p == q:
            continue
        for a in sorted(pip.up[p] | {p}):
            for b in sorted(pip.up[q] | {q}):
                if a == b:
                    continue
                pair = _pair(a, b)
                if pair not in pip.inconsistent and pair not in missing:
                    missing.add(pair)
                    violations.append(Violation(
                        "upward-closure", ((p, q), pair),
                        f"{p} and {q} are inconsistent but {pair[0]} and {pair[1]} are not"))

    for p, q in sorted(pip.inconsistent):
        if p != q and (pip.leq(p, q) or pip.leq(q, p)):
            lower, upper = (p, q) if pip.leq(p, q) else (q, p)
            issue = Violation("comparable-inconsistent", (lower, upper),
                              f"{lower} <= {upper} but they are inconsistent; {upper} lies in no consistent ideal")
            (warnings if permissive else violations).append(issue)

    return ValidationReport(tuple(violations), tuple(warnings))


def close(pip: Pip) -> Pip:
    """Upward closure of the inconsistency relation. Returns pip itself when already closed."""
    closed = set(pip.inconsistent)
    for p, q in pip.inconsistent:
        if p == q:
            continue
        for a in pip.up[p] | {p}:
            for b in pip.up[q] | {q}:
                if a != b:
                    closed.add(_pair(a, b))
    if len(closed) == len(pip.inconsistent):
        return pip
    logger.debug("closed %d inconsistent pairs to %d", len(pip.inconsistent), len(closed))
    return replace(pip, inconsistent=frozenset(closed))


def require_valid(pip: Pip, permissive: bool = False) -> Pip:
    """Close and validate, raising PipError on the first violation."""
    closed = close(pip)
    report = validate(closed, permissive=permissive)
    if not report.valid:
        first = report.violations[0]
        raise PipError(f"invalid PIP ({first.check}): {first.message}")
    return closed


# ---------------------------------------------------------------------------
# consistent order ideals
# ---------------------------------------------------------------------------

def _require_known(pip: Pip, s: Iterable[ElementId]) -> Ideal:
    members = frozenset(s)
    unknown = members - set(pip.elements)
    if unknown:
        raise UnknownElementError(unknown)
    return members


def is_consistent_ideal(pip: Pip, s: Iterable[ElementId]) -> bool:
    members = _require_known(pip, s)
    return all(pip.down[x] <= members and not (pip.conflicts[x] & members) for x in members)


def _ideal_masks(pip: Pip, ceiling: int, what: str) -> Iterator[int]:
    """
    Depth-first enumeration along the lexicographic linear extension: each
    element is excluded first and included when its lower set is present and
    it conflicts with nothing chosen so far. Every ideal appears exactly once.
    """
    _, down, conflict = pip._bit_index
    n = len(down)
    produced = 0
    stack = [(0, 0)]
    while stack:
        k, mask = stack.pop()
        while k < n:
            if not (down[k] & ~mask) and not (conflict[k] & mask):
                stack.append((k + 1, mask | (1 << k)))
            k += 1
        produced += 1
        if produced > ceiling:
            raise ResourceGuardError(what, ceiling)
        yield mask


def iter_consistent_ideals(pip: Pip, limit: int = None) -> Iterator[Ideal]:
    order = pip._bit_index[0]
    for mask in _ideal_masks(pip, resource_limit(limit), "consistent ideal enumeration"):
        yield frozenset(order[b] for b in range(len(order)) if mask >> b & 1)


def consistent_ideals(pip: Pip, mode: Literal["enumerate", "count"] = "enumerate",
                      limit: int = None) -> Union[List[Ideal], int]:
    if mode == "enumerate":
        ideals = list(iter_consistent_ideals(pip, limit))
        logger.debug("enumerated %d consistent ideals of a %d-element PIP", len(ideals), len(pip))
        return ideals
    if mode == "count":
        return sum(1 for _ in _ideal_masks(pip, resource_limit(limit), "consistent ideal count"))
    raise ValueError(f"mode must be 'enumerate' or 'count', got {mode!r}")


class Moves(NamedTuple):
    removable: FrozenSet[ElementId]
    addable: FrozenSet[ElementId]


def available_moves(pip: Pip, i: Iterable[ElementId]) -> Moves:
    """The maximal elements of i, and the minimal elements of P - i consistent with i."""
    ideal = _require_known(pip, i)
    if not is_consistent_ideal(pip, ideal):
        raise InvalidIdealError(f"not a consistent order ideal: {{{', '.join(sorted(ideal))}}}")
    removable = frozenset(x for x in ideal if not (pip.up[x] & ideal))
    addable = frozenset(x for x in pip.elements
                        if x not in ideal and pip.down[x] <= ideal and not (pip.conflicts[x] & ideal))
    return Moves(removable, addable)


def toggle(pip: Pip, i: Iterable[ElementId], element: ElementId) -> Ideal:
    """Press one button of the remote control: cross the hyperplane `element`."""
    ideal = frozenset(i)
    removable, addable = available_moves(pip, ideal)
    if element in removable:
        return ideal - {element}
    if element in addable:
        return ideal | {element}
    raise InvalidIdealError(f"{element} cannot be crossed from {{{', '.join(sorted(ideal))}}}")


# ---------------------------------------------------------------------------
# Hasse form, interchange and generation
# ---------------------------------------------------------------------------

def hasse_covers(pip: Pip) -> List[Pair]:
    pip.down  # raises on cycles or unknown names
    return sorted(nx.transitive_reduction(pip.order_graph).edges())


def minimal_inconsistent_pairs(pip: Pip) -> List[Pair]:
    minimal = []
    for p, q in sorted(pip.inconsistent):
        implied = any(
            (a, b) != (p, q) and a != b and pip.is_inconsistent(a, b)
            for a in pip.down[p] | {p}
            for b in pip.down[q] | {q}
        )
        if not implied:
            minimal.append((p, q))
    return minimal


def to_document(pip: Pip) -> PipDocument:
    return PipDocument(
        elements=list(pip.elements),
        covers=[list(c) for c in hasse_covers(pip)],
        inconsistent=[list(p) for p in minimal_inconsistent_pairs(pip)],
    )


def from_document(doc: PipDocument) -> Pip:
    return Pip.build(doc.elements, doc.covers, doc.inconsistent)


def to_json(pip: Pip) -> str:
    return to_document(pip).model_dump_json(indent=2)


def from_json(text: str) -> Pip:
    return from_document(PipDocument.model_validate_json(text))


def to_dot(pip: Pip) -> str:
    lines = ["digraph pip {", "  rankdir=BT;"]
    for e in pip.elements:
        lines.append(f'  "{e}";')
    for lower, upper in hasse_covers(pip):
        lines.append(f'  "{lower}" -> "{upper}";')
    for a, b in minimal_inconsistent_pairs(pip):
        lines.append(f'  "{a}" -> "{b}" [style=dotted, dir=none, constraint=false];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def random_pip(rng: random.Random, size: int, order_density: float = 0.3,
               conflict_density: float = 0.3) -> Pip:
    """
    Random valid closed PIP on `size` elements. Cover arcs only go from lower
    to higher index, and conflicts are only drawn between elements whose
    closed up-sets are disjoint, so the closure never pairs comparable elements.
    """
    width = len(str(max(size - 1, 0)))
    names = [f"p{k:0{width}d}" for k in range(size)]
    covers = [(names[a], names[b]) for a in range(size) for b in range(a + 1, size)
              if rng.random() < order_density]
    poset = Pip.build(names, covers)
    conflicts = []
    for a in range(size):
        for b in range(a + 1, size):
            if rng.random() >= conflict_density:
                continue
            p, q = names[a], names[b]
            if not ((poset.up[p] | {p}) & (poset.up[q] | {q})):
                conflicts.append((p, q))
    return close(Pip.build(names, hasse_covers(poset), conflicts))
