"""
The robotic arm R_{m,n}: n unit links facing up, down or right, pinned at the
lower left corner of a tunnel of height m, moving by corner flips and end
rotations without colliding with itself.

States are direction words over D, R, U read from the base. A word is valid
when its lattice path visits n + 1 distinct points with 0 <= y <= m.
"""

import logging
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Literal, Optional, Sequence, Set, Tuple

from cubeplan.cube_complex import Certificate, CubeComplex, Refutation, is_cat0, vertex_name
from cubeplan.errors import InvalidStateError, InvariantViolation, ResourceGuardError
from cubeplan.geodesic import GeodesicPlan, geodesic
from cubeplan.pip_core import Ideal, Pip
from cubeplan.settings import resource_limit

logger = logging.getLogger(__name__)

ArmState = str
DIRECTIONS = "DRU"
STEP = {"D": (0, -1), "R": (1, 0), "U": (0, 1)}


@dataclass(frozen=True)
class ArmSpec:
    """Tunnel height m (lattice rows 0..m) and arm length n."""

    height: int
    length: int

    def __post_init__(self):
        for name in ("height", "length"):
            value = getattr(self, name)
            if not isinstance(value, int) or isinstance(value, bool) or value < 1:
                raise InvalidStateError(f"{name} must be a positive integer, got {value!r}")

    @property
    def straight(self) -> ArmState:
        return "R" * self.length

    def __str__(self) -> str:
        return f"R_{{{self.height},{self.length}}}"


@dataclass(frozen=True, order=True)
class ArmMove:
    kind: Literal["flip", "rotate"]
    index: int = 0  # 1-based position of the first of the two flipped links
    direction: str = ""  # new direction of the last link

    @classmethod
    def flip(cls, index: int) -> "ArmMove":
        return cls("flip", index=index)

    @classmethod
    def rotate(cls, direction: str) -> "ArmMove":
        return cls("rotate", direction=direction)

    def support(self, length: int) -> FrozenSet[int]:
        if self.kind == "flip":
            return frozenset((self.index, self.index + 1))
        return frozenset((length,))

    def apply(self, word: ArmState) -> ArmState:
        if self.kind == "flip":
            k = self.index - 1
            return word[:k] + word[k + 1] + word[k] + word[k + 2:]
        return word[:-1] + self.direction

    def label(self, word: ArmState) -> str:
        """Edge label, the same from both ends of the edge."""
        if self.kind == "flip":
            return f"flip:{self.index}"
        return "rot:" + "".join(sorted(word[-1] + self.direction))

    def __str__(self) -> str:
        if self.kind == "flip":
            return f"Flip({self.index})"
        return f"Rotate({self.direction})"


def _path_ok(height: int, word: str) -> bool:
    x = y = 0
    seen = {(0, 0)}
    for c in word:
        dx, dy = STEP[c]
        x, y = x + dx, y + dy
        if y < 0 or y > height or (x, y) in seen:
            return False
        seen.add((x, y))
    return True


def _check_word(spec: ArmSpec, word: str) -> None:
    if not isinstance(word, str) or len(word) != spec.length or any(c not in STEP for c in word):
        raise InvalidStateError(f"{word!r} is not a word of length {spec.length} over D, R, U")


def is_valid(spec: ArmSpec, word: str) -> bool:
    _check_word(spec, word)
    return _path_ok(spec.height, word)


def require_state(spec: ArmSpec, word: str) -> ArmState:
    if not is_valid(spec, word):
        raise InvalidStateError(f"{word} is not a valid state of {spec}")
    return word


def path_points(word: ArmState) -> List[Tuple[int, int]]:
    points = [(0, 0)]
    for c in word:
        dx, dy = STEP[c]
        x, y = points[-1]
        points.append((x + dx, y + dy))
    return points


# ---------------------------------------------------------------------------
# states
# ---------------------------------------------------------------------------

def _grow(height: int, length: int, prefix: str, ceiling: int) -> List[ArmState]:
    points = path_points(prefix)
    seen = set(points)
    out: List[ArmState] = []
    letters = list(prefix)
    # tips[k] is the free end after k links beyond the prefix, tried[k] the directions tried from it
    tips = [points[-1]]
    tried = [0]
    while tried:
        complete = len(letters) == length
        if complete or tried[-1] == len(DIRECTIONS):
            if complete:
                out.append("".join(letters))
                if len(out) > ceiling:
                    raise ResourceGuardError(f"state enumeration of R_{{{height},{length}}}", ceiling)
            tip = tips.pop()
            tried.pop()
            if tried:
                letters.pop()
                seen.remove(tip)
            continue
        c = DIRECTIONS[tried[-1]]
        tried[-1] += 1
        dx, dy = STEP[c]
        x, y = tips[-1]
        px, py = x + dx, y + dy
        if 0 <= py <= height and (px, py) not in seen:
            seen.add((px, py))
            letters.append(c)
            tips.append((px, py))
            tried.append(0)
    return out


def enumerate_states(spec: ArmSpec, limit: int = None, workers: int = 1) -> List[ArmState]:
    """All valid states in lexicographic order (D < R < U)."""
    ceiling = resource_limit(limit)
    if workers <= 1 or spec.length < 3:
        states = _grow(spec.height, spec.length, "", ceiling)
    else:
        prefixes = _grow(spec.height, 2, "", ceiling)
        with ThreadPoolExecutor(max_workers=workers) as executor:
            parts = list(executor.map(lambda p: _grow(spec.height, spec.length, p, ceiling), prefixes))
        states = [s for part in parts for s in part]
        if len(states) > ceiling:
            raise ResourceGuardError(f"state enumeration of {spec}", ceiling)
    logger.debug("%s has %d states", spec, len(states))
    return states


def count_states(spec: ArmSpec) -> int:
    """
    Count states without listing them. Within one column the arm only moves
    vertically, so it collides with itself exactly when U and D are adjacent.
    """
    ways: Dict[Tuple[int, str], int] = {(0, "R"): 1}
    for _ in range(spec.length):
        following: Dict[Tuple[int, str], int] = defaultdict(int)
        for (y, last), count in ways.items():
            following[(y, "R")] += count
            if last != "D" and y < spec.height:
                following[(y + 1, "U")] += count
            if last != "U" and y > 0:
                following[(y - 1, "D")] += count
        ways = following
    return sum(ways.values())


# ---------------------------------------------------------------------------
# moves
# ---------------------------------------------------------------------------

def moves(spec: ArmSpec, s: ArmState) -> List[ArmMove]:
    """Valid flips by index, then valid 90 degree rotations of the last link by target direction."""
    require_state(spec, s)
    result = []
    for i in range(1, spec.length):
        if s[i - 1] != s[i]:
            move = ArmMove.flip(i)
            if _path_ok(spec.height, move.apply(s)):
                result.append(move)
    targets = "DU" if s[-1] == "R" else "R"
    for d in targets:
        move = ArmMove.rotate(d)
        if _path_ok(spec.height, move.apply(s)):
            result.append(move)
    return result


def neighbors(spec: ArmSpec, s: ArmState) -> List[ArmState]:
    return [m.apply(s) for m in moves(spec, s)]


def apply_move(spec: ArmSpec, s: ArmState, move: ArmMove) -> ArmState:
    if move not in moves(spec, s):
        raise InvalidStateError(f"{move} cannot be applied to {s}")
    return move.apply(s)


def _apply_all(word: ArmState, moveset: Iterable[ArmMove]) -> ArmState:
    for move in moveset:
        word = move.apply(word)
    return word


def simultaneous(spec: ArmSpec, s: ArmState, moveset: Sequence[ArmMove]) -> bool:
    """
    Moves can be performed together when they touch disjoint links and every
    subset of them, applied at s, gives a valid state (all 2^k cube corners).
    """
    available = moves(spec, s)
    for move in moveset:
        if move not in available:
            raise InvalidStateError(f"{move} cannot be applied to {s}")
    touched: Set[int] = set()
    for move in moveset:
        support = move.support(spec.length)
        if support & touched:
            return False
        touched |= support
    count = len(moveset)
    for mask in range(1 << count):
        chosen = [moveset[k] for k in range(count) if mask >> k & 1]
        if not _path_ok(spec.height, _apply_all(s, chosen)):
            return False
    return True


# ---------------------------------------------------------------------------
# configuration space
# ---------------------------------------------------------------------------

def _simultaneous_sets(spec: ArmSpec, s: ArmState, available: List[ArmMove],
                       valid: Set[ArmState]) -> Set[FrozenSet[int]]:
    """Index sets of simultaneous moves at s, grown one move at a time."""
    supports = [m.support(spec.length) for m in available]
    family: Set[FrozenSet[int]] = {frozenset([k]) for k in range(len(available))}
    level = sorted(family, key=sorted)
    while level:
        grown = []
        for chosen in level:
            for k in range(max(chosen) + 1, len(available)):
                if any(supports[k] & supports[c] for c in chosen):
                    continue
                candidate = chosen | {k}
                # every smaller corner set is covered by the faces already accepted
                if all(candidate - {c} in family for c in candidate) and \
                        _apply_all(s, (available[c] for c in candidate)) in valid:
                    family.add(candidate)
                    grown.append(candidate)
        level = grown
    return family


def build_complex(spec: ArmSpec, limit: int = None) -> CubeComplex:
    """
    The configuration space of the arm: states, single moves, and a cube for
    every maximal set of simultaneous moves, rooted at the straight arm.
    """
    states = enumerate_states(spec, limit)
    valid = set(states)
    edges = []
    cubes = []
    for s in states:
        available = moves(spec, s)
        edges.extend((s, m.apply(s), m.label(s)) for m in available)
        family = _simultaneous_sets(spec, s, available, valid)
        for chosen in family:
            if len(chosen) < 2 or any(chosen | {k} in family for k in range(len(available)) if k not in chosen):
                continue
            picked = [available[c] for c in sorted(chosen)]
            corners = [_apply_all(s, (picked[k] for k in range(len(picked)) if mask >> k & 1))
                       for mask in range(1 << len(picked))]
            # record each maximal cube once, from its smallest corner
            if s == min(corners):
                cubes.append((s, [m.label(s) for m in picked]))
    logger.info("%s: %d states, %d edges, %d maximal cubes", spec, len(states), len(edges) // 2, len(cubes))
    return CubeComplex.build(states, edges, cubes, root=spec.straight, check=False)


def certify(spec: ArmSpec, root: Optional[ArmState] = None, limit: int = None) -> Certificate:
    x = build_complex(spec, limit)
    return _certify(spec, x, root, limit)


def _certify(spec: ArmSpec, x: CubeComplex, root: Optional[ArmState], limit: Optional[int]) -> Certificate:
    root = require_state(spec, root) if root is not None else spec.straight
    verdict = is_cat0(x, root, limit=limit)
    if isinstance(verdict, Refutation):
        # the arm complex is always CAT(0); a refutation is a bug here
        raise InvariantViolation(f"{spec} failed certification: {verdict.kind}: {verdict.message}",
                                 verdict.witness)
    return verdict


def arm_pip(spec: ArmSpec, root: Optional[ArmState] = None, limit: int = None) -> Pip:
    return certify(spec, root, limit).pip


@dataclass(frozen=True, eq=False)
class RemoteControl:
    """The certified PIP of an arm used to drive it between states."""

    spec: ArmSpec
    complex: CubeComplex
    certificate: Certificate

    @classmethod
    def build(cls, spec: ArmSpec, root: Optional[ArmState] = None, limit: int = None) -> "RemoteControl":
        x = build_complex(spec, limit)
        return cls(spec, x, _certify(spec, x, root, limit))

    @property
    def pip(self) -> Pip:
        return self.certificate.pip

    def ideal(self, state: ArmState) -> Ideal:
        require_state(self.spec, state)
        return self.certificate.extraction.ideal_of[state]

    def state(self, ideal: Ideal) -> ArmState:
        try:
            return self.certificate.extraction.vertex_of[frozenset(ideal)]
        except KeyError:
            raise InvalidStateError(f"no state has the ideal {vertex_name(frozenset(ideal))}") from None

    def plan(self, start: ArmState, goal: ArmState, metric: str) -> Tuple[GeodesicPlan, List[ArmState]]:
        plan = geodesic(self.pip, self.ideal(start), self.ideal(goal), metric)
        return plan, [self.state(ideal) for ideal in plan.vertex_trace]
