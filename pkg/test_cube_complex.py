import networkx as nx
import pytest
from hypothesis import given, settings

from conftest import pips
from cubeplan.cube_complex import (Certificate, CubeComplex, Refutation, euler_characteristic, extract_pip, from_json,
                                   from_pip, hyperplane_names, hyperplanes, is_cat0, is_flag, link, square_fan,
                                   to_document, to_dot, to_json)
from cubeplan.errors import ComplexError, DisconnectedError, NotCat0Error
from cubeplan.pip_core import EMPTY_IDEAL, Pip, close, hasse_covers, minimal_inconsistent_pairs


def square() -> CubeComplex:
    edges = [("00", "10", "x"), ("00", "01", "y"), ("10", "11", "y"), ("01", "11", "x")]
    return CubeComplex.build(["00", "01", "10", "11"], edges, [("00", ["x", "y"])], root="00")


def path3(root: str = "m") -> CubeComplex:
    return CubeComplex.build(["u", "m", "w"], [("m", "u", "s"), ("m", "w", "t")], root=root)


def same_pip(a: Pip, b: Pip) -> bool:
    return a.elements == b.elements and hasse_covers(a) == hasse_covers(b) and a.inconsistent == b.inconsistent


# ---------------------------------------------------------------------------
# construction
# ---------------------------------------------------------------------------

def test_from_pip_of_two_free_elements_is_a_square():
    x = from_pip(Pip.build(["a", "b"]))
    assert len(x.vertices) == 4
    assert len(x.edges) == 4
    assert x.cube_counts() == {0: 4, 1: 4, 2: 1}
    assert x.root == EMPTY_IDEAL


def test_from_pip_of_chain_is_a_path(chain):
    x = from_pip(chain)
    assert x.cube_counts() == {0: 3, 1: 2}
    assert x.max_dimension() == 1


def test_from_pip_of_conflict_is_rooted_at_the_middle(conflict_pair):
    x = from_pip(conflict_pair)
    assert len(x.vertices) == 3
    assert set(x.steps[EMPTY_IDEAL]) == {"a", "b"}
    assert x.neighbor(EMPTY_IDEAL, "a") == frozenset("a")


def test_three_cube(antichain):
    x = from_pip(antichain)
    assert x.cube_counts() == {0: 8, 1: 12, 2: 6, 3: 1}
    assert x.max_dimension() == 3
    assert euler_characteristic(x) == 1
    assert x.diagonal_graph.number_of_edges() == 28


def test_build_rejects_repeated_label_at_a_vertex():
    with pytest.raises(ComplexError, match="two edges"):
        CubeComplex.build(["a", "b", "c"], [("a", "b", "x"), ("a", "c", "x")])


def test_build_rejects_unknown_endpoint_and_root():
    with pytest.raises(ComplexError):
        CubeComplex.build(["a"], [("a", "b", "x")])
    with pytest.raises(ComplexError):
        CubeComplex.build(["a", "b"], [("a", "b", "x")], root="z")


def test_build_rejects_open_cube():
    edges = [("00", "10", "x"), ("00", "01", "y"), ("10", "11", "y")]
    with pytest.raises(ComplexError, match="leaves the cube"):
        CubeComplex.build(["00", "01", "10", "11"], edges, [("00", ["x", "y"])])


def test_build_rejects_disconnected_skeleton():
    with pytest.raises(DisconnectedError):
        CubeComplex.build(["a", "b", "c"], [("a", "b", "x")])


# ---------------------------------------------------------------------------
# hyperplanes and extraction
# ---------------------------------------------------------------------------

def test_hyperplane_counts():
    assert len(hyperplanes(square())) == 2
    assert len(hyperplanes(path3())) == 2


def test_hyperplane_names_fall_back_to_ids():
    x = CubeComplex.build(["a", "b", "c"], [("a", "b", "x"), ("b", "c", "y")])
    assert sorted(hyperplane_names(hyperplanes(x)).values()) == ["x", "y"]

    cycle = CubeComplex.build(["a", "b", "c", "d"],
                              [("a", "b", "x"), ("b", "c", "y"), ("c", "d", "x"), ("d", "a", "y")])
    names = hyperplane_names(hyperplanes(cycle))
    assert sorted(names.values()) == ["h0", "h1", "h2", "h3"]


def test_extract_square_gives_two_free_elements():
    for root in square().vertices:
        extraction = extract_pip(square(), root)
        assert extraction.pip.elements == ("x", "y")
        assert not extraction.pip.covers
        assert not extraction.pip.inconsistent


def test_extract_path_rooted_at_the_middle():
    extraction = extract_pip(path3())
    assert extraction.pip.elements == ("s", "t")
    assert extraction.pip.inconsistent == {("s", "t")}
    assert extraction.ideal_of["w"] == {"t"}


def test_extract_path_rooted_at_an_end():
    extraction = extract_pip(path3(), "u")
    assert extraction.pip.covers == {("s", "t")}
    assert not extraction.pip.inconsistent


def test_extract_needs_a_root():
    x = CubeComplex.build(["a", "b"], [("a", "b", "x")])
    with pytest.raises(ComplexError):
        extract_pip(x)


def test_empty_cycle_is_path_dependent():
    cycle = CubeComplex.build(["a", "b", "c", "d"],
                              [("a", "b", "x"), ("b", "c", "y"), ("c", "d", "z"), ("d", "a", "w")], root="a")
    with pytest.raises(NotCat0Error) as info:
        extract_pip(cycle)
    assert info.value.refutation.kind == "path-dependent"
    verdict = is_cat0(cycle)
    assert isinstance(verdict, Refutation)
    assert not verdict
    assert verdict.kind == "path-dependent"


# ---------------------------------------------------------------------------
# links and certification
# ---------------------------------------------------------------------------

def test_link_at_a_square_corner_is_one_edge():
    lk = link(square(), "11")
    assert lk.points == {"x", "y"}
    assert lk.edges() == [("x", "y")]
    assert is_flag(lk)


def test_link_of_three_squares_is_an_empty_triangle():
    check = is_flag(link(square_fan(3), "c"))
    assert not check
    assert check.witness == {"l0", "l1", "l2"}


def test_link_of_five_squares_is_a_pentagon():
    lk = link(square_fan(5), "c")
    assert len(lk.points) == 5
    assert len(lk.edges()) == 5
    assert is_flag(lk)


def test_square_fan_needs_three_squares():
    with pytest.raises(ComplexError):
        square_fan(2)


def test_three_squares_are_refuted():
    verdict = is_cat0(square_fan(3))
    assert isinstance(verdict, Refutation)
    assert verdict.kind == "bad-link"
    assert verdict.witness == ("c", ("l0", "l1", "l2"))


def test_five_squares_are_certified():
    x = square_fan(5)
    verdict = is_cat0(x)
    assert isinstance(verdict, Certificate)
    assert (len(x.vertices), len(x.edges)) == (11, 15)
    assert verdict.hyperplane_count == 5
    assert verdict.max_dimension == 2
    assert verdict.euler_characteristic == 1
    assert verdict.pip.inconsistent == {("l0", "l2"), ("l0", "l3"), ("l1", "l3"), ("l1", "l4"), ("l2", "l4")}


def test_euler_characteristic_of_small_complexes():
    assert euler_characteristic(square()) == 1
    assert euler_characteristic(path3()) == 1


def test_certificate_round_trips_a_fixed_pip():
    pip = Pip.build(["a", "b", "c", "d"], [("a", "b")], [("b", "d")])
    verdict = is_cat0(from_pip(pip))
    assert verdict
    assert same_pip(verdict.pip, pip)


def test_every_root_certifies():
    x = from_pip(close(Pip.build(["a", "b", "c", "d"], [("a", "b"), ("c", "d")], [("b", "c")])))
    for root in x.vertices:
        verdict = is_cat0(x, root)
        assert isinstance(verdict, Certificate), root
        assert verdict.hyperplane_count == 4
        assert verdict.extraction.ideal_of[root] == EMPTY_IDEAL


@settings(max_examples=500, deadline=None)
@given(pips(max_size=10))
def test_pip_round_trip(pip):
    x = from_pip(pip)
    verdict = is_cat0(x)
    assert isinstance(verdict, Certificate)
    assert same_pip(verdict.pip, pip)
    assert verdict.euler_characteristic == 1


@settings(max_examples=30, deadline=None)
@given(pips(max_size=5))
def test_round_trip_from_any_root(pip):
    x = from_pip(pip)
    for root in x.vertices:
        verdict = is_cat0(x, root)
        assert verdict
        assert verdict.hyperplane_count == len(pip)
        assert len(x.vertices) == len(from_pip(verdict.pip).vertices)


def six_hyperplanes() -> Pip:
    """Two chains joined at C, with C and everything above it inconsistent with F."""
    return close(Pip.build(list("ABCDEF"), [("A", "C"), ("B", "C"), ("C", "E"), ("B", "D")], [("C", "F")]))


def assert_shortest_paths_cross_once(x: CubeComplex, root) -> None:
    extraction = extract_pip(x, root)
    for w in x.vertices:
        for path in nx.all_shortest_paths(x.skeleton, root, w):
            crossed = [extraction.edge_element[frozenset(e)] for e in zip(path, path[1:])]
            assert len(set(crossed)) == len(crossed), path
            assert set(crossed) == extraction.ideal_of[w], path


def test_six_hyperplanes_from_every_root():
    pip = six_hyperplanes()
    assert minimal_inconsistent_pairs(pip) == [("C", "F")]
    x = from_pip(pip)
    assert len(hyperplanes(x)) == 6
    for root in x.vertices:
        verdict = is_cat0(x, root)
        assert isinstance(verdict, Certificate), root
        assert sorted(verdict.pip.elements) == list("ABCDEF")
        rebuilt = from_pip(verdict.pip)
        assert rebuilt.cube_counts() == x.cube_counts()
    assert same_pip(is_cat0(x, EMPTY_IDEAL).pip, pip)


def test_shortest_paths_of_six_hyperplanes():
    x = from_pip(six_hyperplanes())
    for root in (EMPTY_IDEAL, frozenset("ABCE"), frozenset("BDF")):
        assert_shortest_paths_cross_once(x, root)


@settings(max_examples=40, deadline=None)
@given(pips(max_size=6))
def test_shortest_paths_cross_each_hyperplane_once(pip):
    x = from_pip(pip)
    assert_shortest_paths_cross_once(x, x.root)


# ---------------------------------------------------------------------------
# interchange
# ---------------------------------------------------------------------------

def test_fixtures_match_square_fans(fixtures_dir):
    for k, name in ((3, "three-squares.json"), (5, "five-squares.json")):
        x = from_json((fixtures_dir / name).read_text(encoding="utf-8"))
        assert to_document(x) == to_document(square_fan(k))
        assert x.root == "c"


def test_json_and_dot_export():
    x = from_json(to_json(square()))
    assert to_document(x) == to_document(square())
    dot = to_dot(square())
    assert dot.startswith("graph complex {")
    assert '"00" [label="00", shape=doublecircle];' in dot
    assert dot.count(" -- ") == 4
