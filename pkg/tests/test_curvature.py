import random
from fractions import Fraction

import pytest

from trifold.curvature import (
    AngledComplex,
    BoundaryPath,
    Cell,
    ComplexError,
    DiscDiagram,
    build_patch,
    complex_from_document,
    complex_to_document,
    extract_disc_diagrams,
    ladder_fixture,
    polygon_fixture,
    triangle_fixture,
)

F = Fraction


def test_vertex_curvature_cases():
    # interior vertex with three 2pi/3 corners is flat
    y = polygon_fixture(6, F(2, 3))
    assert y.vertex_curvature(0) == F(1, 3)  # boundary vertex, one corner
    tri = triangle_fixture(F(0))
    assert tri.vertex_curvature(0) == 1  # zero corner on the boundary
    tri3 = triangle_fixture(F(2, 3))
    assert tri3.vertex_curvature(0) == F(1, 3)


def test_face_curvature_cases():
    assert triangle_fixture(F(0)).face_curvature(0) == -1
    for n in (6, 8, 10):
        y = polygon_fixture(n, F(2, 3))
        assert y.face_curvature(0) == -F(n - 6, 3)
    assert triangle_fixture(F(1, 3)).face_curvature(0) == 0


def test_euler_characteristic_cases():
    assert triangle_fixture(F(1, 3)).euler_characteristic() == 1
    circle = AngledComplex(3, [(0, 1), (1, 2), (2, 0)], [])
    assert circle.euler_characteristic() == 0
    sphere_like = AngledComplex(
        3,
        [(0, 1), (1, 2), (2, 0)],
        [
            Cell((0, 1, 2), (0, 1, 2), (F(1, 3),) * 3),
            Cell((0, 1, 2), (0, 1, 2), (F(2, 3),) * 3),
        ],
    )
    assert sphere_like.euler_characteristic() == 2
    assert sphere_like.gauss_bonnet().ok


def test_gauss_bonnet_trivial_fixtures():
    for y in (triangle_fixture(F(1, 3)), triangle_fixture(F(0)), polygon_fixture(6, F(2, 3))):
        verdict = y.gauss_bonnet()
        assert verdict.ok and verdict.rhs == 2


def test_gauss_bonnet_on_circle_alone():
    circle = AngledComplex(4, [(0, 1), (1, 2), (2, 3), (3, 0)], [])
    verdict = circle.gauss_bonnet()
    assert verdict.ok and verdict.rhs == 0


def test_gauss_bonnet_random_angles_identity():
    rng = random.Random(99)
    base = polygon_fixture(8, F(2, 3))
    for _ in range(25):
        corners = tuple(F(rng.randrange(0, 9), rng.randrange(1, 7)) for _ in range(8))
        y = AngledComplex(8, list(base.edges), [Cell(base.cells[0].vertices, base.cells[0].edges, corners)])
        assert y.gauss_bonnet().ok


def test_path_curvatures():
    diagram, g = ladder_fixture(2)
    y = diagram.complex
    # single-edge subpath has no interior vertices
    sub = DiscDiagram(
        y,
        {
            "e": BoundaryPath(
                diagram.paths[g].vertices[:2], diagram.paths[g].edges[:1]
            ),
            "g": diagram.paths[g],
        },
    )
    assert sub.path_vertex_curvature("e") == 0
    # a flat hexagon contributes no face curvature along its half boundary
    hexa = polygon_fixture(6, F(2, 3))
    half = DiscDiagram(
        hexa, {"g": BoundaryPath([0, 1, 2, 3], [0, 1, 2])}
    )
    assert half.path_face_curvature("g") == 0
    # disjoint paths on one hexagon share no cell only if vertex-disjoint
    two = DiscDiagram(
        hexa,
        {
            "g": BoundaryPath([0, 1], [0]),
            "h": BoundaryPath([3, 4], [3]),
        },
    )
    assert two.shared_face_curvature("g", "h") == hexa.face_curvature(0)


def test_shared_face_curvature_disjoint_and_overlapping():
    # far ends of the three-hexagon ladder share no cell; adjacent subpaths
    # share the triangle between them
    diagram, g = ladder_fixture(3)
    path = diagram.paths[g]
    left = BoundaryPath(path.vertices[:2], path.edges[:1])
    right = BoundaryPath(path.vertices[-2:], path.edges[-1:])
    d = DiscDiagram(diagram.complex, {"l": left, "r": right})
    assert d.shared_face_curvature("l", "r") == 0

    short, g2 = ladder_fixture(2)
    p2 = short.paths[g2]
    a = BoundaryPath(p2.vertices[:2], p2.edges[:1])
    b = BoundaryPath(p2.vertices[2:], p2.edges[2:])
    d2 = DiscDiagram(short.complex, {"a": a, "b": b})
    # only the middle triangle meets both, and its curvature is -pi
    assert d2.shared_face_curvature("a", "b") == -1


def test_census_hand_counts():
    diagram, g = ladder_fixture(2)
    census = diagram.census(g)
    assert census.polygon_counts == {(6, 1): 2}
    assert census.triangle_count == 1
    assert census.ladder_bound_holds

    diagram, g = ladder_fixture(3)
    census = diagram.census(g)
    assert census.polygon_counts == {(6, 1): 2, (6, 2): 1}
    assert census.triangle_count == 2
    assert census.ladder_bound_holds


def test_census_single_hexagon():
    hexa = polygon_fixture(6, F(2, 3))
    d = DiscDiagram(hexa, {"g": BoundaryPath([0, 1], [0])})
    census = d.census("g")
    assert census.polygon_counts == {(6, 0): 1}
    assert census.triangle_count == 0


def _hexagon_with_corners(corners):
    edges = [(i, (i + 1) % 6) for i in range(6)]
    return AngledComplex(6, edges, [Cell(tuple(range(6)), tuple(range(6)), corners)])


def test_positive_curvature_classification():
    # exactly two positively curved path vertices reach the n/2 - 1 maximum
    path = BoundaryPath([0, 1, 2, 3], [0, 1, 2])
    two = _hexagon_with_corners((F(1), F(2, 3), F(2, 3), F(1), F(1), F(1)))
    d = DiscDiagram(two, {"g": path})
    assert [v for v in range(6) if two.vertex_curvature(v) > 0] == [1, 2]
    assert d.classify_positive_curvature("g", 0) == "max"
    one = _hexagon_with_corners((F(1), F(2, 3), F(1), F(1), F(1), F(1)))
    assert DiscDiagram(one, {"g": path}).classify_positive_curvature("g", 0) == "almost-max"
    none = _hexagon_with_corners((F(1),) * 6)
    assert DiscDiagram(none, {"g": path}).classify_positive_curvature("g", 0) == "neither"


def test_classification_octagon_with_two_triangles():
    # octagon flanked by two path-adjacent triangles: threshold is 4
    verts = list(range(10))
    edges = []
    eidx = {}

    def eid(a, b):
        key = (min(a, b), max(a, b))
        if key not in eidx:
            eidx[key] = len(edges)
            edges.append(key)
        return eidx[key]

    octagon = Cell(
        (0, 1, 2, 3, 8, 9, 7, 6),
        tuple(
            eid(a, b)
            for a, b in [(0, 1), (1, 2), (2, 3), (3, 8), (8, 9), (9, 7), (7, 6), (6, 0)]
        ),
        (F(2, 3),) * 8,
    )
    tri_l = Cell((4, 0, 6), (eid(4, 0), eid(0, 6), eid(6, 4)), (F(0),) * 3)
    tri_r = Cell((3, 5, 8), (eid(3, 5), eid(5, 8), eid(8, 3)), (F(0),) * 3)
    y = AngledComplex(10, edges, [octagon, tri_l, tri_r])
    path = BoundaryPath([4, 0, 1, 2, 3, 5], [eid(4, 0), eid(0, 1), eid(1, 2), eid(2, 3), eid(3, 5)])
    d = DiscDiagram(y, {"g": path})
    census = d.census("g")
    assert census.polygon_counts == {(8, 2): 1}
    assert census.triangle_count == 2
    positive = sum(
        1 for v in octagon.vertices if v in set(path.vertices) and y.vertex_curvature(v) > 0
    )
    assert positive == 4  # threshold n/2 with two path-adjacent triangles
    assert d.classify_positive_curvature("g", 0) == "max"

    # flattening one corner drops to three positive vertices: almost maximal
    flat = Cell(octagon.vertices, octagon.edges,
                (F(2, 3), F(1), F(2, 3), F(2, 3), F(2, 3), F(2, 3), F(2, 3), F(2, 3)))
    y2 = AngledComplex(10, edges, [flat, tri_l, tri_r])
    d2 = DiscDiagram(y2, {"g": path})
    assert d2.classify_positive_curvature("g", 0) == "almost-max"


def test_additivity_inclusion_exclusion():
    diagram, g = ladder_fixture(3)
    path = diagram.paths[g]
    a = BoundaryPath(path.vertices[:3], path.edges[:2])
    b = BoundaryPath(path.vertices[2:], path.edges[2:])
    d = DiscDiagram(diagram.complex, {"a": a, "b": b})
    union_vertices = set(a.vertices) | set(b.vertices)
    total = sum(
        (
            d.complex.face_curvature(c)
            for c, cell in enumerate(d.complex.cells)
            if union_vertices.intersection(cell.vertices)
        ),
        F(0),
    )
    assert (
        d.path_face_curvature("a")
        + d.path_face_curvature("b")
        - d.shared_face_curvature("a", "b")
        == total
    )


def test_patch_k2_has_no_torsion_triangles(dev333):
    patch = build_patch(dev333, 4)
    assert set(patch.cell_kinds) == {"link"}
    assert all(cell.size == 6 for cell in patch.complex.cells)
    assert all(c == F(2, 3) for cell in patch.complex.cells for c in cell.corners)


def test_patch_k3_torsion_policy(devs):
    dev = devs["f21_333"]
    patch = build_patch(dev, 3)
    kinds = set(patch.cell_kinds)
    assert kinds == {"link", "torsion"}
    for cell, kind in zip(patch.complex.cells, patch.cell_kinds):
        if kind == "torsion":
            assert cell.size == 3 and set(cell.corners) == {F(0)}
        else:
            assert cell.size >= 6 and set(cell.corners) == {F(2, 3)}


def test_patch_cells_at_least_hexagons_when_girth_allows(devs):
    for name in ("d333", "d444", "f21_333"):
        patch = build_patch(devs[name], 3)
        for cell, kind in zip(patch.complex.cells, patch.cell_kinds):
            if kind == "link":
                assert cell.size >= 6


def test_patch_half_girth_two_has_square_cells(devs):
    patch = build_patch(devs["d244"], 3)
    sizes = {cell.size for cell in patch.complex.cells}
    assert 4 in sizes  # the 4-cycle links of the order-4 vertex group


def test_disc_extraction_and_exact_identity(dev333):
    patch = build_patch(dev333, 5)
    discs = extract_disc_diagrams(patch, 25, seed=5, max_cells=6)
    assert len(discs) >= 10
    for disc in discs:
        assert disc.is_disc()
        assert disc.gauss_bonnet().ok


def test_interior_vertices_nonpositive_in_reduced_discs(devs):
    # with all half-girths at least 3, an interior vertex of a reduced disc
    # carries at least three corners, hence curvature at most zero
    for name in ("d333", "d444"):
        patch = build_patch(devs[name], 4)
        discs = extract_disc_diagrams(patch, 20, seed=31, max_cells=7)
        for disc in discs:
            for v in disc.interior_vertices():
                _nodes, arcs = disc.link_graph(v)
                if len(set(arcs)) == len(arcs):  # no doubled corner pair
                    assert disc.vertex_curvature(v) <= 0


def test_document_roundtrip():
    diagram, _ = ladder_fixture(2)
    doc = complex_to_document(diagram.complex)
    again = complex_from_document(doc)
    assert again.gauss_bonnet().ok
    assert again.euler_characteristic() == diagram.complex.euler_characteristic()
    assert [c.corners for c in again.cells] == [c.corners for c in diagram.complex.cells]


def test_validation_errors():
    with pytest.raises(ComplexError, match="loop"):
        AngledComplex(2, [(0, 0)], [])
    with pytest.raises(ComplexError, match="negative"):
        triangle_fixture(F(-1, 3))
    with pytest.raises(ComplexError, match="consecutive"):
        AngledComplex(
            3,
            [(0, 1), (1, 2), (2, 0)],
            [Cell((0, 1, 2), (1, 2, 0), (F(0),) * 3)],
        )
