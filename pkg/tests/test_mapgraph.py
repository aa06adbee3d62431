import math
import random

import pytest

from dtnsat.mapgraph import (
    MapDataError,
    Polyline,
    RoadGraph,
    WktParseError,
    build_graph,
    generate_grid,
    load_region,
    parse_wkt,
    polylines_to_wkt,
    restrict,
)


# ---------------------------------------------------------------- oracles

def brute_force_shortest(graph, src, dst):
    """Enumerate all simple paths; return the minimum length or None."""
    best = [math.inf]

    def walk(u, seen, acc):
        if acc >= best[0]:
            return
        if u == dst:
            best[0] = acc
            return
        for v, w in graph.adj[u]:
            if v not in seen:
                seen.add(v)
                walk(v, seen, acc + w)
                seen.remove(v)

    walk(src, {src}, 0.0)
    return None if math.isinf(best[0]) else best[0]


class UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, x):
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[ra] = rb


def random_graph(rng, max_vertices=12):
    n = rng.randint(2, max_vertices)
    vertices = [(rng.uniform(0, 100), rng.uniform(0, 100)) for _ in range(n)]
    edges = set()
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < 0.3:
                edges.add((i, j))
    return RoadGraph(vertices, sorted(edges))


# ---------------------------------------------------------------- polylines / WKT

def test_polyline_requires_two_distinct_points():
    with pytest.raises(ValueError):
        Polyline(((0.0, 0.0),))
    with pytest.raises(ValueError):
        Polyline(((1.0, 2.0), (1.0, 2.0)))


def test_polyline_length():
    p = Polyline(((0.0, 0.0), (3.0, 4.0), (3.0, 8.0)))
    assert p.length == pytest.approx(9.0)


def test_parse_wkt_linestring_and_multilinestring():
    text = """# a comment line
LINESTRING (0 0, 10 0)
MULTILINESTRING ((0 0, 0 5), (5 5, 10 5, 10 10))
"""
    parsed = parse_wkt(text)
    assert len(parsed.polylines) == 3
    assert parsed.polylines[0].points == ((0.0, 0.0), (10.0, 0.0))
    assert parsed.polylines[2].points == ((5.0, 5.0), (10.0, 5.0), (10.0, 10.0))
    assert parsed.warnings == []


def test_parse_wkt_skips_non_line_geometry_with_warning():
    parsed = parse_wkt("POINT (1 2)\nLINESTRING (0 0, 1 0)\n")
    assert len(parsed.polylines) == 1
    assert len(parsed.warnings) == 1
    assert "line 1" in parsed.warnings[0]


def test_parse_wkt_skips_empty_and_degenerate():
    parsed = parse_wkt("LINESTRING EMPTY\nLINESTRING (3 3, 3 3)\nLINESTRING (0 0, 1 1)\n")
    assert len(parsed.polylines) == 1
    assert len(parsed.warnings) == 2


def test_parse_wkt_error_names_line_number():
    with pytest.raises(WktParseError) as err:
        parse_wkt("LINESTRING (0 0, 1 0)\nLINESTRING (0 0, nope 1)\n")
    assert "line 2" in str(err.value)


def test_parse_wkt_ignores_extra_dimensions():
    parsed = parse_wkt("LINESTRING (0 0 7, 2 0 9)\n")
    assert parsed.polylines[0].points == ((0.0, 0.0), (2.0, 0.0))


def test_wkt_round_trip_exact():
    rng = random.Random(11)
    lines = []
    for _ in range(20):
        pts = []
        x = y = 0.0
        for _ in range(rng.randint(2, 6)):
            x += rng.uniform(0.1, 50.0)
            y += rng.uniform(-20.0, 20.0)
            pts.append((x, y))
        lines.append(Polyline(tuple(pts)))
    text = polylines_to_wkt(lines)
    parsed = parse_wkt(text)
    assert [p.points for p in parsed.polylines] == [p.points for p in lines]


# ---------------------------------------------------------------- graph build

def test_build_graph_exact_vertices_at_zero_tolerance():
    lines = [Polyline(((0.0, 0.0), (10.0, 0.0))),
             Polyline(((10.0, 0.0), (10.0, 10.0)))]
    g = build_graph(lines, snap_tolerance=0.0)
    assert g.n_vertices == 3
    assert len(g.edges) == 2
    assert g.total_edge_length == pytest.approx(20.0)


def test_build_graph_snaps_nearby_endpoints():
    lines = [Polyline(((0.0, 0.0), (10.0, 0.0))),
             Polyline(((10.0, 0.05), (10.0, 10.0)))]
    apart = build_graph(lines, snap_tolerance=0.0)
    snapped = build_graph(lines, snap_tolerance=0.1)
    assert apart.n_vertices == 4
    assert len(set(apart.component)) == 2
    assert snapped.n_vertices == 3
    assert len(set(snapped.component)) == 1


def test_build_graph_drops_duplicate_edges_and_self_loops():
    lines = [Polyline(((0.0, 0.0), (5.0, 0.0))),
             Polyline(((5.0, 0.0), (0.0, 0.0))),
             Polyline(((0.0, 0.0), (0.04, 0.0)))]  # snaps to a self-loop
    g = build_graph(lines, snap_tolerance=0.1)
    assert g.n_vertices == 2
    assert len(g.edges) == 1


def test_generate_grid_shape():
    g = generate_grid(3, 3, 5.0)
    assert g.n_vertices == 9
    assert len(g.edges) == 12
    assert g.vertex(0) == (0.0, 0.0)
    assert g.vertex(8) == (10.0, 10.0)
    path = g.shortest_path(0, 8)
    assert path.length == pytest.approx(20.0)


def test_components_match_union_find():
    rng = random.Random(5)
    for _ in range(50):
        g = random_graph(rng)
        uf = UnionFind(g.n_vertices)
        for i, j, _ in g.edges:
            uf.union(i, j)
        for a in range(g.n_vertices):
            for b in range(a + 1, g.n_vertices):
                same = g.component[a] == g.component[b]
                assert same == (uf.find(a) == uf.find(b))


def test_component_members_partition():
    g = build_graph([Polyline(((0.0, 0.0), (1.0, 0.0))),
                     Polyline(((5.0, 5.0), (6.0, 5.0), (6.0, 6.0)))],
                    snap_tolerance=0.0)
    assert set(g.component_members(0)) == {0, 1}
    assert set(g.component_members(2)) == {2, 3, 4}


# ---------------------------------------------------------------- shortest paths

def test_shortest_path_matches_brute_force():
    rng = random.Random(99)
    for _ in range(100):
        g = random_graph(rng)
        src = rng.randrange(g.n_vertices)
        dst = rng.randrange(g.n_vertices)
        expected = brute_force_shortest(g, src, dst)
        path = g.shortest_path(src, dst)
        if expected is None:
            assert path is None
            continue
        assert path is not None
        assert path.vertices[0] == src
        assert path.vertices[-1] == dst
        # every hop must be a real edge, and the length must re-sum
        total = 0.0
        for a, b in zip(path.vertices, path.vertices[1:]):
            w = dict(g.adj[a]).get(b)
            assert w is not None
            total += w
        assert total == pytest.approx(expected, abs=1e-9)
        assert path.length == pytest.approx(expected, abs=1e-9)


def test_shortest_path_trivial_and_unreachable():
    g = build_graph([Polyline(((0.0, 0.0), (1.0, 0.0))),
                     Polyline(((9.0, 9.0), (9.0, 10.0)))], snap_tolerance=0.0)
    same = g.shortest_path(1, 1)
    assert same.vertices == (1,)
    assert same.length == 0.0
    assert g.shortest_path(0, 3) is None


def test_shortest_path_tie_break_prefers_lowest_index():
    # unit square: two equal-length routes between opposite corners;
    # the walk must pick the lower-indexed intermediate vertex
    g = RoadGraph([(0.0, 0.0), (10.0, 0.0), (0.0, 10.0), (10.0, 10.0)],
                  [(0, 1), (0, 2), (1, 3), (2, 3)])
    path = g.shortest_path(0, 3)
    assert path.vertices == (0, 1, 3)
    assert path.length == pytest.approx(20.0)


def test_shortest_path_is_stable_across_calls():
    rng = random.Random(4)
    g = random_graph(rng, max_vertices=10)
    pairs = [(a, b) for a in range(g.n_vertices) for b in range(g.n_vertices)]
    first = [g.shortest_path(a, b) for a, b in pairs]
    second = [g.shortest_path(a, b) for a, b in pairs]
    for p1, p2 in zip(first, second):
        if p1 is None:
            assert p2 is None
        else:
            assert p1.vertices == p2.vertices


# ---------------------------------------------------------------- regions

def test_region_bbox_boundary_is_inside():
    region = load_region("BBOX 0 0 10 10")
    assert region.contains(0.0, 0.0)
    assert region.contains(10.0, 5.0)
    assert region.contains(5.0, 5.0)
    assert not region.contains(10.000001, 5.0)


def test_region_polygon_contains_and_boundary():
    region = load_region("POLYGON ((0 0, 10 0, 10 10, 0 10, 0 0))")
    assert region.contains(5.0, 5.0)
    assert region.contains(0.0, 5.0)  # edge point
    assert region.contains(10.0, 10.0)  # corner
    assert not region.contains(-0.1, 5.0)


def test_region_rejects_self_intersecting_polygon():
    with pytest.raises(MapDataError):
        load_region("POLYGON ((0 0, 10 10, 10 0, 0 10, 0 0))")


def test_restrict_keeps_induced_subgraph():
    g = generate_grid(3, 3, 5.0)
    region = load_region("BBOX 0 0 5 10")  # left two columns
    sub = restrict(g, region)
    assert sub.n_vertices == 6
    # edges between kept vertices survive: 4 vertical + 3 horizontal
    assert len(sub.edges) == 7
    again = restrict(sub, region)
    assert again.n_vertices == sub.n_vertices
    assert again.edges == sub.edges


def test_restrict_errors_when_region_is_empty():
    g = generate_grid(2, 2, 5.0)
    region = load_region("BBOX 100 100 110 110")
    with pytest.raises(MapDataError):
        restrict(g, region)
