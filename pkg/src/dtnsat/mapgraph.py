"""Planar road-map geometry: WKT line parsing, graph building, shortest paths.

Coordinates are planar meters (already projected). The road graph is undirected;
vertex identity is positional, with endpoints within a snap tolerance merged at
build time so independently exported road segments join up.
"""

from __future__ import annotations

import heapq
import logging
import math
from collections import OrderedDict
from dataclasses import dataclass

log = logging.getLogger(__name__)

DEFAULT_SNAP_TOLERANCE = 0.1  # meters; road exports repeat shared endpoints with float noise

# Geometry kinds that are legal WKT but carry no road segments; skipped with a warning.
_SKIPPED_GEOMETRIES = frozenset({
    "POINT", "MULTIPOINT", "POLYGON", "MULTIPOLYGON",
    "GEOMETRYCOLLECTION", "TRIANGLE", "CIRCULARSTRING",
})

_EPS = 1e-9


class WktParseError(ValueError):
    """Malformed WKT that cannot be read as line geometry."""


class MapDataError(ValueError):
    """Map input that yields no usable road geometry."""


@dataclass(frozen=True)
class Polyline:
    """An open chain of planar points with no zero-length steps."""

    points: tuple[tuple[float, float], ...]

    def __post_init__(self):
        if len(self.points) < 2:
            raise ValueError("polyline needs at least 2 points")
        for (ax, ay), (bx, by) in zip(self.points, self.points[1:]):
            if ax == bx and ay == by:
                raise ValueError("polyline has consecutive duplicate points")

    @property
    def length(self) -> float:
        return sum(
            math.dist(a, b) for a, b in zip(self.points, self.points[1:])
        )


@dataclass
class ParsedWkt:
    """Result of parse_wkt: usable polylines plus human-readable skip warnings."""

    polylines: list[Polyline]
    warnings: list[str]


def _split_keyword(line: str, lineno: int) -> tuple[str, str]:
    head = []
    for ch in line:
        if ch.isalpha():
            head.append(ch)
        else:
            break
    if not head:
        raise WktParseError(f"line {lineno}: expected a geometry keyword")
    kind = "".join(head).upper()
    return kind, line[len(head):].strip()


def _parse_points(group: str, lineno: int) -> list[tuple[float, float]]:
    points = []
    for token in group.split(","):
        fields = token.split()
        if len(fields) < 2:
            raise WktParseError(f"line {lineno}: coordinate needs two numbers, got {token.strip()!r}")
        try:
            # extra dimensions (z/m) are ignored
            x, y = float(fields[0]), float(fields[1])
        except ValueError:
            raise WktParseError(f"line {lineno}: bad coordinate {token.strip()!r}") from None
        if not (math.isfinite(x) and math.isfinite(y)):
            raise WktParseError(f"line {lineno}: non-finite coordinate {token.strip()!r}")
        points.append((x, y))
    return points


def _outer_groups(body: str, lineno: int) -> list[str]:
    """Split '((a),(b),...)' into its top-level parenthesized members."""
    body = body.strip()
    if not body.startswith("(") or not body.endswith(")"):
        raise WktParseError(f"line {lineno}: expected parenthesized coordinate list")
    inner = body[1:-1]
    groups, depth, start = [], 0, None
    for i, ch in enumerate(inner):
        if ch == "(":
            if depth == 0:
                start = i + 1
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise WktParseError(f"line {lineno}: unbalanced parentheses")
            if depth == 0:
                groups.append(inner[start:i])
        elif depth == 0 and not (ch.isspace() or ch == ","):
            raise WktParseError(f"line {lineno}: unexpected {ch!r} between members")
    if depth != 0:
        raise WktParseError(f"line {lineno}: unbalanced parentheses")
    if not groups:
        raise WktParseError(f"line {lineno}: empty member list")
    return groups


def _dedupe_consecutive(points: list[tuple[float, float]]) -> list[tuple[float, float]]:
    out = [points[0]]
    for p in points[1:]:
        if p != out[-1]:
            out.append(p)
    return out


def parse_wkt(text: str) -> ParsedWkt:
    """Read line geometry from WKT text, one geometry per line, '#' comments.

    LINESTRING and MULTILINESTRING contribute polylines; other geometry kinds
    are skipped with a warning, as are degenerate lines (< 2 distinct points).
    Anything unreadable raises WktParseError naming the line number.
    """
    polylines: list[Polyline] = []
    warnings: list[str] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        kind, body = _split_keyword(line, lineno)
        if kind in _SKIPPED_GEOMETRIES:
            warnings.append(f"line {lineno}: skipped {kind} geometry")
            continue
        if kind not in ("LINESTRING", "MULTILINESTRING"):
            raise WktParseError(f"line {lineno}: unsupported geometry kind {kind!r}")
        if body.upper() == "EMPTY":
            warnings.append(f"line {lineno}: skipped empty {kind}")
            continue
        if kind == "LINESTRING":
            if not body.startswith("(") or not body.endswith(")"):
                raise WktParseError(f"line {lineno}: expected parenthesized coordinate list")
            groups = [body[1:-1]]
        else:
            groups = _outer_groups(body, lineno)
        for group in groups:
            points = _dedupe_consecutive(_parse_points(group, lineno))
            if len(points) < 2:
                warnings.append(f"line {lineno}: skipped degenerate line (<2 distinct points)")
                continue
            polylines.append(Polyline(tuple(points)))
    for message in warnings:
        log.warning("wkt: %s", message)
    return ParsedWkt(polylines, warnings)


def polylines_to_wkt(polylines) -> str:
    """Serialize polylines as one LINESTRING per line; floats round-trip exactly."""
    lines = []
    for pl in polylines:
        coords = ", ".join(f"{x!r} {y!r}" for x, y in pl.points)
        lines.append(f"LINESTRING ({coords})")
    return "\n".join(lines) + ("\n" if lines else "")


class _VertexSnapper:
    """Assigns stable vertex indices, merging points within the snap tolerance.

    First-come assignment: a point reuses the nearest existing vertex within
    tolerance (ties by lowest index), else becomes a new vertex.
    """

    def __init__(self, tolerance: float):
        self.tolerance = tolerance
        self.coords: list[tuple[float, float]] = []
        self._cells: dict[tuple[int, int], list[int]] = {}
        self._exact: dict[tuple[float, float], int] = {}

    def _cell(self, x: float, y: float) -> tuple[int, int]:
        t = self.tolerance
        return (math.floor(x / t), math.floor(y / t))

    def index_for(self, point: tuple[float, float]) -> int:
        x, y = point
        if self.tolerance == 0:
            idx = self._exact.get(point)
            if idx is None:
                idx = len(self.coords)
                self.coords.append(point)
                self._exact[point] = idx
            return idx
        cx, cy = self._cell(x, y)
        best, best_d = None, None
        for dx in (-1, 0, 1):
            for dy in (-1, 0, 1):
                for idx in self._cells.get((cx + dx, cy + dy), ()):
                    vx, vy = self.coords[idx]
                    d = math.hypot(vx - x, vy - y)
                    if d <= self.tolerance and (best_d is None or d < best_d):
                        best, best_d = idx, d
        if best is not None:
            return best
        idx = len(self.coords)
        self.coords.append(point)
        self._cells.setdefault((cx, cy), []).append(idx)
        return idx


@dataclass(frozen=True)
class Path:
    """A walk along graph vertices with its total length in meters."""

    vertices: tuple[int, ...]
    length: float


class RoadGraph:
    """Immutable undirected graph of map vertices in planar meters.

    Edge lengths are always the Euclidean distance between endpoint
    coordinates; parallel edges and self-loops do not exist.
    """

    __slots__ = ("xs", "ys", "edges", "adj", "component", "_members", "_dist_cache")

    _DIST_CACHE_MAX = 4096

    def __init__(self, vertices, edges):
        self.xs = tuple(float(x) for x, _ in vertices)
        self.ys = tuple(float(y) for _, y in vertices)
        n = len(self.xs)
        seen: set[tuple[int, int]] = set()
        built = []
        adj: list[list[tuple[int, float]]] = [[] for _ in range(n)]
        for a, b in edges:
            if not (0 <= a < n and 0 <= b < n):
                raise ValueError(f"edge ({a}, {b}) references a missing vertex")
            if a == b:
                raise ValueError(f"self-loop at vertex {a}")
            key = (a, b) if a < b else (b, a)
            if key in seen:
                continue
            seen.add(key)
            length = math.dist((self.xs[a], self.ys[a]), (self.xs[b], self.ys[b]))
            if length == 0.0:
                raise ValueError(f"zero-length edge between distinct vertices {a}, {b}")
            built.append((key[0], key[1], length))
            adj[a].append((b, length))
            adj[b].append((a, length))
        self.edges = tuple(built)
        self.adj = tuple(tuple(sorted(nbrs)) for nbrs in adj)
        self.component = self._label_components()
        members: dict[int, list[int]] = {}
        for v, c in enumerate(self.component):
            members.setdefault(c, []).append(v)
        self._members = {c: tuple(vs) for c, vs in members.items()}
        self._dist_cache: OrderedDict[int, list[float]] = OrderedDict()

    def _label_components(self) -> tuple[int, ...]:
        n = len(self.xs)
        label = [-1] * n
        current = 0
        for start in range(n):
            if label[start] != -1:
                continue
            stack = [start]
            label[start] = current
            while stack:
                u = stack.pop()
                for v, _ in self.adj[u]:
                    if label[v] == -1:
                        label[v] = current
                        stack.append(v)
            current += 1
        return tuple(label)

    @property
    def n_vertices(self) -> int:
        return len(self.xs)

    def vertex(self, i: int) -> tuple[float, float]:
        return (self.xs[i], self.ys[i])

    def component_members(self, v: int) -> tuple[int, ...]:
        return self._members[self.component[v]]

    @property
    def total_edge_length(self) -> float:
        return sum(w for _, _, w in self.edges)

    def distances_from(self, origin: int) -> list[float]:
        """Dijkstra distance field from origin (cached per origin)."""
        cached = self._dist_cache.get(origin)
        if cached is not None:
            self._dist_cache.move_to_end(origin)
            return cached
        n = self.n_vertices
        dist = [math.inf] * n
        dist[origin] = 0.0
        heap = [(0.0, origin)]
        while heap:
            d, u = heapq.heappop(heap)
            if d > dist[u]:
                continue
            for v, w in self.adj[u]:
                nd = d + w
                if nd < dist[v]:
                    dist[v] = nd
                    heapq.heappush(heap, (nd, v))
        self._dist_cache[origin] = dist
        if len(self._dist_cache) > self._DIST_CACHE_MAX:
            self._dist_cache.popitem(last=False)
        return dist

    def shortest_path(self, src: int, dst: int) -> Path | None:
        """Shortest path by length; equal-length ties resolve to the
        lexicographically smallest vertex-index sequence. None if unreachable."""
        n = self.n_vertices
        if not (0 <= src < n and 0 <= dst < n):
            raise ValueError(f"vertex out of range: {src}, {dst}")
        if src == dst:
            return Path((src,), 0.0)
        dist = self.distances_from(dst)
        if math.isinf(dist[src]):
            return None
        walk = [src]
        u = src
        for _ in range(n):
            du = dist[u]
            nxt = None
            for v, w in self.adj[u]:  # adj is sorted, so first hit is smallest index
                if dist[v] + w == du:
                    nxt = v
                    break
            if nxt is None:
                raise RuntimeError("shortest-path reconstruction failed")
            walk.append(nxt)
            u = nxt
            if u == dst:
                return Path(tuple(walk), dist[src])
        raise RuntimeError("shortest-path walk exceeded vertex count")


def build_graph(polylines, snap_tolerance: float = DEFAULT_SNAP_TOLERANCE) -> RoadGraph:
    """Build the road graph: one edge per polyline segment, endpoints snapped.

    Segments that collapse to a point under snapping are dropped. Raises
    MapDataError when nothing usable remains.
    """
    if snap_tolerance < 0:
        raise ValueError("snap_tolerance must be >= 0")
    polylines = list(polylines)
    if not polylines:
        raise MapDataError("no usable map geometry")
    snapper = _VertexSnapper(snap_tolerance)
    edges = []
    for pl in polylines:
        idxs = [snapper.index_for(p) for p in pl.points]
        for a, b in zip(idxs, idxs[1:]):
            if a != b:
                edges.append((a, b))
    if not edges:
        raise MapDataError("no usable map geometry (all segments degenerate)")
    return RoadGraph(snapper.coords, edges)


def generate_grid(rows: int, cols: int, spacing: float) -> RoadGraph:
    """Rectangular lattice: rows*cols vertices, spacing meters apart, row-major."""
    if rows < 1 or cols < 1 or rows * cols < 2:
        raise ValueError("grid needs at least two vertices")
    if spacing <= 0:
        raise ValueError("grid spacing must be > 0")
    vertices = [(c * spacing, r * spacing) for r in range(rows) for c in range(cols)]
    edges = []
    for r in range(rows):
        for c in range(cols):
            v = r * cols + c
            if c + 1 < cols:
                edges.append((v, v + 1))
            if r + 1 < rows:
                edges.append((v, v + cols))
    return RoadGraph(vertices, edges)


def _on_segment(px, py, ax, ay, bx, by) -> bool:
    cross = (bx - ax) * (py - ay) - (by - ay) * (px - ax)
    seg_len = math.hypot(bx - ax, by - ay)
    if seg_len == 0.0:
        return math.hypot(px - ax, py - ay) <= _EPS
    if abs(cross) / seg_len > _EPS:
        return False
    dot = (px - ax) * (bx - ax) + (py - ay) * (by - ay)
    return -_EPS <= dot <= seg_len * seg_len + _EPS

def _proper_intersection(p1, p2, p3, p4) -> bool:
    def orient(a, b, c):
        v = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
        return (v > _EPS) - (v < -_EPS)
    o1, o2 = orient(p1, p2, p3), orient(p1, p2, p4)
    o3, o4 = orient(p3, p4, p1), orient(p3, p4, p2)
    return o1 != o2 and o3 != o4 and 0 not in (o1, o2, o3, o4)


class Region:
    """A closed planar region (bounding box or simple polygon); the boundary
    counts as inside, so containment is deterministic for on-edge vertices."""

    def __init__(self, *, bbox=None, ring=None):
        if (bbox is None) == (ring is None):
            raise ValueError("Region takes exactly one of bbox or ring")
        if bbox is not None:
            minx, miny, maxx, maxy = map(float, bbox)
            if minx > maxx or miny > maxy:
                raise ValueError("bbox min must not exceed max")
            self.bbox = (minx, miny, maxx, maxy)
            self.ring = None
        else:
            pts = [(float(x), float(y)) for x, y in ring]
            if len(pts) >= 2 and pts[0] == pts[-1]:
                pts = pts[:-1]  # accept explicitly closed rings
            if len(pts) < 3:
                raise MapDataError("polygon ring needs at least 3 distinct points")
            segs = [(pts[i], pts[(i + 1) % len(pts)]) for i in range(len(pts))]
            for i in range(len(segs)):
                for j in range(i + 1, len(segs)):
                    if _proper_intersection(*segs[i], *segs[j]):
                        raise MapDataError("polygon ring is self-intersecting")
            self.ring = tuple(pts)
            self.bbox = None

    @classmethod
    def from_bbox(cls, minx, miny, maxx, maxy) -> "Region":
        return cls(bbox=(minx, miny, maxx, maxy))

    @classmethod
    def from_polygon(cls, points) -> "Region":
        return cls(ring=points)

    def contains(self, x: float, y: float) -> bool:
        if self.bbox is not None:
            minx, miny, maxx, maxy = self.bbox
            return minx <= x <= maxx and miny <= y <= maxy
        ring = self.ring
        n = len(ring)
        for i in range(n):
            ax, ay = ring[i]
            bx, by = ring[(i + 1) % n]
            if _on_segment(x, y, ax, ay, bx, by):
                return True
        inside = False
        j = n - 1
        for i in range(n):
            xi, yi = ring[i]
            xj, yj = ring[j]
            if (yi > y) != (yj > y) and x < (xj - xi) * (y - yi) / (yj - yi) + xi:
                inside = not inside
            j = i
        return inside


def load_region(text: str) -> Region:
    """Parse a region description: 'BBOX minx miny maxx maxy' or a WKT POLYGON."""
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        upper = line.upper()
        if upper.startswith("BBOX"):
            fields = line.split()[1:]
            if len(fields) != 4:
                raise ValueError(f"line {lineno}: BBOX needs 4 numbers")
            try:
                return Region.from_bbox(*map(float, fields))
            except ValueError as exc:
                raise ValueError(f"line {lineno}: {exc}") from None
        if upper.startswith("POLYGON"):
            kind, body = _split_keyword(line, lineno)
            rings = _outer_groups(body, lineno)
            if len(rings) > 1:
                log.warning("region: line %d: polygon holes ignored", lineno)
            points = _parse_points(rings[0], lineno)
            return Region.from_polygon(points)
        raise ValueError(f"line {lineno}: expected BBOX or POLYGON, got {line.split()[0]!r}")
    raise ValueError("region text is empty")


def load_region_file(path) -> Region:
    with open(path, "r", encoding="utf-8") as fh:
        return load_region(fh.read())


def restrict(graph: RoadGraph, region: Region) -> RoadGraph:
    """Induced subgraph on the vertices inside region (boundary inclusive)."""
    keep = [v for v in range(graph.n_vertices) if region.contains(graph.xs[v], graph.ys[v])]
    if not keep:
        raise MapDataError("region contains no map vertices")
    remap = {old: new for new, old in enumerate(keep)}
    vertices = [(graph.xs[v], graph.ys[v]) for v in keep]
    edges = [
        (remap[a], remap[b])
        for a, b, _ in graph.edges
        if a in remap and b in remap
    ]
    return RoadGraph(vertices, edges)
