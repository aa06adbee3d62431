#!/usr/bin/env python3
"""Road maps: WKT in, graph out, shortest paths on top.

Generates a synthetic grid, serializes it to WKT, parses that text back,
and checks the rebuilt graph matches the original. Then asks for a
shortest path between two corners and walks it vertex by vertex.
"""
import sys

from dtnsat import mapgraph


def main() -> int:
    grid = mapgraph.generate_grid(rows=4, cols=5, spacing=25.0)
    print(f"grid: {grid.n_vertices} vertices, {len(grid.edges)} edges")

    segments = [mapgraph.Polyline(((grid.xs[a], grid.ys[a]),
                                   (grid.xs[b], grid.ys[b])))
                for a, b, _length in grid.edges]
    wkt_text = mapgraph.polylines_to_wkt(segments)
    print(f"\nWKT serialization ({len(wkt_text)} chars), first lines:")
    for line in wkt_text.splitlines()[:3]:
        print("  " + (line if len(line) < 70 else line[:67] + "..."))

    rebuilt = mapgraph.build_graph(mapgraph.parse_wkt(wkt_text).polylines)

    # vertex ids depend on construction order, so compare raw geometry
    def coord_edges(g):
        return {tuple(sorted(((g.xs[a], g.ys[a]), (g.xs[b], g.ys[b]))))
                for a, b, _length in g.edges}

    same = coord_edges(rebuilt) == coord_edges(grid)
    print(f"\nrebuilt from WKT: {rebuilt.n_vertices} vertices, "
          f"{len(rebuilt.edges)} edges, same geometry={same}")

    src, dst = 0, grid.n_vertices - 1
    path = grid.shortest_path(src, dst)
    print(f"\nshortest path corner {src} -> corner {dst}: "
          f"{path.length:.1f} m over {len(path.vertices)} vertices")
    coords = [f"({grid.xs[v]:.0f},{grid.ys[v]:.0f})" for v in path.vertices]
    print("  " + " -> ".join(coords))
    return 0


if __name__ == "__main__":
    sys.exit(main())
