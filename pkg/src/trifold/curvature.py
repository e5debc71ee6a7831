"""Exact combinatorial curvature over angled 2-complexes.

Angles are rational multiples of pi stored as Fractions, so the
Gauss-Bonnet audit is an equality test, never a tolerance test.  Vertex
links are computed as multigraphs from corner incidences, which makes the
curvature formulas valid on branching complexes, not just surfaces.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .development import Development

AnglePi = Fraction  # the value q stands for the angle q*pi


class ComplexError(ValueError):
    pass


@dataclass(frozen=True)
class Cell:
    """A 2-cell with its cyclic boundary walk and one corner per stop.

    edges[i] joins vertices[i] and vertices[i+1]; corners[i] sits at
    vertices[i] between edges[i-1] and edges[i].
    """

    vertices: tuple[int, ...]
    edges: tuple[int, ...]
    corners: tuple[AnglePi, ...]

    @property
    def size(self) -> int:
        return len(self.vertices)


class AngledComplex:
    def __init__(self, n_vertices: int, edges: list[tuple[int, int]], cells: list[Cell]):
        self.n_vertices = n_vertices
        self.edges = [tuple(e) for e in edges]
        self.cells = list(cells)
        self._validate()

    def _validate(self) -> None:
        for eid, (u, v) in enumerate(self.edges):
            if u == v:
                raise ComplexError(f"edge {eid} is a loop")
            if not (0 <= u < self.n_vertices and 0 <= v < self.n_vertices):
                raise ComplexError(f"edge {eid} endpoint out of range")
        for cid, cell in enumerate(self.cells):
            n = cell.size
            if n < 2 or len(cell.edges) != n or len(cell.corners) != n:
                raise ComplexError(f"cell {cid} walk data is ragged")
            for i in range(n):
                a, b = cell.vertices[i], cell.vertices[(i + 1) % n]
                if set(self.edges[cell.edges[i]]) != {a, b}:
                    raise ComplexError(
                        f"cell {cid} edge {i} does not join consecutive walk vertices"
                    )
            for angle in cell.corners:
                if angle < 0:
                    raise ComplexError(f"cell {cid} has a negative corner")

    # -- local structure ---------------------------------------------------

    def corners_at(self, v: int) -> list[AnglePi]:
        return [
            cell.corners[i]
            for cell in self.cells
            for i, w in enumerate(cell.vertices)
            if w == v
        ]

    def _edge_ends_at(self, v: int) -> list[int]:
        return [eid for eid, e in enumerate(self.edges) if v in e]

    def link_graph(self, v: int) -> tuple[list[int], list[tuple[int, int]]]:
        """Link as a multigraph: nodes are edge ends at v, arcs are corners."""
        nodes = self._edge_ends_at(v)
        arcs = []
        for cell in self.cells:
            n = cell.size
            for i, w in enumerate(cell.vertices):
                if w == v:
                    arcs.append((cell.edges[(i - 1) % n], cell.edges[i]))
        return nodes, arcs

    def link_euler(self, v: int) -> int:
        nodes, arcs = self.link_graph(v)
        return len(nodes) - len(arcs)

    def vertex_curvature(self, v: int) -> AnglePi:
        return Fraction(2) - self.link_euler(v) - sum(self.corners_at(v), Fraction(0))

    def face_curvature(self, cid: int) -> AnglePi:
        cell = self.cells[cid]
        return sum(cell.corners, Fraction(0)) - (cell.size - 2)

    def euler_characteristic(self) -> int:
        return self.n_vertices - len(self.edges) + len(self.cells)

    def gauss_bonnet(self) -> "GaussBonnetVerdict":
        total = sum(
            (self.vertex_curvature(v) for v in range(self.n_vertices)), Fraction(0)
        )
        total += sum((self.face_curvature(c) for c in range(len(self.cells))), Fraction(0))
        rhs = Fraction(2 * self.euler_characteristic())
        return GaussBonnetVerdict(total, rhs)

    # -- surface structure ---------------------------------------------------

    def edge_face_incidence(self) -> list[int]:
        count = [0] * len(self.edges)
        for cell in self.cells:
            for eid in cell.edges:
                count[eid] += 1
        return count

    def boundary_edges(self) -> list[int]:
        return [eid for eid, c in enumerate(self.edge_face_incidence()) if c == 1]

    def is_connected(self) -> bool:
        if self.n_vertices == 0:
            return False
        adj: list[list[int]] = [[] for _ in range(self.n_vertices)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        seen = {0}
        queue = [0]
        while queue:
            u = queue.pop()
            for w in adj[u]:
                if w not in seen:
                    seen.add(w)
                    queue.append(w)
        return len(seen) == self.n_vertices

    def is_disc(self) -> bool:
        """Connected, every edge in at most two cells, every link a path or a
        cycle, one simple boundary circle, Euler characteristic one."""
        if not self.cells or not self.is_connected():
            return False
        if self.euler_characteristic() != 1:
            return False
        incidence = self.edge_face_incidence()
        if any(c == 0 or c > 2 for c in incidence):
            return False
        boundary = [eid for eid, c in enumerate(incidence) if c == 1]
        if not boundary or not _single_simple_cycle(self, boundary):
            return False
        for v in range(self.n_vertices):
            nodes, arcs = self.link_graph(v)
            if not nodes:
                return False
            degree = {n: 0 for n in nodes}
            for a, b in arcs:
                degree[a] += 1
                degree[b] += 1
            if any(d > 2 for d in degree.values()):
                return False
            if not _link_connected(nodes, arcs):
                return False
        return True

    def interior_vertices(self) -> list[int]:
        boundary_v = set()
        for eid in self.boundary_edges():
            boundary_v.update(self.edges[eid])
        return [v for v in range(self.n_vertices) if v not in boundary_v]


def _single_simple_cycle(y: AngledComplex, edge_ids: list[int]) -> bool:
    degree: dict[int, int] = {}
    for eid in edge_ids:
        for v in y.edges[eid]:
            degree[v] = degree.get(v, 0) + 1
    if any(d != 2 for d in degree.values()):
        return False
    # connected 2-regular graph with as many edges as vertices is one cycle
    verts = sorted(degree)
    adj = {v: [] for v in verts}
    for eid in edge_ids:
        u, v = y.edges[eid]
        adj[u].append(v)
        adj[v].append(u)
    seen = {verts[0]}
    queue = [verts[0]]
    while queue:
        u = queue.pop()
        for w in adj[u]:
            if w not in seen:
                seen.add(w)
                queue.append(w)
    return len(seen) == len(verts) and len(edge_ids) == len(verts)


def _link_connected(nodes: list[int], arcs: list[tuple[int, int]]) -> bool:
    adj = {n: [] for n in nodes}
    for a, b in arcs:
        adj[a].append(b)
        adj[b].append(a)
    seen = {nodes[0]}
    queue = [nodes[0]]
    while queue:
        u = queue.pop()
        for w in adj[u]:
            if w not in seen:
                seen.add(w)
                queue.append(w)
    return len(seen) == len(nodes)


@dataclass
class GaussBonnetVerdict:
    lhs: AnglePi  # total curvature, in multiples of pi
    rhs: AnglePi  # 2 * Euler characteristic

    @property
    def ok(self) -> bool:
        return self.lhs == self.rhs

    @property
    def discrepancy(self) -> AnglePi:
        return self.lhs - self.rhs

    def __bool__(self):
        return self.ok

    def __str__(self):
        mark = "ok" if self.ok else f"FAIL (off by {self.discrepancy}*pi)"
        return f"total curvature {self.lhs}*pi vs 2*chi = {self.rhs}*pi: {mark}"


# -- disc diagrams with marked boundary paths -----------------------------------


@dataclass
class BoundaryPath:
    """A subpath of the boundary: consecutive vertices and the edges between."""

    vertices: list[int]
    edges: list[int]

    @property
    def interior_vertices(self) -> list[int]:
        return self.vertices[1:-1]


class DiscDiagram:
    def __init__(self, complex_: AngledComplex, paths: dict[str, BoundaryPath] | None = None):
        if not complex_.is_disc():
            raise ComplexError("complex is not a disc")
        self.complex = complex_
        self.paths = dict(paths or {})
        boundary = set(complex_.boundary_edges())
        for name, path in self.paths.items():
            if len(path.edges) != len(path.vertices) - 1:
                raise ComplexError(f"path {name} is ragged")
            for i, eid in enumerate(path.edges):
                if eid not in boundary:
                    raise ComplexError(f"path {name} leaves the boundary")
                if set(complex_.edges[eid]) != {path.vertices[i], path.vertices[i + 1]}:
                    raise ComplexError(f"path {name} edges disagree with its vertices")

    def path_vertex_curvature(self, name: str) -> AnglePi:
        path = self.paths[name]
        return sum(
            (self.complex.vertex_curvature(v) for v in path.interior_vertices),
            Fraction(0),
        )

    def _cells_meeting(self, vertex_set: set[int]) -> list[int]:
        return [
            cid
            for cid, cell in enumerate(self.complex.cells)
            if vertex_set.intersection(cell.vertices)
        ]

    def path_face_curvature(self, name: str) -> AnglePi:
        cells = self._cells_meeting(set(self.paths[name].vertices))
        return sum((self.complex.face_curvature(c) for c in cells), Fraction(0))

    def shared_face_curvature(self, name_a: str, name_b: str) -> AnglePi:
        sa = set(self.paths[name_a].vertices)
        sb = set(self.paths[name_b].vertices)
        cells = [c for c in self._cells_meeting(sa) if sb.intersection(self.complex.cells[c].vertices)]
        return sum((self.complex.face_curvature(c) for c in cells), Fraction(0))

    # -- census of cells along a marked path --------------------------------

    def g_cells(self, name: str) -> list[int]:
        """Cells meeting the path in at least one edge."""
        path_edges = set(self.paths[name].edges)
        return [
            cid
            for cid, cell in enumerate(self.complex.cells)
            if path_edges.intersection(cell.edges)
        ]

    def census(self, name: str) -> "GCellCensus":
        path = self.paths[name]
        path_vertices = set(path.vertices)
        cells = self.g_cells(name)
        triangles = [c for c in cells if self.complex.cells[c].size == 3]
        polygons = [c for c in cells if self.complex.cells[c].size != 3]
        adjacency: dict[int, int] = {}
        for cid in polygons:
            mine = path_vertices.intersection(self.complex.cells[cid].vertices)
            j = 0
            for tid in triangles:
                if mine.intersection(self.complex.cells[tid].vertices):
                    j += 1
            adjacency[cid] = j
        counts: dict[tuple[int, int], int] = {}
        for cid in polygons:
            key = (self.complex.cells[cid].size, adjacency[cid])
            counts[key] = counts.get(key, 0) + 1
        return GCellCensus(counts, len(triangles))

    def classify_positive_curvature(self, name: str, cid: int) -> str:
        """max / almost-max / neither, against the thresholds that depend on
        how many path-adjacent triangles the cell carries."""
        cell = self.complex.cells[cid]
        if cell.size < 6 or cid not in self.g_cells(name):
            raise ComplexError("classification applies to non-triangle cells on the path")
        census_j = self.census(name)
        path_vertices = set(self.paths[name].vertices)
        mine = path_vertices.intersection(cell.vertices)
        j = 0
        triangles = [c for c in self.g_cells(name) if self.complex.cells[c].size == 3]
        for tid in triangles:
            if mine.intersection(self.complex.cells[tid].vertices):
                j += 1
        threshold = cell.size // 2 - 1 if j <= 1 else cell.size // 2
        positive = sum(
            1
            for v in cell.vertices
            if v in path_vertices and self.complex.vertex_curvature(v) > 0
        )
        if positive == threshold:
            return "max"
        if positive == threshold - 1:
            return "almost-max"
        return "neither"


@dataclass
class GCellCensus:
    polygon_counts: dict[tuple[int, int], int]  # (size, adjacent triangles) -> count
    triangle_count: int

    def count(self, size: int, j: int) -> int:
        return self.polygon_counts.get((size, j), 0)

    @property
    def ladder_bound_holds(self) -> bool:
        """Triangle count must cover half the polygon adjacencies in a
        reduced diagram."""
        need = Fraction(0)
        for (_, j), m in self.polygon_counts.items():
            if j == 1:
                need += Fraction(m, 2)
            elif j == 2:
                need += Fraction(m)
        return Fraction(self.triangle_count) >= need


# -- patches of the angled complex over the Cayley ball ---------------------------


@dataclass
class PatchReport:
    complex: AngledComplex
    edge_labels: list[int]  # letter per edge
    cell_kinds: list[str]  # "link" or "torsion"
    omitted_cells: int
    vertex_of_cell: list[int]  # development vertex carrying each link cell, -1 for torsion


def build_patch(dev: Development, radius: int) -> PatchReport:
    """The 2-complex over the radius ball: one 2-cell with corners 2pi/3 per
    embedded cycle of every complete vertex link, and one zero-cornered
    triangle per residue triple on every saturated edge for k at least 3.
    Cells with any boundary element outside the ball are omitted and counted.
    """
    if radius > dev.radius:
        raise ComplexError("patch radius exceeds the trusted ball")
    ball = [f for f in dev.ball_faces() if dev.dist[f] <= radius]
    in_ball = set(ball)
    n = len(ball)
    edge_index: dict[tuple[int, int], int] = {}
    edges: list[tuple[int, int]] = []
    labels: list[int] = []

    def cayley_edge(a: int, b: int, letter: int) -> int:
        key = (a, b) if a < b else (b, a)
        eid = edge_index.get(key)
        if eid is None:
            eid = len(edges)
            edge_index[key] = eid
            edges.append(key)
            labels.append(letter)
        return eid

    for e in range(len(dev.edge_letter)):
        slots = [f for f in dev.edge_slots[e] if f != -1 and f in in_ball]
        for i in range(len(slots)):
            for j in range(i + 1, len(slots)):
                cayley_edge(slots[i], slots[j], dev.edge_letter[e])

    cells: list[Cell] = []
    kinds: list[str] = []
    cell_vertex: list[int] = []
    omitted = 0
    two_thirds = Fraction(2, 3)

    for v in range(len(dev.vert_type)):
        if not dev.vertex_complete(v):
            continue
        for cycle in _link_cycles(dev, v):
            if any(f not in in_ball for f in cycle):
                omitted += 1
                continue
            m = len(cycle)
            walk_edges = []
            ok = True
            for i in range(m):
                a, b = cycle[i], cycle[(i + 1) % m]
                shared = dev.shared_edge(a, b)
                if shared is None:
                    ok = False
                    break
                walk_edges.append(cayley_edge(a, b, dev.edge_letter[shared]))
            if not ok:
                omitted += 1
                continue
            cells.append(Cell(tuple(cycle), tuple(walk_edges), (two_thirds,) * m))
            kinds.append("link")
            cell_vertex.append(v)

    if dev.k >= 3:
        triples = _torsion_triples(dev.k)
        for e in range(len(dev.edge_letter)):
            if not dev.edge_saturated[e]:
                continue
            slots = dev.edge_slots[e]
            letter = dev.edge_letter[e]
            for (i, j, l) in triples:
                members = (slots[i], slots[j], slots[l])
                if any(f not in in_ball for f in members):
                    omitted += 1
                    continue
                walk_edges = tuple(
                    cayley_edge(members[t], members[(t + 1) % 3], letter)
                    for t in range(3)
                )
                cells.append(Cell(members, walk_edges, (Fraction(0),) * 3))
                kinds.append("torsion")
                cell_vertex.append(-1)

    # ball elements are the canonical prefix 0..n-1, so ids map to themselves
    assert ball == list(range(n))
    complex_ = AngledComplex(n, edges, cells)
    return PatchReport(complex_, labels, kinds, omitted, cell_vertex)


def _torsion_triples(k: int) -> list[tuple[int, int, int]]:
    base = set()
    for a in range(k):
        for b in range(k):
            triple = (-a % k, -b % k, (a + b) % k)
            if len(set(triple)) == 3:
                for shift in range(k):
                    base.add(tuple(sorted((x + shift) % k for x in triple)))
    return sorted(base)


def _link_cycles(dev: Development, v: int) -> list[list[int]]:
    """Embedded cycles of the link at v, returned as face cycles.

    Nodes of the link are the edges at v, arcs the faces; an embedded node
    cycle of length 2m yields the 2m-gon of faces between consecutive nodes.
    """
    nodes = list(dev.vert_edges[v])
    faces = dev.faces_at_vertex(v)
    vtype = dev.vert_type[v]
    letters = [l for l in range(3) if vtype in dev.letter_types[l]]
    arc: dict[tuple[int, int], list[int]] = {}
    node_adj: dict[int, list[int]] = {e: [] for e in nodes}
    for f in faces:
        e1 = dev.f_edge[f][letters[0]]
        e2 = dev.f_edge[f][letters[1]]
        key = (e1, e2) if e1 < e2 else (e2, e1)
        arc.setdefault(key, []).append(f)
        node_adj[e1].append(e2)
        node_adj[e2].append(e1)
    for key, shared in arc.items():
        if len(shared) > 1:
            raise ComplexError(
                "parallel link arcs found; half-girth below 2 is unsupported"
            )
    cycles: list[list[int]] = []
    order = sorted(nodes)
    for start in order:
        stack = [(start, [start], {start})]
        while stack:
            node, path, seen = stack.pop()
            for nxt in sorted(set(node_adj[node])):
                if nxt == start and len(path) >= 3:
                    if path[1] < path[-1]:
                        face_cycle = []
                        closed = path + [start]
                        for a, b in zip(closed, closed[1:]):
                            key = (a, b) if a < b else (b, a)
                            face_cycle.append(arc[key][0])
                        cycles.append(face_cycle)
                elif nxt > start and nxt not in seen:
                    stack.append((nxt, path + [nxt], seen | {nxt}))
    return cycles


def extract_disc_diagrams(
    patch: PatchReport, count: int, seed: int = 0, max_cells: int = 6
) -> list[AngledComplex]:
    """Randomly grown disc subcomplexes of a patch, for curvature audits."""
    rng = random.Random(seed)
    y = patch.complex
    cell_edges = [set(c.edges) for c in y.cells]
    out: list[AngledComplex] = []
    seen_choices: set[tuple[int, ...]] = set()
    attempts = 0
    while len(out) < count and attempts < count * 60:
        attempts += 1
        chosen = [rng.randrange(len(y.cells))]
        target = rng.randint(1, max_cells)
        while len(chosen) < target:
            fringe = [
                c
                for c in range(len(y.cells))
                if c not in chosen
                and any(cell_edges[c] & cell_edges[p] for p in chosen)
            ]
            if not fringe:
                break
            cand = chosen + [rng.choice(fringe)]
            if _subcomplex(y, cand).is_disc():
                chosen = cand
            elif rng.random() < 0.5:
                break
        key = tuple(sorted(chosen))
        if key in seen_choices:
            continue
        sub = _subcomplex(y, chosen)
        if sub.is_disc():
            seen_choices.add(key)
            out.append(sub)
    return out


def _subcomplex(y: AngledComplex, cell_ids: list[int]) -> AngledComplex:
    used_edges = sorted({e for c in cell_ids for e in y.cells[c].edges})
    used_vertices = sorted({v for c in cell_ids for v in y.cells[c].vertices})
    vmap = {v: i for i, v in enumerate(used_vertices)}
    emap = {e: i for i, e in enumerate(used_edges)}
    edges = [(vmap[y.edges[e][0]], vmap[y.edges[e][1]]) for e in used_edges]
    cells = [
        Cell(
            tuple(vmap[v] for v in y.cells[c].vertices),
            tuple(emap[e] for e in y.cells[c].edges),
            y.cells[c].corners,
        )
        for c in cell_ids
    ]
    return AngledComplex(len(used_vertices), edges, cells)


# -- document schema ---------------------------------------------------------------


def complex_to_document(y: AngledComplex) -> dict:
    return {
        "format": "trifold-angled-complex/1",
        "vertices": y.n_vertices,
        "edges": [list(e) for e in y.edges],
        "faces": [
            {
                "vertices": list(c.vertices),
                "edges": list(c.edges),
                "corners": [[a.numerator, a.denominator] for a in c.corners],
            }
            for c in y.cells
        ],
    }


def complex_from_document(doc: dict) -> AngledComplex:
    if doc.get("format") != "trifold-angled-complex/1":
        raise ComplexError("not an angled-complex document")
    cells = [
        Cell(
            tuple(face["vertices"]),
            tuple(face["edges"]),
            tuple(Fraction(n, d) for n, d in face["corners"]),
        )
        for face in doc["faces"]
    ]
    return AngledComplex(int(doc["vertices"]), [tuple(e) for e in doc["edges"]], cells)


# -- stock fixtures ------------------------------------------------------------------


def triangle_fixture(corner: AnglePi) -> AngledComplex:
    c = Fraction(corner)
    return AngledComplex(
        3, [(0, 1), (1, 2), (2, 0)], [Cell((0, 1, 2), (0, 1, 2), (c, c, c))]
    )


def polygon_fixture(n: int, corner: AnglePi) -> AngledComplex:
    c = Fraction(corner)
    edges = [(i, (i + 1) % n) for i in range(n)]
    return AngledComplex(n, edges, [Cell(tuple(range(n)), tuple(range(n)), (c,) * n)])


def ladder_fixture(hexagons: int = 3) -> tuple[DiscDiagram, str]:
    """Hexagons alternating with triangles along one boundary path.

    Each hexagon carries one bottom edge of the path, each triangle fills the
    gap between consecutive hexagons and also sits on the path.  Hexagons get
    2pi/3 corners and triangles zero corners, matching the attached complex.
    """
    if hexagons < 2:
        raise ComplexError("the ladder needs at least two hexagons")
    two_thirds = Fraction(2, 3)
    zero = Fraction(0)
    vertices: list[str] = []
    index: dict[str, int] = {}

    def vid(name: str) -> int:
        if name not in index:
            index[name] = len(vertices)
            vertices.append(name)
        return index[name]

    edges: list[tuple[int, int]] = []
    edge_index: dict[tuple[int, int], int] = {}

    def eid(a: int, b: int) -> int:
        key = (a, b) if a < b else (b, a)
        if key not in edge_index:
            edge_index[key] = len(edges)
            edges.append(key)
        return edge_index[key]

    h = hexagons
    bottom = [vid(f"v{i}") for i in range(2 * h)]
    cells: list[Cell] = []
    for i in range(h):
        left, right = bottom[2 * i], bottom[2 * i + 1]
        if i == 0:
            walk = [left, right, vid("x1"), vid("c2"), vid("c1"), vid("c0")]
        elif i == h - 1:
            walk = [left, right, vid(f"e{i}2"), vid(f"e{i}1"), vid(f"e{i}0"), vid(f"x{i}")]
        else:
            walk = [left, right, vid(f"x{i+1}"), vid(f"t{i}2"), vid(f"t{i}1"), vid(f"x{i}")]
        walk_edges = tuple(eid(walk[j], walk[(j + 1) % 6]) for j in range(6))
        cells.append(Cell(tuple(walk), walk_edges, (two_thirds,) * 6))
    for i in range(h - 1):
        walk = [bottom[2 * i + 1], bottom[2 * i + 2], vid(f"x{i+1}")]
        walk_edges = tuple(eid(walk[j], walk[(j + 1) % 3]) for j in range(3))
        cells.append(Cell(tuple(walk), walk_edges, (zero,) * 3))

    y = AngledComplex(len(vertices), edges, cells)
    path = BoundaryPath(
        vertices=list(bottom),
        edges=[eid(bottom[i], bottom[i + 1]) for i in range(2 * h - 1)],
    )
    return DiscDiagram(y, {"g": path}), "g"
