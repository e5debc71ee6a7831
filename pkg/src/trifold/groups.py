"""Finite group tables, coset graphs, half-girths and the curvature test.

Groups are ingested as full multiplication tables with element 0 as the
identity.  All verification downstream rests on these tables, so invariants
(Latin square, identity law, associativity) are checked eagerly at load time
and violations are errors, never warnings.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path


class GroupError(ValueError):
    """Invalid group document or unsatisfiable group-theoretic precondition."""


LETTERS = ("a", "b", "c")
# vertex group i is generated by the two letters VERTEX_LETTERS[i]
VERTEX_LETTERS = ((0, 1), (1, 2), (2, 0))
# letter x labels the edges joining the two vertex types that contain x
LETTER_TYPES = ((0, 2), (0, 1), (1, 2))
DESIGNATED_PATTERN = {"V1": ["a", "b"], "V2": ["b", "c"], "V3": ["c", "a"]}


class FiniteGroup:
    """A finite group given by its multiplication table, identity at index 0."""

    __slots__ = ("name", "order", "mult", "_inv")

    def __init__(self, name: str, mult: list[list[int]], check: bool = True):
        self.name = str(name)
        self.mult = [list(map(int, row)) for row in mult]
        self.order = len(self.mult)
        if check:
            self._validate()
        self._inv = self._inverse_table()

    def _validate(self) -> None:
        n = self.order
        if n == 0:
            raise GroupError(f"{self.name}: empty multiplication table")
        full = set(range(n))
        for i, row in enumerate(self.mult):
            if len(row) != n:
                raise GroupError(f"{self.name}: row {i} has length {len(row)}, expected {n}")
            for x in row:
                if not 0 <= x < n:
                    raise GroupError(f"{self.name}: entry {x} out of range in row {i}")
            if set(row) != full:
                raise GroupError(f"{self.name}: not a Latin square (row {i} repeats an entry)")
        for j in range(n):
            if {self.mult[i][j] for i in range(n)} != full:
                raise GroupError(f"{self.name}: not a Latin square (column {j} repeats an entry)")
        for x in range(n):
            if self.mult[0][x] != x or self.mult[x][0] != x:
                raise GroupError(f"{self.name}: element 0 is not the identity at {x}")
        m = self.mult
        for x in range(n):
            mx = m[x]
            for y in range(n):
                mxy = mx[y]
                my = m[y]
                for z in range(n):
                    if m[mxy][z] != mx[my[z]]:
                        raise GroupError(
                            f"{self.name}: associativity fails at ({x},{y},{z})"
                        )

    def _inverse_table(self) -> list[int]:
        inv = [0] * self.order
        for x in range(self.order):
            inv[x] = self.mult[x].index(0)
        return inv

    def mul(self, x: int, y: int) -> int:
        return self.mult[x][y]

    def inv(self, x: int) -> int:
        return self._inv[x]

    def power(self, x: int, e: int) -> int:
        e %= self.element_order(x)
        out = 0
        for _ in range(e):
            out = self.mult[out][x]
        return out

    def element_order(self, x: int) -> int:
        k = 1
        y = x
        while y != 0:
            y = self.mult[y][x]
            k += 1
        return k

    def cyclic_subgroup(self, x: int) -> list[int]:
        out = [0]
        y = x
        while y != 0:
            out.append(y)
            y = self.mult[y][x]
        return out

    def generated_subgroup(self, gens: list[int]) -> set[int]:
        seen = {0}
        frontier = [0]
        while frontier:
            g = frontier.pop()
            for s in gens:
                h = self.mult[g][s]
                if h not in seen:
                    seen.add(h)
                    frontier.append(h)
        return seen

    def relabel(self, perm: list[int]) -> FiniteGroup:
        """Conjugate the table by a permutation fixing 0 (test helper)."""
        if perm[0] != 0:
            raise GroupError("relabeling must fix the identity")
        inv = [0] * self.order
        for i, p in enumerate(perm):
            inv[p] = i
        mult = [
            [perm[self.mult[inv[i]][inv[j]]] for j in range(self.order)]
            for i in range(self.order)
        ]
        return FiniteGroup(self.name + "'", mult)

    def to_document(self, generators: dict[str, int] | None = None) -> dict:
        doc = {"name": self.name, "order": self.order, "mult": [list(r) for r in self.mult]}
        if generators:
            doc["generators"] = dict(generators)
        return doc

    def __repr__(self):
        return f"FiniteGroup({self.name!r}, order={self.order})"


def load_group(document: dict) -> FiniteGroup:
    """Build a FiniteGroup from its document, verifying every invariant."""
    if not isinstance(document, dict):
        raise GroupError("group document must be an object")
    for key in ("name", "order", "mult"):
        if key not in document:
            raise GroupError(f"group document missing field {key!r}")
    group = FiniteGroup(document["name"], document["mult"])
    if group.order != int(document["order"]):
        raise GroupError(
            f"{group.name}: declared order {document['order']} but table has {group.order} rows"
        )
    gens = document.get("generators", {})
    for letter, idx in gens.items():
        if not 0 <= int(idx) < group.order:
            raise GroupError(f"{group.name}: generator {letter!r} index {idx} out of range")
    return group


def group_from_permutations(name: str, perms: list[tuple[int, ...]]) -> FiniteGroup:
    """Close a set of permutations under composition and build the table.

    Preprocessing helper so permutation-generated groups can be turned into
    plain tables; element 0 is the identity permutation.
    """
    if not perms:
        raise GroupError("need at least one permutation")
    degree = len(perms[0])
    ident = tuple(range(degree))
    elements = [ident]
    index = {ident: 0}
    frontier = [ident]
    while frontier:
        g = frontier.pop(0)
        for s in perms:
            if len(s) != degree:
                raise GroupError("permutations must share one degree")
            h = tuple(g[s[i]] for i in range(degree))
            if h not in index:
                index[h] = len(elements)
                elements.append(h)
                frontier.append(h)
    mult = []
    for g in elements:
        row = []
        for h in elements:
            gh = tuple(g[h[i]] for i in range(degree))
            row.append(index[gh])
        mult.append(row)
    return FiniteGroup(name, mult)


# -- coset graphs --------------------------------------------------------------


@dataclass
class CosetGraph:
    """Bipartite incidence graph of the cosets of <x> and <y> in V.

    Left vertices are cosets of <x>, right vertices cosets of <y>, and there
    is one edge per coset of the intersection, joining the two cosets that
    contain it.  Parallel edges are kept.
    """

    left_cosets: list[tuple[int, ...]]
    right_cosets: list[tuple[int, ...]]
    # one edge per intersection coset; right vertices are offset by len(left_cosets)
    edges: list[tuple[int, int]]
    half_girth: float  # integer, or math.inf for a forest

    @property
    def vertex_count(self) -> int:
        return len(self.left_cosets) + len(self.right_cosets)


def _left_cosets(group: FiniteGroup, subgroup: list[int]) -> tuple[list[tuple[int, ...]], list[int]]:
    coset_of = [-1] * group.order
    cosets: list[tuple[int, ...]] = []
    for g in range(group.order):
        if coset_of[g] >= 0:
            continue
        members = sorted(group.mult[g][h] for h in subgroup)
        idx = len(cosets)
        cosets.append(tuple(members))
        for m in members:
            coset_of[m] = idx
    return cosets, coset_of


def build_coset_graph(group: FiniteGroup, x: int, y: int) -> CosetGraph:
    gen_x = group.cyclic_subgroup(x)
    gen_y = group.cyclic_subgroup(y)
    reached = group.generated_subgroup([x, y])
    if len(reached) != group.order:
        missing = sorted(set(range(group.order)) - reached)
        raise GroupError(
            f"{group.name}: <x,y> is a proper subgroup; missing elements {missing[:8]}"
        )
    meet = sorted(set(gen_x) & set(gen_y))
    left, left_of = _left_cosets(group, gen_x)
    right, right_of = _left_cosets(group, gen_y)
    edge_cosets, _ = _left_cosets(group, meet)
    offset = len(left)
    edges = []
    for coset in edge_cosets:
        g = coset[0]
        edges.append((left_of[g], offset + right_of[g]))
    graph = CosetGraph(left, right, edges, 0)
    graph.half_girth = half_girth(graph)
    return graph


def _multigraph_girth(n_vertices: int, edges: list[tuple[int, int]]) -> float:
    """Girth of an undirected multigraph via per-vertex BFS with parent edges."""
    adj: list[list[tuple[int, int]]] = [[] for _ in range(n_vertices)]
    for eid, (u, v) in enumerate(edges):
        adj[u].append((v, eid))
        adj[v].append((u, eid))
    best = math.inf
    for start in range(n_vertices):
        dist = {start: 0}
        parent_edge = {start: -1}
        queue = [start]
        qi = 0
        while qi < len(queue):
            u = queue[qi]
            qi += 1
            if 2 * dist[u] >= best:
                continue
            for v, eid in adj[u]:
                if eid == parent_edge[u]:
                    continue
                if v not in dist:
                    dist[v] = dist[u] + 1
                    parent_edge[v] = eid
                    queue.append(v)
                else:
                    cycle = dist[u] + dist[v] + 1
                    if cycle < best:
                        best = cycle
    return best


def half_girth(graph: CosetGraph) -> float:
    """Half the minimum cycle length; math.inf for a forest."""
    girth = _multigraph_girth(graph.vertex_count, graph.edges)
    if girth is math.inf:
        return math.inf
    if girth % 2 != 0:
        raise GroupError("coset graph has an odd cycle; it is not bipartite")
    return girth // 2


# -- local links ---------------------------------------------------------------


@dataclass
class LocalLink:
    """Cayley graph of a vertex group on all nontrivial powers of its two generators."""

    group_name: str
    order: int
    k: int
    neighbors: list[list[int]]  # per element, per symbol index, target element
    diameter: int

    def symbol_count(self) -> int:
        return 2 * (self.k - 1)


def local_link(group: FiniteGroup, x: int, y: int, k: int) -> LocalLink:
    for g, letter in ((x, "first"), (y, "second")):
        if group.element_order(g) != k:
            raise GroupError(
                f"{group.name}: {letter} generator has order {group.element_order(g)}, expected {k}"
            )
    if len(group.generated_subgroup([x, y])) != group.order:
        raise GroupError(f"{group.name}: designated generators do not generate")
    symbols = []
    for g in (x, y):
        acc = g
        for _ in range(1, k):
            symbols.append(acc)
            acc = group.mult[acc][g]
    neighbors = [[group.mult[e][s] for s in symbols] for e in range(group.order)]
    diameter = _bfs_eccentricity(neighbors, 0)
    return LocalLink(group.name, group.order, k, neighbors, diameter)


def _bfs_eccentricity(neighbors: list[list[int]], start: int) -> int:
    dist = {start: 0}
    queue = [start]
    qi = 0
    ecc = 0
    while qi < len(queue):
        u = queue[qi]
        qi += 1
        for v in neighbors[u]:
            if v not in dist:
                dist[v] = dist[u] + 1
                ecc = max(ecc, dist[v])
                queue.append(v)
    if len(dist) != len(neighbors):
        raise GroupError("local link is disconnected")
    return ecc


def link_eccentricities(link: LocalLink) -> list[int]:
    return [_bfs_eccentricity(link.neighbors, v) for v in range(link.order)]


# -- triangle group specs --------------------------------------------------------


@dataclass
class TriangleGroupSpec:
    """Three vertex groups with designated generator pairs of a common order k."""

    k: int
    vertex_groups: tuple[FiniteGroup, FiniteGroup, FiniteGroup]
    designated: tuple[tuple[int, int], tuple[int, int], tuple[int, int]]
    name: str = "triangle-group"
    nontrivial_edge_intersections: list[int] = field(default_factory=list)

    def validate(self) -> None:
        if self.k < 2:
            raise GroupError("k must be at least 2")
        self.nontrivial_edge_intersections = []
        for i, (group, (x, y)) in enumerate(zip(self.vertex_groups, self.designated)):
            for g in (x, y):
                order = group.element_order(g)
                if order != self.k:
                    raise GroupError(
                        f"{group.name} (V{i+1}): designated generator has order {order}, expected k={self.k}"
                    )
            if len(group.generated_subgroup([x, y])) != group.order:
                raise GroupError(f"{group.name} (V{i+1}): designated generators do not generate")
            meet = set(group.cyclic_subgroup(x)) & set(group.cyclic_subgroup(y))
            if len(meet) > 1:
                # legal but untested territory: edges of the complex would carry
                # extra symmetry; flagged so callers can surface it
                self.nontrivial_edge_intersections.append(i)

    def local_links(self) -> list[LocalLink]:
        return [
            local_link(group, x, y, self.k)
            for group, (x, y) in zip(self.vertex_groups, self.designated)
        ]

    def coset_graphs(self) -> list[CosetGraph]:
        return [
            build_coset_graph(group, x, y)
            for group, (x, y) in zip(self.vertex_groups, self.designated)
        ]

    def half_girths(self) -> tuple[float, float, float]:
        return tuple(g.half_girth for g in self.coset_graphs())

    def to_document(self) -> dict:
        docs = []
        for i, group in enumerate(self.vertex_groups):
            letters = VERTEX_LETTERS[i]
            gens = {
                LETTERS[letters[0]]: self.designated[i][0],
                LETTERS[letters[1]]: self.designated[i][1],
            }
            docs.append(group.to_document(gens))
        return {
            "name": self.name,
            "k": self.k,
            "vertex_groups": docs,
            "designated": {k: list(v) for k, v in DESIGNATED_PATTERN.items()},
        }


@dataclass
class NpcVerdict:
    kind: str  # "euclidean" | "hyperbolic" | "fails"
    half_girths: tuple
    angle_sum: Fraction
    excess: Fraction | None = None

    @property
    def nonpositively_curved(self) -> bool:
        return self.kind in ("euclidean", "hyperbolic")

    def __str__(self):
        rs = ",".join("inf" if r is math.inf else str(int(r)) for r in self.half_girths)
        if self.kind == "fails":
            return f"Fails(excess={self.excess}), r=({rs})"
        return f"{self.kind.capitalize()}, r=({rs})"


def npc_check(spec: TriangleGroupSpec) -> NpcVerdict:
    """Classify the spec by the half-girth angle sum 1/r1 + 1/r2 + 1/r3."""
    spec.validate()
    girths = spec.half_girths()
    total = Fraction(0)
    for r in girths:
        if r is not math.inf:
            total += Fraction(1, int(r))
    if total == 1:
        return NpcVerdict("euclidean", girths, total)
    if total < 1:
        return NpcVerdict("hyperbolic", girths, total)
    return NpcVerdict("fails", girths, total, excess=total - 1)


# -- document parsing ------------------------------------------------------------


def load_triangle_spec(document: dict, base_dir: Path | None = None) -> TriangleGroupSpec:
    """Parse a triangle-group spec document, resolving group file references."""
    if not isinstance(document, dict):
        raise GroupError("spec document must be an object")
    for key in ("k", "vertex_groups"):
        if key not in document:
            raise GroupError(f"spec document missing field {key!r}")
    k = int(document["k"])
    raw_groups = document["vertex_groups"]
    if not isinstance(raw_groups, list) or len(raw_groups) != 3:
        raise GroupError("vertex_groups must list exactly three groups")
    designated_doc = document.get("designated", DESIGNATED_PATTERN)
    for key, want in DESIGNATED_PATTERN.items():
        if list(designated_doc.get(key, [])) != want:
            raise GroupError(
                f"designated map must assign {want} to {key}; letters a, b, c each "
                "belong to exactly two vertex groups"
            )
    groups = []
    designated = []
    for i, raw in enumerate(raw_groups):
        if isinstance(raw, str):
            path = Path(raw)
            if base_dir is not None and not path.is_absolute():
                path = base_dir / path
            raw = json.loads(path.read_text())
        group = load_group(raw)
        gens = raw.get("generators", {})
        letters = VERTEX_LETTERS[i]
        pair = []
        for letter_idx in letters:
            letter = LETTERS[letter_idx]
            if letter not in gens:
                raise GroupError(
                    f"{group.name} (V{i+1}): generators map must name letter {letter!r}"
                )
            pair.append(int(gens[letter]))
        groups.append(group)
        designated.append((pair[0], pair[1]))
    spec = TriangleGroupSpec(
        k=k,
        vertex_groups=tuple(groups),
        designated=tuple(designated),
        name=str(document.get("name", "triangle-group")),
    )
    spec.validate()
    return spec


def load_triangle_spec_file(path: str | Path) -> TriangleGroupSpec:
    path = Path(path)
    return load_triangle_spec(json.loads(path.read_text()), base_dir=path.parent)
