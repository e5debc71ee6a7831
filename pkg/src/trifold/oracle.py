"""Two independent oracles for the ball construction.

The first realizes the three Euclidean 2-fold cases as exact reflection
groups of the plane and builds Cayley balls by breadth-first search with
exact isometry equality.  The second unfolds galleries of triangles into the
plane, runs an exact funnel shortest-path over the portal sequence, and
counts crossed edges, which certifies that the breadth-first ball metric
agrees with the geometric one.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .development import Development, DevelopmentError
from .rings import (
    Isometry,
    Point,
    Q3,
    RadicalSum,
    area2,
    dot,
    on_segment,
    p_add,
    p_scale,
    p_sub,
    pt,
    segment_point_sqdist,
    sqdist,
)


class OracleError(ValueError):
    pass


# fundamental triangles: corner i carries the angle pi/r_i, mirror for letter
# "a" is the side v1-v3, for "b" the side v1-v2, for "c" the side v2-v3
_TRIANGLES: dict[str, tuple[Point, Point, Point]] = {
    "d333": (pt(0, 0), pt(1, 0), (Q3(Fraction(1, 2)), Q3(0, Fraction(1, 2)))),
    "d244": (pt(0, 0), pt(1, 0), pt(0, 1)),
    "d236": (pt(0, 0), pt(1, 0), (Q3(0), Q3(0, 1))),
}

GROUP_IDS = tuple(sorted(_TRIANGLES))


def reflection_generators(group_id: str) -> list[Isometry]:
    try:
        v1, v2, v3 = _TRIANGLES[group_id]
    except KeyError:
        raise OracleError(
            f"unknown oracle group {group_id!r}; available: {', '.join(GROUP_IDS)}"
        )
    gens = [
        Isometry.reflection(v1, v3),  # a
        Isometry.reflection(v1, v2),  # b
        Isometry.reflection(v2, v3),  # c
    ]
    for g in gens:
        if not g.is_orthogonal():
            raise OracleError("reflection is not an exact orthogonal map")
    return gens


@dataclass
class IsometryBall:
    """Cayley ball of a plane reflection group with exact element equality."""

    group_id: str
    radius: int
    elements: list[Isometry]
    dist: list[int]
    neighbors: list[dict[int, int]]  # per element, letter index -> element index

    @property
    def sphere_sizes(self) -> list[int]:
        sizes = [0] * (self.radius + 1)
        for d in self.dist:
            sizes[d] += 1
        return sizes


def isometry_ball(group_id: str, radius: int) -> IsometryBall:
    gens = reflection_generators(group_id)
    ident = Isometry.identity()
    elements = [ident]
    index = {ident: 0}
    dist = [0]
    neighbors: list[dict[int, int]] = [{}]
    frontier = [0]
    for d in range(radius):
        new_frontier = []
        for ei in frontier:
            g = elements[ei]
            for letter in range(3):
                h = g.compose(gens[letter])
                hi = index.get(h)
                if hi is None:
                    hi = len(elements)
                    index[h] = hi
                    elements.append(h)
                    dist.append(d + 1)
                    neighbors.append({})
                    new_frontier.append(hi)
                neighbors[ei][letter] = hi
                neighbors[hi][letter] = ei
        frontier = new_frontier
    return IsometryBall(group_id, radius, elements, dist, neighbors)


@dataclass
class BallComparison:
    ok: bool
    radius: int
    matched: int
    detail: str = ""

    def __bool__(self):
        return self.ok


def compare_balls(dev: Development, ball: IsometryBall, radius: int) -> BallComparison:
    """Match the development ball against the oracle ball by synchronized BFS.

    Labels are generator letters; determinism of both neighbor maps makes the
    matching unique, so a single pass either builds the isomorphism or
    reports the first divergence.
    """
    if dev.k != 2:
        raise OracleError("isometry oracle covers only 2-fold specs")
    if radius > dev.radius or radius > ball.radius:
        raise OracleError("both balls must be trusted out to the requested radius")
    dev_ball = [f for f in range(dev.face_count) if dev.final[f] and dev.dist[f] <= radius]
    oracle_ball = [e for e in range(len(ball.elements)) if ball.dist[e] <= radius]
    if len(dev_ball) != len(oracle_ball):
        return BallComparison(
            False, radius, 0,
            f"ball sizes differ: development {len(dev_ball)}, oracle {len(oracle_ball)}",
        )
    match = {0: 0}
    queue = [0]
    qi = 0
    while qi < len(queue):
        f = queue[qi]
        qi += 1
        if dev.dist[f] >= radius:
            continue
        w = match[f]
        for sym in range(dev.symbol_count):
            f2 = dev.neighbor(f, sym)
            w2 = ball.neighbors[w].get(sym)  # k=2: symbol index == letter index
            if f2 is None or w2 is None:
                return BallComparison(
                    False, radius, len(match),
                    f"missing neighbor on letter {sym} at face {f} / element {w}",
                )
            if dev.dist[f2] != ball.dist[w2]:
                return BallComparison(
                    False, radius, len(match),
                    f"distance mismatch across letter {sym} at face {f}",
                )
            if f2 in match:
                if match[f2] != w2:
                    return BallComparison(
                        False, radius, len(match),
                        f"label-preserving map breaks at face {f2}",
                    )
            else:
                match[f2] = w2
                queue.append(f2)
    if len(match) != len(dev_ball) or len(set(match.values())) != len(oracle_ball):
        return BallComparison(
            False, radius, len(match),
            f"matched {len(match)} of {len(dev_ball)} faces",
        )
    return BallComparison(True, radius, len(match))


# -- gallery unfolding ---------------------------------------------------------


@dataclass
class Gallery:
    """A sequence of faces, consecutive ones sharing an edge, with its unfolding.

    placements[i] maps each vertex type of face i to an exact plane point;
    portals[i] is the pair of points shared by faces i and i+1, together with
    the development vertex ids sitting at those points.
    """

    faces: list[int]
    edges: list[int]  # development edge between consecutive faces
    placements: list[dict[int, Point]]
    portals: list[tuple[Point, Point, int, int]]


# all unfolded coordinates are scaled by 6: triangle corners and centroids
# then have integer components, which keeps every predicate in fast integer
# arithmetic; reported lengths are unscaled at the end
_UNFOLD_SCALE = 6
_BASE_CORNERS = {
    0: pt(0, 0),
    1: pt(6, 0),
    2: (Q3(3), Q3(0, 3)),
}


def _reflect_apex(a: Point, b: Point, c: Point) -> Point:
    # for an equilateral triangle the foot of the apex is the base midpoint
    return (a[0] + b[0] - c[0], a[1] + b[1] - c[1])


def _require_metric_gate(dev: Development) -> None:
    girths = dev.spec.half_girths()
    if any(r == 2 for r in girths):
        raise OracleError(
            "metric oracle unavailable for this spec: the unit equilateral "
            "metric needs all half-girths at least 3"
        )


def unfold_gallery(dev: Development, faces: list[int]) -> Gallery:
    """Place the gallery in the plane as glued unit equilateral triangles."""
    placements: list[dict[int, Point]] = [dict(_BASE_CORNERS)]
    edges = []
    portals: list[tuple[Point, Point, int, int]] = []
    for i in range(1, len(faces)):
        prev, cur = faces[i - 1], faces[i]
        edge = dev.shared_edge(prev, cur)
        if edge is None:
            raise OracleError(f"faces {prev} and {cur} share no edge")
        edges.append(edge)
        letter = dev.edge_letter[edge]
        shared_types = dev.letter_types[letter]
        other_type = 3 - shared_types[0] - shared_types[1]
        prev_placed = placements[-1]
        a = prev_placed[shared_types[0]]
        b = prev_placed[shared_types[1]]
        placed = {
            shared_types[0]: a,
            shared_types[1]: b,
            other_type: _reflect_apex(a, b, prev_placed[other_type]),
        }
        placements.append(placed)
        va, vb = dev.edge_ends[edge]
        portals.append((a, b, va, vb))
    return Gallery(list(faces), edges, placements, portals)


def _third(v):
    if isinstance(v, int):
        q, r = divmod(v, 3)
        if r == 0:
            return q
    return v / Fraction(3)


def centroid(placed: dict[int, Point]) -> Point:
    x = placed[0][0] + placed[1][0] + placed[2][0]
    y = placed[0][1] + placed[1][1] + placed[2][1]
    return (Q3(_third(x.p), _third(x.q)), Q3(_third(y.p), _third(y.q)))


def enumerate_galleries(dev: Development, f1: int, f2: int, max_len: int) -> list[Gallery]:
    """All face sequences from f1 to f2 of at most max_len faces, unfolded.

    Consecutive faces must share an edge and may not repeat immediately.
    """
    _require_metric_gate(dev)
    out = []
    for faces in _walks(dev, f1, f2, max_len, simple=False):
        out.append(unfold_gallery(dev, faces))
    return out


def _walks(dev: Development, f1: int, f2: int, max_len: int, simple: bool):
    dist_to_goal = dev.bfs_from(f2)
    stack = [(f1,)]
    while stack:
        walk = stack.pop()
        cur = walk[-1]
        if cur == f2:
            yield list(walk)
        remaining = max_len - len(walk)
        if remaining <= 0:
            continue
        for nxt in reversed(dev.adjacent_faces(cur)):
            if nxt == walk[-1] or (simple and nxt in walk):
                continue
            d = dist_to_goal.get(nxt)
            if d is None or d > remaining - 1:
                continue
            stack.append(walk + (nxt,))


# -- exact funnel over a portal sleeve ------------------------------------------


def funnel_path(portals: list[tuple[Point, Point]], start: Point, goal: Point) -> list[Point]:
    """Shortest path through an ordered sleeve of portal segments.

    Portals must be oriented (left, right) as seen along the walk.  Collinear
    configurations tighten the funnel, so paths through portal endpoints are
    produced exactly.
    """
    pts = [(start, start)] + list(portals) + [(goal, goal)]
    n = len(pts)
    path = [start]
    apex, left, right = start, start, start
    apex_i = left_i = right_i = 0
    i = 1
    while i < n:
        pl, prv = pts[i]
        # tighten the right side: the candidate narrows when it sits on or
        # left of the apex-right ray, and crosses over when it passes the
        # apex-left ray, in which case the left point becomes the new apex
        if area2(apex, right, prv).sign() >= 0:
            if right == apex or area2(apex, left, prv).sign() <= 0:
                right, right_i = prv, i
            else:
                path.append(left)
                apex, apex_i = left, left_i
                left = right = apex
                left_i = right_i = apex_i
                i = apex_i + 1
                continue
        # tighten the left side, mirrored
        if area2(apex, left, pl).sign() <= 0:
            if left == apex or area2(apex, right, pl).sign() >= 0:
                left, left_i = pl, i
            else:
                path.append(right)
                apex, apex_i = right, right_i
                left = right = apex
                left_i = right_i = apex_i
                i = apex_i + 1
                continue
        i += 1
    path.append(goal)
    deduped = [path[0]]
    for p in path[1:]:
        if p != deduped[-1]:
            deduped.append(p)
    return deduped


def orient_portals(gallery: Gallery, start: Point) -> list[tuple[Point, Point]]:
    """Order each portal's endpoints as (left, right) seen along the walk."""
    oriented = []
    for i, (a, b, _va, _vb) in enumerate(gallery.portals):
        before = gallery.placements[i]
        after = gallery.placements[i + 1]
        shared = {a, b}
        apex_before = next(p for p in before.values() if p not in shared)
        apex_after = next(p for p in after.values() if p not in shared)
        direction = p_sub(apex_after, apex_before)
        if area2(apex_before, p_add(apex_before, direction), a).sign() > 0:
            oriented.append((a, b))
        else:
            oriented.append((b, a))
    return oriented


def path_length(path: list[Point]) -> RadicalSum:
    total = RadicalSum(0)
    for a, b in zip(path, path[1:]):
        total = total + RadicalSum.sqrt_of(sqdist(a, b))
    return total


def _check_path_in_sleeve(path: list[Point], oriented: list[tuple[Point, Point]]) -> None:
    """Each portal segment must meet the path; exact containment audit."""
    for a, b in oriented:
        hit = False
        for p, q in zip(path, path[1:]):
            if _segment_crosses(p, q, a, b):
                hit = True
                break
        if not hit:
            raise OracleError("funnel path escaped its sleeve at a portal")


def _segment_crosses(p: Point, q: Point, a: Point, b: Point) -> bool:
    """Closed-segment intersection predicate, touching counts."""
    d1 = area2(p, q, a).sign()
    d2 = area2(p, q, b).sign()
    d3 = area2(a, b, p).sign()
    d4 = area2(a, b, q).sign()
    if d1 * d2 < 0 and d3 * d4 < 0:
        return True
    if d1 == 0 and on_segment(a, p, q):
        return True
    if d2 == 0 and on_segment(b, p, q):
        return True
    if d3 == 0 and on_segment(p, a, b):
        return True
    if d4 == 0 and on_segment(q, a, b):
        return True
    return False


@dataclass
class GeodesicResult:
    squared_length: RadicalSum
    length: RadicalSum
    gallery: Gallery
    path: list[Point]
    crossings: int
    inconclusive: bool = False


def cat0_geodesic(dev: Development, f1: int, f2: int, max_len: int) -> GeodesicResult:
    """Shortest centroid-to-centroid path over galleries of up to max_len faces.

    Only galleries without repeated faces are searched: a geodesic meets each
    convex face in a connected set, so its own gallery never revisits one.
    Simple connectivity plus nonpositive curvature then make the gallery-wise
    minimum global once max_len exceeds the crossing count of the true
    geodesic; the inconclusive flag reports when the winner sits at the
    search boundary.  Branches whose entry portal already lies farther from
    the start than the best path are pruned exactly.
    """
    _require_metric_gate(dev)
    if f1 == f2:
        g = unfold_gallery(dev, [f1])
        zero = RadicalSum(0)
        return GeodesicResult(zero, zero, g, [centroid(g.placements[0])], 0)
    dist_to_goal = dev.bfs_from(f2)
    if f1 not in dist_to_goal:
        raise OracleError("faces are not connected inside the ball")
    best: tuple[RadicalSum, Gallery, list[Point], int, bool] | None = None
    base_gallery = unfold_gallery(dev, [f1])
    start = centroid(base_gallery.placements[0])
    stack: list[tuple[tuple[int, ...], Gallery]] = [((f1,), base_gallery)]
    while stack:
        walk, gallery = stack.pop()
        cur = walk[-1]
        if cur == f2:
            oriented = orient_portals(gallery, start)
            goal = centroid(gallery.placements[-1])
            path = funnel_path(oriented, start, goal)
            length = path_length(path)
            if best is None or length.compare(best[0]) < 0:
                _check_path_in_sleeve(path, oriented)
                crossings = count_crossings(dev, gallery, path)
                best = (length, gallery, path, crossings, len(walk) >= max_len)
        remaining = max_len - len(walk)
        if remaining <= 0:
            continue
        for nxt in reversed(dev.adjacent_faces(cur)):
            if nxt in walk:
                continue
            d = dist_to_goal.get(nxt)
            if d is None or d > remaining - 1:
                continue
            extended = _extend_gallery(dev, gallery, nxt)
            if best is not None:
                a, b, _, _ = extended.portals[-1]
                bound = RadicalSum.sqrt_of(segment_point_sqdist(a, b, start))
                if bound.compare(best[0]) > 0:
                    continue
            stack.append((walk + (nxt,), extended))
    if best is None:
        raise OracleError("no gallery within max_len; raise max_len")
    length, gallery, path, crossings, inconclusive = best
    unscale = Fraction(1, _UNFOLD_SCALE)
    return GeodesicResult(
        length.squared() * (unscale * unscale),
        length * unscale,
        gallery,
        path,
        crossings,
        inconclusive,
    )


def _extend_gallery(dev: Development, gallery: Gallery, nxt: int) -> Gallery:
    edge = dev.shared_edge(gallery.faces[-1], nxt)
    letter = dev.edge_letter[edge]
    shared_types = dev.letter_types[letter]
    other_type = 3 - shared_types[0] - shared_types[1]
    prev_placed = gallery.placements[-1]
    a = prev_placed[shared_types[0]]
    b = prev_placed[shared_types[1]]
    placed = {
        shared_types[0]: a,
        shared_types[1]: b,
        other_type: _reflect_apex(a, b, prev_placed[other_type]),
    }
    va, vb = dev.edge_ends[edge]
    return Gallery(
        gallery.faces + [nxt],
        gallery.edges + [edge],
        gallery.placements + [placed],
        gallery.portals + [(a, b, va, vb)],
    )


def count_crossings(dev: Development, gallery: Gallery, path: list[Point]) -> int:
    """Edges crossed by the path, counting a pass through a vertex as the
    shortest triangle fan around it."""
    events: list[tuple[str, int, int]] = []  # ("cross", portal_idx, -1) or ("vertex", portal_idx, vid)
    for idx, (a, b, va, vb) in enumerate(gallery.portals):
        touched = -1
        for p, q in zip(path, path[1:]):
            if on_segment(a, p, q):
                touched = va
                break
            if on_segment(b, p, q):
                touched = vb
                break
        if touched >= 0:
            events.append(("vertex", idx, touched))
        else:
            events.append(("cross", idx, -1))
    crossings = 0
    i = 0
    while i < len(events):
        kind, idx, vid = events[i]
        if kind == "cross":
            crossings += 1
            i += 1
            continue
        # group consecutive portals touched at vertices with no transversal
        # crossing in between; the run may involve several adjacent vertices
        j = i
        vids = []
        while j < len(events) and events[j][0] == "vertex":
            vids.append(events[j][2])
            j += 1
        entry_face = gallery.faces[events[i][1]]
        exit_face = gallery.faces[events[j - 1][1] + 1]
        crossings += _fan_distance(dev, vids, entry_face, exit_face)
        i = j
    return crossings


def _fan_distance(dev: Development, vids: list[int], entry: int, exit: int) -> int:
    """Fewest shared edges between faces along the touched vertex run."""
    allowed = set()
    for vid in vids:
        allowed.update(dev.faces_at_vertex(vid))
    dist = {entry: 0}
    queue = [entry]
    qi = 0
    while qi < len(queue):
        f = queue[qi]
        qi += 1
        if f == exit:
            return dist[f]
        for g in dev.adjacent_faces(f):
            if g in allowed and g not in dist:
                dist[g] = dist[f] + 1
                queue.append(g)
    raise OracleError("vertex fan is not connected inside the ball")


@dataclass
class CrossingReport:
    ok: bool
    pairs_checked: int
    failures: list[tuple[int, int, int, int]] = field(default_factory=list)
    inconclusive: list[tuple[int, int]] = field(default_factory=list)

    def __bool__(self):
        return self.ok


def catacomb_check(dev: Development, radius: int, max_len: int | None = None) -> CrossingReport:
    """Crossing count of the geometric geodesic must equal the ball distance,
    for every face pair within the given distance."""
    _require_metric_gate(dev)
    faces = [f for f in range(dev.face_count) if dev.final[f]]
    failures = []
    inconclusive = []
    pairs = 0
    for fi, f1 in enumerate(faces):
        dists = dev.bfs_from(f1)
        for f2 in faces[fi + 1:]:
            d = dists.get(f2)
            if d is None or d > radius:
                continue
            pairs += 1
            cap = max_len if max_len is not None else d + 2 * dev.margin
            result = cat0_geodesic(dev, f1, f2, cap)
            if result.inconclusive:
                inconclusive.append((f1, f2))
            elif result.crossings != d:
                failures.append((f1, f2, d, result.crossings))
    return CrossingReport(not failures and not inconclusive, pairs, failures, inconclusive)
