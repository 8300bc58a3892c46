"""Exact integer plane geometry and polyline drawing import.

All predicates are exact: integer cross products for orientation and
angular order, :class:`fractions.Fraction` for intersection parameters.
No floating point is used anywhere, so degeneracy detection is sound.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .drawing import Drawing, DrawingError, Multigraph
from .pmap import NODE_CROSS, NODE_REAL, PlanarMap


class GeometryError(ValueError):
    """Input violates the general-position requirements."""


def orient(a, b, c):
    """Sign area of the triangle a, b, c (positive = counterclockwise)."""
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def _strictly_between(a, b, p):
    """p strictly interior to segment ab, assuming collinear."""
    if a[0] != b[0]:
        return min(a[0], b[0]) < p[0] < max(a[0], b[0])
    return min(a[1], b[1]) < p[1] < max(a[1], b[1])


def segment_intersection(a, b, c, d):
    """Classify how segments ab and cd meet.

    Returns one of
      ('none',), ('proper', t, s) with exact parameters along ab and cd,
      ('touch', point), or ('overlap',).
    """
    o1 = orient(a, b, c)
    o2 = orient(a, b, d)
    o3 = orient(c, d, a)
    o4 = orient(c, d, b)
    if o1 == o2 == 0:  # collinear supporting lines
        lo_x = max(min(a[0], b[0]), min(c[0], d[0]))
        hi_x = min(max(a[0], b[0]), max(c[0], d[0]))
        lo_y = max(min(a[1], b[1]), min(c[1], d[1]))
        hi_y = min(max(a[1], b[1]), max(c[1], d[1]))
        if lo_x > hi_x or lo_y > hi_y:
            return ("none",)
        if lo_x == hi_x and lo_y == hi_y:
            return ("touch", (lo_x, lo_y))
        return ("overlap",)
    if (o1 > 0) != (o2 > 0) and o1 != 0 and o2 != 0 and \
            (o3 > 0) != (o4 > 0) and o3 != 0 and o4 != 0:
        den = o1 - o2  # equals cross(d1, d2) with d1 = b - a, d2 = d - c
        t = Fraction(o3, o3 - o4)
        s = Fraction(o1, o1 - o2)
        return ("proper", t, s)
    # non-proper contact: endpoint on the other segment or shared endpoint
    for p in (c, d):
        if orient(a, b, p) == 0 and (min(a[0], b[0]) <= p[0] <= max(a[0], b[0])
                                     and min(a[1], b[1]) <= p[1] <= max(a[1], b[1])):
            return ("touch", p)
    for p in (a, b):
        if orient(c, d, p) == 0 and (min(c[0], d[0]) <= p[0] <= max(c[0], d[0])
                                     and min(c[1], d[1]) <= p[1] <= max(c[1], d[1])):
            return ("touch", p)
    return ("none",)


def _angle_key(vec):
    """Total order of directions counterclockwise from the positive x axis."""
    x, y = vec
    if x == 0 and y == 0:
        raise GeometryError("zero-length direction")
    upper = 0 if (y > 0 or (y == 0 and x > 0)) else 1

    class _K:
        __slots__ = ("h", "v")

        def __init__(self, h, v):
            self.h = h
            self.v = v

        def __lt__(self, other):
            if self.h != other.h:
                return self.h < other.h
            cr = self.v[0] * other.v[1] - self.v[1] * other.v[0]
            if cr == 0:
                raise GeometryError("collinear same-direction darts at a node")
            return cr > 0

        def __eq__(self, other):
            return False

    return _K(upper, (x, y))


class GeometricDrawing:
    """Integer polyline drawing: points, polyline edges, isolated vertices.

    Edge routes are lists of point indices; first and last are the edge's
    endpoints (graph vertices), interior entries are waypoints.
    """

    __slots__ = ("points", "edges", "isolated")

    def __init__(self, points, edges, isolated=()):
        self.points = [(int(x), int(y)) for x, y in points]
        self.edges = [(int(e), [int(p) for p in route]) for e, route in edges]
        self.isolated = [int(p) for p in isolated]
        seen = set()
        for p in self.points:
            if p in seen:
                raise GeometryError("coincident points")
            seen.add(p)
        for _, route in self.edges:
            if len(route) < 2:
                raise GeometryError("edge route needs at least two points")
            for p in route:
                if not (0 <= p < len(self.points)):
                    raise GeometryError("route references unknown point")
            if len(set(route)) != len(route):
                raise GeometryError("edge route revisits a point")

    def translated(self, dx, dy):
        return GeometricDrawing(
            [(x + dx, y + dy) for x, y in self.points],
            [(e, list(r)) for e, r in self.edges], list(self.isolated))

    def rotated90(self):
        return GeometricDrawing(
            [(-y, x) for x, y in self.points],
            [(e, list(r)) for e, r in self.edges], list(self.isolated))


def import_geometric(g):
    """Build a combinatorial drawing from exact polyline geometry.

    Crossing order along every edge comes from exact parameter sorting,
    rotations from exact angular comparisons.  Raises
    :class:`GeometryError` on triple points, overlapping or collinear
    segments, or a vertex in the interior of an edge.
    """
    pts = g.points
    vertex_pts = sorted({r[0] for _, r in g.edges} | {r[-1] for _, r in g.edges}
                        | set(g.isolated))
    vertex_set = set(vertex_pts)
    for _, route in g.edges:
        for p in route[1:-1]:
            if p in vertex_set:
                raise GeometryError("vertex lies in the interior of an edge")

    # flat segment table
    segs = []  # (edge pos, seg idx, point a, point b)
    edges_sorted = sorted(g.edges)
    for epos, (eid, route) in enumerate(edges_sorted):
        for i in range(len(route) - 1):
            segs.append((epos, i, route[i], route[i + 1]))

    crossings = []  # (eposA, segA, tA, eposB, segB, tB, sign, exact point)
    waypoint_pts = {p for _, r in g.edges for p in r[1:-1]}
    for i in range(len(segs)):
        e1, s1, a1, b1 = segs[i]
        A, B = pts[a1], pts[b1]
        for j in range(i + 1, len(segs)):
            e2, s2, a2, b2 = segs[j]
            C, D = pts[a2], pts[b2]
            shared = {a1, b1} & {a2, b2}
            kind = segment_intersection(A, B, C, D)
            if kind[0] == "none":
                continue
            if kind[0] == "overlap":
                raise GeometryError("overlapping collinear segments")
            if kind[0] == "touch":
                p = kind[1]
                if shared and p == pts[next(iter(shared))]:
                    q = next(iter(shared))
                    if e1 == e2 and abs(s1 - s2) == 1:
                        continue  # consecutive segments of one polyline
                    if e1 != e2 and q in vertex_set:
                        continue  # edges meeting at their common vertex
                    if q in waypoint_pts:
                        raise GeometryError("edges pass through a common waypoint")
                    raise GeometryError("edge touches itself")
                raise GeometryError(
                    "segment endpoint lies on another segment interior")
            _, t, s = kind
            if e1 == e2:
                raise GeometryError("edge crosses itself")
            sign = 1 if orient((0, 0), (B[0] - A[0], B[1] - A[1]),
                               (D[0] - C[0], D[1] - C[1])) > 0 else -1
            px = Fraction(A[0]) + t * (B[0] - A[0])
            py = Fraction(A[1]) + t * (B[1] - A[1])
            crossings.append((e1, s1, t, e2, s2, s, sign, (px, py)))

    by_point = {}
    for rec in crossings:
        by_point.setdefault(rec[7], []).append(rec)
    for p, recs in by_point.items():
        if len(recs) > 1:
            raise GeometryError("three segments meet in one point")

    # per-edge crossing sequences, exact order
    per_edge = {i: [] for i in range(len(edges_sorted))}
    for idx, (e1, s1, t, e2, s2, s, sign, _pt) in enumerate(crossings):
        per_edge[e1].append(((s1, t), idx, 0))
        per_edge[e2].append(((s2, s), idx, 1))
    for epos, lst in per_edge.items():
        lst.sort(key=lambda r: r[0])
        for (k1, _, _), (k2, _, _) in zip(lst, lst[1:]):
            if k1 == k2:
                raise GeometryError("three segments meet in one point")

    n_vertices = len(vertex_pts)
    vnode = {p: i for i, p in enumerate(vertex_pts)}
    cross_node = {idx: n_vertices + idx for idx in range(len(crossings))}

    # arcs: per edge, crossings + 1 segments
    arc_base = {}
    arc_edge = []
    arc_seg = []
    a = 0
    for epos, (eid, _) in enumerate(edges_sorted):
        arc_base[epos] = a
        for s in range(len(per_edge[epos]) + 1):
            arc_edge.append(eid)
            arc_seg.append(s)
            a += 1

    # rank of each crossing along each of its two edges
    rank = {}
    for epos, lst in per_edge.items():
        for r, (_, idx, role) in enumerate(lst):
            rank[(idx, role)] = r

    rot = [[] for _ in range(n_vertices + len(crossings))]
    kinds = [NODE_REAL] * n_vertices + [NODE_CROSS] * len(crossings)

    # crossing rotations: counterclockwise, alternating the two edges
    for idx, (e1, s1, t, e2, s2, s, sign, _pt) in enumerate(crossings):
        r1 = rank[(idx, 0)]
        r2 = rank[(idx, 1)]
        pf = 2 * (arc_base[e1] + r1 + 1)
        pb = 2 * (arc_base[e1] + r1) + 1
        qf = 2 * (arc_base[e2] + r2 + 1)
        qb = 2 * (arc_base[e2] + r2) + 1
        if sign > 0:
            rot[cross_node[idx]] = [pf, qf, pb, qb]
        else:
            rot[cross_node[idx]] = [pf, qb, pb, qf]

    # vertex rotations: exact angular sort of terminal darts
    incid = {p: [] for p in vertex_pts}
    for epos, (eid, route) in enumerate(edges_sorted):
        k = len(per_edge[epos])
        tail_dart = 2 * arc_base[epos]
        head_dart = 2 * (arc_base[epos] + k) + 1
        pa, pb_ = pts[route[0]], pts[route[1]]
        incid[route[0]].append(((pb_[0] - pa[0], pb_[1] - pa[1]), tail_dart))
        pa, pb_ = pts[route[-1]], pts[route[-2]]
        incid[route[-1]].append(((pb_[0] - pa[0], pb_[1] - pa[1]), head_dart))
    for p, lst in incid.items():
        lst.sort(key=lambda rec: _angle_key(rec[0]))
        rot[vnode[p]] = [dart for _, dart in lst]

    flat = [x for row in rot for x in row]
    off = np.zeros(len(rot) + 1, dtype=np.int64)
    off[1:] = np.cumsum([len(r) for r in rot])

    # isolated vertices: anchor each into its containing face
    anchors = {}
    iso = [p for p in g.isolated]
    pending = []
    for p in iso:
        anchors[vnode[p]] = None
        pending.append(p)

    graph = Multigraph(vertex_pts,
                       [(eid, route[0], route[-1]) for eid, route in edges_sorted])
    pm = PlanarMap(kinds, flat, off, arc_edge, arc_seg, anchors=anchors)

    if pending and len(segs):
        per_edge_keys = {epos: [k for k, _, _ in lst]
                         for epos, lst in per_edge.items()}
        for p in pending:
            d = _containing_face_dart(pts[p], segs, pts, arc_base, per_edge_keys)
            anchors[vnode[p]] = d
        pm = PlanarMap(kinds, flat, off, arc_edge, arc_seg, anchors=anchors)
    return Drawing(graph, pm)


def _containing_face_dart(p, segs, pts, arc_base, per_edge_keys):
    """Anchor dart for an isolated point: shoot a vertical ray upward.

    The first segment strictly above determines the face below it, taken
    on the ``x + epsilon`` side to dodge endpoint ties.  Returns ``None``
    when the ray escapes (ambient region).
    """
    px, py = p
    best = None
    for epos, sidx, aP, bP in segs:
        A, B = pts[aP], pts[bP]
        if A[0] > B[0]:
            A, B = B, A
            flipped = True
        else:
            flipped = False
        if A[0] == B[0]:
            continue  # vertical segment cannot span x + epsilon
        if not (A[0] <= px < B[0]):
            continue
        y = Fraction(A[1]) + Fraction(B[1] - A[1], B[0] - A[0]) * (px - A[0])
        if y <= py:
            if y == py:
                raise GeometryError("isolated vertex lies on an edge")
            continue
        slope = Fraction(B[1] - A[1], B[0] - A[0])
        key = (y, slope)
        if best is None or key < best[0]:
            # parameter along the original (unflipped) segment at x = px
            t = Fraction(px - A[0], B[0] - A[0])
            if flipped:
                t = 1 - t
            best = (key, epos, sidx, t, flipped)
    if best is None:
        return None
    _, epos, sidx, t, flipped = best
    ks = per_edge_keys[epos]
    nbefore = sum(1 for k in ks if k < (sidx, t))
    arc = arc_base[epos] + nbefore
    # face below the hit: left of the backward dart when heading +x
    return 2 * arc + 1 if not flipped else 2 * arc
