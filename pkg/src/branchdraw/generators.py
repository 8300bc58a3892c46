"""Constructions and test corpora for branching multigraph drawings.

The extremal ``gen_tight`` drawing glues two mirrored chord arrangements
along an equatorial cycle; chord crossing order inside each hemisphere
comes from exact integer geometry on convex-position points, so the map
is deterministic and validates as a sphere map at every size.
"""

from __future__ import annotations

import numpy as np

from .drawing import Drawing, DrawingError, Multigraph, delete_edges
from .geometry import GeometricDrawing, import_geometric
from .pmap import NODE_CROSS, NODE_REAL, MapError, PlanarMap

_TIGHT_CACHE = {}

# convex-position y jitter, frozen so drawings are stable across platforms;
# keeps chord arrangements of (i, 256*i*i + jitter) concurrency-free
_TIGHT_JITTER = [
    54, 40, 32, 17, 19, 2, 4, 1, 11, 52, 41, 58, 32, 38, 62, 46, 40, 34,
    35, 59, 17, 52, 42, 0, 25, 54, 35, 2, 48, 46, 54, 11, 5, 55, 1, 34,
    5, 19, 30, 27, 25, 1, 0, 7, 0, 42, 33, 41, 16, 39, 48, 24, 29, 63,
    51, 62, 24, 43, 60, 41, 53, 44, 45, 24, 56, 8, 37, 46, 54, 33, 24, 19,
]


def _convex_ys(n):
    if n <= len(_TIGHT_JITTER):
        jit = np.array(_TIGHT_JITTER[:n], dtype=np.int64)
    else:
        rng = np.random.default_rng(0)
        jit = rng.integers(0, 64, size=n).astype(np.int64)
        jit[:len(_TIGHT_JITTER)] = _TIGHT_JITTER
    xs = np.arange(n, dtype=np.int64)
    return 256 * xs * xs + jit


def _cross2(ax, ay, bx, by):
    return ax * by - ay * bx


def gen_tight(n, use_cache=True, check=False):
    """Extremal branching drawing: n-cycle plus a doubled chord per pair.

    Every nonconsecutive vertex pair is joined by two edges, one through
    each hemisphere; consecutive pairs share a single cycle edge.  Gives
    ``e = n(n-2)``, all degrees ``2n - 4``, and ``2 * C(n, 4)`` crossings.
    """
    if n < 3:
        raise DrawingError("tight construction needs n >= 3")
    if use_cache and n in _TIGHT_CACHE:
        return _TIGHT_CACHE[n]

    # convex position with exact integer coordinates
    xs = np.arange(n, dtype=np.int64)
    ys = _convex_ys(n)
    iu, iv = np.triu_indices(n, 2)
    keep = ~((iu == 0) & (iv == n - 1))
    cu = iu[keep].astype(np.int64)
    cv = iv[keep].astype(np.int64)
    C = len(cu)

    # interleaving chord pairs (a, b): cu[a] < cu[b] < cv[a] < cv[b]
    if C:
        cond = ((cu[:, None] < cu[None, :]) & (cu[None, :] < cv[:, None])
                & (cv[:, None] < cv[None, :]))
        pa, pb = np.nonzero(cond)
        pa = pa.astype(np.int64)
        pb = pb.astype(np.int64)
    else:
        pa = pb = np.empty(0, dtype=np.int64)
    K = len(pa)

    d1x = xs[cv[pa]] - xs[cu[pa]]
    d1y = ys[cv[pa]] - ys[cu[pa]]
    d2x = xs[cv[pb]] - xs[cu[pb]]
    d2y = ys[cv[pb]] - ys[cu[pb]]
    wx = xs[cu[pb]] - xs[cu[pa]]
    wy = ys[cu[pb]] - ys[cu[pa]]
    den = _cross2(d1x, d1y, d2x, d2y)
    if np.any(den == 0):
        raise MapError("degenerate chord pair")
    t1n = _cross2(wx, wy, d2x, d2y)
    t2n = _cross2(wx, wy, d1x, d1y)
    sign = np.sign(den).astype(np.int8)

    # crossing order along each chord: exact rational sort
    rec_chord = np.concatenate([pa, pb])
    rec_num = np.concatenate([t1n, t2n])
    rec_den = np.concatenate([den, den])
    flip = rec_den < 0
    rec_num = np.where(flip, -rec_num, rec_num)
    rec_den = np.where(flip, -rec_den, rec_den)
    rec_cross = np.tile(np.arange(K, dtype=np.int64), 2)
    rec_role = np.repeat(np.array([0, 1], dtype=np.int8), K)
    tf = rec_num.astype(np.float64) / rec_den.astype(np.float64)
    order = np.lexsort((tf, rec_chord))
    sc = rec_chord[order]
    if n <= 48:
        # numerators and denominators stay below 2^26, so distinct exact
        # ratios are farther apart than float64 rounding; only exact ties
        # (true concurrency) need checking
        stf = tf[order]
        ties = np.flatnonzero((sc[1:] == sc[:-1]) & (stf[1:] == stf[:-1]))
        if len(ties):
            sn = rec_num[order]
            sd = rec_den[order]
            if np.any(sn[ties] * sd[ties + 1] == sn[ties + 1] * sd[ties]):
                raise MapError("three chords meet in one point")
    else:
        sn = rec_num[order].astype(object)
        sd = rec_den[order].astype(object)
        same = sc[1:] == sc[:-1]
        lhs = sn[:-1] * sd[1:]
        rhs = sn[1:] * sd[:-1]
        if np.any(same & (lhs == rhs)):
            raise MapError("three chords meet in one point")
        if np.any(same & (lhs > rhs)):
            # float pre-sort lied: redo the within-chord order exactly
            from fractions import Fraction
            keys = [(int(c), Fraction(int(a), int(b)))
                    for c, a, b in zip(rec_chord, rec_num, rec_den)]
            order = np.array(sorted(range(len(keys)), key=keys.__getitem__),
                             dtype=np.int64)
            sc = rec_chord[order]
    rank_sorted = np.arange(len(order), dtype=np.int64)
    chord_first = np.zeros(len(order), dtype=np.int64)
    if len(order):
        starts = np.ones(len(order), dtype=bool)
        starts[1:] = sc[1:] != sc[:-1]
        run_first = np.flatnonzero(starts)
        run_id = np.cumsum(starts) - 1
        rank_sorted = rank_sorted - run_first[run_id]
    rank = np.empty(len(order), dtype=np.int64)
    rank[order] = rank_sorted
    ra = rank[:K]  # rank of crossing k along chord pa[k]
    rb = rank[K:]

    cnt = np.bincount(rec_chord, minlength=C).astype(np.int64) if len(rec_chord) \
        else np.zeros(C, dtype=np.int64)

    # arc layout: equator arcs 0..n-1, then inner chords, then outer chords
    arcs_per_chord = cnt + 1
    base_in = n + np.concatenate([[0], np.cumsum(arcs_per_chord)[:-1]]) \
        if C else np.empty(0, dtype=np.int64)
    inner_total = int(arcs_per_chord.sum()) if C else 0
    base_out = n + inner_total + (base_in - n) if C else np.empty(0, dtype=np.int64)
    n_arcs = n + 2 * inner_total

    arc_edge = np.empty(n_arcs, dtype=np.int64)
    arc_seg = np.zeros(n_arcs, dtype=np.int64)
    arc_edge[:n] = np.arange(n)
    if C:
        chord_of_arc = np.repeat(np.arange(C), arcs_per_chord)
        first_arc = np.concatenate([[0], np.cumsum(arcs_per_chord)[:-1]])
        seg_of_arc = np.arange(inner_total, dtype=np.int64) - first_arc[chord_of_arc]
        arc_edge[n:n + inner_total] = n + chord_of_arc
        arc_seg[n:n + inner_total] = seg_of_arc
        arc_edge[n + inner_total:] = n + C + chord_of_arc
        arc_seg[n + inner_total:] = seg_of_arc

    # crossing node rotations, inner then mirrored outer
    def quads(base, chirality):
        pf = 2 * (base[pa] + ra + 1)
        pb_ = 2 * (base[pa] + ra) + 1
        qf = 2 * (base[pb] + rb + 1)
        qb = 2 * (base[pb] + rb) + 1
        pos = chirality > 0
        q = np.empty((K, 4), dtype=np.int64)
        q[:, 0] = pf
        q[:, 1] = np.where(pos, qf, qb)
        q[:, 2] = pb_
        q[:, 3] = np.where(pos, qb, qf)
        return q

    quads_in = quads(base_in, sign) if K else np.empty((0, 4), dtype=np.int64)
    quads_out = quads(base_out, -sign) if K else np.empty((0, 4), dtype=np.int64)

    # vertex rotations
    chord_index = {}
    for c in range(C):
        chord_index[(int(cu[c]), int(cv[c]))] = c

    def chord_dart(i, j, base):
        u, v = (i, j) if i < j else (j, i)
        c = chord_index[(u, v)]
        if i == u:
            return 2 * int(base[c])
        return 2 * int(base[c] + cnt[c]) + 1

    vrot = []
    for i in range(n):
        row = [2 * i]  # equator toward i + 1
        for off in range(2, n - 1):
            row.append(chord_dart(i, (i + off) % n, base_in))
        row.append(2 * ((i - 1) % n) + 1)  # equator toward i - 1
        for off in range(2, n - 1):
            row.append(chord_dart(i, (i - off) % n, base_out))
        vrot.append(row)

    kinds = np.concatenate([
        np.full(n, NODE_REAL, dtype=np.int8),
        np.full(2 * K, NODE_CROSS, dtype=np.int8)])
    flat = np.concatenate(
        [np.array([x for row in vrot for x in row], dtype=np.int64),
         quads_in.reshape(-1), quads_out.reshape(-1)])
    lens = [len(r) for r in vrot] + [4] * (2 * K)
    off = np.zeros(len(lens) + 1, dtype=np.int64)
    off[1:] = np.cumsum(lens)

    edges = [(i, i, (i + 1) % n) for i in range(n)]
    edges += [(n + c, int(cu[c]), int(cv[c])) for c in range(C)]
    edges += [(n + C + c, int(cu[c]), int(cv[c])) for c in range(C)]
    graph = Multigraph(list(range(n)), edges)
    pm = PlanarMap(kinds, flat, off, arc_edge, arc_seg, check=check)
    out = Drawing(graph, pm, check=check)
    if use_cache:
        _TIGHT_CACHE[n] = out
    return out


def gen_random_branching(n, keep, seed):
    """Random edge subset of the tight drawing; always branching.

    Deletion only removes lenses, and every surviving lens still holds
    the equator vertices strictly between its endpoints.  PCG64 seeded
    with ``seed``; one uniform draw per edge in ascending edge id order.
    """
    base = gen_tight(n)
    if keep >= 1:
        return base
    rng = np.random.default_rng(int(seed))
    u = rng.random(base.e)
    drop = base.graph.edge_ids[u >= keep]
    return delete_edges(base, drop.tolist())


def gen_blowup(d, m):
    """Replace every edge by ``m`` parallel copies in a narrow ribbon.

    Every original crossing becomes an ``m x m`` grid of crossings, so
    the crossing count is multiplied by exactly ``m^2``.  Edge ``i`` (by
    position) maps to copies ``i*m .. i*m + m - 1`` except for ``m == 1``
    where original ids are kept.  The result usually has empty lenses
    between neighbouring copies; validate separately.
    """
    if m < 1:
        raise DrawingError("blow-up multiplicity must be >= 1")
    g, pm = d.graph, d.pmap
    if g.multiplicity() > 1:
        raise DrawingError("blow-up input must be simple (multiplicity 1)")
    if g.has_loops():
        raise DrawingError("blow-up input must be loop-free")

    E = g.e
    old_cross = np.flatnonzero(pm.node_kind == NODE_CROSS)
    n = g.n

    def new_eid(epos, i):
        return int(g.edge_ids[epos]) if m == 1 else epos * m + i

    # passing edges and chirality per old crossing
    cross_info = {}
    for x in old_cross.tolist():
        rotx = pm.rotation_at(x)
        e_of = [int(np.searchsorted(g.edge_ids, pm.arc_edge[dd >> 1]))
                for dd in rotx]
        gpos, hpos = e_of[0], e_of[1]
        # chirality: +1 when the dart after g-forward is h-forward
        d_gf = [dd for dd in rotx[::2] if (dd & 1) == 0][0] \
            if (rotx[0] & 1) == 0 or (rotx[2] & 1) == 0 else None
        idx_gf = 0 if (rotx[0] & 1) == 0 else 2
        nxt = rotx[(idx_gf + 1) % 4]
        sgn = 1 if (int(nxt) & 1) == 0 else -1
        lo, hi = (gpos, hpos) if gpos < hpos else (hpos, gpos)
        if gpos > hpos:  # normalize so g is the smaller edge position
            sgn = -sgn
        cross_info[x] = (lo, hi, sgn)

    # grid node ids per old crossing
    xs = sorted(cross_info)
    grid_base = {}
    nid = n
    for x in xs:
        grid_base[x] = nid
        nid += m * m
    n_nodes = nid

    # crossing sequences along each copy
    # old sequences per edge: list of (old crossing node, am_i_g)
    old_seq = {}
    for epos in range(E):
        eid = int(g.edge_ids[epos])
        arcs = d.edge_arcs(eid)
        seq = []
        for aidx in arcs[:-1]:
            xnode = int(pm.dart_node[2 * int(aidx) + 1])
            lo, hi, sgn = cross_info[xnode]
            seq.append((xnode, epos == lo))
        old_seq[epos] = seq

    # new arcs and paths
    arc_edge = []
    arc_seg = []
    path_nodes = {}  # (epos, copy) -> interior node list
    arc_base = {}
    a = 0
    for epos in range(E):
        seq = old_seq[epos]
        for i in range(m):
            interior = []
            for xnode, am_g in seq:
                lo, hi, sgn = cross_info[xnode]
                base = grid_base[xnode]
                # ascending partner index when displacement aligns forward
                asc = (sgn > 0) if am_g else (sgn < 0)
                rng_j = range(m) if asc else range(m - 1, -1, -1)
                for j in rng_j:
                    node = base + (i * m + j if am_g else j * m + i)
                    interior.append(node)
            arc_base[(epos, i)] = a
            eidn = new_eid(epos, i)
            for s in range(len(interior) + 1):
                arc_edge.append(eidn)
                arc_seg.append(s)
                a += 1
            path_nodes[(epos, i)] = interior

    # rotations at new crossing nodes
    rot = {}
    pos_on_path = {}
    for (epos, i), interior in path_nodes.items():
        for pos, node in enumerate(interior):
            pos_on_path[(node, epos, i)] = pos
    for x in xs:
        lo, hi, sgn = cross_info[x]
        base = grid_base[x]
        for i in range(m):
            for j in range(m):
                node = base + i * m + j
                pg = pos_on_path[(node, lo, i)]
                ph = pos_on_path[(node, hi, j)]
                gf = 2 * (arc_base[(lo, i)] + pg + 1)
                gb = 2 * (arc_base[(lo, i)] + pg) + 1
                hf = 2 * (arc_base[(hi, j)] + ph + 1)
                hb = 2 * (arc_base[(hi, j)] + ph) + 1
                if sgn > 0:
                    rot[node] = [gf, hf, gb, hb]
                else:
                    rot[node] = [gf, hb, gb, hf]

    # vertex rotations: replace each incident dart by its copy block
    vrot = []
    for v in range(n):
        row = []
        for dd in pm.rotation_at(v).tolist():
            aidx = dd >> 1
            epos = int(np.searchsorted(g.edge_ids, pm.arc_edge[aidx]))
            k = len(old_seq[epos])
            if (dd & 1) == 0:  # tail at u: copies right-to-left
                for i in range(m - 1, -1, -1):
                    row.append(2 * arc_base[(epos, i)])
            else:  # head at v: copies left-to-right
                for i in range(m):
                    npath = len(path_nodes[(epos, i)])
                    row.append(2 * (arc_base[(epos, i)] + npath) + 1)
        vrot.append(row)

    kinds = [NODE_REAL] * n + [NODE_CROSS] * (n_nodes - n)
    rows = vrot + [rot[x] for x in range(n, n_nodes)]
    flat = [x for r in rows for x in r]
    off = np.zeros(len(rows) + 1, dtype=np.int64)
    off[1:] = np.cumsum([len(r) for r in rows])

    edges = []
    for epos in range(E):
        u, v = int(g.edge_u[epos]), int(g.edge_v[epos])
        for i in range(m):
            edges.append((new_eid(epos, i), u, v))
    anchors = dict(pm.anchors)
    graph = Multigraph(g.vertex_ids.tolist(), edges)
    pmap = PlanarMap(kinds, flat, off, arc_edge, arc_seg, anchors=anchors)
    return Drawing(graph, pmap)


def gen_tripartite(n, spacing=2048):
    """Remark-style tripartite multigraph with doubly-crossing curves.

    ``n/3`` vertices on each of three vertical lines; every left-right
    pair is joined by one polyline per gap between consecutive middle
    vertices (wrapping below).  Middle vertices are isolated.  The result
    intentionally violates the branching conditions.
    """
    if n % 3 != 0 or n < 6:
        raise DrawingError("tripartite construction needs n = 3k, n >= 6")
    k = n // 3
    S = spacing
    W = S * k * 8
    points = []
    left = []
    mid = []
    right = []
    for i in range(k):
        left.append(len(points))
        points.append((0, S * i))
    for i in range(k):
        mid.append(len(points))
        points.append((W, S * i))
    for i in range(k):
        right.append(len(points))
        points.append((2 * W, S * i))
    edges = []
    eid = 0
    way = {}
    for a in range(k):
        for b in range(k):
            for gap in range(k):
                dx = (a * k + b) - (k * k) // 2
                dy = a - b
                px = W + 2 * dx
                py = S * gap - S // 2 + 2 * dy
                if (px, py) in way:
                    raise DrawingError("waypoint collision")
                way[(px, py)] = True
                wp = len(points)
                points.append((px, py))
                edges.append((eid, [left[a], wp, right[b]]))
                eid += 1
    g = GeometricDrawing(points, edges, isolated=mid)
    return import_geometric(g)
