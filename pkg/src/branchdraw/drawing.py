"""Multigraph drawings: abstract graph plus planarization, with edits.

A ``Drawing`` ties a :class:`Multigraph` to a :class:`PlanarMap` whose
real nodes ``0..n-1`` are the vertices in sorted-id order and whose
remaining nodes are crossings.  Each edge owns a simple path of arcs
``(edge, 0..k)`` through crossing nodes.  All edit operations return new
drawings and re-validate the full invariant set.
"""

from __future__ import annotations

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .pmap import (NODE_CROSS, NODE_REAL, MapError, PlanarMap)


class DrawingError(ValueError):
    """A drawing violates a graph/map consistency invariant."""


def _edge_positions(edge_ids, labels):
    """Positions of ``labels`` in the sorted unique ``edge_ids`` table."""
    e = len(edge_ids)
    if e and edge_ids[0] == 0 and edge_ids[-1] == e - 1:
        return labels  # contiguous ids: identity
    return np.searchsorted(edge_ids, labels)


class Multigraph:
    """Abstract multigraph with integer vertex and edge ids."""

    __slots__ = ("vertex_ids", "edge_ids", "edge_u", "edge_v")

    def __init__(self, vertices, edges):
        vlist = list(vertices)
        self.vertex_ids = np.unique(np.asarray(vlist, dtype=np.int64)) \
            if vlist else np.empty(0, dtype=np.int64)
        if len(self.vertex_ids) != len(vlist):
            raise DrawingError("duplicate vertex ids")
        if edges:
            eids, us, vs = (np.asarray(col, dtype=np.int64)
                            for col in zip(*sorted(edges)))
        else:
            eids = us = vs = np.empty(0, dtype=np.int64)
        if len(np.unique(eids)) != len(eids):
            raise DrawingError("duplicate edge ids")
        pos_u = np.searchsorted(self.vertex_ids, us)
        pos_v = np.searchsorted(self.vertex_ids, vs)
        ok = ((pos_u < len(self.vertex_ids)) & (pos_v < len(self.vertex_ids)))
        if len(us) and not (np.all(ok) and np.all(self.vertex_ids[pos_u] == us)
                            and np.all(self.vertex_ids[pos_v] == vs)):
            raise DrawingError("edge endpoint is not a vertex")
        self.edge_ids, self.edge_u, self.edge_v = eids, us, vs

    @property
    def n(self):
        return len(self.vertex_ids)

    @property
    def e(self):
        return len(self.edge_ids)

    def edges(self):
        return list(zip(self.edge_ids.tolist(), self.edge_u.tolist(),
                        self.edge_v.tolist()))

    def has_loops(self):
        return bool(np.any(self.edge_u == self.edge_v))

    def loop_ids(self):
        return self.edge_ids[self.edge_u == self.edge_v]

    def degrees(self):
        """Degree per vertex position (loops count twice)."""
        d = np.zeros(self.n, dtype=np.int64)
        if self.e:
            np.add.at(d, np.searchsorted(self.vertex_ids, self.edge_u), 1)
            np.add.at(d, np.searchsorted(self.vertex_ids, self.edge_v), 1)
        return d

    def multiplicity(self):
        """Maximum number of parallel edges over any vertex pair."""
        if self.e == 0:
            return 0
        lo = np.minimum(self.edge_u, self.edge_v)
        hi = np.maximum(self.edge_u, self.edge_v)
        _, counts = np.unique(np.stack([lo, hi]), axis=1, return_counts=True)
        return int(counts.max())

    def parallel_groups(self):
        """Groups of >= 2 parallel non-loop edges, keyed by endpoint pair."""
        groups = {}
        for eid, u, v in zip(self.edge_ids.tolist(), self.edge_u.tolist(),
                             self.edge_v.tolist()):
            if u == v:
                continue
            groups.setdefault((min(u, v), max(u, v)), []).append(eid)
        return {k: v for k, v in groups.items() if len(v) >= 2}


class Face:
    """One face of a drawing's planarization, darts in orbit order."""

    __slots__ = ("index", "darts", "size")

    def __init__(self, index, darts, size):
        self.index = index
        self.darts = darts
        self.size = size

    def __repr__(self):
        return f"Face({self.index}, size={self.size})"


class Drawing:
    """Immutable multigraph drawing on the sphere."""

    __slots__ = ("graph", "pmap", "epath_arcs", "epath_off", "_lens_cache",
                 "_cross_keys")

    def __init__(self, graph, pmap, check=True):
        self.graph = graph
        self.pmap = pmap
        self._lens_cache = None
        self._cross_keys = None
        n = graph.n
        kind = pmap.node_kind
        if pmap.n_nodes < n or np.any(kind[:n] != NODE_REAL) or \
                (pmap.n_nodes > n and np.any(kind[n:] != NODE_CROSS)):
            raise DrawingError("map nodes must list the real vertices first")
        edge_pos = _edge_positions(graph.edge_ids, pmap.arc_edge)
        bad = (edge_pos >= graph.e)
        if pmap.n_arcs:
            bad |= graph.edge_ids[np.minimum(edge_pos, graph.e - 1)] != pmap.arc_edge
        if np.any(bad):
            raise DrawingError("arc labelled with unknown edge id")
        if pmap.n_arcs and np.all(edge_pos[1:] >= edge_pos[:-1]) and \
                np.all((pmap.arc_seg[1:] > pmap.arc_seg[:-1])
                       | (edge_pos[1:] > edge_pos[:-1])):
            order = np.arange(pmap.n_arcs, dtype=np.int32)  # already path-sorted
        else:
            order = np.lexsort((pmap.arc_seg, edge_pos))
        self.epath_arcs = np.ascontiguousarray(order, dtype=np.int32)
        self.epath_off = np.zeros(graph.e + 1, dtype=np.int64)
        if pmap.n_arcs:
            self.epath_off[1:] = np.cumsum(
                np.bincount(edge_pos, minlength=graph.e))
        if check:
            self._validate_paths()

    # ------------------------------------------------------------------

    @property
    def n(self):
        return self.graph.n

    @property
    def e(self):
        return self.graph.e

    def crossings(self):
        """Number of crossings in the drawing (degree-4 crossing nodes)."""
        return self.pmap.n_crossings

    def vertex_node(self, vid):
        return int(np.searchsorted(self.graph.vertex_ids, vid))

    def node_vertex(self, node):
        return int(self.graph.vertex_ids[node])

    def edge_pos(self, eid):
        p = int(np.searchsorted(self.graph.edge_ids, eid))
        if p >= self.graph.e or self.graph.edge_ids[p] != eid:
            raise DrawingError(f"unknown edge id {eid}")
        return p

    def edge_arcs(self, eid):
        p = self.edge_pos(eid)
        return self.epath_arcs[self.epath_off[p]:self.epath_off[p + 1]]

    def edge_forward_darts(self, eid):
        """Darts along the edge path from u to v (tail dart of each arc)."""
        return 2 * self.edge_arcs(eid)

    def degrees(self):
        return self.graph.degrees()

    def faces(self):
        """All faces, darts in orbit order, ordered by smallest dart."""
        fd = self.pmap.faces()
        return [Face(i, tuple(fd.darts[fd.off[i]:fd.off[i + 1]].tolist()),
                     int(fd.sizes[i])) for i in range(fd.nfaces)]

    def crossing_edge_pairs(self):
        """Edge positions (lo, hi) of the two passing edges per crossing node."""
        m = self.pmap
        cross = np.flatnonzero(m.node_kind == NODE_CROSS)
        if not len(cross):
            z = np.empty(0, dtype=np.int64)
            return cross, z, z
        rows = m.rot_off[cross]
        ea = _edge_positions(self.graph.edge_ids, m.arc_edge[m.rot_darts[rows] >> 1])
        eb = _edge_positions(self.graph.edge_ids,
                             m.arc_edge[m.rot_darts[rows + 1] >> 1])
        return cross, np.minimum(ea, eb).astype(np.int64), \
            np.maximum(ea, eb).astype(np.int64)

    def edges_cross(self, pos_a, pos_b):
        """Whether the edges at positions a and b share a crossing node."""
        from bisect import bisect_left
        if self._cross_keys is None:
            _, lo, hi = self.crossing_edge_pairs()
            self._cross_keys = np.unique(lo * self.graph.e + hi).tolist()
        if pos_a == pos_b:
            return False
        lo, hi = (pos_a, pos_b) if pos_a < pos_b else (pos_b, pos_a)
        key = lo * self.graph.e + hi
        i = bisect_left(self._cross_keys, key)
        return i < len(self._cross_keys) and self._cross_keys[i] == key

    # ------------------------------------------------------------------

    def _validate_paths(self):
        g, m = self.graph, self.pmap
        if m.n_arcs == 0:
            if g.e:
                raise DrawingError("edge path broken: edge has no arcs")
            return
        counts = np.diff(self.epath_off)
        if np.any(counts == 0):
            eid = g.edge_ids[np.flatnonzero(counts == 0)[0]]
            raise DrawingError(f"edge path broken: edge {eid} has no arcs")
        arcs = self.epath_arcs
        segs = m.arc_seg[arcs]
        within = np.arange(len(arcs), dtype=np.int64) - np.repeat(
            self.epath_off[:-1], counts)
        if not np.array_equal(segs, within.astype(np.int32)):
            raise DrawingError("edge path broken: segment indices not 0..k")
        tails = m.dart_node[2 * arcs]
        heads = m.dart_node[2 * arcs + 1]
        first = self.epath_off[:-1]
        last = self.epath_off[1:] - 1
        u_nodes = np.searchsorted(g.vertex_ids, g.edge_u)
        v_nodes = np.searchsorted(g.vertex_ids, g.edge_v)
        if not (np.array_equal(tails[first], u_nodes)
                and np.array_equal(heads[last], v_nodes)):
            raise DrawingError("edge path broken: endpoints do not match")
        inner_mask = np.ones(len(arcs), dtype=bool)
        inner_mask[first] = False
        if np.any(inner_mask):
            if not np.array_equal(tails[inner_mask],
                                  heads[np.flatnonzero(inner_mask) - 1]):
                raise DrawingError("edge path broken: arcs not chained")
            if np.any(m.node_kind[tails[inner_mask]] != NODE_CROSS):
                raise DrawingError("edge path broken: interior node is not a crossing")
            # simple paths: interior crossing nodes distinct within an edge
            epos = np.repeat(np.arange(g.e), counts)[inner_mask]
            key = epos.astype(np.int64) * m.n_nodes + tails[inner_mask]
            if len(np.unique(key)) != len(key):
                raise DrawingError("edge path broken: edge crosses itself")
        # parallel edges are not allowed to cross each other
        cross_nodes = np.flatnonzero(m.node_kind == NODE_CROSS)
        if len(cross_nodes):
            rows = m.rot_off[cross_nodes]
            quad = m.rot_darts[rows[:, None] + np.arange(2)]
            e_a = _edge_positions(g.edge_ids, m.arc_edge[quad[:, 0] >> 1])
            e_b = _edge_positions(g.edge_ids, m.arc_edge[quad[:, 1] >> 1])
            share_both = (
                (np.minimum(g.edge_u[e_a], g.edge_v[e_a])
                 == np.minimum(g.edge_u[e_b], g.edge_v[e_b]))
                & (np.maximum(g.edge_u[e_a], g.edge_v[e_a])
                   == np.maximum(g.edge_u[e_b], g.edge_v[e_b])))
            if np.any(share_both):
                raise DrawingError("parallel edges cross each other")
        # loops only as explicitly tolerated input
        # (operations other than loop subdivision check has_loops themselves)

    # ------------------------------------------------------------------
    # placement-aware lens machinery

    def _lens_data(self):
        """Per-vertex canonical face and effective host component.

        A vertex hosted by component ``c`` occupies a specific face there;
        everything else (vertices of other components, ambient-anchored
        isolated vertices) floats in the shared outer region.
        """
        if self._lens_cache is not None:
            return self._lens_cache
        m = self.pmap
        fd = m.faces()
        ncomp, comp = m.components()
        n = self.n
        vface = np.full(n, -1, dtype=np.int64)
        vhost = np.full(n, -1, dtype=np.int64)
        deg = m.degrees()[:n]
        pos = deg > 0
        idx = np.flatnonzero(pos)
        if len(idx):
            vface[idx] = fd.face_of[m.rot_darts[m.rot_off[idx]]]
            vhost[idx] = comp[idx]
        for node, anchor in m.anchors.items():
            if node < n and anchor is not None:
                vface[node] = fd.face_of[anchor]
                vhost[node] = fd.face_comp[vface[node]]
        self._lens_cache = (vface, vhost)
        return self._lens_cache

    def lens_side_counts(self, pairs):
        """Vertices strictly on each side of the lens curve, per parallel pair.

        ``pairs`` is a list of ``(e, e2)`` edge-id pairs with identical
        endpoints and disjoint paths.  Returns ``(count_a, count_b)``
        arrays; side *b* is the one containing the component's ambient
        face (hence every vertex hosted elsewhere).
        """
        m = self.pmap
        fd = m.faces()
        dual = m.dual_tree()
        vface, vhost = self._lens_data()
        ncomp, comp = m.components()
        n = self.n
        out_a = np.zeros(len(pairs), dtype=np.int64)
        out_b = np.zeros(len(pairs), dtype=np.int64)
        tins = dual.tin
        for i, (ea, eb) in enumerate(pairs):
            pa = self.edge_pos(ea)
            pb = self.edge_pos(eb)
            u, v = int(self.graph.edge_u[pa]), int(self.graph.edge_v[pa])
            if {u, v} != {int(self.graph.edge_u[pb]), int(self.graph.edge_v[pb])} or u == v:
                raise DrawingError("edges are not a parallel pair")
            arcs_a = self.epath_arcs[self.epath_off[pa]:self.epath_off[pa + 1]]
            arcs_b = self.epath_arcs[self.epath_off[pb]:self.epath_off[pb + 1]]
            inner_a = m.dart_node[2 * arcs_a[1:]]
            inner_b = m.dart_node[2 * arcs_b[1:]]
            if len(np.intersect1d(inner_a, inner_b)):
                raise DrawingError("parallel pair crosses itself; no lens")
            curve = np.concatenate([arcs_a, arcs_b])
            x = comp[self.vertex_node(u)]
            amb = m.ambient_face(x)
            hosted = np.flatnonzero(vhost == x)
            qf = np.concatenate([vface[hosted], [amb]])
            par = dual.face_parity(curve, qf)
            amb_par = int(par[-1])
            par = par[:-1]
            sel = np.ones(len(hosted), dtype=bool)
            un = self.vertex_node(u)
            vn = self.vertex_node(v)
            sel &= (hosted != un) & (hosted != vn)
            c0 = int(np.count_nonzero(par[sel] == 0))
            c1 = int(np.count_nonzero(par[sel] == 1))
            floating = n - len(hosted)  # hosted elsewhere: land on the ambient side
            if amb_par == 0:
                side_b, side_a = c0 + floating, c1
            else:
                side_b, side_a = c1 + floating, c0
            out_a[i], out_b[i] = side_a, side_b
        return out_a, out_b


class LensSide:
    """One side of the closed curve of a parallel edge pair."""

    __slots__ = ("pair", "faces", "vertices")

    def __init__(self, pair, faces, vertices):
        self.pair = pair
        self.faces = frozenset(faces)
        self.vertices = frozenset(vertices)

    def __repr__(self):
        return f"LensSide(pair={self.pair}, vertices={sorted(self.vertices)})"


def lens_sides(d, ea, eb):
    """Both sides of the simple closed curve formed by a parallel pair.

    The second side returned is the one containing the ambient face of
    the pair's component, so vertices hosted in other components land
    there.  Raises if the edges are not parallel or cross each other.
    """
    m = d.pmap
    fd = m.faces()
    dual = m.dual_tree()
    pa, pb = d.edge_pos(ea), d.edge_pos(eb)
    g = d.graph
    u, v = int(g.edge_u[pa]), int(g.edge_v[pa])
    if {u, v} != {int(g.edge_u[pb]), int(g.edge_v[pb])} or u == v:
        raise DrawingError("edges are not parallel")
    arcs_a = d.edge_arcs(ea)
    arcs_b = d.edge_arcs(eb)
    if len(np.intersect1d(m.dart_node[2 * arcs_a[1:]],
                          m.dart_node[2 * arcs_b[1:]])):
        raise DrawingError("parallel edges cross each other; no lens")
    curve = np.concatenate([arcs_a, arcs_b])
    ncomp, comp = m.components()
    x = comp[d.vertex_node(u)]
    comp_faces = np.flatnonzero(fd.face_comp == x)
    par = dual.face_parity(curve, comp_faces)
    amb = m.ambient_face(x)
    amb_par = int(par[comp_faces.searchsorted(amb)])
    vface, vhost = d._lens_data()
    hosted = np.flatnonzero(vhost == x)
    vpar = dual.face_parity(curve, vface[hosted])
    un, vn = d.vertex_node(u), d.vertex_node(v)
    sides = {0: set(), 1: set()}
    for node, p in zip(hosted.tolist(), vpar.tolist()):
        if node not in (un, vn):
            sides[p].add(d.node_vertex(node))
    floating = set(g.vertex_ids.tolist()) - {d.node_vertex(i) for i in hosted} \
        - {u, v}
    sides[amb_par] |= floating
    faces0 = set(comp_faces[par == 0].tolist())
    faces1 = set(comp_faces[par == 1].tolist())
    pair = (min(ea, eb), max(ea, eb))
    inner = LensSide(pair, faces1 if amb_par == 0 else faces0,
                     sides[1 - amb_par])
    outer = LensSide(pair, faces0 if amb_par == 0 else faces1,
                     sides[amb_par])
    return inner, outer


# ----------------------------------------------------------------------
# edit operations


def delete_edges(d, edge_ids):
    """Remove edges; crossings that lose a passing edge are dissolved.

    The remaining edge through a dissolved crossing keeps one merged
    segment there.  Isolated vertices keep their position: their anchor
    moves to the merged face that absorbed their old faces.
    """
    g, m = d.graph, d.pmap
    drop = set(int(e) for e in edge_ids)
    for e in drop:
        d.edge_pos(e)  # raises on unknown ids
    keep_edge = np.array([int(e) not in drop for e in g.edge_ids], dtype=bool)

    n = g.n
    kind = m.node_kind
    cross_nodes = np.flatnonzero(kind == NODE_CROSS)
    # passing edges per crossing
    if len(cross_nodes):
        rows = m.rot_off[cross_nodes]
        d0 = m.rot_darts[rows]
        d1 = m.rot_darts[rows + 1]
        ce_a = _edge_positions(g.edge_ids, m.arc_edge[d0 >> 1])
        ce_b = _edge_positions(g.edge_ids, m.arc_edge[d1 >> 1])
        cross_keep = keep_edge[ce_a] & keep_edge[ce_b]
    else:
        cross_keep = np.empty(0, dtype=bool)
    keep_node = np.ones(m.n_nodes, dtype=bool)
    keep_node[cross_nodes] = cross_keep
    new_node_id = np.cumsum(keep_node) - 1

    # group kept edges' arcs into merged runs split at kept crossings
    arcs = d.epath_arcs
    counts = np.diff(d.epath_off)
    epos = np.repeat(np.arange(g.e), counts)
    arc_kept = keep_edge[epos]
    heads = m.dart_node[2 * arcs + 1]
    is_first = np.zeros(len(arcs), dtype=bool)
    is_first[d.epath_off[:-1][counts > 0]] = True
    brk = is_first.copy()
    if len(arcs) > 1:
        interior = ~is_first
        prev_head_kept = keep_node[heads[np.flatnonzero(interior) - 1]]
        brk[interior] = prev_head_kept
    sel = arc_kept
    grp = np.cumsum(brk[sel]) - 1 if np.any(sel) else np.empty(0, np.int64)
    kept_arc_idx = np.flatnonzero(sel)
    n_new_arcs = int(grp[-1]) + 1 if len(grp) else 0
    first_of_grp = np.zeros(n_new_arcs, dtype=np.int64)
    last_of_grp = np.zeros(n_new_arcs, dtype=np.int64)
    gb = np.ones(len(grp), dtype=bool)
    gb[1:] = grp[1:] != grp[:-1]
    first_of_grp[grp[gb]] = kept_arc_idx[gb]
    ge = np.ones(len(grp), dtype=bool)
    ge[:-1] = grp[1:] != grp[:-1]
    last_of_grp[grp[ge]] = kept_arc_idx[ge]

    new_arc_edge = m.arc_edge[arcs[first_of_grp]]
    new_epos = epos[first_of_grp]
    if n_new_arcs:
        starts = np.ones(n_new_arcs, dtype=bool)
        starts[1:] = new_epos[1:] != new_epos[:-1]
        run_id = np.cumsum(starts) - 1
        run_first = np.flatnonzero(starts)
        new_arc_seg = np.arange(n_new_arcs, dtype=np.int64) - run_first[run_id]
    else:
        new_arc_seg = np.empty(0, dtype=np.int64)

    dart_map = np.full(m.n_darts, -1, dtype=np.int64)
    old_tail = 2 * arcs[first_of_grp]
    old_head = 2 * arcs[last_of_grp] + 1
    dart_map[old_tail] = 2 * np.arange(n_new_arcs)
    dart_map[old_head] = 2 * np.arange(n_new_arcs) + 1

    # rotations: filter each kept node's list to mapped darts
    mapped = dart_map[m.rot_darts] >= 0
    node_of_rot = np.repeat(np.arange(m.n_nodes), np.diff(m.rot_off))
    rkeep = mapped & keep_node[node_of_rot]
    new_rot = dart_map[m.rot_darts[rkeep]]
    new_off = np.zeros(int(keep_node.sum()) + 1, dtype=np.int32)
    np.add.at(new_off, new_node_id[node_of_rot[rkeep]] + 1, 1)
    np.cumsum(new_off, out=new_off)

    new_kind = kind[keep_node]

    # face bookkeeping for anchors and the outer dart
    fd = m.faces()
    deleted_arcs = np.flatnonzero(~keep_edge[_edge_positions(
        g.edge_ids, m.arc_edge)]) if m.n_arcs else np.empty(0, np.int64)
    cls = _merged_face_classes(fd, deleted_arcs)
    rep = _class_representatives(fd, cls, dart_map)

    def surviving(face):
        c = cls[face]
        return rep.get(int(c))

    anchors = {}
    for node, a in m.anchors.items():
        if not keep_node[node]:
            continue
        nn = int(new_node_id[node])
        if a is None:
            anchors[nn] = None
        else:
            anchors[nn] = surviving(int(fd.face_of[a]))
    # vertices that just lost their last edge
    old_deg_pos = np.diff(m.rot_off)[:n] > 0
    new_deg = np.diff(new_off)
    for vtx in range(n):
        if old_deg_pos[vtx] and new_deg[int(new_node_id[vtx])] == 0:
            a = int(m.rot_darts[m.rot_off[vtx]])
            anchors[int(new_node_id[vtx])] = surviving(int(fd.face_of[a]))

    outer = None
    if m.outer_dart is not None:
        outer = surviving(int(fd.face_of[m.outer_dart]))

    new_graph = Multigraph(g.vertex_ids.tolist(),
                           [(int(e), int(u), int(v)) for e, u, v, k in
                            zip(g.edge_ids, g.edge_u, g.edge_v, keep_edge) if k])
    new_map = PlanarMap(new_kind, new_rot, new_off, new_arc_edge,
                        new_arc_seg, outer_dart=outer, anchors=anchors)
    return Drawing(new_graph, new_map)


def _merged_face_classes(fd, deleted_arcs):
    """Union faces across every deleted arc; returns class label per face."""
    if fd.nfaces == 0:
        return np.empty(0, dtype=np.int64)
    if len(deleted_arcs) == 0:
        return np.arange(fd.nfaces, dtype=np.int64)
    fa = fd.face_of[2 * deleted_arcs]
    fb = fd.face_of[2 * deleted_arcs + 1]
    gmat = csr_matrix((np.ones(len(fa), dtype=np.int8), (fa, fb)),
                      shape=(fd.nfaces, fd.nfaces))
    _, lab = connected_components(gmat, directed=False)
    return lab.astype(np.int64)


def _class_representatives(fd, cls, dart_map):
    """Smallest surviving new dart per merged face class."""
    rep = {}
    surv = np.flatnonzero(dart_map >= 0)
    if len(surv):
        classes = cls[fd.face_of[surv]]
        new_darts = dart_map[surv]
        order = np.lexsort((new_darts, classes))
        classes, new_darts = classes[order], new_darts[order]
        firsts = np.ones(len(classes), dtype=bool)
        firsts[1:] = classes[1:] != classes[:-1]
        for c, nd in zip(classes[firsts].tolist(), new_darts[firsts].tolist()):
            rep[int(c)] = int(nd)
    return rep


def _extract_nodes(d, node_mask, vertex_ids_keep):
    """Sub-drawing on a node subset that is closed under arcs and paths."""
    g, m = d.graph, d.pmap
    keep_vertices = set(int(v) for v in vertex_ids_keep)
    edge_keep = np.array([int(u) in keep_vertices and int(v) in keep_vertices
                          for u, v in zip(g.edge_u, g.edge_v)], dtype=bool)
    # order: vertices kept (already first), crossings renumbered after
    new_ids = np.cumsum(node_mask) - 1
    arc_tail = m.dart_node[0::2]
    arc_keep = node_mask[arc_tail]
    arc_new = np.cumsum(arc_keep) - 1
    dmap = np.full(m.n_darts, -1, dtype=np.int64)
    ka = np.flatnonzero(arc_keep)
    dmap[2 * ka] = 2 * arc_new[ka]
    dmap[2 * ka + 1] = 2 * arc_new[ka] + 1
    node_of_rot = np.repeat(np.arange(m.n_nodes), np.diff(m.rot_off))
    rkeep = node_mask[node_of_rot]
    new_rot = dmap[m.rot_darts[rkeep]]
    new_off = np.zeros(int(node_mask.sum()) + 1, dtype=np.int32)
    np.add.at(new_off, new_ids[node_of_rot[rkeep]] + 1, 1)
    np.cumsum(new_off, out=new_off)
    anchors = {int(new_ids[nd]): (None if a is None else
                                  (int(dmap[a]) if dmap[a] >= 0 else None))
               for nd, a in m.anchors.items() if node_mask[nd]}
    outer = None
    if m.outer_dart is not None and dmap[m.outer_dart] >= 0:
        outer = int(dmap[m.outer_dart])
    new_graph = Multigraph(sorted(keep_vertices),
                           [(int(e), int(u), int(v)) for e, u, v, k in
                            zip(g.edge_ids, g.edge_u, g.edge_v, edge_keep) if k])
    new_map = PlanarMap(m.node_kind[node_mask], new_rot, new_off,
                        m.arc_edge[arc_keep], m.arc_seg[arc_keep],
                        outer_dart=outer, anchors=anchors)
    return Drawing(new_graph, new_map)


def split_components(d):
    """Connected components as standalone drawings, smallest vertex first.

    Isolated vertices become singleton drawings; anchors do not survive
    extraction (a lone vertex has no faces of its own).
    """
    m = d.pmap
    ncomp, comp = m.components()
    out = []
    order = []
    for c in range(ncomp):
        nodes = np.flatnonzero(comp == c)
        vtx = nodes[nodes < d.n]
        if len(vtx) == 0:
            continue  # component of crossings only: impossible in valid drawings
        order.append((int(d.graph.vertex_ids[vtx[0]]), c))
    for _, c in sorted(order):
        mask = comp == c
        vids = [d.node_vertex(i) for i in np.flatnonzero(mask[:d.n])]
        out.append(_extract_nodes(d, mask, vids))
    return out


def induced_subdrawing(d, vertex_ids):
    """Drawing induced on a vertex subset, keeping their placement."""
    keep = set(int(v) for v in vertex_ids)
    cut = [int(e) for e, u, v in zip(d.graph.edge_ids, d.graph.edge_u,
                                     d.graph.edge_v)
           if int(u) not in keep or int(v) not in keep]
    d2 = delete_edges(d, cut)
    mask = np.ones(d2.pmap.n_nodes, dtype=bool)
    for i in range(d2.n):
        if int(d2.graph.vertex_ids[i]) not in keep:
            mask[i] = False
    return _extract_nodes(d2, mask, sorted(keep))


def subdivide_loops(d):
    """Replace every loop by two parallel edges through a fresh vertex.

    Crossings are unchanged.  New vertex and edge ids are allocated past
    the current maxima, in ascending loop id order.
    """
    g = d.graph
    loops = sorted(int(e) for e in g.loop_ids())
    if not loops:
        return d
    m = d.pmap
    next_vid = int(g.vertex_ids.max()) + 1
    next_eid = int(g.edge_ids.max()) + 1

    vertices = g.vertex_ids.tolist()
    edges = [(int(e), int(u), int(v)) for e, u, v in
             zip(g.edge_ids, g.edge_u, g.edge_v) if int(e) not in loops]
    arc_edge = m.arc_edge.copy()
    arc_seg = m.arc_seg.astype(np.int64).copy()
    rot = [m.rotation_at(v).tolist() for v in range(m.n_nodes)]
    kinds = m.node_kind.tolist()
    extra_arcs = []
    n_darts = m.n_darts

    for le in loops:
        v = int(g.edge_u[d.edge_pos(le)])
        arcs = d.edge_arcs(le)
        w = next_vid
        e1, e2 = next_eid, next_eid + 1
        next_vid += 1
        next_eid += 2
        first = int(arcs[0])
        # first arc v->x becomes: new arc (e1, 0) v->w, old first arc w->x
        new_arc = len(arc_edge) + len(extra_arcs)
        extra_arcs.append((e1, 0))
        t_new, h_new = 2 * new_arc, 2 * new_arc + 1
        # w's rotation: outgoing continuation then incoming from v
        kinds.append(NODE_REAL)
        rot.append([2 * first, h_new])
        # v's rotation: old tail dart replaced by the new arc's tail dart
        rv = rot[m.dart_node[2 * first]]
        rv[rv.index(2 * first)] = t_new
        arc_edge[arcs] = e2
        arc_seg[arcs] = np.arange(len(arcs))
        vertices.append(w)
        edges.append((e1, v, w))
        edges.append((e2, w, v))
        n_darts += 2

    all_arc_edge = np.concatenate([arc_edge,
                                   np.array([e for e, s in extra_arcs], dtype=np.int64)])
    all_arc_seg = np.concatenate([arc_seg,
                                  np.array([s for e, s in extra_arcs], dtype=np.int64)])
    # rebuild rotation CSR with real vertices first
    n_old = g.n
    vid_sorted = sorted(vertices)
    # old real nodes keep position iff vertex order unchanged; new vertices have
    # larger ids, so sorted order is old vertices then new ones
    rot_all = rot[:n_old] + rot[m.n_nodes:] + rot[n_old:m.n_nodes]
    kind_all = kinds[:n_old] + kinds[m.n_nodes:] + kinds[n_old:m.n_nodes]
    flat = [x for row in rot_all for x in row]
    off = np.zeros(len(rot_all) + 1, dtype=np.int64)
    off[1:] = np.cumsum([len(r) for r in rot_all])
    new_graph = Multigraph(vid_sorted, edges)
    anchors = dict(m.anchors)
    new_map = PlanarMap(kind_all, flat, off, all_arc_edge, all_arc_seg,
                        outer_dart=m.outer_dart, anchors=anchors)
    return Drawing(new_graph, new_map)


def add_apex(d):
    """Add one isolated vertex in the outer/ambient region.

    Guarantees every lens has at least one vertex on its ambient side.
    """
    g, m = d.graph, d.pmap
    new_vid = int(g.vertex_ids.max()) + 1 if g.n else 0
    anchor = m.outer_dart  # None means the shared ambient region
    n = g.n
    kind = np.concatenate([m.node_kind[:n], [NODE_REAL], m.node_kind[n:]])
    rot = m.rot_darts
    off = np.concatenate([m.rot_off[:n + 1],
                          m.rot_off[n:n + 1],
                          m.rot_off[n + 1:]])
    anchors = {}
    for nd, a in m.anchors.items():
        anchors[nd if nd < n else nd + 1] = a
    anchors[n] = anchor
    new_graph = Multigraph(g.vertex_ids.tolist() + [new_vid], [
        (int(e), int(u), int(v)) for e, u, v in zip(g.edge_ids, g.edge_u, g.edge_v)])
    new_map = PlanarMap(kind, rot, off, m.arc_edge, m.arc_seg,
                        outer_dart=m.outer_dart, anchors=anchors)
    return Drawing(new_graph, new_map)


# ----------------------------------------------------------------------
# canonical fingerprint (isomorphism up to crossing/dart relabelling)


def _dart_desc(d, dart):
    a = dart >> 1
    return (int(d.pmap.arc_edge[a]), int(d.pmap.arc_seg[a]), int(dart & 1))


def _min_rotation(t):
    best = t
    for i in range(1, len(t)):
        cand = t[i:] + t[:i]
        if cand < best:
            best = cand
    return best


def _face_canonical(d, dart):
    fd = d.pmap.faces()
    f = fd.face_of[dart]
    descs = [_dart_desc(d, int(x)) for x in fd.darts[fd.off[f]:fd.off[f + 1]]]
    return min(descs)


def fingerprint(d):
    """Canonical form; equal fingerprints mean isomorphic drawings.

    Vertex and edge ids are preserved, crossing nodes and dart numbers are
    anonymized through (edge, segment, direction) descriptors.
    """
    g, m = d.graph, d.pmap
    vert = []
    for i, vid in enumerate(g.vertex_ids.tolist()):
        descs = tuple(_dart_desc(d, int(x)) for x in m.rotation_at(i))
        vert.append((vid, _min_rotation(descs) if descs else ()))
    crossings = []
    for nd in range(g.n, m.n_nodes):
        descs = tuple(_dart_desc(d, int(x)) for x in m.rotation_at(nd))
        crossings.append(_min_rotation(descs))
    crossings.sort()
    outer = None if m.outer_dart is None else _face_canonical(d, m.outer_dart)
    anchors = []
    for nd in sorted(m.anchors):
        a = m.anchors[nd]
        anchors.append((d.node_vertex(nd),
                        None if a is None else _face_canonical(d, int(a))))
    edges = tuple((int(e), int(u), int(v)) for e, u, v in
                  zip(g.edge_ids, g.edge_u, g.edge_v))
    return (tuple(g.vertex_ids.tolist()), edges, tuple(vert),
            tuple(crossings), outer, tuple(anchors))
