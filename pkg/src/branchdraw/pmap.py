"""Sphere maps encoded as rotation systems over darts.

An arc ``a`` owns two darts, ``2*a`` at its tail and ``2*a + 1`` at its
head, so dart reversal is ``d ^ 1``.  ``sigma`` maps every dart to the
next dart counterclockwise around its node, and faces are the orbits of
``d -> sigma[d ^ 1]``; with counterclockwise rotations each face lies to
the left of its darts.  Arcs carry an ``(edge id, segment index)`` label,
with ``-1`` marking virtual scaffolding arcs that belong to no edge.

Maps are immutable after construction.  Every structural edit elsewhere
in the package builds a fresh map and re-validates it.
"""

from __future__ import annotations

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

NODE_REAL = 0
NODE_CROSS = 1


class MapError(ValueError):
    """A rotation system violates a structural invariant."""


def _i32(a):
    return np.ascontiguousarray(a, dtype=np.int32)


def _cyclic_next(off):
    """Successor index table for concatenated cyclic lists (CSR layout)."""
    total = int(off[-1])
    nxt = np.arange(1, total + 1, dtype=np.int32)
    sizes = np.diff(off)
    rows = np.flatnonzero(sizes > 0)
    nxt[off[rows + 1] - 1] = off[rows]
    return nxt


def orbit_labels(perm):
    """Label each index by the minimum of its orbit under ``perm``.

    Pointer doubling; converges in O(log max-orbit) passes.
    """
    lab = np.arange(len(perm), dtype=np.int32)
    p = perm if perm.dtype == np.int32 else perm.astype(np.int32)
    while True:
        lab2 = np.minimum(lab, lab[p])
        if np.array_equal(lab2, lab):
            return lab
        lab = lab2
        p = p[p]


def orbit_ranks(perm, lab):
    """Steps from each orbit's representative (its min index) along ``perm``."""
    n = len(perm)
    inv = np.empty(n, dtype=np.int32)
    inv[perm] = np.arange(n, dtype=np.int32)
    rep = lab == np.arange(n, dtype=np.int32)
    p = inv.copy()
    idx = np.flatnonzero(rep)
    p[idx] = idx
    r = np.ones(n, dtype=np.int64)
    r[idx] = 0
    while True:
        r2 = r + r[p]
        p2 = p[p]
        if np.array_equal(p2, p):
            # one last fold picks up pending single steps
            r = r + r[p]
            break
        r, p = r2, p2
    return r


class FaceData:
    """Face orbits of a map.

    Labels are eager; the orbit-ordered dart CSR is built on first use
    (it needs a second pointer-doubling pass for in-orbit ranks).
    """

    __slots__ = ("face_of", "nfaces", "face_comp", "sizes", "_phi",
                 "_darts", "_off")

    def __init__(self, face_of, nfaces, face_comp, sizes, phi):
        self.face_of = face_of
        self.nfaces = nfaces
        self.face_comp = face_comp
        self.sizes = sizes
        self._phi = phi
        self._darts = None
        self._off = None

    def _order(self):
        if self._darts is None:
            lab = self.face_of
            rank = orbit_ranks(self._phi, _orbit_min_dart(self._phi, lab))
            order = np.lexsort((rank, lab))
            self._darts = np.ascontiguousarray(order, dtype=np.int32)
            off = np.zeros(self.nfaces + 1, dtype=np.int64)
            np.cumsum(self.sizes, out=off[1:])
            self._off = off
        return self._darts, self._off

    @property
    def darts(self):
        return self._order()[0]

    @property
    def off(self):
        return self._order()[1]


def _orbit_min_dart(perm, compact_labels):
    """Recover per-dart orbit-minimum labels from compacted face labels."""
    n = len(perm)
    first = np.full(int(compact_labels.max()) + 1 if n else 0, n, dtype=np.int64)
    np.minimum.at(first, compact_labels, np.arange(n, dtype=np.int64))
    return first[compact_labels].astype(np.int32)


class DualTree:
    """Rooted spanning forest of the face-adjacency graph, one tree per component.

    Tree arcs are primal arcs; ``child_face[a]`` is the face on the far
    side of tree arc ``a`` from the root, and ``tin``/``tout`` give the
    preorder interval of every face's subtree.  Supports curve-side
    parity queries (Jordan test) in bulk.
    """

    __slots__ = ("parent_arc", "parent_face", "is_tree_arc", "child_face",
                 "tin", "tout", "root_face")

    def __init__(self, parent_arc, parent_face, is_tree_arc, child_face,
                 tin, tout, root_face):
        self.parent_arc = parent_arc
        self.parent_face = parent_face
        self.is_tree_arc = is_tree_arc
        self.child_face = child_face
        self.tin = tin
        self.tout = tout
        self.root_face = root_face

    def face_parity(self, curve_arcs, faces):
        """Side parity of ``faces`` relative to the closed curve ``curve_arcs``.

        Parity 0 is the side of the component's root face.  All of
        ``curve_arcs`` must lie in one component and form a closed curve.
        """
        ca = np.asarray(curve_arcs, dtype=np.int32)
        ca = ca[self.is_tree_arc[ca]]
        if len(ca) == 0:
            return np.zeros(len(faces), dtype=np.int8)
        lo = self.tin[self.child_face[ca]]
        hi = self.tout[self.child_face[ca]]
        t = self.tin[np.asarray(faces, dtype=np.int32)]
        hits = (t[:, None] >= lo[None, :]) & (t[:, None] < hi[None, :])
        return (hits.sum(axis=1) & 1).astype(np.int8)


def map_from_sigma(node_kind, sigma, dart_node, arc_edge, arc_seg,
                   outer_dart=None, anchors=None, check=True):
    """Build a map from a successor permutation instead of rotation lists.

    Every node's darts must form a single ``sigma`` cycle; the rotation
    list starts at the cycle's smallest dart.
    """
    sigma = _i32(sigma)
    dart_node = _i32(dart_node)
    if len(sigma):
        lab = orbit_labels(sigma)
        if not np.array_equal(dart_node[lab], dart_node):
            raise MapError("sigma orbit spans several nodes")
        if len(np.unique(lab)) != len(np.unique(dart_node)):
            raise MapError("node darts split into several rotation cycles")
        rank = orbit_ranks(sigma, lab)
        order = np.lexsort((rank, dart_node))
        starts = np.zeros(len(node_kind) + 1, dtype=np.int32)
        np.add.at(starts, dart_node.astype(np.int64) + 1, 1)
        np.cumsum(starts, out=starts)
        rot_darts = np.ascontiguousarray(order, dtype=np.int32)
        rot_off = starts
    else:
        rot_darts = np.empty(0, np.int32)
        rot_off = np.zeros(len(node_kind) + 1, dtype=np.int32)
    return PlanarMap(node_kind, rot_darts, rot_off, arc_edge, arc_seg,
                     outer_dart=outer_dart, anchors=anchors, check=check)


class PlanarMap:
    """Immutable rotation-system map on the sphere.

    Parameters
    ----------
    node_kind : array of NODE_REAL / NODE_CROSS per node
    rot_darts, rot_off : CSR of counterclockwise dart lists per node
    arc_edge, arc_seg : labels per arc (-1, -1 for virtual arcs)
    outer_dart : optional dart whose left face is the designated outer face
    anchors : placement of degree-0 nodes, ``{node: dart or None}``;
        a node anchored at dart ``d`` lies in the face left of ``d``,
        ``None`` means the shared ambient region.
    """

    __slots__ = ("node_kind", "rot_darts", "rot_off", "arc_edge", "arc_seg",
                 "outer_dart", "anchors", "dart_node", "sigma",
                 "_faces", "_comp", "_dual")

    def __init__(self, node_kind, rot_darts, rot_off, arc_edge, arc_seg,
                 outer_dart=None, anchors=None, check=True):
        self.node_kind = np.ascontiguousarray(node_kind, dtype=np.int8)
        self.rot_darts = _i32(rot_darts)
        self.rot_off = _i32(rot_off)
        self.arc_edge = np.ascontiguousarray(arc_edge, dtype=np.int64)
        self.arc_seg = _i32(arc_seg)
        self.outer_dart = None if outer_dart is None else int(outer_dart)
        self.anchors = {} if anchors is None else dict(anchors)
        self._faces = None
        self._comp = None
        self._dual = None

        n_darts = 2 * len(self.arc_edge)
        if len(self.rot_darts) != n_darts:
            raise MapError("rotation lists do not cover all darts exactly once")
        if len(self.rot_off) != self.n_nodes + 1 or (len(self.rot_off) and self.rot_off[0] != 0):
            raise MapError("bad rotation offsets")

        self.dart_node = np.empty(n_darts, dtype=np.int32)
        self.dart_node[self.rot_darts] = np.repeat(
            np.arange(self.n_nodes, dtype=np.int32), np.diff(self.rot_off))
        self.sigma = np.empty(n_darts, dtype=np.int32)
        self.sigma[self.rot_darts] = self.rot_darts[_cyclic_next(self.rot_off)]

        if check:
            self._validate_core()

    # ------------------------------------------------------------------
    # basic accessors

    @property
    def n_nodes(self):
        return len(self.node_kind)

    @property
    def n_arcs(self):
        return len(self.arc_edge)

    @property
    def n_darts(self):
        return 2 * len(self.arc_edge)

    @property
    def n_crossings(self):
        return int(np.count_nonzero(self.node_kind == NODE_CROSS))

    def degrees(self):
        return np.diff(self.rot_off)

    def rotation_at(self, node):
        return self.rot_darts[self.rot_off[node]:self.rot_off[node + 1]]

    def arc_ends(self):
        """(tail node, head node) arrays per arc."""
        return (self.dart_node[0::2], self.dart_node[1::2])

    # ------------------------------------------------------------------
    # derived structure

    def faces(self):
        if self._faces is None:
            if self.n_darts == 0:
                self._faces = FaceData(np.empty(0, np.int32), 0,
                                       np.empty(0, np.int32),
                                       np.empty(0, np.int32),
                                       np.empty(0, np.int32))
                return self._faces
            phi = self.sigma[np.arange(self.n_darts, dtype=np.int32) ^ 1]
            lab = orbit_labels(phi)
            reps = np.flatnonzero(lab == np.arange(self.n_darts, dtype=np.int32))
            pos = np.empty(self.n_darts, dtype=np.int32)
            pos[reps] = np.arange(len(reps), dtype=np.int32)
            face_of = pos[lab]
            sizes = np.bincount(face_of, minlength=len(reps)).astype(np.int32)
            comp = self.components()[1]
            face_comp = comp[self.dart_node[reps]]
            self._faces = FaceData(face_of, len(reps), face_comp, sizes, phi)
        return self._faces

    def components(self):
        """(count, label per node); isolated nodes are their own components."""
        if self._comp is None:
            tails, heads = self.arc_ends()
            data = np.ones(len(tails), dtype=np.int8)
            g = csr_matrix((data, (tails, heads)),
                           shape=(self.n_nodes, self.n_nodes))
            ncomp, lab = connected_components(g, directed=False)
            self._comp = (int(ncomp), lab.astype(np.int32))
        return self._comp

    def ambient_face(self, comp_label):
        """The face of a component treated as facing the shared outer region."""
        fd = self.faces()
        ncomp, comp = self.components()
        if self.outer_dart is not None:
            d = self.outer_dart
            if comp[self.dart_node[d]] == comp_label:
                return int(fd.face_of[d])
        has = comp[self.dart_node] == comp_label
        darts = np.flatnonzero(has)
        if len(darts) == 0:
            return -1  # isolated node component: no faces of its own
        return int(fd.face_of[darts.min()])

    def dual_tree(self):
        """Rooted BFS forest over faces, with preorder intervals."""
        if self._dual is not None:
            return self._dual
        fd = self.faces()
        F = fd.nfaces
        tails = self.dart_node[0::2]
        f_tail = fd.face_of[0::2] if self.n_arcs else np.empty(0, np.int32)
        f_head = fd.face_of[1::2] if self.n_arcs else np.empty(0, np.int32)

        # adjacency CSR over faces: each arc contributes both directions
        src = np.concatenate([f_tail, f_head])
        dst = np.concatenate([f_head, f_tail])
        aid = np.tile(np.arange(self.n_arcs, dtype=np.int32), 2)
        order = np.lexsort((aid, src))
        src, dst, aid = src[order], dst[order], aid[order]
        adj_off = np.zeros(F + 1, dtype=np.int64)
        np.add.at(adj_off, src + 1, 1)
        np.cumsum(adj_off, out=adj_off)

        parent_arc = np.full(F, -1, dtype=np.int32)
        parent_face = np.full(F, -1, dtype=np.int32)
        visited = np.zeros(F, dtype=bool)
        ncomp, comp = self.components()
        # root of each face component: the component's min face id
        roots = []
        seen_comp = {}
        for f in range(F):
            c = int(fd.face_comp[f])
            if c not in seen_comp:
                seen_comp[c] = f
                roots.append(f)
        root_face = np.full(ncomp, -1, dtype=np.int32)
        for c, f in seen_comp.items():
            root_face[c] = f
        levels = []
        frontier = np.array(roots, dtype=np.int32)
        visited[frontier] = True
        while len(frontier):
            levels.append(frontier)
            counts = (adj_off[frontier + 1] - adj_off[frontier]).astype(np.int64)
            base = np.repeat(adj_off[frontier], counts)
            step = np.arange(counts.sum(), dtype=np.int64) - np.repeat(
                np.cumsum(counts) - counts, counts)
            rows = base + step
            tgt = dst[rows]
            arcs = aid[rows]
            fresh = ~visited[tgt]
            tgt, arcs = tgt[fresh], arcs[fresh]
            srcs = src[rows][fresh]
            if len(tgt) == 0:
                break
            # deterministic parent: smallest arc id per target face
            o = np.lexsort((arcs, tgt))
            tgt, arcs, srcs = tgt[o], arcs[o], srcs[o]
            first = np.ones(len(tgt), dtype=bool)
            first[1:] = tgt[1:] != tgt[:-1]
            tgt, arcs, srcs = tgt[first], arcs[first], srcs[first]
            parent_arc[tgt] = arcs
            parent_face[tgt] = srcs
            visited[tgt] = True
            frontier = tgt

        is_tree_arc = np.zeros(self.n_arcs, dtype=bool)
        child_face = np.full(self.n_arcs, -1, dtype=np.int32)
        used = parent_arc[parent_arc >= 0]
        is_tree_arc[used] = True
        child_face[parent_arc[parent_arc >= 0]] = np.flatnonzero(parent_arc >= 0)

        # subtree sizes: accumulate levels bottom-up
        size = np.ones(F, dtype=np.int64)
        for lev in reversed(levels[1:]):
            np.add.at(size, parent_face[lev], size[lev])
        # preorder intervals level by level: children get consecutive blocks;
        # roots are offset so intervals are globally disjoint across components
        tin = np.zeros(F, dtype=np.int64)
        if len(levels):
            r = levels[0]
            tin[r] = np.cumsum(size[r]) - size[r]
        for lev in levels[1:]:
            o = np.lexsort((lev, parent_face[lev]))
            lv = lev[o]
            par = parent_face[lv]
            csz = size[lv]
            prefix = np.cumsum(csz) - csz
            grp = np.ones(len(lv), dtype=bool)
            grp[1:] = par[1:] != par[:-1]
            starts = np.repeat(prefix[grp], np.diff(
                np.append(np.flatnonzero(grp), len(lv))))
            tin[lv] = tin[par] + 1 + (prefix - starts)
        tout = tin + size
        self._dual = DualTree(parent_arc, parent_face, is_tree_arc,
                              child_face, tin, tout, root_face)
        return self._dual

    # ------------------------------------------------------------------
    # validation

    def _validate_core(self):
        D = self.n_darts
        if D and (len(self.rot_darts) != D or
                  not np.all(np.bincount(self.rot_darts, minlength=D) == 1)):
            raise MapError("rotation lists are not a permutation of the darts")
        if self.outer_dart is not None and not (0 <= self.outer_dart < D):
            raise MapError("outer dart out of range")
        deg = self.degrees()
        for node, d in self.anchors.items():
            if not (0 <= node < self.n_nodes) or deg[node] != 0:
                raise MapError("anchor on a node that is not isolated")
            if d is not None and not (0 <= d < D):
                raise MapError("anchor dart out of range")

        cross = np.flatnonzero(self.node_kind == NODE_CROSS)
        if len(cross):
            if not np.all(deg[cross] == 4):
                bad = cross[deg[cross] != 4][0]
                raise MapError(f"crossing degree: node {bad} has degree "
                               f"{deg[bad]}, expected 4")
            rows = self.rot_off[cross]
            quad = self.rot_darts[rows[:, None] + np.arange(4)]
            eq = self.arc_edge[quad >> 1]
            if not (np.all(eq[:, 0] == eq[:, 2]) and np.all(eq[:, 1] == eq[:, 3])
                    and np.all(eq[:, 0] != eq[:, 1])):
                raise MapError("crossing rotation does not alternate between "
                               "its two passing edges")
            sg = self.arc_seg[quad >> 1]
            tail = (quad & 1) == 0
            # per crossing and per passing edge: one incoming head dart with
            # segment i and one outgoing tail dart with segment i + 1
            for k in (0, 1):
                s_a, s_b = sg[:, k], sg[:, k + 2]
                t_a, t_b = tail[:, k], tail[:, k + 2]
                s_in = np.where(t_a, s_b, s_a)
                s_out = np.where(t_a, s_a, s_b)
                if not (np.all(t_a != t_b) and np.all(s_out == s_in + 1)):
                    raise MapError("crossing is not interior to consecutive "
                                   "segments of a passing edge")

        self._check_euler()

    def _check_euler(self):
        ncomp, comp = self.components()
        fd = self.faces()
        V = np.bincount(comp, minlength=ncomp)
        tails = self.dart_node[0::2]
        E = np.bincount(comp[tails], minlength=ncomp) if self.n_arcs else np.zeros(ncomp, dtype=np.int64)
        F = np.bincount(fd.face_comp, minlength=ncomp) if fd.nfaces else np.zeros(ncomp, dtype=np.int64)
        iso = (V == 1) & (E == 0)
        ok = iso | (V - E + F == 2)
        if not np.all(ok):
            c = int(np.flatnonzero(~ok)[0])
            raise MapError(
                f"Euler formula violated in component {c}: "
                f"V={int(V[c])} E={int(E[c])} F={int(F[c])} (non-planar rotation data)")
