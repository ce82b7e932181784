"""Embedded trees and chandeliers grown by turn rules.

The tree is a subgraph of the patch whose root has tree-degree 2 and every
other vertex tree-degree 3 or 4. Vertices carry labels: words over
{0, h, 1} ('h' = the half symbol; legal only right after a 1). Each vertex
sits on a ray (a turn-rule walk): rays of 0-children advance keeping `shift`
faces on the walker's right, rays of 1- and h-children keep `shift` faces on
the left; shift = 3 under the degree>=7 condition, 2 under the
degree>=5 / face-degree>=4 condition.

Children of a vertex v_b (entered from its tree parent, rotation slot si,
exit slot so per the ray rule):

  type 0: continuation b0 at slot so, fresh 1-child at slot so+1
  type h: continuation b1 at slot so, fresh 0-child at slot so-1
  type 1: continuation b1 at slot so, fresh h-child at so-1, 0-child at so-2

A chandelier at v is a spine v, v1, v2 with exactly `shift` faces on the
chosen side at v1, carrying one of these trees at v2 positioned so that at
least 3 corners remain outside the tree's wedge on both sides of the spine;
the anti-chandelier is the mirror-image construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (InvariantViolation, PatchTooSmallError, StructuralError)
from .planar import RotationGraph

__all__ = [
    "TreeEmbedding", "Chandelier", "ChandelierSequence",
    "grow_tree", "tree_pc", "TreeCriticalProbability",
    "build_chandelier", "chandelier_sequence", "type_transition_matrix",
]

_SYM_ORDER = {"0": 0, "h": 1, "1": 2}
_CONTINUATION = {"0": "0", "h": "1", "1": "1"}


def _label_key(label: str):
    return [_SYM_ORDER[c] for c in label]


@dataclass
class TreeEmbedding:
    """A grown tree prefix: label-indexed vertices, tree edges, and the rays
    (walks) the construction followed."""
    root: int
    condition: int
    label_map: dict = field(default_factory=dict)    # label -> vertex
    parent: dict = field(default_factory=dict)       # label -> parent label
    rays: dict = field(default_factory=dict)         # ray label -> vertex walk
    tree_edges: set = field(default_factory=set)
    truncated: bool = False

    def vertices(self) -> set:
        return {self.root} | set(self.label_map.values())

    def vertex_of(self, label: str) -> int:
        return self.root if label == "" else self.label_map[label]

    def path(self, ray_label: str) -> list:
        """The walk of the ray that starts at label `ray_label`."""
        return self.rays[ray_label]

    def depth(self) -> int:
        return max((len(b) for b in self.label_map), default=0)

    def levels(self) -> list:
        out = [[""]]
        for k in range(1, self.depth() + 1):
            out.append(sorted((b for b in self.label_map if len(b) == k),
                              key=_label_key))
        return out

    def level_census(self, k: int):
        """(count of 0-, h-, 1-labels) at level k."""
        n0 = nh = n1 = 0
        for b in self.label_map:
            if len(b) == k:
                if b[-1] == "0":
                    n0 += 1
                elif b[-1] == "h":
                    nh += 1
                else:
                    n1 += 1
        return n0, nh, n1

    def tree_degree(self, v: int) -> int:
        d = 0
        for (a, b) in self.tree_edges:
            if a == v or b == v:
                d += 1
        return d

    def validate(self):
        verts = self.vertices()
        if len(self.label_map) + 1 != len(verts):
            raise InvariantViolation("tree vertices are not distinct")
        for b, v in self.label_map.items():
            for j, c in enumerate(b):
                if c == "h" and (j == 0 or b[j - 1] != "1"):
                    raise InvariantViolation(f"illegal label {b}")
            pv = self.vertex_of(self.parent[b])
            e = (pv, v) if pv < v else (v, pv)
            if e not in self.tree_edges:
                raise InvariantViolation(f"missing tree edge for {b}")
        if len(self.tree_edges) != len(self.label_map):
            raise InvariantViolation("tree edge count mismatch")


def _apply_rule(g: RotationGraph, v: int, in_neighbor: int, shift: int):
    deg = g.degree(v)
    si = g.slot_of(v, in_neighbor)
    so = (si + shift) % deg
    return so, deg


def grow_tree(g: RotationGraph, root: int, condition: int, depth_cap: int,
              start_slot: int = 0) -> TreeEmbedding:
    """Grow the embedded tree at `root` down to label length depth_cap + 1.

    start_slot picks the corner of the root whose face the two root rays
    share (slots start_slot and start_slot+1 of the root's rotation). Rays
    stop at boundary-flagged vertices; the affected subtree is simply absent
    and the embedding is marked truncated.
    """
    if condition not in (1, 2):
        raise StructuralError("condition must be 1 or 2")
    shift = 3 if condition == 1 else 2
    min_deg = 7 if condition == 1 else 5
    if depth_cap < 0:
        raise StructuralError("depth_cap must be >= 0")
    if g.boundary[root]:
        raise PatchTooSmallError(f"root {root} is on the truncation boundary")
    if g.degree(root) < min_deg:
        raise StructuralError(
            f"vertex {root} violates the degree condition "
            f"({g.degree(root)} < {min_deg})")

    t = TreeEmbedding(root=root, condition=condition)
    rot = g.rotation(root)
    deg = rot.shape[0]
    v0 = int(rot[start_slot % deg])
    v1 = int(rot[(start_slot + 1) % deg])
    claimed = {root: "", v0: "0", v1: "1"}
    if len(claimed) != 3:
        raise InvariantViolation("root rays collide immediately")

    # per tree vertex: (graph vertex, in-neighbor on its ray, ray label)
    info = {"0": (v0, root, "0"), "1": (v1, root, "1")}
    for lab in ("0", "1"):
        v = info[lab][0]
        t.label_map[lab] = v
        t.parent[lab] = ""
        t.rays[lab] = [root, v]
        t.tree_edges.add((root, v) if root < v else (v, root))

    frontier = ["0", "1"]
    for _level in range(depth_cap):
        nxt = []
        for b in sorted(frontier, key=_label_key):
            v, in_nb, ray = info[b]
            if g.boundary[v]:
                t.truncated = True
                continue
            if g.degree(v) < min_deg:
                raise StructuralError(
                    f"vertex {v} violates the degree condition "
                    f"({g.degree(v)} < {min_deg})")
            typ = b[-1]
            sgn = shift if typ == "0" else -shift
            so, degv = _apply_rule(g, v, in_nb, sgn)
            rv = g.rotation(v)
            children = [(_CONTINUATION[typ], int(rv[so]), ray)]
            if typ == "0":
                children.append(("1", int(rv[(so + 1) % degv]), None))
            elif typ == "h":
                children.append(("0", int(rv[(so - 1) % degv]), None))
            else:
                children.append(("h", int(rv[(so - 1) % degv]), None))
                children.append(("0", int(rv[(so - 2) % degv]), None))
            for sym, w, cont_ray in children:
                lab = b + sym
                if w in claimed:
                    raise InvariantViolation(
                        f"tree growth revisited vertex {w} (label {lab}); "
                        "ray disjointness failed")
                claimed[w] = lab
                rid = cont_ray if cont_ray is not None else lab
                info[lab] = (w, v, rid)
                t.label_map[lab] = w
                t.parent[lab] = b
                t.tree_edges.add((v, w) if v < w else (w, v))
                if cont_ray is not None:
                    t.rays[cont_ray].append(w)
                else:
                    t.rays[rid] = [v, w]
                nxt.append(lab)
        frontier = nxt
    return t


# ---------------------------------------------------------------------------
# critical probability of the tree
# ---------------------------------------------------------------------------

def type_transition_matrix() -> np.ndarray:
    """Counts of children types per parent type, order (0, h, 1), derived
    from the construction's child rule."""
    order = "0h1"
    mat = np.zeros((3, 3), dtype=np.int64)
    children = {"0": "01", "h": "10", "1": "1h0"}
    for i, typ in enumerate(order):
        for c in children[typ]:
            mat[i, order.index(c)] += 1
    return mat


@dataclass(frozen=True)
class TreeCriticalProbability:
    p_c: float
    growth_rate: float           # Perron root of the type matrix
    closed_form_bound: float     # 2^(-2/3) * 3^(-1/3)


def tree_pc() -> TreeCriticalProbability:
    """Critical probability of the embedded tree: reciprocal of the Perron
    root of the type-transition matrix, together with the closed-form upper
    bound 2^(-2/3) 3^(-1/3) (both below 1/2)."""
    mat = type_transition_matrix().astype(np.float64)
    eig = np.linalg.eigvals(mat)
    lam = float(np.max(eig.real))
    return TreeCriticalProbability(
        p_c=1.0 / lam,
        growth_rate=lam,
        closed_form_bound=2.0 ** (-2.0 / 3.0) * 3.0 ** (-1.0 / 3.0))


# ---------------------------------------------------------------------------
# chandeliers
# ---------------------------------------------------------------------------

@dataclass
class Chandelier:
    """Spine v, v1, v2 with a tree hanging at v2.

    `side` names the geodesic side the object is designed for: 'left' is the
    chandelier, 'right' its mirror image (the anti-chandelier). At v1 the
    spine turns so that exactly 3 corners separate it from the root edge on
    the side facing back along the geodesic (for 'left' that is the walker's
    right when travelling v -> v1 -> v2); the tree at v2 then opens away from
    the root edge, with at least 3 corners outside its wedge on both flanks.
    """
    root: int
    spine: tuple                 # (v, v1, v2)
    side: str                    # "left" = chandelier, "right" = anti
    subtree: TreeEmbedding
    L1: list
    L2: list

    def vertex_set(self) -> set:
        return {self.spine[0], self.spine[1]} | self.subtree.vertices()

    def validate(self, g: RotationGraph):
        v, v1, v2 = self.spine
        si = g.slot_of(v1, v)
        so = g.slot_of(v1, v2)
        deg = g.degree(v1)
        right = (so - si) % deg
        cnt = right if self.side == "left" else deg - right
        if cnt != 3:
            raise InvariantViolation(
                f"spine face count at {v1} is {cnt}, want 3")
        inter = set(self.L1) & set(self.L2)
        if inter != {v2}:
            raise InvariantViolation(f"tree boundaries meet in {inter}")
        # at least 3 corners outside the tree wedge on both flanks of v2
        i = g.slot_of(v2, v1)
        s0 = g.slot_of(v2, self.subtree.label_map["0"])
        s1 = g.slot_of(v2, self.subtree.label_map["1"])
        deg2 = g.degree(v2)
        if (s0 - i) % deg2 < 3 or (i - s1) % deg2 < 3:
            raise InvariantViolation("tree wedge too close to the spine")
        self.subtree.validate()


def build_chandelier(g: RotationGraph, root: int, side: str, depth_cap: int,
                     start_slot: int = 0) -> Chandelier:
    """Chandelier (side='left') or anti-chandelier (side='right') rooted at
    `root`, its first edge at rotation slot start_slot."""
    if side not in ("left", "right"):
        raise StructuralError("side must be 'left' or 'right'")
    if g.boundary[root]:
        raise PatchTooSmallError(f"chandelier root {root} is boundary-flagged")
    v = root
    v1 = int(g.rotation(v)[start_slot % g.degree(v)])
    if g.boundary[v1]:
        raise PatchTooSmallError(f"spine vertex {v1} is boundary-flagged")
    if g.degree(v1) < 7:
        raise StructuralError(f"vertex {v1} has degree < 7")
    si = g.slot_of(v1, v)
    deg1 = g.degree(v1)
    so = (si + 3) % deg1 if side == "left" else (si - 3) % deg1
    v2 = int(g.rotation(v1)[so])
    if g.boundary[v2]:
        raise PatchTooSmallError(f"spine vertex {v2} is boundary-flagged")
    i = g.slot_of(v2, v1)
    deg2 = g.degree(v2)
    s = (i + 3) % deg2 if side == "left" else (i - 4) % deg2
    subtree = grow_tree(g, v2, condition=1, depth_cap=depth_cap, start_slot=s)
    if v in subtree.vertices() or v1 in subtree.vertices():
        raise InvariantViolation("chandelier tree ran into its own spine")
    ray0, ray1 = subtree.rays["0"], subtree.rays["1"]
    L1, L2 = (ray1, ray0) if side == "left" else (ray0, ray1)
    ch = Chandelier(root=root, spine=(v, v1, v2), side=side, subtree=subtree,
                    L1=list(L1), L2=list(L2))
    ch.validate(g)
    return ch


@dataclass
class ChandelierSequence:
    geodesic: list
    left: list                  # chandeliers, roots in geodesic order
    right: list                 # anti-chandeliers, roots in geodesic order
    alternation: list           # indices into (left, right) forming L,R,L,R...

    @property
    def pair_count(self) -> int:
        return min(len(self.left), len(self.right))


def _side_candidate(g, z_prev, zeta, z_next, side, geo_set):
    deg = g.degree(zeta)
    si = g.slot_of(zeta, z_prev)
    so = g.slot_of(zeta, z_next)
    right = (so - si) % deg
    count = right if side == "right" else deg - right
    if count < 2:
        return None
    off = 1 if side == "right" else -1
    a = int(g.rotation(zeta)[(si + off) % deg])
    if a in geo_set or g.boundary[a]:
        return None
    return a


def chandelier_sequence(g: RotationGraph, geodesic, depth_cap: int = 2
                        ) -> ChandelierSequence:
    """Alternating chandelier / anti-chandelier sequence along a geodesic.

    Chandeliers hang left, anti-chandeliers right; roots strictly increase
    along the path, starting-edge choices follow the corner next to the
    incoming geodesic edge. Same-side intersections are a guarantee
    violation; a candidate clashing with an opposite-side pick is skipped
    (only same-side disjointness is a theorem), as is a candidate reusing the
    previous pick's first edge target.
    """
    geo = [int(z) for z in geodesic]
    n = len(geo)
    if n < 2:
        raise StructuralError("geodesic needs at least two vertices")
    for i in range(n - 1):
        if not g.has_edge(geo[i], geo[i + 1]):
            raise StructuralError("geodesic vertices not consecutive-adjacent")
    d = g.distances_from([geo[0]])
    if int(d[geo[-1]]) != n - 1:
        raise StructuralError("path is not a shortest path")
    geo_set = set(geo)
    if len(geo_set) != n:
        raise StructuralError("geodesic revisits a vertex")

    seq = ChandelierSequence(geodesic=geo, left=[], right=[], alternation=[])
    built = []      # (side, vertex_set, chandelier)
    used_first = {"left": set(), "right": set()}
    want = "left"
    for i in range(1, n - 1):
        zeta = geo[i]
        if g.boundary[zeta]:
            continue
        a = _side_candidate(g, geo[i - 1], zeta, geo[i + 1], want, geo_set)
        if a is None or a in used_first[want]:
            continue
        try:
            ch = build_chandelier(g, zeta, want, depth_cap,
                                  start_slot=g.slot_of(zeta, a))
        except PatchTooSmallError:
            continue
        vs = ch.vertex_set()
        clash = False
        for (side2, vs2, _ch2) in built:
            if vs & vs2:
                if side2 == want:
                    raise InvariantViolation(
                        "same-side chandeliers intersect; disjointness failed")
                clash = True
                break
        if clash:
            continue
        built.append((want, vs, ch))
        used_first[want].add(a)
        if want == "left":
            seq.left.append(ch)
            seq.alternation.append(("left", len(seq.left) - 1))
            want = "right"
        else:
            seq.right.append(ch)
            seq.alternation.append(("right", len(seq.right) - 1))
            want = "left"
    return seq
