"""Turn-rule walks over rotation systems.

A walk is driven either by a label shift (edges at each vertex are labelled
0..deg-1 counterclockwise; the exit edge label is the entry label plus a
fixed shift mod degree) or by a face count (a fixed number of incident faces,
counted with multiplicity, on one side of every turn).

Orientation convention: travelling u -> v -> w with counterclockwise
rotations, the corners swept going counterclockwise from the entry edge to
the exit edge lie on the walker's *right*; the rest lie on the left. Hence a
+s label shift leaves exactly s faces on the right and faces_on_side(right, s)
is the same rule spelled by face counts; -s mirrors it (s faces on the left).

Walks are self-avoiding whenever every turn keeps a combinatorial angle of at
least pi on both sides; a repeated vertex therefore raises
InvariantViolation (it would mean a generator bug, not a legitimate result).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import InvariantViolation, StructuralError
from .planar import Faces, RotationGraph

__all__ = ["WalkRule", "WalkResult", "turn_walk", "faces_between"]

_ALLOWED_SHIFTS = (3, -3, 2, -2)


@dataclass(frozen=True)
class WalkRule:
    """Either label_shift(k) with k in {+3, -3, +2, -2}, or
    faces_on_side(side, count)."""
    kind: str
    shift: int = 0
    side: str = ""
    count: int = 0

    @classmethod
    def label_shift(cls, k: int) -> "WalkRule":
        if k not in _ALLOWED_SHIFTS:
            raise StructuralError(f"label shift must be one of {_ALLOWED_SHIFTS}")
        return cls("label_shift", shift=k)

    @classmethod
    def faces_on_side(cls, side: str, count: int) -> "WalkRule":
        if side not in ("left", "right"):
            raise StructuralError("side must be 'left' or 'right'")
        if count < 1:
            raise StructuralError("face count must be positive")
        return cls("faces_on_side", side=side, count=count)

    def as_shift(self) -> int:
        if self.kind == "label_shift":
            return self.shift
        return self.count if self.side == "right" else -self.count


@dataclass
class WalkResult:
    vertices: list
    truncated: bool     # halted at a boundary-flagged vertex
    rule: WalkRule

    def __len__(self):
        return len(self.vertices)


def faces_between(g: RotationGraph, v: int, in_edge, out_edge, side: str) -> int:
    """Number of faces incident to v (with multiplicity: one per corner)
    strictly on `side` of the transition in_edge -> v -> out_edge."""
    (a, b) = in_edge
    (c, d) = out_edge
    if b != v or c != v:
        raise StructuralError("edges must enter and leave v")
    si = g.slot_of(v, a)
    so = g.slot_of(v, d)
    deg = g.degree(v)
    right = (so - si) % deg
    if side == "right":
        return right
    if side == "left":
        return deg - right
    raise StructuralError("side must be 'left' or 'right'")


def _angle_sum(faces: Faces, g, v, slots) -> Fraction:
    acc = Fraction(0)
    cf = faces.corner_faces(v)
    for s in slots:
        rec = faces.records[cf[s]]
        if not rec.finite:
            raise StructuralError(
                f"face count rule hit a truncation face at vertex {v}")
        acc += Fraction(rec.degree - 2, rec.degree)
    return acc


def _check_precondition(g, faces, v, rule, si, so):
    deg = g.degree(v)
    if rule.kind == "label_shift":
        need = 6 if abs(rule.shift) == 3 else 4
        if deg < need:
            raise StructuralError(
                f"label shift {rule.shift:+d} needs degree >= {need}, "
                f"vertex {v} has {deg}")
        if abs(rule.shift) == 2:
            if faces is None:
                faces = g.faces()
            for fid in faces.corner_faces(v):
                rec = faces.records[fid]
                if rec.finite and rec.degree < 4:
                    raise StructuralError(
                        f"label shift +-2 needs face degree >= 4; vertex {v} "
                        f"touches a degree-{rec.degree} face")
    else:
        # the turning-angle condition: at least pi of combinatorial angle
        # on each side of the transition
        if faces is None:
            faces = g.faces()
        right_slots = [(si + k) % deg for k in range((so - si) % deg)]
        left_slots = [(so + k) % deg for k in range((si - so) % deg)]
        for slots, name in ((right_slots, "right"), (left_slots, "left")):
            if _angle_sum(faces, g, v, slots) < 1:
                raise StructuralError(
                    f"turning-angle condition fails on the {name} at vertex {v}")
    return faces


def turn_walk(g: RotationGraph, start_edge, rule: WalkRule, max_steps: int,
              faces: Faces | None = None) -> WalkResult:
    """Walk from the directed edge start_edge applying `rule` at every
    subsequent vertex; halts at boundary-flagged vertices (truncated) or
    after max_steps edges. The result is checked to be self-avoiding."""
    u, v = int(start_edge[0]), int(start_edge[1])
    if max_steps <= 0:
        return WalkResult([u], False, rule)
    g.slot_of(u, v)  # validates the edge
    path = [u, v]
    seen = {u, v}
    shift = rule.as_shift()
    truncated = False
    prev, cur = u, v
    for _ in range(max_steps - 1):
        if g.boundary[cur]:
            truncated = True
            break
        deg = g.degree(cur)
        si = g.slot_of(cur, prev)
        so = (si + shift) % deg
        faces = _check_precondition(g, faces, cur, rule, si, so)
        nxt = int(g.rotation(cur)[so])
        if nxt in seen:
            raise InvariantViolation(
                f"turn walk revisited vertex {nxt}; the self-avoidance "
                "guarantee failed (generator bug)")
        path.append(nxt)
        seen.add(nxt)
        prev, cur = cur, nxt
    return WalkResult(path, truncated, rule)
