"""Forward and reverse moves between configurations.

Every move is determined by a pair of configurations ``X`` (smaller) and
``X'`` (larger) with ``E = X' - X``.  The kinds are:

* ``single``  -- ``|E| = 1``, labelled by the event's action
* ``step``    -- ``E`` non-empty and pairwise concurrent in ``X'``
* ``dsingle`` -- a single tagged with the event's depth in ``X'``
* ``hstep``   -- a step whose events all carry one label
* ``ehstep``  -- an ``hstep`` whose events all have one depth in ``X'``

A reverse move is the inverse of a forward move of the same kind; depths are
always taken in the larger configuration.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import ConfigStructure, InputError, canonical

FWD, REV = "fwd", "rev"
KINDS = ("single", "step", "dsingle", "hstep", "ehstep")


@dataclass(frozen=True)
class Edge:
    small: int  # configuration positions in the structure's canonical order
    large: int
    events: int  # mask of E
    labels: tuple[str, ...]
    step: bool
    depths: tuple[int, ...]

    def kinds(self) -> list[str]:
        out = []
        if len(self.labels) == 1:
            out += ["single", "dsingle"]
        if self.step:
            out.append("step")
            if len(set(self.labels)) == 1:
                out.append("hstep")
                if len(set(self.depths)) == 1:
                    out.append("ehstep")
        return out

    def key(self, kind: str) -> tuple:
        if kind == "single":
            return (kind, self.labels, None)
        if kind in ("dsingle", "ehstep"):
            return (kind, self.labels, self.depths[0])
        return (kind, self.labels, None)


def edges(structure: ConfigStructure) -> list[Edge]:
    """All (X, X') pairs with X a proper subset of X', both configurations.

    Cached on the structure's index.
    """
    idx = structure.index
    cached = getattr(idx, "_edges", None)
    if cached is not None:
        return cached
    out = []
    masks = idx.masks
    for s, X in enumerate(masks):
        for t, Y in enumerate(masks):
            if Y == X or X & ~Y:
                continue
            E = Y & ~X
            preds = idx.preds(Y)
            depth = idx.depths(Y)
            members = list(idx.bits(E))
            step = all(preds[i] & E == 0 for i in members)
            labels = tuple(sorted(idx.labels[i] for i in members))
            ds = tuple(sorted(depth[i] for i in members))
            out.append(Edge(s, t, E, labels, step, ds))
    idx._edges = out
    return out


@dataclass(frozen=True)
class Move:
    direction: str
    kind: str
    labels: tuple[str, ...]
    depth: int | None
    source: frozenset
    target: frozenset

    @property
    def key(self) -> tuple:
        return (self.direction, self.kind, self.labels, self.depth)

    @property
    def events(self) -> frozenset:
        return self.target - self.source if self.direction == FWD else self.source - self.target

    def render(self) -> str:
        k = "-" if self.depth is None else str(self.depth)
        return (f"{self.direction.upper()} kind={self.kind} labels={','.join(self.labels)} "
                f"k={k} target=[{','.join(canonical(self.target))}]")

    def to_dict(self) -> dict:
        return {"direction": self.direction, "kind": self.kind, "labels": list(self.labels),
                "k": self.depth, "source": canonical(self.source), "target": canonical(self.target)}


def _move(idx, edge: Edge, kind: str, direction: str) -> Move:
    _, labels, depth = edge.key(kind)
    small, large = idx.to_set(idx.masks[edge.small]), idx.to_set(idx.masks[edge.large])
    if direction == FWD:
        return Move(FWD, kind, labels, depth, small, large)
    return Move(REV, kind, labels, depth, large, small)


def moves(structure: ConfigStructure, X, direction: str, kind: str) -> list[Move]:
    """All moves of one kind leaving ``X``, in canonical target order."""
    if direction not in (FWD, REV):
        raise InputError(f"direction must be {FWD!r} or {REV!r}")
    if kind not in KINDS:
        raise InputError(f"unknown move kind {kind!r}")
    X = structure.require(X)
    idx = structure.index
    pos = idx.position[idx.to_mask(X)]
    out = []
    for edge in edges(structure):
        here = edge.small if direction == FWD else edge.large
        if here == pos and kind in edge.kinds():
            out.append((edge.large if direction == FWD else edge.small, _move(idx, edge, kind, direction)))
    return [m for _, m in sorted(out, key=lambda p: p[0])]


def singles(structure, X, direction=FWD) -> list[Move]:
    return moves(structure, X, direction, "single")


def steps(structure, X, direction=FWD) -> list[Move]:
    return moves(structure, X, direction, "step")


def depth_singles(structure, X, direction=FWD) -> list[Move]:
    return moves(structure, X, direction, "dsingle")


def special_steps(structure, X, direction=REV, constraint="homogeneous") -> list[Move]:
    kind = {"homogeneous": "hstep", "equidepthHomogeneous": "ehstep"}.get(constraint)
    if kind is None:
        raise InputError(f"unknown step constraint {constraint!r}")
    return moves(structure, X, direction, kind)


def move_menu(structure, X) -> list[Move]:
    """Every move of every kind from ``X``, forward first."""
    return [m for d in (FWD, REV) for k in KINDS for m in moves(structure, X, d, k)]


def table(structure: ConfigStructure, direction: str, kind: str) -> list[dict]:
    """Per configuration position: move key -> sorted target positions.

    This is the engine-facing form of :func:`moves`; cached on the index.
    """
    idx = structure.index
    cache = idx.__dict__.setdefault("_tables", {})
    got = cache.get((direction, kind))
    if got is not None:
        return got
    rows: list[dict] = [dict() for _ in idx.masks]
    for edge in edges(structure):
        if kind not in edge.kinds():
            continue
        key = (direction,) + edge.key(kind)
        src, dst = (edge.small, edge.large) if direction == FWD else (edge.large, edge.small)
        rows[src].setdefault(key, []).append(dst)
    for row in rows:
        for targets in row.values():
            targets.sort()
    cache[(direction, kind)] = rows
    return rows


def move_from_key(structure: ConfigStructure, key: tuple, src: int, dst: int) -> Move:
    """Rebuild a public :class:`Move` from an engine key and two positions."""
    direction, kind, labels, depth = key
    idx = structure.index
    return Move(direction, kind, labels, depth,
                idx.to_set(idx.masks[src]), idx.to_set(idx.masks[dst]))
