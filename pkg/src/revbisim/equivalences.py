"""Greatest-fixpoint checkers for the nine equivalences, with witness extraction.

Each check is phrased as a game graph: nodes are candidate positions (pairs of
configurations, or triples carrying an event isomorphism for ``hh``), and each
node owns a list of *obligations*, one per attacker move, listing the nodes the
defender could answer with.  Refinement deletes nodes with an unanswerable
obligation, round by round, until nothing changes.  The round in which a node
dies is its rank; the obligation that killed it is the attacker's move in the
distinguishing strategy, and every defender answer leads to a node of
strictly lower rank.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from typing import Iterable

from .core import (CapacityError, ConfigStructure, InputError, canonical, causality,
                   check_capacity, require_stable)
from .transitions import FWD, REV, Move, moves, move_from_key, table

DEFAULT_MAX_PAIRS = 1_000_000
DEFAULT_MAX_ISOMORPHISMS = 100_000


class Kind(enum.Enum):
    IB = "ib"
    SB = "sb"
    DB = "db"
    RB = "rb"
    RSB = "rsb"
    RHSB = "rhsb"
    RHESB = "rhesb"
    RDB = "rdb"
    HH = "hh"

    def __str__(self):
        return self.value

    @classmethod
    def parse(cls, text: str) -> "Kind":
        try:
            return cls(text.lower())
        except ValueError:
            raise InputError(f"unknown equivalence {text!r}") from None

    @property
    def alphabet(self) -> tuple[tuple[str, str], ...]:
        return ALPHABETS[self]

    @property
    def has_reverse(self) -> bool:
        return any(d == REV for d, _ in self.alphabet)


ALL_KINDS = tuple(Kind)

ALPHABETS = {
    Kind.IB: ((FWD, "single"),),
    Kind.SB: ((FWD, "step"),),
    Kind.DB: ((FWD, "dsingle"),),
    Kind.RB: ((FWD, "single"), (REV, "single")),
    Kind.RSB: ((FWD, "step"), (REV, "step")),
    Kind.RHSB: ((FWD, "single"), (REV, "hstep")),
    Kind.RHESB: ((FWD, "single"), (REV, "ehstep")),
    Kind.RDB: ((FWD, "dsingle"), (REV, "dsingle")),
    Kind.HH: ((FWD, "single"), (REV, "single")),
}

LEFT, RIGHT = "left", "right"


# -- game graphs --------------------------------------------------------------

@dataclass
class _Game:
    nodes: list  # (x, y) position pairs, or (x, y, f) for hh
    index: dict
    # per node: list of (attack, [response node ids]); attack = (side, key, src, dst)
    obligations: list = field(default_factory=list)
    root: int | None = None


def _merged_rows(structure: ConfigStructure, kind: Kind) -> list[dict]:
    rows = [dict() for _ in structure.index.masks]
    for direction, move_kind in kind.alphabet:
        for pos, row in enumerate(table(structure, direction, move_kind)):
            rows[pos].update(row)
    return rows


def _pair_game(kind: Kind, C: ConfigStructure, D: ConfigStructure, prefilter: bool,
               max_pairs: int) -> _Game:
    ic, id_ = C.index, D.index
    nx, ny = len(ic.masks), len(id_.masks)
    if nx * ny > max_pairs:
        raise CapacityError(f"{nx * ny} candidate pairs exceed the limit of {max_pairs}")
    rows_c, rows_d = _merged_rows(C, kind), _merged_rows(D, kind)
    nodes = []
    if prefilter:
        by_labels: dict = {}
        for y, m in enumerate(id_.masks):
            by_labels.setdefault(id_.label_multiset(m), []).append(y)
        for x, m in enumerate(ic.masks):
            nodes.extend((x, y) for y in by_labels.get(ic.label_multiset(m), ()))
    else:
        nodes = [(x, y) for x in range(nx) for y in range(ny)]
    index = {p: i for i, p in enumerate(nodes)}
    game = _Game(nodes, index)
    for x, y in nodes:
        obs = []
        rx, ry = rows_c[x], rows_d[y]
        for key, targets in rx.items():
            answers = ry.get(key, ())
            for x2 in targets:
                resp = [index[(x2, y2)] for y2 in answers if (x2, y2) in index]
                obs.append(((LEFT, key, x, x2), resp))
        for key, targets in ry.items():
            answers = rx.get(key, ())
            for y2 in targets:
                resp = [index[(x2, y2)] for x2 in answers if (x2, y2) in index]
                obs.append(((RIGHT, key, y, y2), resp))
        game.obligations.append(obs)
    game.root = index.get((0, 0))
    return game


def _single_moves(structure: ConfigStructure, direction: str) -> list[list]:
    """Per position: (event bit index, label, target position) for single moves."""
    idx = structure.index
    out = [[] for _ in idx.masks]
    for pos, row in enumerate(table(structure, direction, "single")):
        for key, targets in row.items():
            for t in targets:
                diff = idx.masks[t] ^ idx.masks[pos]
                out[pos].append((diff.bit_length() - 1, key[2][0], t))
    return out


def _hh_game(C: ConfigStructure, D: ConfigStructure, max_isos: int, max_nodes: int) -> _Game:
    ic, id_ = C.index, D.index
    fwd_c, fwd_d = _single_moves(C, FWD), _single_moves(D, FWD)
    rev_c, rev_d = _single_moves(C, REV), _single_moves(D, REV)
    key = lambda direction, label: (direction, "single", (label,), None)

    def extend(x, y, f, d, x2, e, y2):
        """f + (d -> e) if it is an order isomorphism of X2 onto Y2."""
        fd = dict(f)
        image = 0
        for j in ic.bits(ic.preds(ic.masks[x2])[d]):
            image |= 1 << fd[j]
        if image != id_.preds(id_.masks[y2])[e]:
            return None
        return tuple(sorted(f + ((d, e),)))

    root = (0, 0, ())
    nodes = [root]
    index = {root: 0}
    per_pair: dict = {}
    head = 0
    while head < len(nodes):
        x, y, f = nodes[head]
        head += 1
        for d, a, x2 in fwd_c[x]:
            for e, b, y2 in fwd_d[y]:
                if a != b:
                    continue
                g = extend(x, y, f, d, x2, e, y2)
                if g is None or (x2, y2, g) in index:
                    continue
                n = per_pair.get((x2, y2), 0) + 1
                if n > max_isos:
                    raise CapacityError(f"more than {max_isos} isomorphisms for one configuration pair")
                per_pair[(x2, y2)] = n
                if len(nodes) >= max_nodes:
                    raise CapacityError(f"more than {max_nodes} candidate triples")
                index[(x2, y2, g)] = len(nodes)
                nodes.append((x2, y2, g))

    game = _Game(nodes, index, root=0)
    for x, y, f in nodes:
        fd = dict(f)
        inv = {e: d for d, e in f}
        obs = []
        for d, a, x2 in fwd_c[x]:
            resp = []
            for e, b, y2 in fwd_d[y]:
                if a == b:
                    i = index.get((x2, y2, tuple(sorted(f + ((d, e),)))))
                    if i is not None:
                        resp.append(i)
            obs.append(((LEFT, key(FWD, a), x, x2), resp))
        for e, b, y2 in fwd_d[y]:
            resp = []
            for d, a, x2 in fwd_c[x]:
                if a == b:
                    i = index.get((x2, y2, tuple(sorted(f + ((d, e),)))))
                    if i is not None:
                        resp.append(i)
            obs.append(((RIGHT, key(FWD, b), y, y2), resp))
        for d, a, x2 in rev_c[x]:
            y2 = id_.position.get(id_.masks[y] & ~(1 << fd[d]))
            g = tuple(p for p in f if p[0] != d)
            i = index.get((x2, y2, g))
            obs.append(((LEFT, key(REV, a), x, x2), [] if i is None else [i]))
        for e, b, y2 in rev_d[y]:
            x2 = ic.position.get(ic.masks[x] & ~(1 << inv[e]))
            g = tuple(p for p in f if p[1] != e)
            i = index.get((x2, y2, g))
            obs.append(((RIGHT, key(REV, b), y, y2), [] if i is None else [i]))
        game.obligations.append(obs)
    return game


@dataclass
class _Refinement:
    alive: bytearray
    rank: list  # 0 = survives
    attack: list  # index into the node's obligations, or None
    rounds: int


def _refine(game: _Game) -> _Refinement:
    n = len(game.nodes)
    alive = bytearray([1]) * n
    rank = [0] * n
    attack: list = [None] * n
    preds: list[list[int]] = [[] for _ in range(n)]
    for i, obs in enumerate(game.obligations):
        for _, resp in obs:
            for j in resp:
                preds[j].append(i)
    candidates = range(n)
    rounds = 0
    while True:
        dead = []
        for i in candidates:
            if not alive[i]:
                continue
            for k, (_, resp) in enumerate(game.obligations[i]):
                if not any(alive[j] for j in resp):
                    dead.append((i, k))
                    break
        if not dead:
            break
        rounds += 1
        nxt = set()
        for i, k in dead:
            alive[i] = 0
            rank[i] = rounds
            attack[i] = k
        for i, _ in dead:
            nxt.update(p for p in preds[i] if alive[p])
        candidates = sorted(nxt)
    return _Refinement(alive, rank, attack, rounds)


# -- public results -----------------------------------------------------------

@dataclass(frozen=True)
class Relation:
    """The maximal bisimulation of a kind between two structures.

    ``pairs`` holds ``(X, Y)`` configuration pairs; for ``hh`` it holds
    ``(X, Y, f)`` with ``f`` a frozenset of ``(d, e)`` event pairs.
    """
    kind: Kind
    pairs: frozenset
    rounds: int
    initial: int

    @property
    def final(self) -> int:
        return len(self.pairs)

    def __contains__(self, item) -> bool:
        return item in self.pairs

    def configuration_pairs(self) -> frozenset:
        return frozenset(p[:2] for p in self.pairs)


@dataclass
class WitnessTree:
    """An attacker move at a position, and the subtree for every defender answer.

    An empty ``responses`` list means the defender has no legal answer.
    """
    position: tuple
    side: str
    move: Move
    responses: list = field(default_factory=list)  # (Move, WitnessTree)

    def to_dict(self) -> dict:
        pos = {"left": canonical(self.position[0]), "right": canonical(self.position[1])}
        if len(self.position) == 3:
            pos["iso"] = {d: e for d, e in sorted(self.position[2])}
        return {
            "position": pos,
            "side": self.side,
            "move": self.move.render(),
            "responses": [{"move": m.render(), "then": t.to_dict()} for m, t in self.responses],
        }

    def lines(self, indent: int = 0) -> list[str]:
        pad = "  " * indent
        out = [f"{pad}{self.side.upper()} {self.move.render()}"]
        if not self.responses:
            out.append(f"{pad}  (no response)")
        for m, t in self.responses:
            out.append(f"{pad}  answer {m.render()}")
            out.extend(t.lines(indent + 2))
        return out

    def paths(self):
        """Every root-to-leaf sequence of moves, attacker and defender interleaved."""
        if not self.responses:
            yield [(self.side, self.move)]
            return
        other = RIGHT if self.side == LEFT else LEFT
        for m, t in self.responses:
            for rest in t.paths():
                yield [(self.side, self.move), (other, m)] + rest

    def size(self) -> int:
        return 1 + sum(t.size() for _, t in self.responses)


@dataclass(frozen=True)
class Verdict:
    kind: Kind
    equivalent: bool
    rounds: int
    pairs_initial: int
    pairs_final: int
    witness: WitnessTree | None = None

    def to_dict(self) -> dict:
        doc = {"kind": str(self.kind), "equivalent": self.equivalent, "rounds": self.rounds,
               "pairsInitial": self.pairs_initial, "pairsFinal": self.pairs_final}
        if self.witness is not None:
            doc["witness"] = self.witness.to_dict()
        return doc

    def render(self) -> str:
        word = "equivalent" if self.equivalent else "inequivalent"
        return (f"{self.kind}: {word} (rounds={self.rounds}, pairs {self.pairs_initial} -> "
                f"{self.pairs_final})")


def _prepare(C: ConfigStructure, D: ConfigStructure) -> None:
    for s in (C, D):
        check_capacity(s)
        require_stable(s)


def _game(kind: Kind, C, D, prefilter: bool, max_pairs: int, max_isos: int) -> _Game:
    if kind is Kind.HH:
        return _hh_game(C, D, max_isos, max_pairs)
    return _pair_game(kind, C, D, prefilter and kind.has_reverse, max_pairs)


def _position(kind: Kind, C, D, node) -> tuple:
    ic, id_ = C.index, D.index
    X, Y = ic.to_set(ic.masks[node[0]]), id_.to_set(id_.masks[node[1]])
    if kind is Kind.HH:
        f = frozenset((ic.events[d], id_.events[e]) for d, e in node[2])
        return (X, Y, f)
    return (X, Y)


def _run(kind, C, D, prefilter=True, max_pairs=DEFAULT_MAX_PAIRS,
         max_isos=DEFAULT_MAX_ISOMORPHISMS):
    _prepare(C, D)
    game = _game(kind, C, D, prefilter, max_pairs, max_isos)
    return game, _refine(game)


def maximal_bisimulation(kind: Kind | str, C: ConfigStructure, D: ConfigStructure, *,
                         prefilter: bool = True, max_pairs: int = DEFAULT_MAX_PAIRS,
                         max_isomorphisms: int = DEFAULT_MAX_ISOMORPHISMS) -> Relation:
    """Largest relation satisfying every transfer clause of ``kind``.

    The refinement starts from all pairs (all isomorphism triples for ``hh``).
    For kinds with reverse moves the start is restricted to pairs with equal
    label multisets unless ``prefilter`` is false; this does not change the
    result since related configurations always carry equal labels.
    """
    kind = Kind.parse(kind) if isinstance(kind, str) else kind
    game, ref = _run(kind, C, D, prefilter, max_pairs, max_isomorphisms)
    pairs = frozenset(_position(kind, C, D, node)
                      for i, node in enumerate(game.nodes) if ref.alive[i])
    return Relation(kind, pairs, ref.rounds, len(game.nodes))


def _witness(kind, C, D, game: _Game, ref: _Refinement, start: int) -> WitnessTree:
    memo: dict[int, WitnessTree] = {}

    def build(i: int) -> WitnessTree:
        if i in memo:
            return memo[i]
        obs = game.obligations[i]
        (side, key, src, dst), resp = obs[ref.attack[i]]
        attacker, defender = (C, D) if side == LEFT else (D, C)
        tree = WitnessTree(_position(kind, C, D, game.nodes[i]), side,
                           move_from_key(attacker, key, src, dst))
        memo[i] = tree
        for j in resp:
            assert ref.rank[j] < ref.rank[i], "defender answer must lead to a lower rank"
            node = game.nodes[j]
            here = game.nodes[i][1] if side == LEFT else game.nodes[i][0]
            there = node[1] if side == LEFT else node[0]
            tree.responses.append((move_from_key(defender, key, here, there), build(j)))
        return tree

    return build(start)


def check(kind: Kind | str, C: ConfigStructure, D: ConfigStructure, want_witness: bool = False,
          *, max_pairs: int = DEFAULT_MAX_PAIRS,
          max_isomorphisms: int = DEFAULT_MAX_ISOMORPHISMS) -> Verdict:
    kind = Kind.parse(kind) if isinstance(kind, str) else kind
    game, ref = _run(kind, C, D, True, max_pairs, max_isomorphisms)
    root = game.root
    equivalent = root is not None and bool(ref.alive[root])
    initial, final, rounds = len(game.nodes), sum(ref.alive), ref.rounds
    witness = None
    if not equivalent and want_witness:
        if root is None:
            # root pruned by the label filter; replay without it to get ranks
            game, wref = _run(kind, C, D, False, max_pairs, max_isomorphisms)
            witness = _witness(kind, C, D, game, wref, game.root)
        else:
            witness = _witness(kind, C, D, game, ref, root)
    return Verdict(kind, equivalent, rounds, initial, final, witness)


def check_all(C: ConfigStructure, D: ConfigStructure, want_witness: bool = False,
              **limits) -> dict[Kind, Verdict]:
    return {k: check(k, C, D, want_witness, **limits) for k in ALL_KINDS}


# -- independent re-checking --------------------------------------------------

def is_isomorphism(C: ConfigStructure, X, D: ConfigStructure, Y, f) -> bool:
    """Does ``f`` map ``(X, <_X, l)`` bijectively and order-isomorphically onto ``(Y, <_Y, l)``?"""
    f = dict(f)
    X, Y = frozenset(X), frozenset(Y)
    if set(f) != X or set(f.values()) != Y or len(set(f.values())) != len(f):
        return False
    if any(C.label(d) != D.label(e) for d, e in f.items()):
        return False
    cx, cy = causality(C, X), causality(D, Y)
    return all(cx.lt(d1, d2) == cy.lt(f[d1], f[d2]) for d1 in X for d2 in X)


def _moves_of(kind: Kind, structure, X) -> list[Move]:
    return [m for d, k in kind.alphabet for m in moves(structure, X, d, k)]


def verify_relation(kind: Kind | str, C: ConfigStructure, D: ConfigStructure,
                    relation: Iterable) -> tuple[bool, str | None]:
    """Check a candidate relation clause by clause against the definitions.

    Returns ``(True, None)`` or ``(False, description of the first violation)``.
    Works from the public move enumeration, not from the refinement tables.
    """
    kind = Kind.parse(kind) if isinstance(kind, str) else kind
    rel = set()
    for item in relation:
        if kind is Kind.HH:
            X, Y, f = item
            rel.add((frozenset(X), frozenset(Y), frozenset(dict(f).items())))
        else:
            X, Y = item
            rel.add((frozenset(X), frozenset(Y)))
    for p in rel:
        if p[0] not in C or p[1] not in D:
            return False, f"{_fmt_pos(p)} is not a pair of configurations"
    empty = frozenset()
    root = (empty, empty, empty) if kind is Kind.HH else (empty, empty)
    if root not in rel:
        return False, "root pair missing"
    if kind is Kind.HH:
        return _verify_hh(C, D, rel)
    for X, Y in sorted(rel, key=_pos_key):
        mx, my = _moves_of(kind, C, X), _moves_of(kind, D, Y)
        for side, own, other in ((LEFT, mx, my), (RIGHT, my, mx)):
            for m in own:
                answers = [o for o in other if o.key == m.key]
                ok = any(((m.target, o.target) if side == LEFT else (o.target, m.target)) in rel
                         for o in answers)
                if not ok:
                    return False, f"{_fmt_pos((X, Y))}: {side} {m.render()} has no related answer"
    return True, None


def _verify_hh(C, D, rel) -> tuple[bool, str | None]:
    for X, Y, f in sorted(rel, key=_pos_key):
        if not is_isomorphism(C, X, D, Y, f):
            return False, f"{_fmt_pos((X, Y, f))}: not an isomorphism"
        fd = dict(f)
        inv = {e: d for d, e in f}
        for side, S, T, Z, W, g in ((LEFT, C, D, X, Y, fd), (RIGHT, D, C, Y, X, inv)):
            def triple(a, b, h):
                return (a, b, frozenset(h.items())) if side == LEFT else (
                    b, a, frozenset((v, k) for k, v in h.items()))
            for m in moves(S, Z, FWD, "single"):
                (d,) = m.events
                ok = any(triple(m.target, o.target, {**g, d: next(iter(o.events))}) in rel
                         for o in moves(T, W, FWD, "single") if o.labels == m.labels)
                if not ok:
                    return False, f"{_fmt_pos((X, Y, f))}: {side} {m.render()} has no related answer"
            for m in moves(S, Z, REV, "single"):
                (d,) = m.events
                h = {k: v for k, v in g.items() if k != d}
                if triple(m.target, W - {g[d]}, h) not in rel:
                    return False, f"{_fmt_pos((X, Y, f))}: {side} {m.render()} has no related answer"
    return True, None


def _pos_key(p):
    return tuple(tuple(sorted(map(str, c))) for c in p)


def _fmt_pos(p) -> str:
    parts = ["{" + ",".join(canonical(c)) + "}" for c in p[:2]]
    if len(p) == 3:
        parts.append("{" + ",".join(f"{d}->{e}" for d, e in sorted(p[2])) + "}")
    return "(" + ", ".join(parts) + ")"


# -- witness replay -------------------------------------------------------------

def _legal_answers(kind: Kind, C, D, position, side: str, move: Move) -> list[tuple[Move, tuple]]:
    """Every defender answer to an attacker move, with the resulting position."""
    X, Y = position[0], position[1]
    defender, here = (D, Y) if side == LEFT else (C, X)
    out = []
    if kind is not Kind.HH:
        for o in moves(defender, here, move.direction, move.kind):
            if o.key == move.key:
                new = (move.target, o.target) if side == LEFT else (o.target, move.target)
                out.append((o, new))
        return out
    f = dict(position[2])
    g = f if side == LEFT else {e: d for d, e in f.items()}
    (d,) = move.events
    if move.direction == REV:
        target = here - {g[d]}
        h = {k: v for k, v in g.items() if k != d}
        o = next((o for o in moves(defender, here, REV, "single") if o.target == target), None)
        if o is None:
            return []
        cand = [(o, h)]
    else:
        cand = [(o, {**g, d: next(iter(o.events))})
                for o in moves(defender, here, FWD, "single") if o.labels == move.labels]
    for o, h in cand:
        if side == LEFT:
            new = (move.target, o.target, frozenset(h.items()))
        else:
            new = (o.target, move.target, frozenset((v, k) for k, v in h.items()))
        if is_isomorphism(C, new[0], D, new[1], new[2]):
            out.append((o, new))
    return out


def replay_witness(kind: Kind | str, C: ConfigStructure, D: ConfigStructure,
                   tree: WitnessTree) -> tuple[bool, str | None]:
    """Confirm that a witness tree is a winning attacker strategy from the root."""
    kind = Kind.parse(kind) if isinstance(kind, str) else kind
    empty = frozenset()
    start = (empty, empty, empty) if kind is Kind.HH else (empty, empty)

    def go(t: WitnessTree, position) -> str | None:
        norm = tuple(frozenset(c) for c in t.position)
        if norm != position:
            return f"tree position {_fmt_pos(norm)} differs from replayed {_fmt_pos(position)}"
        attacker, here = (C, position[0]) if t.side == LEFT else (D, position[1])
        legal = [m for m in _moves_of(kind, attacker, here)]
        if t.move not in legal:
            return f"attacker move {t.move.render()} is not legal at {_fmt_pos(position)}"
        answers = _legal_answers(kind, C, D, position, t.side, t.move)
        given = {m for m, _ in t.responses}
        expected = {m for m, _ in answers}
        if given != expected:
            missing = sorted(m.render() for m in expected - given)
            return f"answers at {_fmt_pos(position)} do not match; missing {missing}"
        new_pos = {m: p for m, p in answers}
        for m, child in t.responses:
            err = go(child, new_pos[m])
            if err:
                return err
        return None

    err = go(tree, start)
    return err is None, err


_MOVE_RE = re.compile(r"^(FWD|REV) kind=(\w+) labels=([^ ]*) k=(\S+) target=\[([^\]]*)\]$")


def parse_move(text: str, source) -> Move:
    m = _MOVE_RE.match(text)
    if not m:
        raise InputError(f"cannot parse move {text!r}")
    direction, kind, labels, k, target = m.groups()
    return Move(direction.lower(), kind, tuple(labels.split(",")) if labels else (),
                None if k == "-" else int(k), frozenset(source),
                frozenset(target.split(",")) if target else frozenset())


def witness_from_dict(doc: dict) -> WitnessTree:
    """Rebuild a :class:`WitnessTree` from its JSON form."""
    pos = doc["position"]
    X, Y = frozenset(pos["left"]), frozenset(pos["right"])
    position = (X, Y) if "iso" not in pos else (X, Y, frozenset(pos["iso"].items()))
    side = doc["side"]
    move = parse_move(doc["move"], X if side == LEFT else Y)
    tree = WitnessTree(position, side, move)
    for r in doc["responses"]:
        child = witness_from_dict(r["then"])
        source = Y if side == LEFT else X
        tree.responses.append((parse_move(r["move"], source), child))
    return tree
