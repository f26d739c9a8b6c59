"""Stable configuration structures and their per-configuration semantics.

A structure is a finite family of configurations (finite sets of event ids)
together with a total labelling of its events.  Everything here is immutable;
derived data (causal orders, depths) is computed lazily and cached on the
structure's index.
"""

from __future__ import annotations

import json
import os
from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations
from types import MappingProxyType
from typing import Iterable, Mapping

DEFAULT_MAX_EVENTS = 16
DEFAULT_MAX_CONFIGURATIONS = 4096


class InputError(ValueError):
    """Malformed input: bad file, unlabelled event, duplicate configuration..."""


class CapacityError(RuntimeError):
    """A size guard was exceeded."""


class NotStableError(InputError):
    """An operation requiring a stable structure got an unstable one."""


def max_events() -> int:
    raw = os.environ.get("CSR_MAX_EVENTS")
    if raw is None:
        return DEFAULT_MAX_EVENTS
    try:
        return int(raw)
    except ValueError:
        raise InputError(f"CSR_MAX_EVENTS must be an integer, got {raw!r}") from None


Configuration = frozenset


def config(*events: str) -> frozenset:
    return frozenset(events)


def canonical(X: Iterable[str]) -> list[str]:
    return sorted(X)


def config_key(X: Iterable[str]) -> tuple:
    ids = canonical(X)
    return (len(ids), ids)


def fmt_config(X: Iterable[str]) -> str:
    return "{" + ",".join(canonical(X)) + "}"


def label_multiset(labels: Iterable[str]) -> tuple[str, ...]:
    return tuple(sorted(labels))


class ConfigStructure:
    """A configuration structure ``(C, l)``.

    ``configurations`` is any iterable of event collections; ``labelling``
    maps every event occurring in some configuration to its action label.
    Duplicate configurations and unlabelled or spurious events raise
    :class:`InputError`.  Stability is *not* checked here, see :func:`validate`.
    """

    def __init__(self, configurations: Iterable[Iterable[str]], labelling: Mapping[str, str]):
        configs = []
        for c in configurations:
            c = list(c)
            if len(set(c)) != len(c):
                raise InputError(f"configuration {c} lists an event twice")
            configs.append(frozenset(c))
        seen = set()
        for c in configs:
            if c in seen:
                raise InputError(f"duplicate configuration {fmt_config(c)}")
            seen.add(c)
        events = set().union(*configs) if configs else set()
        for e in events:
            if not isinstance(e, str) or not e:
                raise InputError(f"event ids must be non-empty strings, got {e!r}")
            if e not in labelling:
                raise InputError(f"event {e!r} has no label")
        extra = set(labelling) - events
        if extra:
            raise InputError(f"labelled events not in any configuration: {sorted(extra)}")
        for e, a in labelling.items():
            if not isinstance(a, str) or not a:
                raise InputError(f"label of {e!r} must be a non-empty string")
        self._configs = tuple(sorted(configs, key=config_key))
        self._set = frozenset(configs)
        self._labelling = MappingProxyType(dict(sorted(labelling.items())))
        self._events = tuple(sorted(events))
        self._index = None

    @property
    def configurations(self) -> tuple[frozenset, ...]:
        """Configurations in canonical order (by size, then sorted ids)."""
        return self._configs

    @property
    def labelling(self) -> Mapping[str, str]:
        return self._labelling

    @property
    def events(self) -> tuple[str, ...]:
        return self._events

    def label(self, e: str) -> str:
        return self._labelling[e]

    def labels_of(self, X: Iterable[str]) -> tuple[str, ...]:
        """The label multiset of an event set, as a sorted tuple."""
        return label_multiset(self._labelling[e] for e in X)

    def __contains__(self, X) -> bool:
        return frozenset(X) in self._set

    def __len__(self) -> int:
        return len(self._configs)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ConfigStructure):
            return NotImplemented
        return self._set == other._set and dict(self._labelling) == dict(other._labelling)

    def __hash__(self) -> int:
        return hash((self._set, tuple(self._labelling.items())))

    def __repr__(self) -> str:
        return f"ConfigStructure({len(self._events)} events, {len(self._configs)} configurations)"

    def require(self, X) -> frozenset:
        X = frozenset(X)
        if X not in self._set:
            raise InputError(f"{fmt_config(X)} is not a configuration")
        return X

    @property
    def index(self) -> "Index":
        if self._index is None:
            self._index = Index(self)
        return self._index

    def to_dict(self) -> dict:
        return {
            "events": [{"id": e, "label": self._labelling[e]} for e in self._events],
            "configurations": [canonical(c) for c in self._configs],
        }

    @classmethod
    def from_dict(cls, doc) -> "ConfigStructure":
        if not isinstance(doc, dict) or "events" not in doc or "configurations" not in doc:
            raise InputError("structure document needs 'events' and 'configurations'")
        labelling = {}
        for item in doc["events"]:
            try:
                e, a = item["id"], item["label"]
            except (TypeError, KeyError):
                raise InputError(f"bad event entry {item!r}") from None
            if e in labelling:
                raise InputError(f"event {e!r} declared twice")
            labelling[e] = a
        configs = doc["configurations"]
        if not isinstance(configs, list) or not all(isinstance(c, list) for c in configs):
            raise InputError("'configurations' must be a list of lists")
        for c in configs:
            if c != sorted(c):
                raise InputError(f"configuration {c} is not sorted")
        return cls(configs, labelling)

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=1)

    @classmethod
    def loads(cls, text: str) -> "ConfigStructure":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError(f"not a structure document: {exc}") from None
        return cls.from_dict(doc)


def check_capacity(structure: ConfigStructure, limit_events: int | None = None,
                   limit_configs: int = DEFAULT_MAX_CONFIGURATIONS) -> None:
    limit_events = max_events() if limit_events is None else limit_events
    if len(structure.events) > limit_events:
        raise CapacityError(f"{len(structure.events)} events exceed the limit of {limit_events}")
    if len(structure.configurations) > limit_configs:
        raise CapacityError(
            f"{len(structure.configurations)} configurations exceed the limit of {limit_configs}")


class Index:
    """Bitmask view of a structure with cached per-configuration order data.

    Event ``events[i]`` is bit ``1 << i``; ``masks[j]`` is configuration ``j``
    in the structure's canonical order.
    """

    def __init__(self, structure: ConfigStructure):
        self.structure = structure
        self.events = structure.events
        self.bit = {e: 1 << i for i, e in enumerate(self.events)}
        self.labels = [structure.label(e) for e in self.events]
        self.masks = [self.to_mask(c) for c in structure.configurations]
        self.position = {m: j for j, m in enumerate(self.masks)}
        self._preds: dict[int, dict[int, int]] = {}
        self._depths: dict[int, dict[int, int]] = {}

    def to_mask(self, X: Iterable[str]) -> int:
        m = 0
        for e in X:
            m |= self.bit[e]
        return m

    def to_set(self, mask: int) -> frozenset:
        return frozenset(e for i, e in enumerate(self.events) if mask >> i & 1)

    @staticmethod
    def bits(mask: int):
        i = 0
        while mask:
            if mask & 1:
                yield i
            mask >>= 1
            i += 1

    def preds(self, X: int) -> dict[int, int]:
        """Strict causal predecessors of each event of ``X`` (bit index -> mask)."""
        cached = self._preds.get(X)
        if cached is not None:
            return cached
        below = {i: X for i in self.bits(X)}
        for Y in self.masks:
            if Y & ~X:
                continue
            for i in self.bits(Y):
                below[i] &= Y
        result = {i: m & ~(1 << i) for i, m in below.items()}
        self._preds[X] = result
        return result

    def depths(self, X: int) -> dict[int, int]:
        cached = self._depths.get(X)
        if cached is not None:
            return cached
        preds = self.preds(X)
        depth: dict[int, int] = {}
        # a strict predecessor always has strictly fewer predecessors itself
        for i in sorted(preds, key=lambda i: bin(preds[i]).count("1")):
            p = preds[i]
            depth[i] = 1 + max((depth[j] for j in self.bits(p)), default=0)
        self._depths[X] = depth
        return depth

    def label_multiset(self, mask: int) -> tuple[str, ...]:
        return label_multiset(self.labels[i] for i in self.bits(mask))


# -- validation ---------------------------------------------------------------

AXIOMS = ("rooted", "connected", "boundedUnions", "boundedIntersections")


@dataclass(frozen=True)
class ValidationReport:
    rooted: bool
    connected: bool
    boundedUnions: bool
    boundedIntersections: bool
    primeIntersections: bool
    witnesses: Mapping[str, tuple] = field(default_factory=dict)

    @property
    def stable(self) -> bool:
        return self.rooted and self.connected and self.boundedUnions and self.boundedIntersections

    def lines(self) -> list[str]:
        out = []
        for name in AXIOMS + ("primeIntersections",):
            ok = getattr(self, name)
            line = f"{name}: {'PASS' if ok else 'FAIL'}"
            w = self.witnesses.get(name)
            if w is not None:
                line += " [" + _fmt_witness(name, w) + "]"
            out.append(line)
        out.append(f"stable: {'PASS' if self.stable else 'FAIL'}")
        return out

    def render(self) -> str:
        return "\n".join(self.lines())

    def to_dict(self) -> dict:
        doc = {name: getattr(self, name) for name in AXIOMS + ("primeIntersections", "stable")}
        doc["witnesses"] = {k: [canonical(x) for x in v] for k, v in self.witnesses.items()}
        return doc


def _fmt_witness(name: str, w: tuple) -> str:
    if name == "connected":
        return fmt_config(w[0])
    if name in ("boundedUnions", "boundedIntersections"):
        X, Y, Z = w
        return f"{fmt_config(X)},{fmt_config(Y)} <= {fmt_config(Z)}"
    if name == "primeIntersections":
        X, Y = w
        return f"{fmt_config(X)},{fmt_config(Y)}"
    return ""


def validate(structure: ConfigStructure) -> ValidationReport:
    """Evaluate the four stability axioms and the prime intersection test.

    Every axiom is checked exhaustively.  Witnesses are the first failing
    instance in canonical order, so the smallest configurations come first.
    """
    cached = getattr(structure, "_report", None)
    if cached is not None:
        return cached
    check_capacity(structure)
    idx = structure.index
    masks = idx.masks
    present = idx.position
    witnesses = {}

    rooted = 0 in present
    connected = True
    for X in masks:
        if X and not any((X & ~(1 << i)) in present for i in idx.bits(X)):
            connected = False
            witnesses["connected"] = (idx.to_set(X),)
            break

    unions = inters = prime = True
    n = len(masks)
    for a in range(n):
        X = masks[a]
        for b in range(a + 1, n):
            Y = masks[b]
            U, I = X | Y, X & Y
            if prime and I not in present:
                prime = False
                witnesses["primeIntersections"] = (idx.to_set(X), idx.to_set(Y))
            if (not unions or U in present) and (not inters or I in present):
                continue
            Z = next((Z for Z in masks if U & ~Z == 0), None)
            if Z is None:
                continue
            if unions and U not in present:
                unions = False
                witnesses["boundedUnions"] = (idx.to_set(X), idx.to_set(Y), idx.to_set(Z))
            if inters and I not in present:
                inters = False
                witnesses["boundedIntersections"] = (idx.to_set(X), idx.to_set(Y), idx.to_set(Z))
    report = ValidationReport(rooted, connected, unions, inters, prime, witnesses)
    structure._report = report
    return report


def require_stable(structure: ConfigStructure) -> None:
    report = validate(structure)
    if not report.stable:
        failed = [a for a in AXIOMS if not getattr(report, a)]
        raise NotStableError(f"structure is not stable (fails {', '.join(failed)})")


# -- per-configuration semantics ---------------------------------------------

@dataclass(frozen=True)
class CausalContext:
    configuration: frozenset
    leq: frozenset  # pairs (d, e) with d <=_X e, reflexive pairs included

    @property
    def strictly(self) -> frozenset:
        return frozenset((d, e) for d, e in self.leq if d != e)

    @property
    def concurrent(self) -> frozenset:
        """Unordered distinct pairs, as 2-element frozensets."""
        lt = self.strictly
        return frozenset(
            frozenset((d, e)) for d, e in combinations(sorted(self.configuration), 2)
            if (d, e) not in lt and (e, d) not in lt)

    def lt(self, d: str, e: str) -> bool:
        return d != e and (d, e) in self.leq

    def co(self, d: str, e: str) -> bool:
        return d != e and (d, e) not in self.leq and (e, d) not in self.leq


def causality(structure: ConfigStructure, X) -> CausalContext:
    X = structure.require(X)
    idx = structure.index
    preds = idx.preds(idx.to_mask(X))
    ev = idx.events
    leq = {(ev[i], ev[i]) for i in preds}
    for i, p in preds.items():
        leq.update((ev[j], ev[i]) for j in idx.bits(p))
    return CausalContext(X, frozenset(leq))


def depths(structure: ConfigStructure, X) -> dict[str, int]:
    """Depth of each event of ``X``: length of the longest causal chain ending in it."""
    X = structure.require(X)
    idx = structure.index
    return {idx.events[i]: k for i, k in sorted(idx.depths(idx.to_mask(X)).items())}


def minimal_events(structure: ConfigStructure, X) -> frozenset:
    return frozenset(e for e, k in depths(structure, X).items() if k == 1)


def slice_depths(structure: ConfigStructure, X, m: int = 1, n: float = float("inf")) -> frozenset:
    """Events of ``X`` whose depth lies in ``[m, n]``."""
    if m < 1 or m > n:
        raise InputError(f"need 1 <= m <= n, got m={m}, n={n}")
    return frozenset(e for e, k in depths(structure, X).items() if m <= k <= n)


def slice_leq(structure: ConfigStructure, X, n: int) -> frozenset:
    if n < 1:
        return frozenset()
    return slice_depths(structure, X, 1, n)


def slice_geq(structure: ConfigStructure, X, n: int) -> frozenset:
    return slice_depths(structure, X, max(n, 1))


def lift(structure: ConfigStructure, M) -> ConfigStructure:
    """The residual structure over configurations whose minimal events are ``M``."""
    M = structure.require(M)
    if minimal_events(structure, M) != M:
        raise InputError(f"{fmt_config(M)} is not made of minimal events only")
    residuals = [X - M for X in structure.configurations
                 if M <= X and minimal_events(structure, X) == M]
    events = set().union(*residuals)
    return ConfigStructure(residuals, {e: structure.label(e) for e in events})


@dataclass(frozen=True)
class AutoConcurrencyReport:
    hasAutoConcurrency: bool
    autoWitness: tuple | None
    hasEquidepthAutoConcurrency: bool
    equidepthWitness: tuple | None

    def lines(self) -> list[str]:
        def w(x):
            if x is None:
                return ""
            X, d, e = x
            return f" [{fmt_config(X)}: {d} co {e}]"
        return [
            f"autoConcurrency: {'yes' if self.hasAutoConcurrency else 'no'}{w(self.autoWitness)}",
            f"equidepthAutoConcurrency: {'yes' if self.hasEquidepthAutoConcurrency else 'no'}"
            f"{w(self.equidepthWitness)}",
        ]


def auto_concurrency(structure: ConfigStructure, check: bool = True) -> AutoConcurrencyReport:
    if check:
        require_stable(structure)
    idx = structure.index
    auto = equi = None
    for X in idx.masks:
        preds = idx.preds(X)
        depth = idx.depths(X)
        for i, j in combinations(sorted(preds), 2):
            if idx.labels[i] != idx.labels[j]:
                continue
            if preds[j] >> i & 1 or preds[i] >> j & 1:
                continue
            w = (idx.to_set(X), idx.events[i], idx.events[j])
            if auto is None:
                auto = w
            if equi is None and depth[i] == depth[j]:
                equi = w
        if auto is not None and equi is not None:
            break
    return AutoConcurrencyReport(auto is not None, auto, equi is not None, equi)


# -- structure combinators ---------------------------------------------------

def rename(structure: ConfigStructure, prefix: str) -> ConfigStructure:
    return ConfigStructure(
        [[prefix + e for e in X] for X in structure.configurations],
        {prefix + e: a for e, a in structure.labelling.items()})


def choice(left: ConfigStructure, right: ConfigStructure) -> ConfigStructure:
    """Disjoint union sharing only the empty configuration (event sets must be disjoint)."""
    if set(left.events) & set(right.events):
        raise InputError("choice needs disjoint event sets")
    configs = set(left.configurations) | set(right.configurations) | {frozenset()}
    return ConfigStructure(configs, {**left.labelling, **right.labelling})


def par(left: ConfigStructure, right: ConfigStructure) -> ConfigStructure:
    """Parallel composition without synchronisation (event sets must be disjoint)."""
    if set(left.events) & set(right.events):
        raise InputError("par needs disjoint event sets")
    configs = {X | Y for X in left.configurations for Y in right.configurations}
    return ConfigStructure(configs, {**left.labelling, **right.labelling})


def prefix(event: str, label: str, body: ConfigStructure) -> ConfigStructure:
    if event in body.events:
        raise InputError(f"prefix event {event!r} already occurs in the body")
    configs = [frozenset()] + [X | {event} for X in body.configurations]
    return ConfigStructure(configs, {**body.labelling, event: label})


def restrict_avoiding(structure: ConfigStructure, e: str) -> ConfigStructure:
    """Configurations not containing ``e``; stable whenever the input is."""
    configs = [X for X in structure.configurations if e not in X]
    events = set().union(*configs)
    return ConfigStructure(configs, {d: structure.label(d) for d in events})


def label_counts(structure: ConfigStructure, X) -> Counter:
    return Counter(structure.label(e) for e in X)
