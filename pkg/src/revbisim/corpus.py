"""Named example pairs with their expected verdicts.

Each expectation carries its provenance: ``stated`` when the verdict is
asserted directly for the pair, ``derived`` when it follows from a stated
verdict through an inclusion or coincidence between equivalences.  Kinds
with no citable expectation are left out and reported as unconstrained.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .core import ConfigStructure
from .terms import translate

ABSORPTION_LEFT = "(a | (b + c)) + (a | b) + ((a + c) | b)"
ABSORPTION_RIGHT = "(a | (b + c)) + ((a + c) | b)"

# inclusive-or switch: b may follow 0, 1 or both; not stable
PARALLEL_SWITCH = {
    "events": [{"id": "0", "label": "0"}, {"id": "1", "label": "1"}, {"id": "b", "label": "b"}],
    "configurations": [[], ["0"], ["1"], ["0", "1"], ["0", "b"], ["1", "b"], ["0", "1", "b"]],
}
# exclusive-or switch: b follows exactly one of 0, 1; stable but not prime
EXCLUSIVE_SWITCH = {
    "events": [{"id": "0", "label": "0"}, {"id": "1", "label": "1"}, {"id": "b", "label": "b"}],
    "configurations": [[], ["0"], ["1"], ["0", "1"], ["0", "b"], ["1", "b"]],
}


def parallel_switch() -> ConfigStructure:
    return ConfigStructure.from_dict(PARALLEL_SWITCH)


def exclusive_switch() -> ConfigStructure:
    return ConfigStructure.from_dict(EXCLUSIVE_SWITCH)


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    left: str  # term text, or "xor-switch"
    right: str
    expected: dict = field(default_factory=dict)  # kind -> (bool, citation)

    def structures(self) -> tuple[ConfigStructure, ConfigStructure]:
        return _load(self.left), _load(self.right)


def _load(text: str) -> ConfigStructure:
    if text == "xor-switch":
        return exclusive_switch()
    return translate(text)


def _no(reason: str, *kinds: str) -> dict:
    return {k: (False, reason) for k in kinds}


def _yes(reason: str, *kinds: str) -> dict:
    return {k: (True, reason) for k in kinds}


ALL = ("ib", "sb", "db", "rb", "rsb", "rhsb", "rhesb", "rdb", "hh")

ENTRIES = (
    CorpusEntry(
        "autoconcurrency", "a | a", "a.a",
        {**_yes("stated: auto-concurrency is invisible to ib", "ib"),
         **_yes("stated: auto-concurrency is invisible to rb", "rb"),
         **_no("stated: the {a,a} step separates them under sb", "sb"),
         **_no("derived: sb fails and db, rsb, hh are included in sb", "db", "rsb", "hh"),
         **_no("derived: rsb fails; rsb = rhsb = rhesb = rdb", "rhsb", "rhesb", "rdb")}),
    CorpusEntry(
        "reverse-step", "a | a", "(a | a) + a.a",
        {**_yes("stated: holds for sb", "sb"),
         **_yes("derived: sb holds and sb is included in ib", "ib"),
         **_yes("stated: forward steps plus single reverse moves cannot separate them; rb is coarser still",
                "rb"),
         **_no("stated: fails for hh", "hh"),
         **_no("stated: after a.a no reverse step {a,a} exists; fails for rsb", "rsb"),
         **_no("derived: rsb fails; rsb = rhsb = rhesb = rdb", "rhsb", "rhesb", "rdb")}),
    CorpusEntry(
        "interleaving-law", "a | b", "a.b + b.a",
        {**_yes("stated: the interleaving law holds for ib", "ib"),
         **_no("stated: the interleaving law fails for rb and sb", "rb", "sb"),
         **_no("derived: sb fails and db, rsb, hh are included in sb", "db", "rsb", "hh"),
         **_no("derived: rsb fails; rsb = rhsb = rhesb = rdb", "rhsb", "rhesb", "rdb")}),
    CorpusEntry(
        "absorption", ABSORPTION_LEFT, ABSORPTION_RIGHT,
        {**_yes("stated: the absorption law holds for sb", "sb"),
         **_yes("stated: the absorption law holds for db", "db"),
         **_yes("derived: sb holds and sb is included in ib", "ib"),
         **_no("stated: reversing a then doing c separates them under rb", "rb"),
         **_no("derived: rb fails and rsb, hh are included in rb", "rsb", "hh"),
         **_no("derived: rsb fails; rsb = rhsb = rhesb = rdb", "rhsb", "rhesb", "rdb")}),
    CorpusEntry(
        "depth", "a | b", "(a | b) + a.b",
        {**_yes("stated: holds for sb", "sb"),
         **_yes("derived: sb holds and sb is included in ib", "ib"),
         **_no("stated: fails for db", "db"),
         **_no("derived: db fails and rdb is a db", "rdb"),
         **_no("derived: rdb fails; rsb = rhsb = rhesb = rdb", "rsb", "rhsb", "rhesb"),
         **_no("derived: rsb fails and hh is included in rsb", "hh")}),
    CorpusEntry(
        "choice-idempotence", "a", "a + a",
        _yes("stated: a + a = a holds for every equivalence considered", *ALL)),
    CorpusEntry(
        "no-equidepth-autoconcurrency", "a | b.a", "b.a | a",
        _yes("derived: the two sides are isomorphic, so hh holds and every coarser kind too",
             *ALL)),
    CorpusEntry(
        "exclusive-or-switch", "xor-switch", "xor-switch",
        _yes("derived: the identity relation is a bisimulation of every kind",
             *ALL)),
)


def entries() -> tuple[CorpusEntry, ...]:
    return ENTRIES


def strictness_witnesses() -> dict[str, tuple[str, str, str]]:
    """Corpus entries separating two kinds: (kind that holds, kind that fails, entry).

    ``x<y`` names a strict inclusion witnessed by y holding and x failing;
    ``x!<y`` names a non-inclusion witnessed by x holding and y failing.
    """
    return {
        "hh<sb": ("sb", "hh", "reverse-step"),
        "sb<ib": ("ib", "sb", "autoconcurrency"),
        "rsb<rb": ("rb", "rsb", "autoconcurrency"),
        "rsb<sb": ("sb", "rsb", "absorption"),
        "rb<ib": ("ib", "rb", "interleaving-law"),
        "rb!<sb": ("rb", "sb", "autoconcurrency"),
        "sb!<rb": ("sb", "rb", "absorption"),
        "db<sb": ("sb", "db", "depth"),
    }
