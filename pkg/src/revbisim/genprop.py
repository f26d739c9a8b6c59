"""Random stable structures and a harness that checks laws over generated corpora.

Three generation modes:

``prime``
    random causality (a DAG) and a conflict relation inherited along
    causality; configurations are the conflict-free left-closed sets.
``rejection``
    random set families over at most four events, kept when stable.
``gadget``
    a prime skeleton combined with one or more exclusive-or switches, giving
    stable structures that are not closed under intersection.

Laws are evaluated on *pairs* of structures.  Random independent pairs are
almost always inequivalent for every kind, so pairs are mostly derived from
one base: isomorphic copies, duplicated or restricted summands, sequentialised
variants and relabellings.
"""

from __future__ import annotations

import logging
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from . import corpus
from .core import (CapacityError, ConfigStructure, auto_concurrency, choice, depths, lift,
                   minimal_events, par, rename, restrict_avoiding, slice_depths, slice_leq,
                   validate)
from .equivalences import Kind, check, maximal_bisimulation, verify_relation
from .terms import Choice, Nil, Par, Prefix, translate

log = logging.getLogger(__name__)

MODES = ("prime", "rejection", "gadget")


class GenerationError(RuntimeError):
    pass


@dataclass(frozen=True)
class GenParams:
    max_events: int = 6
    labels: int = 2
    causal_density: float = 0.3
    conflict_density: float = 0.2
    seed: int = 0
    mode: str = "prime"
    attempts: int = 2000
    gadgets: int = 1

    def __post_init__(self):
        if self.max_events < 0:
            raise ValueError("max_events must be non-negative")
        for p in (self.causal_density, self.conflict_density):
            if not 0.0 <= p <= 1.0:
                raise ValueError("densities must lie in [0, 1]")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")


def _alphabet(n: int) -> list[str]:
    return [chr(ord("a") + i) for i in range(max(1, min(n, 26)))]


def _rng(seed, *salt) -> random.Random:
    return random.Random(":".join(map(str, (seed,) + salt)))


def random_prime(rng: random.Random, n: int, labels: list[str], causal: float,
                 conflict: float, tag: str = "e") -> ConfigStructure:
    below = [0] * n  # strict causes, as masks
    for j in range(n):
        for i in range(j):
            if rng.random() < causal:
                below[j] |= (1 << i) | below[i]
    direct = set()
    for j in range(n):
        for i in range(j):
            if not (below[j] >> i & 1) and rng.random() < conflict:
                direct.add((i, j))
    # inherited conflict: d # e whenever some cause-or-self of d conflicts with one of e
    up = [below[i] | (1 << i) for i in range(n)]
    clash = [0] * n
    for i in range(n):
        for j in range(n):
            if any((p, q) in direct or (q, p) in direct
                   for p in range(n) if up[i] >> p & 1 for q in range(n) if up[j] >> q & 1):
                clash[i] |= 1 << j
    live = [i for i in range(n) if not clash[i] >> i & 1]
    configs = {0}
    frontier = [0]
    while frontier:
        X = frontier.pop()
        for i in live:
            bit = 1 << i
            if X & bit or below[i] & ~X or clash[i] & X:
                continue
            Y = X | bit
            if Y not in configs:
                configs.add(Y)
                frontier.append(Y)
    ids = {i: f"{tag}{i + 1}" for i in range(n)}
    used = set().union(*({i for i in range(n) if X >> i & 1} for X in configs))
    return ConfigStructure(
        [[ids[i] for i in range(n) if X >> i & 1] for X in configs],
        {ids[i]: rng.choice(labels) for i in sorted(used)})


def switch_gadget(rng: random.Random, labels: list[str], tag: str) -> ConfigStructure:
    """Two concurrent triggers, a third event enabled by exactly one of them."""
    e0, e1, eb = f"{tag}0", f"{tag}1", f"{tag}b"
    configs = [[], [e0], [e1], [e0, e1], [e0, eb], [e1, eb]]
    return ConfigStructure(configs, {e: rng.choice(labels) for e in (e0, e1, eb)})


def generate(params: GenParams) -> ConfigStructure:
    """A stable structure drawn according to ``params``; deterministic in the seed."""
    rng = _rng(params.seed, params.mode)
    labels = _alphabet(params.labels)
    if params.mode == "prime":
        n = rng.randint(min(1, params.max_events), params.max_events)
        return random_prime(rng, n, labels, params.causal_density, params.conflict_density)
    if params.mode == "gadget":
        g = max(1, min(params.gadgets, params.max_events // 3))
        if params.max_events < 3:
            raise GenerationError("gadget mode needs room for at least 3 events")
        rest = params.max_events - 3 * g
        s = random_prime(rng, rng.randint(0, rest), labels,
                         params.causal_density, params.conflict_density)
        for k in range(g):
            gadget = switch_gadget(rng, labels, f"g{k + 1}_")
            s = par(s, gadget) if rng.random() < 0.6 else choice(s, gadget)
        return s
    n = min(params.max_events, 4)
    ids = [f"e{i + 1}" for i in range(n)]
    for _ in range(params.attempts):
        family = {0} | {m for m in range(1, 1 << n) if rng.random() < 0.4}
        configs = [[ids[i] for i in range(n) if m >> i & 1] for m in family]
        used = {e for c in configs for e in c}
        s = ConfigStructure(configs, {e: rng.choice(labels) for e in sorted(used)})
        if validate(s).stable:
            return s
    raise GenerationError(f"no stable family found in {params.attempts} attempts")


# -- terms ------------------------------------------------------------------------

def random_term(rng: random.Random, budget: int, labels: list[str]):
    if budget <= 0:
        return Nil()
    if budget == 1:
        return Prefix(rng.choice(labels), Nil())
    op = rng.choice(("prefix", "prefix", "choice", "par"))
    if op == "prefix":
        return Prefix(rng.choice(labels), random_term(rng, budget - 1, labels))
    k = rng.randint(1, budget - 1)
    left, right = random_term(rng, k, labels), random_term(rng, budget - k, labels)
    return Choice(left, right) if op == "choice" else Par(left, right)


def sequentialise(t):
    """Replace every parallel composition ``P | Q`` by ``P`` followed by ``Q``."""
    if isinstance(t, Nil):
        return t
    if isinstance(t, Prefix):
        return Prefix(t.label, sequentialise(t.body))
    if isinstance(t, Choice):
        return Choice(sequentialise(t.left), sequentialise(t.right))
    return _then(sequentialise(t.left), sequentialise(t.right))


def _then(p, q):
    if isinstance(p, Nil):
        return q
    if isinstance(p, Prefix):
        return Prefix(p.label, _then(p.body, q))
    return Choice(_then(p.left, q), _then(p.right, q))


def commute(rng: random.Random, t):
    if isinstance(t, Nil):
        return t
    if isinstance(t, Prefix):
        return Prefix(t.label, commute(rng, t.body))
    left, right = commute(rng, t.left), commute(rng, t.right)
    if rng.random() < 0.5:
        left, right = right, left
    return type(t)(left, right)


# -- pairs ------------------------------------------------------------------------

PAIR_SHAPES = ("copy", "duplicate", "restrict", "sequential", "relabel", "independent",
               "commute", "stagger")


def stagger_term(rng: random.Random, budget: int, labels: list[str]):
    """``a.P | b.a.Q``: the same action concurrently at depths one and two."""
    a, b = rng.choice(labels), rng.choice(labels)
    k = rng.randint(0, max(0, budget - 3))
    return Par(Prefix(a, random_term(rng, k, labels)),
               Prefix(b, Prefix(a, random_term(rng, max(0, budget - 3 - k), labels))))


def _relabel(rng, s: ConfigStructure, labels) -> ConfigStructure:
    if not s.events:
        return s
    e = rng.choice(s.events)
    lab = dict(s.labelling)
    lab[e] = rng.choice(labels)
    return ConfigStructure(s.configurations, lab)


def generate_pair(params: GenParams, index: int, shape: str | None = None):
    """A pair of stable structures, each within ``max_events``; deterministic in (seed, index)."""
    for attempt in range(params.attempts):
        C, D, got = _pair(params, _rng(params.seed, "pair", index, attempt), shape)
        if max(len(C.events), len(D.events)) <= params.max_events:
            return C, D, got
    raise GenerationError(f"no pair within {params.max_events} events")


def _pair(params: GenParams, rng: random.Random, shape: str | None):
    labels = _alphabet(rng.randint(1, max(1, params.labels)))
    shape = shape or rng.choice(PAIR_SHAPES)
    if shape == "stagger":
        t = stagger_term(rng, rng.randint(3, max(3, params.max_events // 2 + 1)), labels)
        variant = rng.choice((commute(rng, t), Choice(t, sequentialise(t)), Choice(t, t),
                              Choice(t, commute(rng, t))))
        return translate(t), translate(variant), shape
    if shape in ("sequential", "commute") or (params.mode == "prime" and rng.random() < 0.5):
        t = random_term(rng, rng.randint(1, max(1, params.max_events // 2 + 1)), labels)
        base = translate(t)
        if shape == "sequential":
            other = Choice(t, sequentialise(t))
            return base, translate(other), shape
        if shape == "commute":
            return base, translate(commute(rng, t)), shape
    else:
        sub = GenParams(max_events=params.max_events, labels=params.labels,
                        causal_density=params.causal_density,
                        conflict_density=params.conflict_density,
                        seed=rng.randrange(2 ** 63), mode=params.mode,
                        attempts=params.attempts, gadgets=params.gadgets)
        base = generate(sub)
    half = max(1, params.max_events // 2)
    if shape == "copy":
        return base, rename(base, "c"), shape
    if shape == "duplicate":
        small = _shrink(rng, base, half)
        return small, choice(rename(small, "l"), rename(small, "r")), shape
    if shape == "restrict":
        small = _shrink(rng, base, half)
        if not small.events:
            return small, small, shape
        cut = restrict_avoiding(small, rng.choice(small.events))
        return small, choice(rename(small, "l"), rename(cut, "r")), shape
    if shape == "relabel":
        return base, _relabel(rng, base, labels), shape
    if shape == "independent":
        sub = GenParams(max_events=params.max_events, labels=params.labels,
                        causal_density=params.causal_density,
                        conflict_density=params.conflict_density,
                        seed=rng.randrange(2 ** 63), mode=params.mode)
        return base, generate(sub), shape
    return base, rename(base, "c"), "copy"


def _shrink(rng, s: ConfigStructure, n: int) -> ConfigStructure:
    """Drop events until at most ``n`` remain (keeps stability)."""
    while len(s.events) > n:
        s = restrict_avoiding(s, rng.choice(s.events))
    return s


# -- laws -------------------------------------------------------------------------

LAWS = ("rsb=rhsb", "rdb=rhesb=rsb", "hierarchy", "rb=hh-noeqac", "db<=sb", "labels-lemma",
        "min-lemma", "lift-lemma", "levels", "depth-match")
LAW_ALIASES = {"db⊆sb": "db<=sb"}

INCLUSIONS = (("hh", "rsb"), ("rsb", "rb"), ("rsb", "sb"), ("rb", "ib"), ("sb", "ib"),
              ("db", "sb"), ("rdb", "rsb"))


def _eq(kind: str, C, D) -> bool:
    return check(kind, C, D).equivalent


def law_violations(law: str, C: ConfigStructure, D: ConfigStructure) -> list[str]:
    """Evaluate one law on one pair; returns human-readable violations."""
    law = LAW_ALIASES.get(law, law)
    if law == "rsb=rhsb":
        a, b = _eq("rsb", C, D), _eq("rhsb", C, D)
        return [] if a == b else [f"rsb={a} but rhsb={b}"]
    if law == "rdb=rhesb=rsb":
        v = {k: _eq(k, C, D) for k in ("rdb", "rhesb", "rsb")}
        return [] if len(set(v.values())) == 1 else [f"verdicts differ: {v}"]
    if law == "hierarchy":
        v = {k.value: _eq(k.value, C, D) for k in Kind}
        return [f"{fine} holds but {coarse} fails" for fine, coarse in INCLUSIONS
                if v[fine] and not v[coarse]]
    if law == "rb=hh-noeqac":
        a, b = _eq("rb", C, D), _eq("hh", C, D)
        return [] if a == b else [f"rb={a} but hh={b}"]
    if law == "db<=sb":
        return ["db holds but sb fails"] if _eq("db", C, D) and not _eq("sb", C, D) else []
    if law == "labels-lemma":
        out = []
        full = maximal_bisimulation("rb", C, D, prefilter=False)
        for X, Y in full.pairs:
            if C.labels_of(X) != D.labels_of(Y):
                out.append(f"rb relates {sorted(X)} and {sorted(Y)} with different labels")
        for kind in ("rb", "rsb", "rhsb", "rhesb", "rdb"):
            if maximal_bisimulation(kind, C, D).pairs != maximal_bisimulation(
                    kind, C, D, prefilter=False).pairs:
                out.append(f"label prefilter changes the maximal {kind}")
        return out
    if law == "min-lemma":
        out = []
        for kind in ("rhsb", "rhesb"):
            R = maximal_bisimulation(kind, C, D)
            for X, Y in R.pairs:
                if (minimal_events(C, X), minimal_events(D, Y)) not in R.pairs:
                    out.append(f"{kind}: minimal parts of {sorted(X)}, {sorted(Y)} unrelated")
        return out
    if law == "lift-lemma":
        out = []
        for kind in ("rhsb", "rhesb"):
            R = maximal_bisimulation(kind, C, D)
            for M, N in R.pairs:
                if minimal_events(C, M) != M or minimal_events(D, N) != N:
                    continue
                lifted = lifted_relation(C, D, R.pairs, M, N)
                ok, why = verify_relation(kind, lift(C, M), lift(D, N), lifted)
                if not ok:
                    out.append(f"{kind}: lifting at {sorted(M)}, {sorted(N)}: {why}")
        return out
    if law == "levels":
        out = []
        R = maximal_bisimulation("rhesb", C, D)
        for X, Y in R.pairs:
            top = max(list(depths(C, X).values()) + list(depths(D, Y).values()) + [1])
            for n in range(1, top + 1):
                if (slice_leq(C, X, n), slice_leq(D, Y, n)) not in R.pairs:
                    out.append(f"level {n} cut of {sorted(X)}, {sorted(Y)} unrelated")
                if C.labels_of(slice_depths(C, X, n, n)) != D.labels_of(slice_depths(D, Y, n, n)):
                    out.append(f"level {n} labels of {sorted(X)}, {sorted(Y)} differ")
        return out
    if law == "depth-match":
        return depth_mismatches(C, D, maximal_bisimulation("rhesb", C, D).pairs)
    raise ValueError(f"unknown law {law!r}")


def lifted_relation(C, D, pairs, M, N) -> set:
    return {(X - M, Y - N) for X, Y in pairs
            if minimal_events(C, X) == M and minimal_events(D, Y) == N}


def depth_mismatches(C, D, pairs) -> list[str]:
    """Matched forward singles inside a relation that disagree on depth."""
    from .transitions import depth_singles
    out = []
    for X, Y in pairs:
        for mx in depth_singles(C, X):
            for my in depth_singles(D, Y):
                if mx.labels == my.labels and (mx.target, my.target) in pairs \
                        and mx.depth != my.depth:
                    out.append(f"{sorted(X)}, {sorted(Y)}: {mx.labels[0]} at depths "
                               f"{mx.depth} and {my.depth}")
    return out


@dataclass
class LawReport:
    law: str
    instances: int = 0
    violations: list = field(default_factory=list)  # dicts with both structures
    capacity_errors: int = 0
    elapsed_ms: float = 0.0
    stats: dict = field(default_factory=dict)

    def line(self) -> str:
        text = (f"LAW {self.law}: {self.instances} instances, {len(self.violations)} violations, "
                f"{self.elapsed_ms:.0f} ms")
        if self.capacity_errors:
            text += f" ({self.capacity_errors} capacity errors)"
        return text


def _no_equidepth_ac(s: ConfigStructure) -> bool:
    return not auto_concurrency(s).hasEquidepthAutoConcurrency


def corpus_pairs():
    for entry in corpus.entries():
        C, D = entry.structures()
        yield entry.name, C, D


def law_instances(law: str, params: GenParams, count: int, include_corpus: bool = True):
    """(name, C, D) triples for one law: the built-in corpus, then ``count`` generated pairs."""
    law = LAW_ALIASES.get(law, law)
    wanted = _no_equidepth_ac if law == "rb=hh-noeqac" else None
    if include_corpus:
        for name, C, D in corpus_pairs():
            if wanted is None or (wanted(C) and wanted(D)):
                yield name, C, D
    made = tried = 0
    while made < count:
        if tried > 50 * count + 100:
            raise GenerationError(f"could not find {count} suitable pairs for {law}")
        shape = "stagger" if law == "rb=hh-noeqac" and tried % 3 == 0 else None
        C, D, shape = generate_pair(params, tried, shape)
        tried += 1
        if wanted is not None and not (wanted(C) and wanted(D)):
            continue
        made += 1
        yield f"gen{tried - 1}-{shape}", C, D


def _evaluate(args):
    law, name, cdoc, ddoc = args
    C, D = ConfigStructure.from_dict(cdoc), ConfigStructure.from_dict(ddoc)
    try:
        found = law_violations(law, C, D)
        finding = law == "hierarchy" and _eq("rsb", C, D) and not _eq("hh", C, D)
        return name, found, None, finding
    except CapacityError as exc:
        return name, [], str(exc), False


def run_laws(laws, params: GenParams, count: int, include_corpus: bool = True,
             out_dir: Path | None = None, workers: int = 1) -> list[LawReport]:
    """Evaluate each law over the corpus and ``count`` generated pairs."""
    reports = []
    for law in laws:
        law = LAW_ALIASES.get(law, law)
        if law not in LAWS:
            raise ValueError(f"unknown law {law!r}")
        start = time.perf_counter()
        report = LawReport(law)
        jobs = [(law, name, C.to_dict(), D.to_dict())
                for name, C, D in law_instances(law, params, count, include_corpus)]
        if law == "rb=hh-noeqac":
            report.stats["autoConcurrent"] = sum(
                1 for _, _, c, d in jobs
                if auto_concurrency(ConfigStructure.from_dict(c)).hasAutoConcurrency
                or auto_concurrency(ConfigStructure.from_dict(d)).hasAutoConcurrency)
        if workers > 1:
            with ProcessPoolExecutor(workers) as pool:
                results = list(pool.map(_evaluate, jobs))
        else:
            results = [_evaluate(j) for j in jobs]
        if law == "hierarchy":
            # open question: is rsb as fine as hh?  Reported, not counted as a violation
            report.stats["rsbButNotHh"] = sum(1 for r in results if r[3])
        for (law_, name, cdoc, ddoc), (_, found, cap, _) in zip(jobs, results):
            report.instances += 1
            if cap is not None:
                report.capacity_errors += 1
                log.warning("%s on %s: %s", law, name, cap)
                continue
            if found:
                # re-run standalone on freshly loaded copies before reporting
                _, again, _, _ = _evaluate((law, name, cdoc, ddoc))
                if not again:
                    log.warning("%s on %s did not reproduce", law, name)
                    continue
                report.violations.append({"instance": name, "details": again,
                                          "left": cdoc, "right": ddoc})
                if out_dir is not None:
                    _write_counterexample(Path(out_dir), law, name, cdoc, ddoc)
        report.elapsed_ms = (time.perf_counter() - start) * 1000
        reports.append(report)
    return reports


def _write_counterexample(out_dir: Path, law: str, name: str, cdoc, ddoc) -> None:
    import json
    out_dir.mkdir(parents=True, exist_ok=True)
    stem = f"{law.replace('=', '_').replace('<', '_')}-{name}"
    (out_dir / f"{stem}-left.cs").write_text(json.dumps(cdoc, indent=1))
    (out_dir / f"{stem}-right.cs").write_text(json.dumps(ddoc, indent=1))
