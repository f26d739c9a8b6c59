"""Naive reference checkers, independent of the refinement engine.

Everything is recomputed from the definitions on plain frozensets: causality
by quantifying over sub-configurations, moves by comparing all configuration
pairs.  A bisimulation is searched for by growing candidate relations from
the root pair, branching over every possible answer to the first unanswered
obligation, and testing each completed candidate against the definition.
Only for tiny structures.
"""

from itertools import combinations, permutations

FORWARD_ONLY = {"ib", "sb", "db"}


class SearchBudgetExceeded(RuntimeError):
    pass


class Naive:
    def __init__(self, structure):
        self.configs = [frozenset(c) for c in structure.configurations]
        self.label = dict(structure.labelling)
        self._lt = {}
        self._tr = {}

    def lt(self, X):
        """Strict causal order of X as a set of pairs."""
        if X not in self._lt:
            subs = [Y for Y in self.configs if Y <= X]
            self._lt[X] = {(d, e) for d in X for e in X if d != e
                           and all(d in Y for Y in subs if e in Y)}
        return self._lt[X]

    def depth(self, X, e):
        below = [d for d, f in self.lt(X) if f == e]
        return 1 + max((self.depth(X, d) for d in below), default=0)

    def transitions(self, X, kind):
        """(direction, label key, target) triples from the definitions."""
        if (X, kind) in self._tr:
            return self._tr[(X, kind)]
        out = self._tr[(X, kind)] = []
        for Y in self.configs:
            for small, large, direction in ((X, Y, "fwd"), (Y, X, "rev")):
                if not (small < large):
                    continue
                E = large - small
                lt = self.lt(large)
                conc = all((d, e) not in lt for d in E for e in E)
                labels = tuple(sorted(self.label[e] for e in E))
                ds = {self.depth(large, e) for e in E}
                if kind == "single" and len(E) == 1:
                    out.append((direction, labels, large if direction == "fwd" else small))
                elif kind == "step" and conc:
                    out.append((direction, labels, large if direction == "fwd" else small))
                elif kind == "dsingle" and len(E) == 1:
                    out.append((direction, (labels, ds.pop()), large if direction == "fwd" else small))
                elif kind == "hstep" and conc and len(set(labels)) == 1:
                    out.append((direction, labels, large if direction == "fwd" else small))
                elif kind == "ehstep" and conc and len(set(labels)) == 1 and len(ds) == 1:
                    out.append((direction, labels, large if direction == "fwd" else small))
        return out


def moves_for(kind, naive, X):
    fwd, rev = {
        "ib": ("single", None), "sb": ("step", None), "db": ("dsingle", None),
        "rb": ("single", "single"), "rsb": ("step", "step"),
        "rhsb": ("single", "hstep"), "rhesb": ("single", "ehstep"),
        "rdb": ("dsingle", "dsingle"),
    }[kind]
    out = [(("fwd", fwd) + (k,), t) for d, k, t in naive.transitions(X, fwd) if d == "fwd"]
    if rev:
        out += [(("rev", rev) + (k,), t) for d, k, t in naive.transitions(X, rev) if d == "rev"]
    return out


def is_bisimulation(kind, nc, nd, R):
    if (frozenset(), frozenset()) not in R:
        return False
    for X, Y in R:
        mx, my = moves_for(kind, nc, X), moves_for(kind, nd, Y)
        for k, X2 in mx:
            if not any(k == j and (X2, Y2) in R for j, Y2 in my):
                return False
        for k, Y2 in my:
            if not any(k == j and (X2, Y2) in R for j, X2 in mx):
                return False
    return True


def _search(root, obligations, accept, budget):
    """Depth-first growth of candidate relations; returns one accepted relation or None."""
    failed = set()
    spent = 0

    def go(R):
        nonlocal spent
        spent += 1
        if spent > budget:
            raise SearchBudgetExceeded(f"naive search exceeded {budget} candidates")
        if R in failed:
            return None
        for p in sorted(R, key=repr):
            for options in obligations(p):
                if any(o in R for o in options):
                    continue
                for o in sorted(options, key=repr):
                    found = go(R | {o})
                    if found is not None:
                        return found
                failed.add(R)
                return None
        return R if accept(R) else None

    return go(frozenset([root]))


def naive_equivalent(kind, C, D, budget=200_000):
    """Is there a bisimulation of ``kind`` (any kind but ``hh``) between C and D?"""
    nc, nd = Naive(C), Naive(D)

    def obligations(p):
        X, Y = p
        mx, my = moves_for(kind, nc, X), moves_for(kind, nd, Y)
        for k, X2 in mx:
            yield [(X2, Y2) for j, Y2 in my if j == k]
        for k, Y2 in my:
            yield [(X2, Y2) for j, X2 in mx if j == k]

    empty = frozenset()
    found = _search((empty, empty), obligations,
                    lambda R: is_bisimulation(kind, nc, nd, R), budget)
    return found is not None


def naive_isomorphisms(nc, X, nd, Y):
    """All label- and order-preserving bijections X -> Y, by permutation."""
    if len(X) != len(Y):
        return []
    xs, out = sorted(X), []
    ltx, lty = nc.lt(X), nd.lt(Y)
    for image in permutations(sorted(Y)):
        f = dict(zip(xs, image))
        if any(nc.label[d] != nd.label[f[d]] for d in xs):
            continue
        if all(((d1, d2) in ltx) == ((f[d1], f[d2]) in lty) for d1 in xs for d2 in xs):
            out.append(frozenset(f.items()))
    return out


def is_hh_bisimulation(nc, nd, R):
    empty = frozenset()
    if (empty, empty, empty) not in R:
        return False
    for X, Y, f in R:
        if f not in naive_isomorphisms(nc, X, nd, Y):
            return False
        for ok in _hh_clauses(nc, nd, R, X, Y, f):
            if not ok:
                return False
    return True


def _hh_answers(nc, nd, X, Y, f):
    """Attacker moves at (X, Y, f), each with its list of legal answer triples."""
    fd = dict(f)
    inv = {e: d for d, e in f}
    fx = [(k, X2) for d, k, X2 in nc.transitions(X, "single") if d == "fwd"]
    fy = [(k, Y2) for d, k, Y2 in nd.transitions(Y, "single") if d == "fwd"]
    for k, X2 in fx:
        (d,) = X2 - X
        yield [(X2, Y2, f | {(d, e)}) for j, Y2 in fy if j == k for e in Y2 - Y
               if f | {(d, e)} in naive_isomorphisms(nc, X2, nd, Y2)]
    for k, Y2 in fy:
        (e,) = Y2 - Y
        yield [(X2, Y2, f | {(d, e)}) for j, X2 in fx if j == k for d in X2 - X
               if f | {(d, e)} in naive_isomorphisms(nc, X2, nd, Y2)]
    for d, k, X2 in nc.transitions(X, "single"):
        if d == "rev":
            (x,) = X - X2
            Y2 = Y - {fd[x]}
            yield [(X2, Y2, frozenset(p for p in f if p[0] != x))] if Y2 in nd.configs else []
    for d, k, Y2 in nd.transitions(Y, "single"):
        if d == "rev":
            (y,) = Y - Y2
            X2 = X - {inv[y]}
            yield [(X2, Y2, frozenset(p for p in f if p[1] != y))] if X2 in nc.configs else []


def _hh_clauses(nc, nd, R, X, Y, f):
    for options in _hh_answers(nc, nd, X, Y, f):
        yield any(o in R for o in options)


def naive_hh_equivalent(C, D, budget=200_000):
    nc, nd = Naive(C), Naive(D)
    empty = frozenset()
    found = _search((empty, empty, empty), lambda p: _hh_answers(nc, nd, *p),
                    lambda R: is_hh_bisimulation(nc, nd, R), budget)
    return found is not None


def naive_stable(structure):
    """The four axioms, straight from their statement."""
    C = [frozenset(c) for c in structure.configurations]
    S = set(C)
    if frozenset() not in S:
        return False
    if any(X and not any(X - {e} in S for e in X) for X in C):
        return False
    for X, Y in combinations(C, 2):
        if any(X | Y <= Z for Z in C) and (X | Y not in S or X & Y not in S):
            return False
    return True
