"""Treebank statistics and the inductive judgement.

A treebank is collapsed into mother-daughter-frequency triples.  Local trees
are scored by the geometric mean of per-daughter lookup scores (times the
daughter's own subtree score for interior daughters); unseen pairs get the
smoothing score delta.  A super-rule instantiation is accepted when the
geometric mean of its score and its daughters' scores exceeds omega.  Scores
are similarities, not probabilities.
"""

from __future__ import annotations

from .fs import Category, FS, MalformedSyntax, expand, print_fs, unify, unify_cat
from .grammar import strip_comment

DEFAULT_DELTA = 0.001
DEFAULT_OMEGA = 0.35


class Triple:
    __slots__ = ("mother", "daughter", "freq")

    def __init__(self, mother, daughter, freq=1):
        if freq < 1:
            raise ValueError("triple frequency must be positive")
        self.mother = mother  # FS, non-disjunctive
        self.daughter = daughter
        self.freq = freq

    def __repr__(self):
        return "Triple(%s, %s, %d)" % (print_fs(self.mother), print_fs(self.daughter), self.freq)


class TripleStore:
    def __init__(self, delta=DEFAULT_DELTA, omega=DEFAULT_OMEGA):
        # the working invariant is 0 < delta < omega < 1; omega may be pushed
        # to its closed bounds to probe always-accept / always-reject
        if not 0 < delta < 1:
            raise ValueError("delta must lie in (0,1)")
        if not 0 <= omega <= 1:
            raise ValueError("omega must lie in [0,1]")
        self.delta = delta
        self.omega = omega
        self.triples = []
        self._index = {}
        self._cache = {}
        self.total = 0

    def add(self, mother, daughter, freq=1):
        key = (mother, daughter)  # structural equality coincides with `equal`
        triple = self._index.get(key)
        if triple is None:
            triple = Triple(mother, daughter, freq)
            self._index[key] = triple
            self.triples.append(triple)
        else:
            triple.freq += freq
        self.total += freq
        self._cache = {}

    def lookup(self, a, b):
        """Summed frequency of triples unifiable with the pair, over the
        grand total; delta when no triple matches (or the store is empty)."""
        if self.total == 0:
            return self.delta
        key = (_cache_key(a), _cache_key(b))
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        acc = 0
        for t in self.triples:
            if _compatible(t.mother, a) and _compatible(t.daughter, b):
                acc += t.freq
        got = acc / self.total if acc else self.delta
        self._cache[key] = got
        return got

    def save(self, path, registry=None):
        with open(path, "w", encoding="utf-8") as f:
            f.write("params delta %r omega %r\n" % (self.delta, self.omega))
            for t in self.triples:
                f.write(
                    "triple %s %s %d\n"
                    % (print_fs(t.mother, registry), print_fs(t.daughter, registry), t.freq)
                )

    @classmethod
    def load(cls, path, registry):
        store = cls()
        with open(path, encoding="utf-8") as f:
            for line in f:
                line = strip_comment(line).strip()
                if not line:
                    continue
                if line.startswith("params "):
                    words = line.split()
                    params = dict(zip(words[1::2], words[2::2]))
                    delta = float(params.get("delta", DEFAULT_DELTA))
                    omega = float(params.get("omega", DEFAULT_OMEGA))
                    if not delta < omega:
                        raise MalformedSyntax("triple files need delta < omega")
                    store = cls(delta, omega)
                elif line.startswith("triple "):
                    body = line[7:].strip()
                    cats, freq = _parse_triple_body(body, registry)
                    store.add(cats[0], cats[1], freq)
                else:
                    raise MalformedSyntax("unknown triple line: %r" % line)
        return store


def _parse_triple_body(body, registry):
    from . import fs as fsmod

    tokens = fsmod._tokenize(body)
    parser = fsmod._Parser(tokens, registry, False, None)
    cats = [parser.category(), parser.category()]
    if parser.i != len(tokens) - 1:
        raise MalformedSyntax("triple line needs two categories and a count: %r" % body)
    kind, text = tokens[parser.i]
    if kind != "atom" or not text.isdigit():
        raise MalformedSyntax("triple count must be an integer: %r" % body)
    fss = []
    for c in cats:
        if len(c) != 1:
            raise MalformedSyntax("triple categories are non-disjunctive: %r" % body)
        fss.append(c.disjuncts[0])
    return fss, int(text)


def _cache_key(c):
    return c if isinstance(c, FS) else c.disjuncts


def _compatible(t_fs, c):
    if isinstance(c, FS):
        return unify(t_fs, c) is not None
    return not unify_cat(Category((t_fs,)), c).is_bottom


def lookup(store, a, b):
    return store.lookup(a, b)


# -- decomposition ----------------------------------------------------------


def decompose(tree):
    """Mother-daughter pairs of every local tree, preorder; daughters that
    are lexical tokens contribute their (preterminal) category, below which
    nothing is produced."""
    pairs = []

    def rec(node):
        if node.is_leaf:
            return
        m = _single(node.cat)
        for child in node.children:
            pairs.append((m, _single(child.cat)))
        for child in node.children:
            rec(child)

    rec(tree)
    return pairs


def _single(cat):
    if isinstance(cat, FS):
        return cat
    if cat.is_bottom:
        raise ValueError("bottom category in a tree")
    return cat.disjuncts[0]


def train(store, trees):
    """Merge the decomposed pairs of whole parse trees into the store."""
    for tree in trees:
        for m, d in decompose(tree):
            store.add(m, d)


def train_local_trees(store, locals_):
    """Merge one-level local trees (mother category, daughter categories)."""
    for mother, daughters in locals_:
        m = _single(mother)
        for d in daughters:
            store.add(m, _single(d))


# -- scoring -----------------------------------------------------------------


def geo_mean(values):
    if not values:
        return 1.0
    prod = 1.0
    for v in values:
        prod *= v
    return prod ** (1.0 / len(values))


def score_local(store, mother, daughters, registry=None, cap=64, on_cap=None):
    """Score of a one-level local tree.

    `daughters` is a sequence of (category, subtree score or None); lexical
    (preterminal) daughters carry None and contribute lookup alone, interior
    daughters contribute lookup times their subtree score.  A disjunctive
    node scores as the maximum over its non-disjunctive expansions.
    """
    if isinstance(mother, FS):
        mother = Category((mother,))
    silent = on_cap if on_cap is not None else (lambda n: None)
    m_exps = expand(mother, registry, cap, silent)
    d_exps = [expand(_as_cat(c), registry, cap, silent) for c, _ in daughters]
    best = 0.0
    seen = 0
    total = len(m_exps)
    for exps in d_exps:
        total *= len(exps)
    if cap is not None and total > cap:
        silent(total)  # the max runs over the enumerated prefix only
    for m in m_exps:
        for combo in _product(d_exps):
            factors = []
            for (cat, sub), d in zip(daughters, combo):
                f = store.lookup(m, d)
                if sub is not None:
                    f *= sub
                factors.append(f)
            best = max(best, geo_mean(factors))
            seen += 1
            if cap is not None and seen >= cap:
                return best
    return best


def _as_cat(c):
    return Category((c,)) if isinstance(c, FS) else c


def _product(lists):
    import itertools

    return itertools.product(*lists)


def score_tree(store, tree, registry=None, cap=64):
    """Recursive tree score: every daughter's subtree is scored first and
    feeds its parent's local score."""
    if tree.is_leaf:
        return None
    daughters = [(child.cat, score_tree(store, child, registry, cap)) for child in tree.children]
    return score_local(store, tree.cat, daughters, registry, cap)


def judge(store, mother, daughters, registry=None, cap=64, on_cap=None):
    """Acceptance test for a super-rule instantiation: the geometric mean of
    the local tree's score and its interior daughters' scores must exceed
    omega."""
    local = score_local(store, mother, daughters, registry, cap, on_cap)
    outer = [local] + [s for _, s in daughters if s is not None]
    return geo_mean(outer) > store.omega
