"""Rules, the original/learnt grammar partition, lexica and paraphrase labels.

A rule is stored as a disjunction of "instance" structures: wrapper feature
structures with one slot per rule position (*LHS*, *R1*, *R2*).  Reentrancy
between the left-hand side and the daughters is then ordinary node sharing
inside one instance, and instantiating a daughter during parsing narrows the
left-hand side for free.
"""

from __future__ import annotations

import re

from . import fs as fsmod
from .fs import (
    Category,
    EMPTY_CAT,
    FS,
    FSError,
    MalformedSyntax,
    fs_from_pairs,
    parse_fs,
    simplify,
    subsumes_cat,
)

LHS = "*LHS*"


def slot(i):
    return "*R%d*" % i


ORIGINAL = "original"
LEARNT = "learnt"
SUPER_UNARY = "super-unary"
SUPER_BINARY = "super-binary"

_COMMENT = re.compile(r"#(?!\d)")


def strip_comment(line):
    """Drop a '#' comment; '#<digits>' is a reentrancy tag, not a comment."""
    m = _COMMENT.search(line)
    return line[: m.start()] if m else line


class GrammarError(FSError):
    pass


class SupportRecord:
    """Daughter context a learnt rule was acquired under."""

    __slots__ = ("mother", "daughters")

    LEXICAL = "<lex>"

    def __init__(self, mother, daughters):
        self.mother = mother
        self.daughters = tuple(daughters)

    def __repr__(self):
        return "SupportRecord(%r, %r)" % (self.mother, self.daughters)


class Rule:
    def __init__(self, rule_id, arity, instances, origin=ORIGINAL, support=None):
        if not 1 <= arity <= 2 and origin != ORIGINAL:
            raise GrammarError("learnt rules are unary or binary")
        self.id = rule_id
        self.arity = arity
        self.instances = tuple(instances)  # tuple of wrapper FS
        self.origin = origin
        self.support = support

    @property
    def is_super(self):
        return self.origin in (SUPER_UNARY, SUPER_BINARY)

    @property
    def lhs(self):
        return simplify(Category([inst.get(LHS) or FS.empty() for inst in self.instances]))

    def rhs(self, i):
        out = []
        for inst in self.instances:
            v = inst.get(slot(i))
            out.append(v if isinstance(v, FS) else FS.empty())
        return simplify(Category(out))

    @property
    def rhs_cats(self):
        return tuple(self.rhs(i) for i in range(1, self.arity + 1))

    def __repr__(self):
        return "Rule(%s)" % self.id


def make_rule(rule_id, lhs_cat, rhs_cats, origin=ORIGINAL, support=None):
    """Build a rule from plain categories (no cross-position sharing)."""
    if lhs_cat.is_bottom or any(c.is_bottom for c in rhs_cats):
        raise GrammarError("rule %s has an inconsistent category" % rule_id)
    instances = []
    for ld in lhs_cat.disjuncts:
        combos = [[ld]]
        for c in rhs_cats:
            combos = [prev + [d] for prev in combos for d in c.disjuncts]
        for combo in combos:
            pairs = [(LHS, combo[0])]
            pairs.extend((slot(i), d) for i, d in enumerate(combo[1:], start=1))
            instances.append(fs_from_pairs(pairs))
    return Rule(rule_id, len(rhs_cats), instances, origin, support)


def super_rule(arity):
    origin = SUPER_UNARY if arity == 1 else SUPER_BINARY
    cats = [EMPTY_CAT] * arity
    rule = make_rule("*super-%s*" % ("unary" if arity == 1 else "binary"), EMPTY_CAT, cats, origin)
    return rule


def rule_subsumes(r, s):
    """r covers s: same arity, LHS covers positionally and per RHS slot."""
    if r.arity != s.arity:
        return False
    if not subsumes_cat(r.lhs, s.lhs):
        return False
    return all(subsumes_cat(r.rhs(i), s.rhs(i)) for i in range(1, r.arity + 1))


class Grammar:
    """The original rule set and the learnt rule set, over one registry."""

    def __init__(self, registry, max_bar=None):
        self.registry = registry
        self.original = []
        self.learnt = []
        self._by_id = {}
        self._learn_counter = 0
        if max_bar is None and registry.has_feature("BAR"):
            max_bar = max(int(v) for v in registry.values_of("BAR"))
        self.max_bar = 1 if max_bar is None else max_bar

    def __contains__(self, rule_id):
        return rule_id in self._by_id

    def rule(self, rule_id):
        return self._by_id[rule_id]

    @property
    def rules(self):
        return self.original + self.learnt

    def add_original(self, rule):
        if rule.id in self._by_id:
            raise GrammarError("duplicate rule id %r" % rule.id)
        self.original.append(rule)
        self._by_id[rule.id] = rule

    def next_learnt_id(self, arity):
        self._learn_counter += 1
        return "*%s%d" % ("unary" if arity == 1 else "binary", self._learn_counter)

    def add_learnt(self, rule, support=None):
        """Retain rule unless some existing non-super rule subsumes it."""
        for existing in self.rules:
            if rule_subsumes(existing, rule):
                return False
        if rule.id in self._by_id:
            base = rule.id
            n = 2
            while "%s_%d" % (base, n) in self._by_id:
                n += 1
            rule = Rule(
                "%s_%d" % (base, n), rule.arity, rule.instances, rule.origin, rule.support
            )
        if support is not None:
            rule.support = support
        self.learnt.append(rule)
        self._by_id[rule.id] = rule
        return True

    def remove_learnt(self, rule_id):
        rule = self._by_id.pop(rule_id)
        self.learnt.remove(rule)

    def replace_learnt(self, rule_id, new_rule):
        idx = self.learnt.index(self._by_id[rule_id])
        self.learnt[idx] = new_rule
        self._by_id[rule_id] = new_rule

    def subsumer_of(self, rule):
        for existing in self.rules:
            if rule_subsumes(existing, rule):
                return existing
        return None

    # -- persistence ----------------------------------------------------------

    def save_learnt(self, path):
        with open(path, "w", encoding="utf-8") as f:
            f.write("# learnt rules\n")
            for rule in self.learnt:
                f.write(format_rule(rule, self.registry) + "\n")

    def load_rules(self, path, origin=ORIGINAL):
        with open(path, encoding="utf-8") as f:
            for line in f:
                line = strip_comment(line).strip()
                if not line:
                    continue
                rule = parse_rule_line(line, self.registry, origin)
                if origin == ORIGINAL:
                    self.add_original(rule)
                else:
                    self.learnt.append(rule)
                    self._by_id[rule.id] = rule


def format_rule(rule, registry=None):
    if len(rule.instances) == 1:
        feats = [LHS] + [slot(i) for i in range(1, rule.arity + 1)]
        parts = fsmod.print_parts(rule.instances[0], feats, registry)
        texts = [parts[f] for f in feats]
        if not any(t.startswith("#") for t in texts):
            return "rule %s : %s -> %s" % (rule.id, texts[0], " ".join(texts[1:]))
    # disjunctive (or degenerate) rules: print category-wise with one running
    # tag numbering, since the whole line is a single tag scope on re-load
    printer = fsmod._Printer(registry)
    lhs_text = printer.cat_text(rule.lhs)
    rhs_texts = [printer.cat_text(rule.rhs(i)) for i in range(1, rule.arity + 1)]
    return "rule %s : %s -> %s" % (rule.id, lhs_text, " ".join(rhs_texts))


def parse_rule_line(line, registry, origin=ORIGINAL):
    if not line.startswith("rule "):
        raise MalformedSyntax("rule lines start with 'rule': %r" % line)
    head, _, body = line[5:].partition(":")
    name = head.strip()
    if not name:
        raise MalformedSyntax("rule needs a name: %r" % line)
    left, arrow, right = body.partition("->")
    if not arrow:
        raise MalformedSyntax("rule needs '->': %r" % line)
    left = left.strip()
    tags = {}
    lhs = parse_fs(left, registry, tags=tags)  # validates against the registry
    rhs, rhs_texts = _parse_cat_sequence(right.strip(), registry, tags)
    if not rhs:
        raise MalformedSyntax("rule needs at least one RHS category: %r" % line)
    if len(lhs) == 1 and all(len(c) == 1 for c in rhs):
        # reparse the whole line as one wrapper structure so that tag sharing
        # between positions lands in a single graph
        wrapper = "[%s %s, %s]" % (
            LHS,
            left,
            ", ".join("%s %s" % (slot(i), t) for i, t in enumerate(rhs_texts, start=1)),
        )
        composite = parse_fs(wrapper, None).disjuncts[0]
        return Rule(name, len(rhs), (composite,), origin)
    # disjunctive rules have no cross-position sharing in the text format
    return make_rule(name, lhs, rhs, origin)


def _parse_cat_sequence(text, registry, tags):
    tokens = fsmod._tokenize(text)
    parser = fsmod._Parser(tokens, registry, False, tags)
    cats = []
    texts = []
    while parser.i < len(tokens):
        start = parser.i
        cats.append(parser.category())
        texts.append(" ".join(tok for _, tok in tokens[start : parser.i]))
    return cats, texts


class Lexicon:
    """Terminal -> feature structures, in file order."""

    def __init__(self, registry):
        self.registry = registry
        self.entries = {}
        self._order = []

    def add(self, terminal, fs):
        if terminal not in self.entries:
            self.entries[terminal] = []
            self._order.append(terminal)
        self.entries[terminal].append(fs)

    @property
    def terminals(self):
        return tuple(self._order)

    def lexical_categories(self, terminal):
        return tuple(self.entries.get(terminal, ()))

    def lookup_token(self, token):
        """Entries for a token, falling back to its lower-cased form (corpus
        lines capitalize sentence-initial words)."""
        got = self.lexical_categories(token)
        if not got and token.lower() != token:
            got = self.lexical_categories(token.lower())
        return got

    @classmethod
    def load(cls, path, registry):
        lex = cls(registry)
        with open(path, encoding="utf-8") as f:
            for line in f:
                line = strip_comment(line).strip()
                if not line:
                    continue
                if not line.startswith("lex "):
                    raise MalformedSyntax("lexicon lines start with 'lex': %r" % line)
                head, _, body = line[4:].partition(":")
                terminal = head.strip()
                cat = parse_fs(body.strip(), registry)
                for d in cat.disjuncts:
                    lex.add(terminal, d)
        return lex


class UnknownTerminal(GrammarError):
    pass


class ParaphraseEntry:
    __slots__ = ("pattern", "name", "bar_suffix", "phrasal")

    def __init__(self, pattern, name, bar_suffix=False, phrasal=None):
        self.pattern = pattern  # FS
        self.name = name
        self.bar_suffix = bar_suffix
        self.phrasal = phrasal


class ParaphraseMap:
    """Ordered (pattern, atomic label) pairs for display and normalization."""

    def __init__(self, entries=(), bar_feature="BAR"):
        self.entries = list(entries)
        self.bar_feature = bar_feature

    def paraphrase(self, d, promote=True):
        """Atomic label for a feature structure; "X" when nothing matches."""
        for entry in self.entries:
            if not fsmod.subsumes(entry.pattern, d):
                continue
            name = entry.name
            bar = _bar_level(d, self.bar_feature)
            if entry.bar_suffix and bar is not None:
                name = "%s%d" % (name, bar)
            if promote and entry.phrasal and bar is not None and bar > 1:
                name = entry.phrasal
            return name
        return "X"

    def paraphrase_cat(self, c, promote=True):
        if c.is_bottom:
            return "⊥"
        labels = []
        for d in c.disjuncts:
            label = self.paraphrase(d, promote)
            if label not in labels:
                labels.append(label)
        if len(labels) == 1:
            return labels[0]
        return "{" + ",".join(labels) + "}"

    def paraphrase_rule(self, rule, promote=False):
        rhs = " ".join(self.paraphrase_cat(rule.rhs(i), promote) for i in range(1, rule.arity + 1))
        return "%s -> %s" % (self.paraphrase_cat(rule.lhs, promote), rhs)

    @classmethod
    def load(cls, path, registry):
        entries = []
        with open(path, encoding="utf-8") as f:
            for line in f:
                line = strip_comment(line).strip()
                if not line:
                    continue
                if not line.startswith("label "):
                    raise MalformedSyntax("label lines start with 'label': %r" % line)
                body, _, right = line[6:].partition("->")
                if not right:
                    raise MalformedSyntax("label line needs '->': %r" % line)
                pattern = parse_fs(body.strip(), registry, pattern=True)
                if len(pattern) != 1:
                    raise MalformedSyntax("label patterns are non-disjunctive: %r" % line)
                words = right.strip().split()
                name = words[0]
                bar_suffix = "bar" in words[1:]
                phrasal = None
                if "phrasal" in words[1:]:
                    at = words.index("phrasal")
                    if at + 1 >= len(words):
                        raise MalformedSyntax("'phrasal' needs a name: %r" % line)
                    phrasal = words[at + 1]
                entries.append(ParaphraseEntry(pattern.disjuncts[0], name, bar_suffix, phrasal))
        return cls(entries)


def _bar_level(d, bar_feature="BAR"):
    v = d.get(bar_feature)
    if isinstance(v, str):
        return int(v) if v.isdigit() else None
    if isinstance(v, frozenset):
        digits = [int(x) for x in v if x.isdigit()]
        return max(digits) if digits else None
    return None
