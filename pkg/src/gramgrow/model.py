"""The model of grammaticality: linear precedence, semantic types, HFC.

Each principle is permissive about its own incompleteness: a check passes
unless it can prove the daughters implausible.
"""

from __future__ import annotations

from .fs import Category, FS, MalformedSyntax, WILDCARD, expand, parse_fs, subsumes
from .grammar import strip_comment

E = "e"
T = "t"


class Pattern:
    """A feature-structure pattern; values may be the wildcard '*', and the
    whole pattern may be negated."""

    __slots__ = ("fs", "negated", "text")

    def __init__(self, fs, negated=False, text=""):
        self.fs = fs
        self.negated = negated
        self.text = text

    def __repr__(self):
        return "Pattern(%s)" % self.text


def parse_pattern(text, registry):
    raw = text.strip()
    negated = raw.startswith("~")
    body = raw[1:].strip() if negated else raw
    cat = parse_fs(body, registry, pattern=True)
    if len(cat) != 1:
        raise MalformedSyntax("patterns are non-disjunctive: %r" % text)
    return Pattern(cat.disjuncts[0], negated, raw)


def _value_compatible(pval, dval, presence):
    if pval == WILDCARD:
        return True
    if isinstance(pval, str):
        if isinstance(dval, str):
            return pval == dval
        if isinstance(dval, frozenset):
            return pval in dval
        return dval is None  # unconstrained shared node
    if isinstance(pval, frozenset):
        if isinstance(dval, str):
            return dval in pval
        if isinstance(dval, frozenset):
            return bool(pval & dval)
        return dval is None
    if isinstance(pval, FS):
        if isinstance(dval, FS):
            return _fs_matches(pval, dval, presence)
        return dval is None and not presence
    return True


def _fs_matches(pfs, d, presence):
    """presence=True: every pattern feature must be present in d and
    compatible.  presence=False: mere unifiability (absent features allowed)."""
    for feat in pfs.root_features:
        dval = d.get(feat, "\0missing")
        if dval == "\0missing":
            if presence:
                return False
            continue
        if not _value_compatible(pfs.get(feat), dval, presence):
            return False
    return True


def match(p, c):
    """LP-style pattern match: pattern features must be PRESENT in the
    category; a negated pattern matches when the positive part does not."""
    disjuncts = c.disjuncts if isinstance(c, Category) else (c,)
    positive = any(_fs_matches(p.fs, d, presence=True) for d in disjuncts)
    return not positive if p.negated else positive


def compatible(p, c):
    """TYP-style match: unifiability (absent features are no obstacle)."""
    disjuncts = c.disjuncts if isinstance(c, Category) else (c,)
    return any(_fs_matches(p.fs, d, presence=False) for d in disjuncts)


class LPRule:
    __slots__ = ("name", "left", "right")

    def __init__(self, name, left, right):
        self.name = name
        self.left = left
        self.right = right

    def __repr__(self):
        return "LPRule(%s: %s < %s)" % (self.name, self.left.text, self.right.text)


def lp_check(rhs, lp_rules):
    """False iff some daughter that matches a rule's right side precedes a
    daughter matching its left side."""
    if len(rhs) < 2:
        return True
    for rule in lp_rules:
        for i in range(len(rhs)):
            if not match(rule.right, rhs[i]):
                continue
            for j in range(i + 1, len(rhs)):
                if match(rule.left, rhs[j]):
                    return False
    return True


def violated_lp(rhs, lp_rules):
    out = []
    for rule in lp_rules:
        if not lp_check(rhs, [rule]):
            out.append(rule.name)
    return out


# -- semantic types ----------------------------------------------------------


def parse_type(text):
    """Type expression: e | t | <TYPE,TYPE>."""
    expr, rest = _parse_type(text.strip())
    if rest.strip():
        raise MalformedSyntax("trailing input in type: %r" % text)
    return expr


def _parse_type(s):
    s = s.lstrip()
    if not s:
        raise MalformedSyntax("empty type expression")
    if s[0] in ("e", "E", "t", "T"):
        return s[0].lower(), s[1:]
    if s[0] == "<":
        arg, rest = _parse_type(s[1:])
        rest = rest.lstrip()
        if not rest.startswith(","):
            raise MalformedSyntax("expected ',' in type: %r" % s)
        res, rest = _parse_type(rest[1:])
        rest = rest.lstrip()
        if not rest.startswith(">"):
            raise MalformedSyntax("expected '>' in type: %r" % s)
        return (arg, res), rest[1:]
    raise MalformedSyntax("bad type expression: %r" % s)


def format_type(t):
    if isinstance(t, tuple):
        return "<%s,%s>" % (format_type(t[0]), format_type(t[1]))
    return t


def apply_type(f, a):
    """Functional application: <x,y> applied to x gives y; else undefined."""
    if isinstance(f, tuple) and f[0] == a:
        return f[1]
    return None


class TypeMap:
    """Ordered (pattern, type) rows extensionally defining a partial typing."""

    def __init__(self, rows=()):
        self.rows = list(rows)  # (Pattern, type)

    def lookup(self, d):
        """Type of the most specific matching row, or None."""
        hits = [(i, pat, typ) for i, (pat, typ) in enumerate(self.rows) if compatible(pat, d)]
        if not hits:
            return None
        best = []
        for i, pat, typ in hits:
            general = any(
                subsumes(pat.fs, other.fs) and not subsumes(other.fs, pat.fs)
                for j, other, _ in hits
                if j != i
            )
            if not general:
                best.append((i, typ))
        if not best:
            best = [(hits[0][0], hits[0][2])]
        return min(best)[1]


def typ_lookup(tm, d):
    return tm.lookup(d)


def type_check(rhs, tm, registry=None, cap=64):
    """Daughters co-occur if some expansion pair's types apply in either
    direction, or either type is undefined."""
    if len(rhs) < 2:
        return True
    first = _expansions(rhs[0], registry, cap)
    second = _expansions(rhs[1], registry, cap)
    for e1 in first:
        t1 = tm.lookup(e1)
        if t1 is None:
            return True
        for e2 in second:
            t2 = tm.lookup(e2)
            if t2 is None:
                return True
            if apply_type(t1, t2) is not None or apply_type(t2, t1) is not None:
                return True
    return False


def _expansions(c, registry, cap):
    if isinstance(c, FS):
        c = Category((c,))
    return expand(c, registry, cap, on_cap=lambda n: None)


# -- head feature convention ---------------------------------------------------


def hfc_check(rule, cfg):
    """A rule obeys the HFC if some LHS disjunct shares all head features with
    some daughter and carries no non-head feature besides BAR."""
    head_ok = lambda feat: feat not in cfg.nonhead or feat == cfg.bar_feature
    for inst in rule.instances:
        lhs = inst.get(LHS_FEAT) or FS.empty()
        if not all(head_ok(f) for f in lhs.root_features):
            continue
        for i in range(1, rule.arity + 1):
            d = inst.get(SLOT_FMT % i)
            if not isinstance(d, FS):
                continue
            if _agrees_on_head_features(lhs, d, cfg):
                return True
    return False


LHS_FEAT = "*LHS*"
SLOT_FMT = "*R%d*"


def _agrees_on_head_features(lhs, d, cfg):
    feats = set(lhs.root_features) | set(d.root_features)
    for f in feats:
        if f in cfg.nonhead:  # BAR included: exempt from agreement
            continue
        a = lhs.get(f, "\0missing")
        b = d.get(f, "\0missing")
        if a == "\0missing" or b == "\0missing":
            if a != b:
                return False
            continue
        if not _value_equal(a, b):
            return False
    return True


def _value_equal(a, b):
    if isinstance(a, FS) and isinstance(b, FS):
        return a == b
    return a == b


# -- the conjoined critic -------------------------------------------------------


class ModelConfig:
    def __init__(self, lp_rules, typemap, xbar, lp_on=True, types_on=True, hfc_on=True):
        self.lp_rules = lp_rules
        self.typemap = typemap
        self.xbar = xbar
        self.lp_on = lp_on
        self.types_on = types_on
        self.hfc_on = hfc_on


class Reject:
    __slots__ = ("reasons",)

    def __init__(self, reasons):
        self.reasons = tuple(reasons)

    def __bool__(self):
        return False

    def __repr__(self):
        return "Reject(%s)" % ", ".join(self.reasons)


ACCEPT = True


def criticise_rhs(rhs, model, registry=None, lp_on=None, types_on=None):
    """Conjunction of the enabled principle checks over an instantiated RHS.

    The flag arguments override the model's own switches (the model object
    stays read-only and shareable).  Returns True or a Reject listing every
    failed principle.
    """
    lp_on = model.lp_on if lp_on is None else lp_on
    types_on = model.types_on if types_on is None else types_on
    reasons = []
    if lp_on and not lp_check(rhs, model.lp_rules):
        reasons.append("lp:" + ",".join(violated_lp(rhs, model.lp_rules)))
    if types_on and not type_check(rhs, model.typemap, registry):
        reasons.append("type")
    if reasons:
        return Reject(reasons)
    return ACCEPT


# -- model files -----------------------------------------------------------------


def load_model(path, registry, max_bar=None, hfc=False):
    """Model file: 'lp NAME : P < P', 'type P : TYPE', 'nonhead F1 F2 ...'."""
    from .constructor import DEFAULT_NONHEAD, XBarConfig

    lp_rules = []
    rows = []
    nonhead = DEFAULT_NONHEAD
    with open(path, encoding="utf-8") as f:
        for line in f:
            line = strip_comment(line).strip()
            if not line:
                continue
            if line.startswith("lp "):
                head, _, body = line[3:].partition(":")
                left, sep, right = body.partition("<")
                if not sep:
                    raise MalformedSyntax("lp line needs '<': %r" % line)
                lp_rules.append(
                    LPRule(
                        head.strip(),
                        parse_pattern(left, registry),
                        parse_pattern(right, registry),
                    )
                )
            elif line.startswith("type "):
                body, _, typetext = line[5:].rpartition(":")
                if not body:
                    raise MalformedSyntax("type line needs ':': %r" % line)
                rows.append((parse_pattern(body, registry), parse_type(typetext)))
            elif line.startswith("nonhead "):
                nonhead = frozenset(w.upper() for w in line[8:].split())
            else:
                raise MalformedSyntax("unknown model line: %r" % line)
    if max_bar is None and registry.has_feature("BAR"):
        max_bar = max(int(v) for v in registry.values_of("BAR") if v.isdigit())
    xbar = XBarConfig(max_bar if max_bar is not None else 1, nonhead=nonhead, hfc=hfc)
    return ModelConfig(lp_rules, TypeMap(rows), xbar)
