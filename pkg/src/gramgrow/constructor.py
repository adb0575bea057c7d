"""Builds candidate rule left-hand sides from instantiated super-rule RHSs.

The LHS of a learnt rule is the disjunction of the bar-raised (and, for
binary rules, same-bar) projections of its major daughters.  Head features
are shared between a projection and its source daughter when the head
feature convention is compiled in.
"""

from __future__ import annotations

from .fs import FS, FSError, _MNode
from .grammar import LHS, LEARNT, Rule, slot

DEFAULT_NONHEAD = frozenset({"NTYPE", "CASE", "CONJ", "NULL", "BAR"})


class XBarConfig:
    def __init__(
        self,
        max_bar,
        bar_feature="BAR",
        minor_feature="MINOR",
        minor_none="NONE",
        nonhead=DEFAULT_NONHEAD,
        hfc=False,
    ):
        self.max_bar = max_bar
        self.bar_feature = bar_feature
        self.minor_feature = minor_feature
        self.minor_none = minor_none
        self.nonhead = frozenset(nonhead) | {bar_feature}
        self.hfc = hfc

    def with_hfc(self, hfc):
        return XBarConfig(
            self.max_bar,
            self.bar_feature,
            self.minor_feature,
            self.minor_none,
            self.nonhead,
            hfc,
        )


class Rejection:
    """Why no rule could be constructed."""

    MINOR = "minor"
    MAX_BAR = "max-bar"
    NO_BAR = "no-bar"
    NO_HEAD = "no-head-candidate"

    __slots__ = ("reason",)

    def __init__(self, reason):
        self.reason = reason

    def __repr__(self):
        return "Rejection(%s)" % self.reason


def bar_of(d, cfg):
    """Bar level of a daughter; a disjoined BAR counts as its highest level."""
    v = d.get(cfg.bar_feature)
    if isinstance(v, str) and v.isdigit():
        return int(v)
    if isinstance(v, frozenset):
        levels = [int(x) for x in v if x.isdigit()]
        return max(levels) if levels else None
    return None


def is_minor(d, cfg):
    v = d.get(cfg.minor_feature)
    if v is None:
        return False
    if isinstance(v, str):
        return v != cfg.minor_none
    if isinstance(v, frozenset):
        return cfg.minor_none not in v
    return True


def project(d, bar, cfg):
    """Image of a major daughter at the given bar level."""
    if is_minor(d, cfg):
        raise FSError("cannot project a minor category")
    if not 0 <= bar <= cfg.max_bar:
        raise FSError("bar level %d out of range" % bar)
    root = d.to_mutable()
    return FS.from_mutable(_project_node(root, bar, cfg))


def _project_node(src, bar, cfg):
    """Projection as a mutable node; with HFC on the head-feature values are
    the daughter's own nodes (shared), otherwise `src` must be a private copy
    that can be reshaped in place."""
    node = _MNode()
    for feat, child in src.feats.items():
        if feat == cfg.bar_feature:
            continue
        if cfg.hfc and feat in cfg.nonhead:
            continue
        node.feats[feat] = child
    level = _MNode()
    level.atom = str(bar)
    node.feats[cfg.bar_feature] = level
    return node


def _candidate_bars(d, cfg, include_same_bar):
    if is_minor(d, cfg):
        return None, Rejection.MINOR
    bar = bar_of(d, cfg)
    if bar is None:
        return None, Rejection.NO_BAR
    bars = [bar, bar + 1] if include_same_bar else [bar + 1]
    bars = [b for b in bars if b <= cfg.max_bar]
    if not bars:
        return None, Rejection.MAX_BAR
    return bars, None


def construct_unary(d, cfg, rule_id="*unary?"):
    """Non-recursive unary rule: LHS is the daughter raised one bar level."""
    return construct_unary_cat(_as_cat(d), cfg, rule_id)


def construct_binary(d1, d2, cfg, rule_id="*binary?"):
    """Binary rule whose LHS disjoins each major daughter at its own and its
    raised bar level."""
    return construct_binary_cat(_as_cat(d1), _as_cat(d2), cfg, rule_id)


def _as_cat(d):
    from .fs import Category

    return d if not isinstance(d, FS) else Category((d,))


def construct_unary_cat(c, cfg, rule_id="*unary?"):
    instances = []
    reasons = []
    for d in c.disjuncts:
        bars, why = _candidate_bars(d, cfg, include_same_bar=False)
        if bars is None:
            reasons.append(why)
            continue
        for b in bars:
            instances.append(_instance(cfg, b, 0, [d]))
    if not instances:
        return Rejection(reasons[0] if reasons else Rejection.NO_HEAD)
    return Rule(rule_id, 1, _dedup(instances), LEARNT)


def construct_binary_cat(c1, c2, cfg, rule_id="*binary?"):
    instances = []
    any_candidate = False
    for head_pos, head_cat in ((0, c1), (1, c2)):
        other = c2 if head_pos == 0 else c1
        for d in head_cat.disjuncts:
            bars, _ = _candidate_bars(d, cfg, include_same_bar=True)
            if bars is None:
                continue
            any_candidate = True
            for b in bars:
                for o in other.disjuncts:
                    daughters = [d, o] if head_pos == 0 else [o, d]
                    instances.append(_instance(cfg, b, head_pos, daughters))
    if not any_candidate:
        return Rejection(Rejection.NO_HEAD)
    return Rule(rule_id, 2, _dedup(instances), LEARNT)


def _instance(cfg, bar, head_pos, daughters):
    """One rule instance: wrapper with the projection of daughters[head_pos]
    at `bar` as LHS.  With HFC the projection shares the head daughter's
    feature values."""
    root = _MNode()
    muts = [d.to_mutable() for d in daughters]
    for i, m in enumerate(muts, start=1):
        root.feats[slot(i)] = m
    if cfg.hfc:
        head_src = muts[head_pos]
    else:
        head_src = daughters[head_pos].to_mutable()  # private copy: no sharing
    root.feats[LHS] = _project_node(head_src, bar, cfg)
    return FS.from_mutable(root)


def _dedup(instances):
    out = []
    for inst in instances:
        if inst not in out:
            out.append(inst)
    return tuple(out)
