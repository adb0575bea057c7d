import itertools

import pytest

from gramgrow.fs import Category, parse_fs
from gramgrow.model import (
    apply_type,
    criticise_rhs,
    hfc_check,
    load_model,
    lp_check,
    match,
    parse_pattern,
    parse_type,
    type_check,
)
from gramgrow.grammar import parse_rule_line
from gramgrow.resources import data_path, load_demo


@pytest.fixture(scope="module")
def demo():
    registry, grammar, lexicon, labels = load_demo()
    model = load_model(data_path("demo.model"), registry)
    return registry, grammar, lexicon, labels, model


def lex1(lexicon, word):
    return lexicon.lexical_categories(word)[0]


# -- pattern matching ----------------------------------------------------------


def test_match_requires_presence(demo):
    registry, _, lexicon, _, _ = demo
    p = parse_pattern("[SUBCAT *]", registry)
    assert not match(p, lex1(lexicon, "the"))
    assert match(p, lex1(lexicon, "chases"))


def test_match_negation(demo):
    registry, _, lexicon, _, _ = demo
    p = parse_pattern("~[SUBCAT *]", registry)
    assert match(p, lex1(lexicon, "the"))
    assert not match(p, lex1(lexicon, "chases"))


def test_match_value_disjunction_any_member(demo):
    registry, _, _, _, _ = demo
    p = parse_pattern("[BAR 1]", registry)
    d = parse_fs("[BAR {1,2}]", registry).disjuncts[0]
    assert match(p, d)


# -- lp_check -------------------------------------------------------------------


def test_lp1_det_n1_order(demo):
    registry, _, lexicon, _, model = demo
    det = Category((lex1(lexicon, "the"),))
    n1 = Category((lex1(lexicon, "cat"),))
    assert lp_check([det, n1], model.lp_rules)
    # the demo "the" carries no SUBCAT binding, so the subcategorisation LP
    # rule cannot fire against it; the verb supplies the lexical daughter
    v0 = Category((lex1(lexicon, "chases"),))
    assert not lp_check([n1, v0], model.lp_rules)
    assert lp_check([v0, n1], model.lp_rules)


def test_lp4_pp_before_s(demo):
    registry, _, _, _, model = demo
    pp = parse_fs("[N -, V -, BAR 2, DET -]", registry)
    s = parse_fs("[N -, V +, BAR 2, DET -, VFORM FIN]", registry)
    assert lp_check([pp, s], model.lp_rules)
    assert not lp_check([s, pp], model.lp_rules)


def test_lp_vacuous_on_single_daughter(demo):
    registry, _, _, _, model = demo
    s = parse_fs("[N -, V +, BAR 2]", registry)
    assert lp_check([s], model.lp_rules)


def test_lp_ignores_unmentioned_features(demo):
    registry, _, lexicon, _, model = demo
    det = Category((lex1(lexicon, "the"),))
    n1 = parse_fs("[N +, V -, BAR 1, DET -, PER 2, PLU +, PRD +]", registry)
    assert lp_check([det, n1], model.lp_rules) == lp_check(
        [det, parse_fs("[N +, V -, BAR 1]", registry)], model.lp_rules
    )


# -- types ----------------------------------------------------------------------


def test_parse_and_format_types():
    t = parse_type("<<e,t>,<<e,t>,t>>")
    assert t == (("e", "t"), (("e", "t"), "t"))
    assert parse_type("e") == "e"


def test_typ_lookup_demo_np(demo):
    registry, _, lexicon, _, model = demo
    sam = lex1(lexicon, "Sam")
    assert model.typemap.lookup(sam) == (("e", "t"), "t")


def test_typ_lookup_transitive_verb(demo):
    registry, _, lexicon, _, model = demo
    chases = lex1(lexicon, "chases")
    npt = (("e", "t"), "t")
    assert model.typemap.lookup(chases) == (npt, (npt, "t"))


def test_typ_lookup_undefined(demo):
    registry, _, lexicon, _, model = demo
    down = lex1(lexicon, "down")
    assert model.typemap.lookup(down) is None


def test_apply_type_det_nominal():
    det = parse_type("<<e,t>,<<e,t>,t>>")
    n1 = parse_type("<e,t>")
    npt = parse_type("<<e,t>,t>")
    assert apply_type(det, n1) == npt
    assert apply_type(det, npt) is None
    assert apply_type("e", n1) is None


def test_type_check_pairs(demo):
    registry, _, lexicon, _, model = demo
    det = Category((lex1(lexicon, "the"),))
    n1 = Category((lex1(lexicon, "cat"),))
    np = Category((lex1(lexicon, "Sam"),))
    adj = Category((lex1(lexicon, "happy"),))
    tm = model.typemap
    assert type_check([det, n1], tm, registry)
    assert not type_check([det, np], tm, registry)
    assert type_check([adj, n1], tm, registry)  # <<e,t>,<e,t>> ∘ <e,t>
    assert not type_check([det, adj], tm, registry)


def test_type_check_symmetric(demo):
    registry, _, lexicon, _, model = demo
    cats = [Category((lex1(lexicon, w),)) for w in lexicon.terminals]
    for a, b in itertools.product(cats, cats):
        assert type_check([a, b], model.typemap, registry) == type_check(
            [b, a], model.typemap, registry
        )


def test_type_check_disjunctive_any_expansion(demo):
    registry, _, lexicon, _, model = demo
    det = Category((lex1(lexicon, "the"),))
    mixed = parse_fs("{[N +, V +, BAR 1, DET -], [N +, V -, BAR 1, DET -]}", registry)
    assert type_check([det, mixed], model.typemap, registry)


def test_type_check_permissive_when_undefined(demo):
    registry, _, lexicon, _, model = demo
    down = Category((lex1(lexicon, "down"),))
    det = Category((lex1(lexicon, "the"),))
    assert type_check([down, det], model.typemap, registry)


# -- hfc_check -------------------------------------------------------------------


def test_hfc_check_on_projected_rule(demo):
    registry, _, lexicon, _, model = demo
    from gramgrow.constructor import construct_binary

    rule = construct_binary(
        lex1(lexicon, "happy"), lex1(lexicon, "cat"), model.xbar.with_hfc(True), "*b1"
    )
    assert hfc_check(rule, model.xbar)


def test_hfc_check_violation(demo):
    registry, _, _, _, model = demo
    rule = parse_rule_line(
        "rule bad : [N +, V -, BAR 2] -> [N -, V +, BAR 1]", registry, origin="learnt"
    )
    assert not hfc_check(rule, model.xbar)


# -- criticise_rhs ----------------------------------------------------------------


def _pairs(lexicon):
    words = list(lexicon.terminals)
    return [(a, b) for a in words for b in words]


def test_criticise_rhs_all_off_accepts_everything(demo):
    registry, _, lexicon, _, model = demo
    from gramgrow.model import ModelConfig

    off = ModelConfig(model.lp_rules, model.typemap, model.xbar, lp_on=False, types_on=False)
    for a, b in _pairs(lexicon):
        rhs = [Category((lex1(lexicon, a),)), Category((lex1(lexicon, b),))]
        assert criticise_rhs(rhs, off, registry) is True


def test_criticise_rhs_matches_conjunction_oracle(demo):
    registry, _, lexicon, _, model = demo
    from gramgrow.model import ModelConfig

    for lp_on, types_on in itertools.product((False, True), repeat=2):
        cfg = ModelConfig(model.lp_rules, model.typemap, model.xbar, lp_on, types_on)
        for a, b in _pairs(lexicon):
            rhs = [Category((lex1(lexicon, a),)), Category((lex1(lexicon, b),))]
            expect = (not lp_on or lp_check(rhs, model.lp_rules)) and (
                not types_on or type_check(rhs, model.typemap, registry)
            )
            assert (criticise_rhs(rhs, cfg, registry) is True) == expect


def test_adding_principles_never_grows_accepted_set(demo):
    registry, _, lexicon, _, model = demo
    from gramgrow.model import ModelConfig

    def accepted(lp_on, types_on):
        cfg = ModelConfig(model.lp_rules, model.typemap, model.xbar, lp_on, types_on)
        out = set()
        for a, b in _pairs(lexicon):
            rhs = [Category((lex1(lexicon, a),)), Category((lex1(lexicon, b),))]
            if criticise_rhs(rhs, cfg, registry) is True:
                out.add((a, b))
        return out

    full = accepted(True, True)
    for flags in ((False, False), (True, False), (False, True)):
        assert full <= accepted(*flags)


def test_np_v_rejected_full_model(demo):
    registry, _, lexicon, _, model = demo
    rhs = [Category((lex1(lexicon, "Sam"),)), Category((lex1(lexicon, "chases"),))]
    got = criticise_rhs(rhs, model, registry)
    assert got is not True and any(r.startswith("lp") for r in got.reasons)


def test_adj_n1_accepted_full_model(demo):
    registry, _, lexicon, _, model = demo
    rhs = [Category((lex1(lexicon, "happy"),)), Category((lex1(lexicon, "cat"),))]
    assert criticise_rhs(rhs, model, registry) is True
