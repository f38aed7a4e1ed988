import random

import pytest

from dialectic.errors import SortError, TermSyntaxError
from dialectic.terms import (
    BOOL, NAT, ZERO, add, conj, eq, exists, forall, imp, match, mk_var, mul,
    neg, numeral, parse_term, render, subst, suc, free_vars,
)


def test_parse_literal_equation():
    t = parse_term("0 = 0")
    assert t == eq(ZERO, ZERO)


def test_parse_quantified():
    n = mk_var("n", NAT)
    t = parse_term("!n. n + 0 = n")
    assert t == forall("n", eq(add(n, ZERO), n))


def test_numeral_desugars():
    # oracle: hand-built SUC chain
    assert parse_term("2") == suc(suc(ZERO))
    assert render(parse_term("2")) == "2"
    assert render(suc(suc(suc(ZERO)))) == "3"


def test_alpha_equivalence():
    assert parse_term("!n. n = n") == parse_term("!m. m = m")
    assert parse_term("!n. n = n") != parse_term("!n. n = 0")
    assert hash(parse_term("!a. a + 0 = a")) == hash(parse_term("!b. b + 0 = b"))


def test_connective_precedence():
    t = parse_term("~p /\\ q \\/ r ==> s <=> u")
    # <=> loosest, then ==>, then \/, then /\, then ~
    assert t.name == "IFF"
    assert t.args[0].name == "IMP"
    assert t.args[0].args[0].name == "OR"
    assert t.args[0].args[0].args[0].name == "AND"
    assert t.args[0].args[0].args[0].args[0].name == "NOT"


def test_neq_sugar():
    t = parse_term("SUC n <> 0")
    assert t.name == "NOT" and t.args[0].name == "EQ"
    assert render(t) == "SUC n <> 0"


def test_sort_errors():
    with pytest.raises(SortError):
        parse_term("p /\\ (p + 1 = 2)")  # p used at both sorts
    with pytest.raises((SortError, TermSyntaxError)):
        parse_term("!n. n")  # bound nat var as proposition


def test_syntax_error_position():
    with pytest.raises(TermSyntaxError):
        parse_term("n +")
    with pytest.raises(TermSyntaxError):
        parse_term("( p")


def test_substitution_capture_avoidance():
    # (?m. n = SUC m)[n := m] must not capture the bound m
    t = exists("m", eq(mk_var("n", NAT), suc(mk_var("m", NAT))))
    out = subst(t, {"n": mk_var("m", NAT)})
    assert out == exists("k", eq(mk_var("m", NAT), suc(mk_var("k", NAT))))


def test_match_single_variable():
    sigma = match(parse_term("x + 0"), parse_term("SUC 0 + 0"))
    assert sigma == {"x": suc(ZERO)}


def test_match_nonlinear_conflict():
    assert match(parse_term("x + x"), parse_term("1 + 2")) is None


def test_match_general_equation():
    # oracle: apply the substitution and compare syntactically
    pat = parse_term("a = b")
    target = parse_term("n * 1 = n")
    sigma = match(pat, target)
    assert sigma is not None
    assert subst(pat, sigma) == target


def test_match_respects_binders():
    # a match variable cannot capture a target-bound variable
    assert match(parse_term("x = x"), parse_term("!n. n = n")) is None
    got = match(forall("n", eq(mk_var("x", NAT), ZERO)),
                forall("k", eq(mk_var("y", NAT), ZERO)),
                frozenset({"x"}))
    assert got == {"x": mk_var("y", NAT)}
    assert match(forall("n", eq(mk_var("x", NAT), ZERO)),
                 forall("k", eq(mk_var("k", NAT), ZERO)),
                 frozenset({"x"})) is None


def _random_term(rng, depth, vars_nat=("n", "m"), vars_bool=("p", "q")):
    if depth == 0:
        pick = rng.random()
        if pick < 0.5:
            return mk_var(rng.choice(vars_bool), BOOL)
        return eq(_random_nat(rng, 0), _random_nat(rng, 0))
    k = rng.randrange(8)
    if k == 0:
        return neg(_random_term(rng, depth - 1))
    if k == 1:
        return conj(_random_term(rng, depth - 1), _random_term(rng, depth - 1))
    if k == 2:
        return imp(_random_term(rng, depth - 1), _random_term(rng, depth - 1))
    if k == 3:
        return forall(rng.choice(vars_nat), _random_term(rng, depth - 1))
    if k == 4:
        return exists(rng.choice(vars_nat), _random_term(rng, depth - 1))
    from dialectic.terms import lt, le, disj, iff
    if k == 5:
        return lt(_random_nat(rng, depth - 1), _random_nat(rng, depth - 1))
    if k == 6:
        return disj(_random_term(rng, depth - 1), _random_term(rng, depth - 1))
    return iff(_random_term(rng, depth - 1), _random_term(rng, depth - 1))


def _random_nat(rng, depth, vars_nat=("n", "m")):
    if depth == 0:
        if rng.random() < 0.5:
            return mk_var(rng.choice(vars_nat), NAT)
        return numeral(rng.randrange(4))
    k = rng.randrange(4)
    if k == 0:
        return add(_random_nat(rng, depth - 1), _random_nat(rng, depth - 1))
    if k == 1:
        return mul(_random_nat(rng, depth - 1), _random_nat(rng, depth - 1))
    if k == 2:
        return suc(_random_nat(rng, depth - 1))
    from dialectic.terms import sum_fn
    return sum_fn(_random_nat(rng, depth - 1))


def test_render_parse_roundtrip_fuzz():
    rng = random.Random(42)
    for _ in range(300):
        t = _random_term(rng, rng.randrange(4))
        s = render(t)
        back = parse_term(s)
        assert back == t, s
        assert render(parse_term(render(back))) == render(back)


def test_free_vars():
    t = parse_term("!n. n + m = k")
    assert set(free_vars(t)) == {"m", "k"}
