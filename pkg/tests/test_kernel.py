import pytest

from dialectic.errors import RuleMismatch, UnknownTheorem
from dialectic.kernel import (
    Thm, assume, axiom, conj_intro, forall_elim, forall_intro, imp_elim,
    imp_intro, infer, inst, load_store_text, refl, replay, sym, trans,
    validation_sequent,
)
from dialectic.terms import (
    NAT, ZERO, add, eq, forall, imp, mk_var, parse_term, render, subst, suc,
)


def test_assume():
    p = parse_term("p")
    th = assume(p)
    assert th.hyps == (p,) and th.concl == p


def test_imp_intro_discharge():
    p = parse_term("p")
    th = imp_intro(p, assume(p))
    assert th.hyps == () and th.concl == parse_term("p ==> p")


def test_thm_only_constructible_by_kernel():
    with pytest.raises(RuleMismatch):
        Thm((), parse_term("p"), ("ASSUME", (), ()))


def test_nat_induction_schema():
    # oracle: instantiate P := (n + 0 = n) and check against a hand proof
    n = mk_var("n", NAT)
    body = eq(add(n, ZERO), n)
    target = forall("n", body)
    base = _prove_add0(0)
    step_inner = _add_zero_step()
    got = infer("NAT_INDUCTION", (base, step_inner), (target,))
    assert got.concl == target and got.hyps == ()
    replay(got)


def _prove_add0(k: int) -> Thm:
    # |- k + 0 = k via ADD defining equations
    if k == 0:
        return forall_elim(ZERO, infer("ADD_ZERO"))
    prev = _prove_add0(k - 1)
    from dialectic.terms import numeral
    stepped = infer("ADD_SUC", (), ())
    inst_step = forall_elim(ZERO, forall_elim(numeral(k - 1), stepped))
    lifted = infer("CONGRUENCE", (prev,),
                   (suc(add(numeral(k - 1), ZERO)), (0,)))
    return trans(inst_step, lifted)


def _add_zero_step() -> Thm:
    # |- !n. (n + 0 = n) ==> (SUC n + 0 = SUC n)
    n = mk_var("n", NAT)
    h = eq(add(n, ZERO), n)
    addsuc = forall_elim(ZERO, forall_elim(n, infer("ADD_SUC")))
    lifted = infer("CONGRUENCE", (assume(h),), (suc(add(n, ZERO)), (0,)))
    whole = trans(addsuc, lifted)
    return forall_intro("n", imp_intro(h, whole))


def test_induction_rejects_wrong_step():
    n = mk_var("n", NAT)
    target = forall("n", eq(add(n, ZERO), n))
    base = _prove_add0(0)
    with pytest.raises(RuleMismatch):
        infer("NAT_INDUCTION", (base, base), (target,))


def test_forall_intro_freshness():
    p = parse_term("n = 0")
    with pytest.raises(RuleMismatch):
        forall_intro("n", assume(p))  # n free in a hypothesis


def test_inst_is_capture_avoiding():
    th = assume(parse_term("?m. n = SUC m"))
    out = inst({"n": mk_var("m", NAT)}, th)
    assert out.concl == parse_term("?k. m = SUC k")


def test_congruence_and_subst():
    eqth = forall_elim(mk_var("x", NAT), infer("ADD_ZERO"))  # 0 + x = x
    template = parse_term("SUC (0 + x) = y")
    got = infer("CONGRUENCE", (eqth,), (parse_term("SUC (0 + x)"), (0,)))
    assert got.concl == parse_term("SUC (0 + x) = SUC x")
    target = assume(template)
    got2 = infer("SUBST", (eqth, target), ((0, 0),))
    assert got2.concl == parse_term("SUC x = y")


def test_subst_capture_rejected():
    n = mk_var("n", NAT)
    eqth = sym(forall_elim(n, infer("ADD_ZERO")))  # n = 0 + n, n free
    target = assume(parse_term("!n. n = n"))
    with pytest.raises(RuleMismatch):
        infer("SUBST", (eqth, target), ((0, 0),))


def test_case_bool_and_disj_cases():
    p = parse_term("p")
    cases = infer("CASE_BOOL", (), (p,))
    assert cases.concl == parse_term("p \\/ ~p")
    goal = parse_term("p \\/ ~p")
    t1 = infer("DISJ_INTRO_L", (assume(p),), (parse_term("~p"),))
    t2 = infer("DISJ_INTRO_R", (assume(parse_term("~p")),), (p,))
    out = infer("DISJ_CASES", (cases, t1, t2))
    assert out.hyps == () and out.concl == goal


def test_exists_roundtrip():
    two = parse_term("2")
    target = parse_term("?m. 2 = SUC m")
    th = infer("EXISTS_INTRO", (refl(two),), (target, parse_term("1")))
    assert th.concl == target
    # eliminate: rebuild the existential from the witness hypothesis
    body_inst = parse_term("2 = SUC y")
    use = infer("EXISTS_INTRO", (assume(body_inst),),
                (target, mk_var("y", NAT)))
    out = infer("EXISTS_ELIM", (th, use), ("y",))
    assert out.concl == target and out.hyps == ()
    replay(out)


def test_replay_soundness_gate(store):
    # every public-interface Thm replays to an alpha-equal theorem
    p = parse_term("p")
    th = imp_intro(p, assume(p))
    assert replay(th, store).concl == th.concl
    ax = store["ADD_COMM"]
    assert replay(ax, store).concl == ax.concl
    with pytest.raises(RuleMismatch):
        replay(validation_sequent((), p), store)  # not allowed outside checks


def test_store_loading_and_errors(store):
    assert "LE_LT" in store
    with pytest.raises(UnknownTheorem):
        store["NO_SUCH_THM"]
    with pytest.raises(RuleMismatch):
        load_store_text("A : p\nA : q")
    s2 = load_store_text("ONLY : 0 = 0")
    assert s2["ONLY"].concl == parse_term("0 = 0")


def test_peano_rules():
    assert infer("SUC_INJ").concl == parse_term("!m n. SUC m = SUC n <=> m = n")
    assert infer("SUC_NONZERO").concl == parse_term("!n. ~(SUC n = 0)")
    assert infer("MUL_SUC").concl == parse_term("!m n. SUC m * n = m * n + n")


def test_iff_rules():
    p, q = parse_term("p"), parse_term("q")
    lr = imp_intro(p, assume(p))
    th = infer("IFF_INTRO", (imp_intro(p, assume(p)), imp_intro(p, assume(p))))
    assert th.concl == parse_term("p <=> p")
    assert infer("IFF_ELIM_L", (th,)).concl == parse_term("p ==> p")


def test_hypotheses_deduplicate():
    p = parse_term("p")
    th = conj_intro(assume(p), assume(p))
    assert th.hyps == (p,)
