"""Derived inference rules built from kernel primitives.

Nothing here extends the trusted base: every function returns a Thm whose
derivation replays through `kernel.infer`.
"""

from __future__ import annotations

from functools import lru_cache

from .errors import RuleMismatch
from .kernel import (
    Thm, TheoremStore, assume, forall_elim, forall_intro,
    imp_elim, imp_intro, infer, inst, refl, sym, trans,
)
from .terms import (
    NAT, Term, ZERO, disj, eq, exists, forall, free_vars, is_quant,
    lt, mk_var, neg, numeral, numeral_of, quant_parts, subst, subterm_at, suc,
)


def strip_foralls(th: Thm) -> tuple[list[str], Thm]:
    """Instantiate every leading universal with a variable of the same name."""
    names = []
    while is_quant(th.concl, "FORALL"):
        _, x, _ = quant_parts(th.concl)
        th = forall_elim(mk_var(x, NAT), th)
        names.append(x)
    return names, th


def spec(th: Thm, *terms: Term) -> Thm:
    """FORALL_ELIM with each term in turn."""
    for t in terms:
        th = forall_elim(t, th)
    return th


def gsym(th: Thm) -> Thm:
    """Reverse the orientation of a (universally closed) equation or equivalence."""
    names, core = strip_foralls(th)
    core = sym(core)
    for x in reversed(names):
        core = forall_intro(x, core)
    return core


def mp(th_imp: Thm, th_ant: Thm) -> Thm:
    return imp_elim(th_imp, th_ant)


def undisch(th: Thm) -> Thm:
    """From |- a ==> b obtain {a} |- b."""
    a = th.concl.args[0]
    return imp_elim(th, assume(a))


def iff_mp(th_iff: Thm, th: Thm) -> Thm:
    """From |- a <=> b and |- a obtain |- b."""
    return imp_elim(infer("IFF_ELIM_L", (th_iff,)), th)


def iff_mp_r(th_iff: Thm, th: Thm) -> Thm:
    """From |- a <=> b and |- b obtain |- a."""
    return imp_elim(infer("IFF_ELIM_R", (th_iff,)), th)


def eqish_sides(th: Thm) -> tuple[Term, Term]:
    c = th.concl
    if c.kind == "pred" and c.name == "EQ":
        return c.args[0], c.args[1]
    if c.kind == "conn" and c.name == "IFF":
        return c.args[0], c.args[1]
    raise RuleMismatch("not an equation or equivalence")


def _forall_cong(x: str, inner: Thm) -> Thm:
    """From |- B <=> B' (x arbitrary) derive |- (!x.B) <=> (!x.B')."""
    b, b2 = eqish_sides(inner)

    def one_way(src, dst, elim):
        h = assume(forall(x, src))
        got = imp_elim(infer(elim, (inner,)), forall_elim(mk_var(x, NAT), h))
        return imp_intro(forall(x, src), forall_intro(x, got))

    return infer("IFF_INTRO",
                 (one_way(b, b2, "IFF_ELIM_L"), one_way(b2, b, "IFF_ELIM_R")))


def _exists_cong(x: str, inner: Thm) -> Thm:
    """From |- B <=> B' (x arbitrary) derive |- (?x.B) <=> (?x.B')."""
    b, b2 = eqish_sides(inner)
    avoid = set(free_vars(b)) | set(free_vars(b2))
    for h in inner.hyps:
        avoid |= set(free_vars(h))
    y = x
    i = 0
    while y in avoid:
        i += 1
        y = f"{x}{i}"

    def one_way(src, dst, elim):
        ex_src = exists(x, src)
        inst_imp = inst({x: mk_var(y, NAT)}, infer(elim, (inner,)))
        body = imp_elim(inst_imp, assume(subst(src, {x: mk_var(y, NAT)})))
        witness = infer("EXISTS_INTRO", (body,), (exists(x, dst), mk_var(y, NAT)))
        out = infer("EXISTS_ELIM", (assume(ex_src), witness), (y,))
        return imp_intro(ex_src, out)

    return infer("IFF_INTRO",
                 (one_way(b, b2, "IFF_ELIM_L"), one_way(b2, b, "IFF_ELIM_R")))


def cong_path(template: Term, path: tuple[int, ...], eqth: Thm) -> Thm:
    """Lift |- l R r to |- template R template[path := r], crossing binders.

    The subterm of template at path must be alpha-equal to l. Raises
    RuleMismatch when lifting over a binder that occurs free in the
    premise's hypotheses (the rewrite would be unsound there).
    """
    if not path:
        lhs, _ = eqish_sides(eqth)
        if subterm_at(template, ()) != lhs:
            raise RuleMismatch("congruence template mismatch")
        return eqth
    if template.kind == "quant":
        kind, x, body = quant_parts(template)
        for h in eqth.hyps:
            if x in free_vars(h):
                raise RuleMismatch(f"cannot rewrite under binder {x}")
        inner = cong_path(body, path[1:], eqth)
        return _forall_cong(x, inner) if kind == "FORALL" else _exists_cong(x, inner)
    i = path[0]
    inner = cong_path(template.args[i], path[1:], eqth)
    return infer("CONGRUENCE", (inner,), (template, (i,)))


def transform_proof(t0: Term, steps) -> Thm:
    """|- t0 R t_final for a list of rewrite steps (path, to_term, eq_thm)."""
    acc = refl(t0)
    cur = t0
    for path, _to, eqth in steps:
        lifted = cong_path(cur, path, eqth)
        acc = trans(acc, lifted)
        _, cur = eqish_sides(lifted)
    return acc


# --- ground numeral facts -------------------------------------------------

def prove_add_numerals(a: int, b: int) -> Thm:
    """|- a + b = (a+b) on numerals."""
    nb = numeral(b)
    if a == 0:
        return forall_elim(nb, infer("ADD_ZERO"))
    prev = prove_add_numerals(a - 1, b)
    base = spec(infer("ADD_SUC"), numeral(a - 1), nb)
    lifted = infer("CONGRUENCE", (prev,), (suc(eqish_sides(base)[1].args[0]), (0,)))
    return trans(base, lifted)


def prove_mul_numerals(a: int, b: int) -> Thm:
    """|- a * b = (a*b) on numerals."""
    nb = numeral(b)
    if a == 0:
        return forall_elim(nb, infer("MUL_ZERO"))
    prev = prove_mul_numerals(a - 1, b)
    base = spec(infer("MUL_SUC"), numeral(a - 1), nb)
    template = eqish_sides(base)[1]
    lifted = infer("CONGRUENCE", (prev,), (template, (0,)))
    step = trans(base, lifted)
    addth = prove_add_numerals((a - 1) * b, b)
    return trans(step, addth)


def prove_lt_numerals(a: int, b: int, store: TheoremStore) -> Thm:
    """|- a < b for numerals a < b."""
    if not a < b:
        raise RuleMismatch("not a true inequality")
    th = forall_elim(numeral(b - a - 1), store["LESS_0"])
    for i in range(a):
        step = spec(store["LESS_MONO_EQ"], numeral(i), numeral(b - a + i))
        th = iff_mp_r(step, th)
    return th


def prove_le_numerals(a: int, b: int, store: TheoremStore) -> Thm:
    if a > b:
        raise RuleMismatch("not a true inequality")
    na, nb = numeral(a), numeral(b)
    if a < b:
        rhs = infer("DISJ_INTRO_L", (prove_lt_numerals(a, b, store),), (eq(na, nb),))
    else:
        rhs = infer("DISJ_INTRO_R", (refl(na),), (lt(na, nb),))
    return iff_mp_r(spec(store["LE_LT"], na, nb), rhs)


def prove_neq_numerals(a: int, b: int) -> Thm:
    """|- ~(a = b) for distinct numerals."""
    if a == b:
        raise RuleMismatch("numerals are equal")
    target = eq(numeral(a), numeral(b))
    h = assume(target)
    x, y = a, b
    while x > 0 and y > 0:
        step = spec(infer("SUC_INJ"), numeral(x - 1), numeral(y - 1))
        h = iff_mp(step, h)
        x -= 1
        y -= 1
    if x == 0:
        h = sym(h)  # SUC.. = 0
        k = y
    else:
        k = x
    nz = forall_elim(numeral(k - 1), infer("SUC_NONZERO"))
    return infer("NOT_INTRO", (h, nz), (target,))


def prove_ground_atom(t: Term, store: TheoremStore) -> Thm | None:
    """|- t for a ground arithmetic atom (or its negation) that is true."""
    def num(x):
        return numeral_of(x)

    if t.kind == "pred":
        a, b = num(t.args[0]), num(t.args[1])
        if a is None or b is None:
            if t.name == "EQ" and t.args[0] == t.args[1]:
                return refl(t.args[0])
            if t.name == "LE" and t.args[0] == t.args[1]:
                return iff_mp_r(
                    spec(store["LE_LT"], t.args[0], t.args[1]),
                    infer("DISJ_INTRO_R", (refl(t.args[0]),),
                          (lt(t.args[0], t.args[1]),)))
            return None
        if t.name == "EQ":
            return refl(t.args[0]) if a == b else None
        if t.name == "LT":
            return prove_lt_numerals(a, b, store) if a < b else None
        if t.name == "LE":
            return prove_le_numerals(a, b, store) if a <= b else None
    if t.kind == "conn" and t.name == "NOT":
        inner = t.args[0]
        if inner.kind != "pred":
            return None
        x, y = inner.args
        if inner.name == "EQ":
            # SUC t = 0 and 0 = SUC t are structurally false
            if x.kind == "fn" and x.name == "SUC" and y == ZERO:
                return forall_elim(x.args[0], infer("SUC_NONZERO"))
            if y.kind == "fn" and y.name == "SUC" and x == ZERO:
                flipped = assume(eq(x, y))
                nz = forall_elim(y.args[0], infer("SUC_NONZERO"))
                return infer("NOT_INTRO", (sym(flipped), nz), (eq(x, y),))
        if inner.name == "LT" and y == ZERO:
            return forall_elim(x, store["NOT_LESS_0"])
        a, b = num(x), num(y)
        if a is None or b is None:
            return None
        if inner.name == "EQ" and a != b:
            return prove_neq_numerals(a, b)
        if inner.name == "LT" and not a < b:
            pos = prove_le_numerals(b, a, store)
            return iff_mp_r(spec(store["NOT_LESS"], inner.args[0], inner.args[1]), pos)
        if inner.name == "LE" and not a <= b:
            pos = prove_lt_numerals(b, a, store)
            return iff_mp_r(
                spec(store["NOT_LESS_EQUAL"], inner.args[0], inner.args[1]), pos)
    return None


@lru_cache(maxsize=1)
def nat_cases_thm() -> Thm:
    """|- !n. n = 0 \\/ ?m. n = SUC m, by induction."""
    n = mk_var("n", NAT)
    m = mk_var("m", NAT)
    prop = lambda t: disj(eq(t, ZERO), exists("m", eq(t, suc(m))))
    target = forall("n", prop(n))

    base = infer("DISJ_INTRO_L", (refl(ZERO),), (exists("m", eq(ZERO, suc(m))),))
    # step: P(k) ==> P(SUC k), antecedent discharged vacuously
    k = mk_var("k", NAT)
    ex_target = exists("m", eq(suc(k), suc(m)))
    witness = infer("EXISTS_INTRO", (refl(suc(k)),), (ex_target, k))
    step_body = infer("DISJ_INTRO_R", (witness,), (eq(suc(k), ZERO),))
    step = forall_intro("k", imp_intro(prop(k), step_body))
    return infer("NAT_INDUCTION", (base, step), (target,))


def bool_cases(p: Term) -> Thm:
    return infer("CASE_BOOL", (), (p,))


def disj_cases(th_disj: Thm, th1: Thm, th2: Thm) -> Thm:
    return infer("DISJ_CASES", (th_disj, th1, th2))


def not_intro(t: Term, th_b: Thm, th_nb: Thm) -> Thm:
    return infer("NOT_INTRO", (th_b, th_nb), (t,))


def iff_intro(th_lr: Thm, th_rl: Thm) -> Thm:
    return infer("IFF_INTRO", (th_lr, th_rl))


def contradiction_from(h: Term, store: TheoremStore) -> tuple[Thm, Thm] | None:
    """A (|- b, |- ~b) pair derivable when assumption h is arithmetically false.

    The first component may carry h as a hypothesis (via ASSUME). Returns None
    when h is not a refutable/provable ground atom.
    """
    if h.kind == "conn" and h.name == "NOT":
        pos = prove_ground_atom(h.args[0], store)
        if pos is not None:
            return (pos, assume(h))
        return None
    refuted = prove_ground_atom(neg(h), store)
    if refuted is not None:
        return (assume(h), refuted)
    return None
