"""Typed tactic values, the built-in registry, evaluation and rendering.

A Tactic maps one open goal to a list of subgoals plus a justification
(a function from theorems achieving the subgoals to a theorem achieving the
goal). All built-ins construct their justifications from kernel rules, so
any goal they close is closed through the kernel.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

from . import metis
from .arith import ArithCloser, conj_components
from .derived import (
    bool_cases, cong_path, disj_cases, eqish_sides, gsym, iff_intro, iff_mp_r,
    nat_cases_thm, prove_ground_atom, spec, strip_foralls, transform_proof,
)
from .errors import (
    JustificationInvalid, OpaqueTactic, TacticFails, TypeMismatch,
    UnknownTactic, UnknownTheorem,
)
from .kernel import (
    Thm, TheoremStore, assume, forall_elim, forall_intro, imp_elim, imp_intro,
    infer, refl, replay, validation_sequent,
)
from .rewrite import Rewriter, rules_from_thms, rules_from_thm
from .terms import (
    BOOL, NAT, Term, ZERO, eq, exists, forall, free_vars, fresh_name, imp,
    is_quant, match, mk_var, neg, parse_nat_term, parse_term, quant_parts,
    render, subst, suc,
)

# --- types ---------------------------------------------------------------

TAC = "tactic"
THM = "thm"
THMLIST = "thm list"
QUOT = "term quotation"
QUOTLIST = "term quotation list"


@dataclass(frozen=True)
class FunType:
    dom: object
    cod: object

    def __str__(self):
        d = str(self.dom)
        if isinstance(self.dom, FunType):
            d = f"({d})"
        return f"{d}->{self.cod}"


THM_TAC = FunType(THM, TAC)
THMLIST_TAC = FunType(THMLIST, TAC)
TAC_TAC = FunType(TAC, TAC)
QUOT_TAC = FunType(QUOT, TAC)
THMTAC_TAC = FunType(THM_TAC, TAC)
TAC_TAC_TAC = FunType(TAC, FunType(TAC, TAC))
QUOT_THMTAC_THM_TAC = FunType(QUOT, FunType(THM_TAC, FunType(THM, TAC)))
QUOTLIST_THMTAC_THM_TAC = FunType(QUOTLIST, FunType(THM_TAC, FunType(THM, TAC)))
QUOT_THMTAC_TAC = FunType(QUOT, FunType(THM_TAC, TAC))

#: every signature a registry entry may carry (the seven functional
#: signatures of the core type table, plus plain tactics and thm->tactic,
#: plus quotation->(thm->tactic)->tactic needed for qpat_x_assum)
REGISTRY_TYPES = (
    TAC, THM_TAC, THMLIST_TAC, TAC_TAC, QUOT_TAC, THMTAC_TAC, TAC_TAC_TAC,
    QUOT_THMTAC_THM_TAC, QUOTLIST_THMTAC_THM_TAC, QUOT_THMTAC_TAC,
)


# --- goals ----------------------------------------------------------------

@dataclass(frozen=True)
class Goal:
    assumptions: tuple[Term, ...]
    conclusion: Term

    def __post_init__(self):
        for a in self.assumptions:
            if a.sort != BOOL:
                raise TypeMismatch("goal assumptions must be bool")
        if self.conclusion.sort != BOOL:
            raise TypeMismatch("goal conclusion must be bool")


def mk_goal(concl: Term, assumptions: Sequence[Term] = ()) -> Goal:
    return Goal(tuple(dict.fromkeys(assumptions)), concl)


def render_goal(g: Goal) -> str:
    """Numbered assumptions above a rule, conclusion below."""
    lines = [f"  {i}.  {render(a)}" for i, a in enumerate(g.assumptions)]
    width = max([len(s) for s in lines] + [len(render(g.conclusion)) + 2, 20])
    lines.append("-" * width)
    lines.append(f"  {render(g.conclusion)}")
    return "\n".join(lines)


# --- tactic values --------------------------------------------------------

Justification = Callable[[Sequence[Thm]], Thm]


class Tactic:
    """Executable tactic: goal -> (subgoals, justification)."""

    def __init__(self, fn: Callable[[Goal], tuple[list[Goal], Justification]],
                 name: str = "<tactic>"):
        self.fn = fn
        self.name = name

    def __call__(self, goal: Goal):
        return self.fn(goal)

    def __repr__(self):
        return f"Tactic({self.name})"


class Quotation:
    """A term quotation argument; parsed on demand."""

    def __init__(self, text: str):
        self.text = text

    @property
    def term(self) -> Term:
        return parse_term(self.text)

    @property
    def nat_term(self) -> Term:
        return parse_nat_term(self.text)

    @property
    def var_name(self) -> str:
        name = self.text.strip()
        if not name.isidentifier():
            raise TacticFails(f"expected a variable name, got {name!r}")
        return name

    def __repr__(self):
        return f"Quotation({self.text!r})"


def apply_tactic(tac: Tactic, goal: Goal, checked: bool = False,
                 store: TheoremStore | None = None):
    """Run a tactic; optionally validate the justification eagerly.

    Validation feeds sequents taken on faith for the returned subgoals to the
    justification and replays the resulting theorem through the kernel.
    """
    subgoals, just = tac(goal)
    if checked:
        seqs = [validation_sequent(g.assumptions, g.conclusion) for g in subgoals]
        th = just(seqs)
        if th.concl != goal.conclusion or \
                not set(th.hyps) <= set(goal.assumptions):
            raise JustificationInvalid(
                f"{tac.name}: produced {th!r} for goal {render(goal.conclusion)}")
        replay(th, store, allow_validation=True)
    return subgoals, just


# --- tactic combinators ----------------------------------------------------

def _id_tactic(goal: Goal):
    return [goal], lambda ths: ths[0]


all_tac = Tactic(_id_tactic, "all_tac")


def _compose(first, continuation):
    """Sequence: run `first`'s result, then continuation(i, subgoal) on each."""
    subs, j = first
    pieces = [continuation(i, g) for i, g in enumerate(subs)]
    out: list[Goal] = []
    sizes = []
    for subsubs, _ in pieces:
        out.extend(subsubs)
        sizes.append(len(subsubs))
    def just(ths: Sequence[Thm]) -> Thm:
        mids = []
        at = 0
        for (subsubs, jj), size in zip(pieces, sizes):
            mids.append(jj(ths[at:at + size]))
            at += size
        return j(mids)
    return out, just


def then_t(t1: Tactic, t2: Tactic) -> Tactic:
    def run(goal: Goal):
        return _compose(t1(goal), lambda i, g: t2(g))
    return Tactic(run, f"{t1.name} THEN {t2.name}")


def then_lt_t(t1: Tactic, t2: Tactic) -> Tactic:
    """Apply t2 to the first subgoal t1 produces; pass the rest through."""
    def run(goal: Goal):
        return _compose(t1(goal),
                        lambda i, g: t2(g) if i == 0 else _id_tactic(g))
    return Tactic(run, f"{t1.name} THEN_LT {t2.name}")


def orelse_t(t1: Tactic, t2: Tactic) -> Tactic:
    def run(goal: Goal):
        try:
            return t1(goal)
        except TacticFails:
            return t2(goal)
    return Tactic(run, f"{t1.name} ORELSE {t2.name}")


def try_t(t: Tactic) -> Tactic:
    return orelse_t(t, all_tac)


_RPT_LIMIT = 500


def rpt_t(t: Tactic) -> Tactic:
    def run(goal: Goal, fuel: int = _RPT_LIMIT):
        if fuel <= 0:
            raise TacticFails("rpt: iteration limit reached")
        try:
            first = t(goal)
        except TacticFails:
            return _id_tactic(goal)
        subs, _ = first
        if len(subs) == 1 and subs[0] == goal:
            return _id_tactic(goal)
        return _compose(first, lambda i, g: run(g, fuel - 1))
    return Tactic(run, f"rpt {t.name}")


def no_tac_run(goal: Goal):
    raise TacticFails("NO_TAC")


no_tac = Tactic(no_tac_run, "NO_TAC")


def by_t(q: Quotation, t: Tactic) -> Tactic:
    def run(goal: Goal):
        lemma = q.term
        if lemma.sort != BOOL:
            raise TacticFails("by: quotation must be a proposition")
        subs, j = t(Goal(goal.assumptions, lemma))
        if subs:
            raise TacticFails("by: tactic did not prove the asserted term")
        th_lemma = j([])
        sub = Goal(_snoc(goal.assumptions, lemma), goal.conclusion)
        def just(ths):
            return imp_elim(imp_intro(lemma, ths[0]), th_lemma)
        return [sub], just
    return Tactic(run, "by")


def suffices_by_t(q: Quotation, t: Tactic) -> Tactic:
    def run(goal: Goal):
        lemma = q.term
        if lemma.sort != BOOL:
            raise TacticFails("suffices_by: quotation must be a proposition")
        subs, j = t(Goal(goal.assumptions, imp(lemma, goal.conclusion)))
        if subs:
            raise TacticFails("suffices_by: sufficiency was not discharged")
        th_imp = j([])
        def just(ths):
            return imp_elim(th_imp, ths[0])
        return [Goal(goal.assumptions, lemma)], just
    return Tactic(run, "suffices_by")


def _snoc(assums: tuple, t: Term) -> tuple:
    return tuple(dict.fromkeys((*assums, t)))


# --- structural built-ins ---------------------------------------------------

def _gen_step(goal: Goal):
    c = goal.conclusion
    if not is_quant(c, "FORALL"):
        raise TacticFails("gen_tac: conclusion is not universally quantified")
    _, x, body = quant_parts(c)
    avoid = set()
    for a in goal.assumptions:
        avoid |= set(free_vars(a))
    x2 = x if x not in avoid else fresh_name(x, avoid | set(free_vars(body)))
    sub = Goal(goal.assumptions, subst(body, {x: mk_var(x2, NAT)}))
    def just(ths):
        return forall_intro(x2, ths[0])
    return [sub], just


gen_tac = Tactic(_gen_step, "gen_tac")


def _imp_step(goal: Goal):
    c = goal.conclusion
    if not (c.kind == "conn" and c.name == "IMP"):
        raise TacticFails("strip_tac: conclusion is not an implication")
    a, b = c.args
    sub = Goal(_snoc(goal.assumptions, a), b)
    def just(ths):
        return imp_intro(a, ths[0])
    return [sub], just


def _conj_step(goal: Goal):
    c = goal.conclusion
    if not (c.kind == "conn" and c.name == "AND"):
        raise TacticFails("conj_tac: conclusion is not a conjunction")
    a, b = c.args
    subs = [Goal(goal.assumptions, a), Goal(goal.assumptions, b)]
    def just(ths):
        return infer("CONJ_INTRO", (ths[0], ths[1]))
    return subs, just


conj_tac = Tactic(_conj_step, "conj_tac")


def _strip_step(goal: Goal):
    c = goal.conclusion
    if is_quant(c, "FORALL"):
        return _gen_step(goal)
    if c.kind == "conn" and c.name == "IMP":
        return _imp_step(goal)
    if c.kind == "conn" and c.name == "AND":
        return _conj_step(goal)
    raise TacticFails("strip_tac: nothing to strip")


strip_tac = Tactic(_strip_step, "strip_tac")


def _disj1(goal: Goal):
    c = goal.conclusion
    if not (c.kind == "conn" and c.name == "OR"):
        raise TacticFails("disj1_tac: conclusion is not a disjunction")
    a, b = c.args
    return [Goal(goal.assumptions, a)], \
        lambda ths: infer("DISJ_INTRO_L", (ths[0],), (b,))


def _disj2(goal: Goal):
    c = goal.conclusion
    if not (c.kind == "conn" and c.name == "OR"):
        raise TacticFails("disj2_tac: conclusion is not a disjunction")
    a, b = c.args
    return [Goal(goal.assumptions, b)], \
        lambda ths: infer("DISJ_INTRO_R", (ths[0],), (a,))


disj1_tac = Tactic(_disj1, "disj1_tac")
disj2_tac = Tactic(_disj2, "disj2_tac")


def _eq_tac(goal: Goal):
    c = goal.conclusion
    if not (c.kind == "conn" and c.name == "IFF"):
        raise TacticFails("EQ_TAC: conclusion is not an equivalence")
    a, b = c.args
    subs = [Goal(goal.assumptions, imp(a, b)), Goal(goal.assumptions, imp(b, a))]
    return subs, lambda ths: iff_intro(ths[0], ths[1])


eq_tac = Tactic(_eq_tac, "EQ_TAC")

#: the conclusion CCONTR_TAC leaves to refute (`0 <> 0`)
FALSITY = neg(eq(ZERO, ZERO))


def _ccontr(goal: Goal):
    c = goal.conclusion
    nc = neg(c)
    sub = Goal(_snoc(goal.assumptions, nc), FALSITY)
    def just(ths):
        absurd = infer("CONTRADICTION", (refl(ZERO), ths[0]), (c,))
        return disj_cases(bool_cases(c), assume(c), absurd)
    return [sub], just


ccontr_tac = Tactic(_ccontr, "CCONTR_TAC")


# --- theorem tactics --------------------------------------------------------

def assume_tac(th: Thm) -> Tactic:
    def run(goal: Goal):
        c = th.concl
        sub = Goal(_snoc(goal.assumptions, c), goal.conclusion)
        def just(ths):
            return imp_elim(imp_intro(c, ths[0]), th)
        return [sub], just
    return Tactic(run, "assume_tac")


def mp_tac(th: Thm) -> Tactic:
    def run(goal: Goal):
        sub = Goal(goal.assumptions, imp(th.concl, goal.conclusion))
        def just(ths):
            return imp_elim(ths[0], th)
        return [sub], just
    return Tactic(run, "mp_tac")


def irule(th: Thm) -> Tactic:
    def run(goal: Goal):
        names, core = strip_foralls(th)
        ants = []
        c = core.concl
        while c.kind == "conn" and c.name == "IMP":
            ants.append(c.args[0])
            c = c.args[1]
        sigma = match(c, goal.conclusion, frozenset(names))
        if sigma is None:
            raise TacticFails("irule: conclusion does not match")
        missing = [x for x in names if x not in sigma]
        if missing:
            raise TacticFails(
                f"irule: cannot infer instantiation for {', '.join(missing)}")
        inst_th = th
        for x in names:
            inst_th = forall_elim(sigma[x], inst_th)
        subs = [Goal(goal.assumptions, subst(a, sigma)) for a in ants]
        def just(ths):
            out = inst_th
            for sub_th in ths:
                out = imp_elim(out, sub_th)
            return out
        return subs, just
    return Tactic(run, "irule")


def imp_res_tac(th: Thm) -> Tactic:
    def run(goal: Goal):
        names, core = strip_foralls(th)
        ants = []
        c = core.concl
        while c.kind == "conn" and c.name == "IMP":
            ants.append(c.args[0])
            c = c.args[1]
        if not ants:
            raise TacticFails("imp_res_tac: theorem is not an implication")
        derived: list[Thm] = []
        def resolve(inst_th: Thm, remaining: int, sigma: dict):
            if remaining == 0:
                derived.append(inst_th)
                return
            want = inst_th.concl.args[0]
            for h in goal.assumptions:
                if h == want:
                    resolve(imp_elim(inst_th, assume(h)), remaining - 1, sigma)
                    return
            return
        # try each assumption as an anchor for the first antecedent
        for h in goal.assumptions:
            sigma = match(ants[0], h, frozenset(names))
            if sigma is None:
                continue
            if any(x not in sigma for x in names):
                continue
            inst_th = th
            for x in names:
                inst_th = forall_elim(sigma[x], inst_th)
            resolve(imp_elim(inst_th, assume(h)), len(ants) - 1, sigma)
        seen: set = set()
        fresh = []
        for d in derived:
            if d.concl not in goal.assumptions and d.concl not in seen:
                seen.add(d.concl)
                fresh.append(d)
        if not fresh:
            raise TacticFails("imp_res_tac: no resolvents")
        new_assums = goal.assumptions
        for d in fresh:
            new_assums = _snoc(new_assums, d.concl)
        sub = Goal(new_assums, goal.conclusion)
        def just(ths):
            out = ths[0]
            for d in reversed(fresh):
                out = imp_elim(imp_intro(d.concl, out), d)
            return out
        return [sub], just
    return Tactic(run, "imp_res_tac")


def _assum_tactic(pick_last: bool, name: str):
    def outer(ttac: Callable[[Thm], Tactic]) -> Tactic:
        def run(goal: Goal):
            if not goal.assumptions:
                raise TacticFails(f"{name}: no assumptions")
            order = [len(goal.assumptions) - 1] if pick_last \
                else list(range(len(goal.assumptions)))
            last_err = None
            for i in order:
                h = goal.assumptions[i]
                rest = tuple(a for j, a in enumerate(goal.assumptions) if j != i)
                try:
                    t = ttac(assume(h))
                    return t(Goal(rest, goal.conclusion))
                except TacticFails as e:
                    last_err = e
            raise TacticFails(f"{name}: no assumption applies ({last_err})")
        return Tactic(run, name)
    return outer


first_x_assum = _assum_tactic(False, "first_x_assum")
pop_assum = _assum_tactic(True, "pop_assum")


def qpat_x_assum(q: Quotation):
    def outer(ttac: Callable[[Thm], Tactic]) -> Tactic:
        def run(goal: Goal):
            pattern = q.term
            pvars = frozenset(free_vars(pattern))
            last_err = None
            for i, h in enumerate(goal.assumptions):
                if match(pattern, h, pvars) is None:
                    continue
                rest = tuple(a for j, a in enumerate(goal.assumptions) if j != i)
                try:
                    t = ttac(assume(h))
                    return t(Goal(rest, goal.conclusion))
                except TacticFails as e:
                    last_err = e
            raise TacticFails(
                f"qpat_x_assum: no assumption matches {q.text!r} ({last_err})")
        return Tactic(run, "qpat_x_assum")
    return outer


def qspec_then(q: Quotation):
    def mid(ttac: Callable[[Thm], Tactic]):
        def inner(th: Thm) -> Tactic:
            def run(goal: Goal):
                try:
                    specialized = forall_elim(q.nat_term, th)
                except Exception as e:
                    raise TacticFails(f"qspec_then: {e}")
                return ttac(specialized)(goal)
            return Tactic(run, "qspec_then")
        return inner
    return mid


def qspecl_then(qs):
    def mid(ttac: Callable[[Thm], Tactic]):
        def inner(th: Thm) -> Tactic:
            def run(goal: Goal):
                out = th
                try:
                    for q in qs:
                        out = forall_elim(q.nat_term, out)
                except Exception as e:
                    raise TacticFails(f"qspecl_then: {e}")
                return ttac(out)(goal)
            return Tactic(run, "qspecl_then")
        return inner
    return mid


# --- induction and case analysis -------------------------------------------

def induct_on(q: Quotation) -> Tactic:
    def run(goal: Goal):
        name = q.var_name
        c = goal.conclusion
        quantified = False
        if is_quant(c, "FORALL") and quant_parts(c)[1] == name:
            _, _, body = quant_parts(c)
            quantified = True
        elif free_vars(c).get(name) == NAT:
            body = c
        else:
            raise TacticFails(f"Induct_on: {name} does not occur in the goal")
        for a in goal.assumptions:
            if name in free_vars(a):
                raise TacticFails(
                    f"Induct_on: {name} is free in an assumption")
        n = mk_var(name, NAT)
        base = Goal(goal.assumptions, subst(body, {name: ZERO}))
        step = Goal(_snoc(goal.assumptions, body),
                    subst(body, {name: suc(n)}))
        target = forall(name, body)
        def just(ths):
            b, s = ths
            stepped = forall_intro(name, imp_intro(body, s))
            out = infer("NAT_INDUCTION", (b, stepped), (target,))
            if not quantified:
                out = forall_elim(n, out)
            return out
        return [base, step], just
    return Tactic(run, "Induct_on")


def cases_on(q: Quotation) -> Tactic:
    def run(goal: Goal):
        text = q.text.strip()
        goal_sorts: dict = {}
        for part in (goal.conclusion, *goal.assumptions):
            goal_sorts.update(free_vars(part))
        if text.isidentifier() and goal_sorts.get(text, NAT) == NAT:
            return _nat_cases(goal, mk_var(text, NAT))
        t = q.term
        if t.sort == BOOL:
            sub1 = Goal(_snoc(goal.assumptions, t), goal.conclusion)
            sub2 = Goal(_snoc(goal.assumptions, neg(t)), goal.conclusion)
            def just(ths):
                return disj_cases(bool_cases(t), ths[0], ths[1])
            return [sub1, sub2], just
        raise TacticFails("Cases_on: expected a nat variable or a proposition")
    return Tactic(run, "Cases_on")


def _nat_cases(goal: Goal, t: Term):
    name = t.name
    avoid = set(free_vars(goal.conclusion)) | {name}
    for a in goal.assumptions:
        avoid |= set(free_vars(a))
    m = fresh_name("m" if name != "m" else "k", avoid)
    eq_zero = eq(t, ZERO)
    eq_suc = eq(t, suc(mk_var(m, NAT)))
    sub1 = Goal(_snoc(goal.assumptions, eq_zero), goal.conclusion)
    sub2 = Goal(_snoc(goal.assumptions, eq_suc), goal.conclusion)
    def just(ths):
        t0, ts = ths
        cth = forall_elim(t, nat_cases_thm())
        ex = exists(m, eq_suc)
        elim = infer("EXISTS_ELIM", (assume(ex), ts), (m,))
        return disj_cases(cth, t0, elim)
    return [sub1, sub2], just


def qexists_tac(q: Quotation) -> Tactic:
    def run(goal: Goal):
        c = goal.conclusion
        if not is_quant(c, "EXISTS"):
            raise TacticFails("qexists_tac: conclusion is not existential")
        _, x, body = quant_parts(c)
        w = q.nat_term
        sub = Goal(goal.assumptions, subst(body, {x: w}))
        def just(ths):
            return infer("EXISTS_INTRO", (ths[0],), (c, w))
        return [sub], just
    return Tactic(run, "qexists_tac")


# --- simplification ----------------------------------------------------------

def _closure_thm(goal: Goal, store: TheoremStore) -> Thm | None:
    c = goal.conclusion
    for h in goal.assumptions:
        if h == c:
            return assume(h)
        for comp in conj_components(assume(h)):
            if comp.concl == c:
                return comp
    got = prove_ground_atom(c, store)
    if got is not None:
        return got
    if c.kind == "conn" and c.name == "IFF" and c.args[0] == c.args[1]:
        return refl(c.args[0])
    closer = ArithCloser(store)
    return closer.contradiction_thm(goal.assumptions, c)


def _trivially_true(t: Term, store: TheoremStore) -> bool:
    if t.kind == "pred" and t.name == "EQ" and t.args[0] == t.args[1]:
        return True
    if t.kind == "conn" and t.name == "IFF" and t.args[0] == t.args[1]:
        return True
    try:
        return prove_ground_atom(t, store) is not None
    except Exception:
        return False


class _SimpState:
    """Accumulates rewrites of a goal plus justification wrappers."""

    def __init__(self, goal: Goal):
        self.goal = goal
        self.wrappers: list[Callable[[Thm], Thm]] = []
        self.changed = False

    def rewrite_concl(self, rules, store, budget) -> None:
        c = self.goal.conclusion
        rw = Rewriter(rules, budget=budget)
        c2, steps = rw.rewrite(c)
        if not steps:
            return
        chain = transform_proof(c, steps)  # |- c <=> c2
        self.goal = Goal(self.goal.assumptions, c2)
        self.changed = True
        def wrap(th: Thm, chain=chain) -> Thm:
            return imp_elim(infer("IFF_ELIM_R", (chain,)), th)
        self.wrappers.append(wrap)

    def rewrite_assums(self, rules, store, budget) -> None:
        assums = list(self.goal.assumptions)
        i = 0
        while i < len(assums):
            h = assums[i]
            rw = Rewriter(rules, budget=budget)
            h2, steps = rw.rewrite(h)
            if not steps:
                i += 1
                continue
            chain = transform_proof(h, steps)  # |- h <=> h2
            self.changed = True
            if _trivially_true(h2, store):
                del assums[i]  # dropping an assumption is always sound
                self.goal = Goal(tuple(assums), self.goal.conclusion)
                continue
            assums[i] = h2
            self.goal = Goal(tuple(assums), self.goal.conclusion)
            def wrap(th: Thm, h=h, h2=h2, chain=chain) -> Thm:
                th_h2 = imp_elim(infer("IFF_ELIM_L", (chain,)), assume(h))
                return imp_elim(imp_intro(h2, th), th_h2)
            self.wrappers.append(wrap)
            i += 1

    def result(self, store: TheoremStore):
        closing = _closure_thm(self.goal, store)
        wrappers = list(self.wrappers)
        if closing is not None:
            def just(_ths, closing=closing):
                out = closing
                for w in reversed(wrappers):
                    out = w(out)
                return out
            return [], just
        goal = self.goal
        def just(ths):
            out = ths[0]
            for w in reversed(wrappers):
                out = w(out)
            return out
        return [goal], just


def _assum_rules(goal: Goal):
    rules = []
    for h in goal.assumptions:
        rules.extend(rules_from_thm(assume(h), schematic=False))
    return rules


def simp_tac(thms: Sequence[Thm], store: TheoremStore,
             budget: int = 1000) -> Tactic:
    def run(goal: Goal):
        st = _SimpState(goal)
        st.rewrite_concl(rules_from_thms(thms), store, budget)
        return st.result(store)
    return Tactic(run, "simp")


def fs_tac(thms: Sequence[Thm], store: TheoremStore,
           budget: int = 1000) -> Tactic:
    def run(goal: Goal):
        st = _SimpState(goal)
        rules = rules_from_thms(thms)
        st.rewrite_assums(rules, store, budget)
        st.rewrite_concl(rules + _assum_rules(st.goal), store, budget)
        return st.result(store)
    return Tactic(run, "fs")


def rw_tac(thms: Sequence[Thm], store: TheoremStore,
           budget: int = 1000) -> Tactic:
    def leaf(goal: Goal):
        st = _SimpState(goal)
        st.rewrite_concl(rules_from_thms(thms) + _assum_rules(goal),
                         store, budget)
        return st.result(store)
    return then_t(rpt_t(strip_tac), Tactic(leaf, "rw-core"))


def metis_tac(thms: Sequence[Thm], store: TheoremStore,
              depth: int = metis.DEFAULT_DEPTH) -> Tactic:
    def run(goal: Goal):
        th = metis.prove(goal.assumptions, goal.conclusion, thms, store, depth)
        if th is None:
            raise TacticFails("metis_tac: search bound exceeded")
        return [], lambda ths: th
    return Tactic(run, "metis_tac")


def arith_tac(store: TheoremStore) -> Tactic:
    """Bounded nat-arithmetic closer (DECIDE_TAC analogue)."""
    def leaf(goal: Goal):
        closer = ArithCloser(store)
        th = closer.close(list(goal.assumptions), goal.conclusion)
        if th is None:
            raise TacticFails("arithmetic closer: goal out of scope")
        return [], lambda ths: th
    return then_t(rpt_t(strip_tac), Tactic(leaf, "arith-core"))


# --- registry ----------------------------------------------------------------

@dataclass(frozen=True)
class RegistryEntry:
    name: str
    ttype: object
    impl: object  # None means OPAQUE: parses and renders, refuses execution


class Registry:
    """Immutable name -> (type, implementation) map."""

    def __init__(self, entries: dict[str, RegistryEntry]):
        self._entries = dict(entries)

    def lookup(self, name: str) -> RegistryEntry | None:
        return self._entries.get(name)

    def names_of_type(self, ttype) -> list[str]:
        return [e.name for e in self._entries.values() if e.ttype == ttype]

    def names(self) -> list[str]:
        return list(self._entries)

    def __contains__(self, name: str) -> bool:
        return name in self._entries

    def with_entry(self, entry: RegistryEntry) -> "Registry":
        out = dict(self._entries)
        out[entry.name] = entry
        return Registry(out)


def builtin_registry(store: TheoremStore) -> Registry:
    """The built-in tactic database; every registry type is inhabited."""
    e: dict[str, RegistryEntry] = {}

    def reg(name, ttype, impl):
        e[name] = RegistryEntry(name, ttype, impl)

    # plain tactics
    reg("gen_tac", TAC, gen_tac)
    reg("all_tac", TAC, all_tac)
    reg("strip_tac", TAC, strip_tac)
    reg("conj_tac", TAC, conj_tac)
    reg("disj1_tac", TAC, disj1_tac)
    reg("disj2_tac", TAC, disj2_tac)
    reg("EQ_TAC", TAC, eq_tac)
    reg("CCONTR_TAC", TAC, ccontr_tac)
    reg("NO_TAC", TAC, no_tac)
    # thm -> tactic
    reg("assume_tac", THM_TAC, assume_tac)
    reg("mp_tac", THM_TAC, mp_tac)
    reg("irule", THM_TAC, irule)
    reg("imp_res_tac", THM_TAC, imp_res_tac)
    # thm list -> tactic
    reg("fs", THMLIST_TAC, lambda ths: fs_tac(ths, store))
    reg("rw", THMLIST_TAC, lambda ths: rw_tac(ths, store))
    reg("simp", THMLIST_TAC, lambda ths: simp_tac(ths, store))
    reg("metis_tac", THMLIST_TAC, lambda ths: metis_tac(ths, store))
    # tactic -> tactic
    reg("rpt", TAC_TAC, rpt_t)
    reg("TRY", TAC_TAC, try_t)
    # term quotation -> tactic
    reg("Induct_on", QUOT_TAC, induct_on)
    reg("Cases_on", QUOT_TAC, cases_on)
    reg("qexists_tac", QUOT_TAC, qexists_tac)
    # (thm -> tactic) -> tactic
    reg("first_x_assum", THMTAC_TAC, first_x_assum)
    reg("pop_assum", THMTAC_TAC, pop_assum)
    # tactic -> tactic -> tactic (prefix spellings of the tacticals)
    reg("THEN", TAC_TAC_TAC, lambda t1: lambda t2: then_t(t1, t2))
    reg("ORELSE", TAC_TAC_TAC, lambda t1: lambda t2: orelse_t(t1, t2))
    # quotation -> (thm->tactic) -> thm -> tactic
    reg("qspec_then", QUOT_THMTAC_THM_TAC, qspec_then)
    reg("qspecl_then", QUOTLIST_THMTAC_THM_TAC,
        lambda qs: qspecl_then(list(qs)))
    # quotation -> (thm->tactic) -> tactic
    reg("qpat_x_assum", QUOT_THMTAC_TAC, qpat_x_assum)
    return Registry(e)


#: implementations resolvable when libraries declare custom tactics
def custom_implementations(store: TheoremStore) -> dict[str, tuple]:
    closer = arith_tac(store)
    return {
        "DECIDE_TAC": (TAC, closer),
        "NAT_ARITH_TAC": (TAC, closer),
        "REAL_ASM_ARITH_TAC": (TAC, closer),
    }


# --- tactic expressions -------------------------------------------------------

class TacticExpr:
    """Typed AST of tactic applications; equality is structural with
    quotations compared by their parsed terms."""

    sort: object

    def key(self):
        raise NotImplementedError

    def __eq__(self, other):
        return isinstance(other, TacticExpr) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"<{type(self).__name__} {render_expr(self)!r}>"


class Lookup(TacticExpr):
    def __init__(self, name: str, ttype):
        self.name = name
        self.sort = ttype

    def key(self):
        return ("lookup", self.name, str(self.sort))


class ThmRef(TacticExpr):
    sort = THM

    def __init__(self, name: str):
        self.name = name

    def key(self):
        return ("thmref", self.name)


class GsymOf(TacticExpr):
    sort = THM

    def __init__(self, inner: TacticExpr):
        if inner.sort != THM:
            raise TypeMismatch("GSYM expects a theorem")
        self.inner = inner

    def key(self):
        return ("gsym", self.inner.key())


class ThmListLit(TacticExpr):
    sort = THMLIST

    def __init__(self, items: Sequence[TacticExpr]):
        for it in items:
            if it.sort != THM:
                raise TypeMismatch("theorem list items must be theorems")
        self.items = tuple(items)

    def key(self):
        return ("thmlist", tuple(i.key() for i in self.items))


class QuotLit(TacticExpr):
    sort = QUOT

    def __init__(self, text: str):
        self.text = text

    def key(self):
        try:
            return ("quot", parse_term(self.text).key())
        except Exception:
            return ("quot", self.text.strip())


class QuotListLit(TacticExpr):
    sort = QUOTLIST

    def __init__(self, items: Sequence[TacticExpr]):
        for it in items:
            if it.sort != QUOT:
                raise TypeMismatch("quotation list items must be quotations")
        self.items = tuple(items)

    def key(self):
        return ("quotlist", tuple(i.key() for i in self.items))


class Apply(TacticExpr):
    def __init__(self, fn: TacticExpr, arg: TacticExpr):
        if not isinstance(fn.sort, FunType):
            raise TypeMismatch(f"cannot apply a {fn.sort}")
        if fn.sort.dom != arg.sort:
            raise TypeMismatch(
                f"expected {fn.sort.dom} argument, got {arg.sort}")
        self.fn = fn
        self.arg = arg
        self.sort = fn.sort.cod

    def key(self):
        return ("apply", self.fn.key(), self.arg.key())


INFIX_OPS = {
    "THEN": (10, (TAC, TAC)),
    "THEN_LT": (10, (TAC, TAC)),
    "ORELSE": (20, (TAC, TAC)),
    "by": (30, (QUOT, TAC)),
    "suffices_by": (30, (QUOT, TAC)),
}


class Infix(TacticExpr):
    sort = TAC

    def __init__(self, op: str, left: TacticExpr, right: TacticExpr):
        if op not in INFIX_OPS:
            raise TypeMismatch(f"unknown infix {op}")
        lsort, rsort = INFIX_OPS[op][1]
        if left.sort != lsort or right.sort != rsort:
            raise TypeMismatch(f"ill-typed {op}")
        self.op = op
        self.left = left
        self.right = right

    def key(self):
        return ("infix", self.op, self.left.key(), self.right.key())


# --- evaluation ----------------------------------------------------------------

def eval_expr(expr: TacticExpr, registry: Registry, store: TheoremStore):
    """Resolve lookups and references; produce the executable value."""
    if isinstance(expr, Lookup):
        entry = registry.lookup(expr.name)
        if entry is None or entry.ttype != expr.sort:
            raise UnknownTactic(expr.name)
        if entry.impl is None:
            raise OpaqueTactic(expr.name)
        return entry.impl
    if isinstance(expr, ThmRef):
        return store[expr.name]
    if isinstance(expr, GsymOf):
        return gsym(eval_expr(expr.inner, registry, store))
    if isinstance(expr, ThmListLit):
        return tuple(eval_expr(i, registry, store) for i in expr.items)
    if isinstance(expr, QuotLit):
        return Quotation(expr.text)
    if isinstance(expr, QuotListLit):
        return tuple(eval_expr(i, registry, store) for i in expr.items)
    if isinstance(expr, Apply):
        fn = eval_expr(expr.fn, registry, store)
        arg = eval_expr(expr.arg, registry, store)
        return fn(arg)
    if isinstance(expr, Infix):
        if expr.op in ("by", "suffices_by"):
            q = eval_expr(expr.left, registry, store)
            t = eval_expr(expr.right, registry, store)
            return by_t(q, t) if expr.op == "by" else suffices_by_t(q, t)
        l = eval_expr(expr.left, registry, store)
        r = eval_expr(expr.right, registry, store)
        if expr.op == "THEN":
            return then_t(l, r)
        if expr.op == "THEN_LT":
            return then_lt_t(l, r)
        return orelse_t(l, r)
    raise TypeMismatch(f"cannot evaluate {expr!r}")


# --- rendering -------------------------------------------------------------------

def _infix_prec(e: TacticExpr) -> int | None:
    if isinstance(e, Infix):
        return INFIX_OPS[e.op][0]
    return None


def render_expr(e: TacticExpr) -> str:
    """Deterministic concrete syntax, re-parseable by the core grammar."""
    if isinstance(e, Lookup):
        return e.name
    if isinstance(e, ThmRef):
        return e.name
    if isinstance(e, GsymOf):
        return f"GSYM {render_expr(e.inner)}"
    if isinstance(e, ThmListLit):
        if not e.items:
            return "[ ]"
        return "[ " + ", ".join(render_expr(i) for i in e.items) + " ]"
    if isinstance(e, QuotLit):
        return f"` {e.text.strip()} `"
    if isinstance(e, QuotListLit):
        if not e.items:
            return "[ ]"
        return "[ " + ", ".join(render_expr(i) for i in e.items) + " ]"
    if isinstance(e, Apply):
        fn = render_expr(e.fn)
        arg = render_expr(e.arg)
        if _infix_prec(e.arg) is not None:
            arg = f"( {arg} )"
        return f"{fn} {arg}"
    if isinstance(e, Infix):
        prec = INFIX_OPS[e.op][0]
        left = render_expr(e.left)
        lp = _infix_prec(e.left)
        if lp is not None and lp < prec:
            left = f"( {left} )"
        right = render_expr(e.right)
        if e.op in ("by", "suffices_by"):
            right = f"( {right} )"
        else:
            rp = _infix_prec(e.right)
            if rp is not None and rp <= prec:
                right = f"( {right} )"
        return f"{left} {e.op} {right}"
    raise TypeMismatch(f"cannot render {e!r}")
