"""Trusted proof kernel.

A Thm can only be produced by `infer` (one of the rules below), by loading a
named axiom from a TheoremStore bundle, or — for validity checking in tests —
by `validation_sequent`. Every Thm carries a derivation certificate; `replay`
re-runs the certificate through `infer` and confirms the result.

Hypotheses are kept as an ordered, alpha-deduplicated tuple of bool terms.
"""

from __future__ import annotations

from typing import Iterable, Mapping, Sequence

from .errors import RuleMismatch, UnknownTheorem
from .terms import (
    BOOL, NAT, Term, ZERO, add, binders_on_path, conj, disj, eq, exists,
    forall, free_vars, iff, imp, is_quant, mk_var, mul, neg, parse_term,
    quant_parts, render, replace_at, subst, subterm_at, suc,
)

_MK_TOKEN = object()


class Thm:
    """A kernel-certified sequent: hypotheses |- conclusion."""

    __slots__ = ("hyps", "concl", "deriv")

    def __init__(self, hyps, concl, deriv, *, _token=None):
        if _token is not _MK_TOKEN:
            raise RuleMismatch("theorems can only be constructed by the kernel")
        object.__setattr__(self, "hyps", hyps)
        object.__setattr__(self, "concl", concl)
        object.__setattr__(self, "deriv", deriv)

    def __setattr__(self, *_):
        raise AttributeError("Thm is immutable")

    def __repr__(self):
        hs = ", ".join(render(h) for h in self.hyps)
        return f"Thm([{hs}] |- {render(self.concl)})"


def _mk(hyps: Iterable[Term], concl: Term, deriv) -> Thm:
    if concl.sort != BOOL:
        raise RuleMismatch("conclusion must be bool")
    uniq = tuple(dict.fromkeys(hyps))
    for h in uniq:
        if h.sort != BOOL:
            raise RuleMismatch("hypothesis must be bool")
    return Thm(uniq, concl, deriv, _token=_MK_TOKEN)


def _union(*hyp_tuples):
    out = []
    for hs in hyp_tuples:
        out.extend(hs)
    return tuple(dict.fromkeys(out))


def _without(hyps, t: Term):
    return tuple(h for h in hyps if h != t)


def _need(cond: bool, msg: str):
    if not cond:
        raise RuleMismatch(msg)


def _need_conn(t: Term, name: str, msg: str) -> tuple[Term, ...]:
    _need(t.kind == "conn" and t.name == name, msg)
    return t.args


def _need_eqish(t: Term) -> tuple[str, Term, Term]:
    """Split an EQ or IFF conclusion into (relation, lhs, rhs)."""
    if t.kind == "pred" and t.name == "EQ":
        return ("EQ", t.args[0], t.args[1])
    if t.kind == "conn" and t.name == "IFF":
        return ("IFF", t.args[0], t.args[1])
    raise RuleMismatch("expected an equation or an equivalence")


def _relate(a: Term, b: Term) -> Term:
    return eq(a, b) if a.sort == NAT else iff(a, b)


# Peano axiom schemes provided as rules; built lazily from concrete syntax.
_PEANO = {
    "SUC_INJ": "!m n. SUC m = SUC n <=> m = n",
    "SUC_NONZERO": "!n. ~(SUC n = 0)",
    "ADD_ZERO": "!n. 0 + n = n",
    "ADD_SUC": "!m n. SUC m + n = SUC (m + n)",
    "MUL_ZERO": "!n. 0 * n = 0",
    "MUL_SUC": "!m n. SUC m * n = m * n + n",
}


def infer(rule: str, premises: Sequence[Thm] = (), args: Sequence = ()) -> Thm:
    """Apply one kernel inference rule. RuleMismatch if the schema does not fit."""
    prem = tuple(premises)
    args = tuple(args)
    deriv = (rule, args, prem)

    if rule == "ASSUME":
        (t,) = args
        _need(isinstance(t, Term) and t.sort == BOOL, "ASSUME needs a bool term")
        return _mk((t,), t, deriv)

    if rule == "IMP_INTRO":
        (t,) = args
        (th,) = prem
        _need(t.sort == BOOL, "IMP_INTRO needs a bool term")
        return _mk(_without(th.hyps, t), imp(t, th.concl), deriv)

    if rule == "IMP_ELIM":
        th_imp, th_ant = prem
        a, b = _need_conn(th_imp.concl, "IMP", "IMP_ELIM needs an implication")
        _need(th_ant.concl == a, "antecedent does not match")
        return _mk(_union(th_imp.hyps, th_ant.hyps), b, deriv)

    if rule == "CONJ_INTRO":
        th1, th2 = prem
        return _mk(_union(th1.hyps, th2.hyps), conj(th1.concl, th2.concl), deriv)

    if rule in ("CONJ_ELIM_L", "CONJ_ELIM_R"):
        (th,) = prem
        a, b = _need_conn(th.concl, "AND", "CONJ_ELIM needs a conjunction")
        return _mk(th.hyps, a if rule.endswith("L") else b, deriv)

    if rule == "DISJ_INTRO_L":
        (t,) = args
        (th,) = prem
        return _mk(th.hyps, disj(th.concl, t), deriv)

    if rule == "DISJ_INTRO_R":
        (t,) = args
        (th,) = prem
        return _mk(th.hyps, disj(t, th.concl), deriv)

    if rule == "DISJ_CASES":
        th_disj, th1, th2 = prem
        a, b = _need_conn(th_disj.concl, "OR", "DISJ_CASES needs a disjunction")
        _need(th1.concl == th2.concl, "case conclusions differ")
        hyps = _union(th_disj.hyps, _without(th1.hyps, a), _without(th2.hyps, b))
        return _mk(hyps, th1.concl, deriv)

    if rule == "NOT_INTRO":
        (t,) = args
        th_b, th_nb = prem
        (nb,) = _need_conn(th_nb.concl, "NOT", "NOT_INTRO needs a negation")
        _need(nb == th_b.concl, "contradiction pair does not match")
        return _mk(_without(_union(th_b.hyps, th_nb.hyps), t), neg(t), deriv)

    if rule == "CONTRADICTION":
        (t,) = args
        th_b, th_nb = prem
        (nb,) = _need_conn(th_nb.concl, "NOT", "CONTRADICTION needs a negation")
        _need(nb == th_b.concl, "contradiction pair does not match")
        _need(t.sort == BOOL, "CONTRADICTION target must be bool")
        return _mk(_union(th_b.hyps, th_nb.hyps), t, deriv)

    if rule == "REFL":
        (t,) = args
        return _mk((), _relate(t, t), deriv)

    if rule == "SYM":
        (th,) = prem
        rel, a, b = _need_eqish(th.concl)
        return _mk(th.hyps, _relate(b, a), deriv)

    if rule == "TRANS":
        th1, th2 = prem
        rel1, a, b = _need_eqish(th1.concl)
        rel2, b2, c = _need_eqish(th2.concl)
        _need(rel1 == rel2, "TRANS premises relate different sorts")
        _need(b == b2, "TRANS middle terms differ")
        return _mk(_union(th1.hyps, th2.hyps), _relate(a, c), deriv)

    if rule == "CONGRUENCE":
        template, path = args
        (th,) = prem
        rel, a, b = _need_eqish(th.concl)
        _need(subterm_at(template, path) == a, "template does not contain the lhs")
        binders = binders_on_path(template, path)
        touched = set(free_vars(a)) | set(free_vars(b))
        for h in th.hyps:
            touched |= set(free_vars(h))
        _need(not (binders & touched), "congruence would capture a bound variable")
        return _mk(th.hyps, _relate(template, replace_at(template, path, b)), deriv)

    if rule == "SUBST":
        (path,) = args
        th_eq, th_target = prem
        rel, a, b = _need_eqish(th_eq.concl)
        target = th_target.concl
        _need(subterm_at(target, path) == a, "target does not contain the lhs")
        binders = binders_on_path(target, path)
        touched = set(free_vars(a)) | set(free_vars(b))
        for h in th_eq.hyps:
            touched |= set(free_vars(h))
        _need(not (binders & touched), "substitution would capture a bound variable")
        return _mk(_union(th_eq.hyps, th_target.hyps),
                   replace_at(target, path, b), deriv)

    if rule == "IFF_INTRO":
        th1, th2 = prem
        a, b = _need_conn(th1.concl, "IMP", "IFF_INTRO needs implications")
        b2, a2 = _need_conn(th2.concl, "IMP", "IFF_INTRO needs implications")
        _need(a == a2 and b == b2, "implications are not converse")
        return _mk(_union(th1.hyps, th2.hyps), iff(a, b), deriv)

    if rule in ("IFF_ELIM_L", "IFF_ELIM_R"):
        (th,) = prem
        a, b = _need_conn(th.concl, "IFF", "IFF_ELIM needs an equivalence")
        out = imp(a, b) if rule.endswith("L") else imp(b, a)
        return _mk(th.hyps, out, deriv)

    if rule == "FORALL_INTRO":
        (x,) = args
        (th,) = prem
        for h in th.hyps:
            _need(x not in free_vars(h), f"{x} is free in a hypothesis")
        return _mk(th.hyps, forall(x, th.concl), deriv)

    if rule == "FORALL_ELIM":
        (t,) = args
        (th,) = prem
        _need(is_quant(th.concl, "FORALL"), "FORALL_ELIM needs a universal")
        _, x, body = quant_parts(th.concl)
        _need(t.sort == NAT, "instantiating term must be nat")
        return _mk(th.hyps, subst(body, {x: t}), deriv)

    if rule == "EXISTS_INTRO":
        target, witness = args
        (th,) = prem
        _need(is_quant(target, "EXISTS"), "EXISTS_INTRO needs an existential target")
        _, x, body = quant_parts(target)
        _need(subst(body, {x: witness}) == th.concl,
              "premise is not the instantiated body")
        return _mk(th.hyps, target, deriv)

    if rule == "EXISTS_ELIM":
        (y,) = args
        th_ex, th_body = prem
        _need(is_quant(th_ex.concl, "EXISTS"), "EXISTS_ELIM needs an existential")
        _, x, body = quant_parts(th_ex.concl)
        inst = subst(body, {x: mk_var(y, NAT)})
        _need(inst in th_body.hyps, "instantiated body is not a hypothesis")
        rest = _without(th_body.hyps, inst)
        _need(y not in free_vars(th_body.concl), f"{y} is free in the conclusion")
        for h in rest:
            _need(y not in free_vars(h), f"{y} is free in a remaining hypothesis")
        _need(y not in free_vars(th_ex.concl), f"{y} is free in the existential")
        return _mk(_union(th_ex.hyps, rest), th_body.concl, deriv)

    if rule == "NAT_INDUCTION":
        (target,) = args
        base, step = prem
        _need(is_quant(target, "FORALL"), "induction target must be universal")
        _, n, body = quant_parts(target)
        _need(base.concl == subst(body, {n: ZERO}), "base case does not match")
        want_step = forall(n, imp(body, subst(body, {n: suc(mk_var(n, NAT))})))
        _need(step.concl == want_step, "step case does not match")
        return _mk(_union(base.hyps, step.hyps), target, deriv)

    if rule == "INST":
        (sigma_items,) = args
        (th,) = prem
        sigma = dict(sigma_items)
        for k, v in sigma.items():
            _need(isinstance(v, Term), "INST substitutes terms")
        return _mk(tuple(subst(h, sigma) for h in th.hyps),
                   subst(th.concl, sigma), deriv)

    if rule == "CASE_BOOL":
        (p,) = args
        _need(p.sort == BOOL, "CASE_BOOL needs a proposition")
        return _mk((), disj(p, neg(p)), deriv)

    if rule in _PEANO:
        _need(not prem and not args, f"{rule} takes no premises")
        return _mk((), parse_term(_PEANO[rule]), deriv)

    raise RuleMismatch(f"unknown kernel rule {rule}")


# --- wrappers used pervasively by the tactic layer -----------------------

def assume(t: Term) -> Thm:
    return infer("ASSUME", (), (t,))


def imp_intro(t: Term, th: Thm) -> Thm:
    return infer("IMP_INTRO", (th,), (t,))


def imp_elim(th_imp: Thm, th_ant: Thm) -> Thm:
    return infer("IMP_ELIM", (th_imp, th_ant))


def conj_intro(th1: Thm, th2: Thm) -> Thm:
    return infer("CONJ_INTRO", (th1, th2))


def conj_elim_l(th: Thm) -> Thm:
    return infer("CONJ_ELIM_L", (th,))


def conj_elim_r(th: Thm) -> Thm:
    return infer("CONJ_ELIM_R", (th,))


def refl(t: Term) -> Thm:
    return infer("REFL", (), (t,))


def sym(th: Thm) -> Thm:
    return infer("SYM", (th,))


def trans(th1: Thm, th2: Thm) -> Thm:
    return infer("TRANS", (th1, th2))


def forall_intro(x: str, th: Thm) -> Thm:
    return infer("FORALL_INTRO", (th,), (x,))


def forall_elim(t: Term, th: Thm) -> Thm:
    return infer("FORALL_ELIM", (th,), (t,))


def inst(sigma: Mapping[str, Term], th: Thm) -> Thm:
    return infer("INST", (th,), (tuple(sorted(sigma.items())),))


def contradiction(target: Term, th_b: Thm, th_nb: Thm) -> Thm:
    return infer("CONTRADICTION", (th_b, th_nb), (target,))


# --- derivation replay ----------------------------------------------------

def replay(th: Thm, store: "TheoremStore | None" = None,
           allow_validation: bool = False) -> Thm:
    """Re-run a derivation certificate through `infer`; alpha-compare the result.

    Axiom leaves are re-fetched from `store`. Validation sequents (used by the
    tactic validity wrapper in tests) are only accepted when explicitly allowed.
    """
    rule, args, prem = th.deriv
    if rule == "AXIOM":
        (name,) = args
        if store is None:
            raise RuleMismatch(f"axiom {name} cannot be replayed without a store")
        ref = store[name]
        got = ref
    elif rule == "VALIDATION":
        if not allow_validation:
            raise RuleMismatch("validation sequent outside a validity check")
        got = th
    else:
        replayed = tuple(replay(p, store, allow_validation) for p in prem)
        got = infer(rule, replayed, args)
    if got.concl != th.concl or set(got.hyps) != set(th.hyps):
        raise RuleMismatch(f"replay of {rule} diverged")
    return got


def validation_sequent(hyps: Iterable[Term], concl: Term) -> Thm:
    """A sequent taken on faith; only for justification validity checking."""
    return _mk(hyps, concl, ("VALIDATION", (), ()))


def axiom(name: str, t: Term) -> Thm:
    """A named axiom; used by TheoremStore when loading a bundle."""
    return _mk((), t, ("AXIOM", (name,), ()))


class TheoremStore:
    """Named theorems; preloaded from a bundle, extendable by proved results."""

    def __init__(self, entries: Mapping[str, Thm] | None = None):
        self._entries: dict[str, Thm] = dict(entries or {})

    def __contains__(self, name: str) -> bool:
        return name in self._entries

    def __getitem__(self, name: str) -> Thm:
        try:
            return self._entries[name]
        except KeyError:
            raise UnknownTheorem(name) from None

    def names(self) -> list[str]:
        return list(self._entries)

    def extended(self, name: str, th: Thm) -> "TheoremStore":
        if name in self._entries:
            raise RuleMismatch(f"theorem name {name} already in store")
        out = TheoremStore(self._entries)
        out._entries[name] = th
        return out


def load_store_text(text: str) -> TheoremStore:
    """Parse a bundle: one `name : formula` per line; blank and # lines skipped."""
    entries: dict[str, Thm] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        name, sep, formula = line.partition(":")
        name = name.strip()
        if not sep or not name:
            raise RuleMismatch(f"bundle line {lineno}: expected `name : formula`")
        if name in entries:
            raise RuleMismatch(f"bundle line {lineno}: duplicate name {name}")
        entries[name] = axiom(name, parse_term(formula.strip()))
    return TheoremStore(entries)


def load_store(path) -> TheoremStore:
    with open(path, "r", encoding="utf-8") as fh:
        return load_store_text(fh.read())
