"""Oriented rewriting with kernel-checked justifications.

Rules come from equational theorems (EQ or IFF, possibly universally closed,
possibly conjunctions of equations). Every rewrite step records the exact
instantiated theorem used, so a |- t = t' (or <=>) chain can be rebuilt through
the kernel afterwards. Permutative rules (ADD_COMM style) only fire when they
strictly decrease a total term order, which keeps rewriting terminating; a
step budget guards everything else.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

from .derived import (
    eqish_sides, prove_add_numerals, prove_mul_numerals, strip_foralls,
)
from .errors import TacticFails
from .kernel import Thm, conj_elim_l, conj_elim_r, inst
from .terms import (
    Term, binders_on_path, free_vars, match, numeral, numeral_of, render,
    replace_at, subst,
)


@dataclass(frozen=True)
class RewriteRule:
    lhs: Term
    rhs: Term
    pattern_vars: frozenset
    thm: Thm
    permutative: bool

    def instantiated(self, sigma: dict) -> Thm:
        if not sigma:
            return self.thm
        return inst(sigma, self.thm)


def _is_permutative(lhs: Term, rhs: Term, pvars: frozenset) -> bool:
    sigma = match(lhs, rhs, pvars)
    return sigma is not None and all(v.kind == "var" for v in sigma.values())


def rules_from_thm(th: Thm, schematic: bool = True) -> list[RewriteRule]:
    """Split a theorem into oriented rewrite rules.

    Universally bound variables (and, for `schematic` theorems, free variables)
    become pattern variables. Conjunctions split recursively. Non-equational
    conjuncts are skipped.
    """
    out: list[RewriteRule] = []

    def walk(cur: Thm, pvars: set):
        names, cur = strip_foralls(cur)
        pvars = pvars | set(names)
        c = cur.concl
        if c.kind == "conn" and c.name == "AND":
            walk(conj_elim_l(cur), pvars)
            walk(conj_elim_r(cur), pvars)
            return
        if (c.kind == "pred" and c.name == "EQ") or \
           (c.kind == "conn" and c.name == "IFF"):
            lhs, rhs = c.args
            vars_ = frozenset(pvars)
            if lhs.kind == "var" and lhs.name in vars_:
                return  # a bare-variable lhs would rewrite everything
            if not (set(free_vars(rhs)) & vars_) <= (set(free_vars(lhs)) & vars_):
                return  # rhs mentions pattern vars the lhs cannot bind
            out.append(RewriteRule(lhs, rhs, vars_, cur,
                                   _is_permutative(lhs, rhs, vars_)))

    base = set(free_vars(th.concl)) if schematic else set()
    walk(th, base)
    return out


def rules_from_thms(thms, schematic: bool = True) -> list[RewriteRule]:
    out = []
    for th in thms:
        out.extend(rules_from_thm(th, schematic))
    return out


def _postorder(t: Term, path=()) -> Iterator[tuple[tuple[int, ...], Term]]:
    for i, a in enumerate(t.args):
        yield from _postorder(a, path + (i,))
    yield (path, t)


def term_order_key(t: Term) -> tuple:
    return (_size(t), render(t))


def _size(t: Term) -> int:
    return 1 + sum(_size(a) for a in t.args)


class Rewriter:
    """Exhaustive leftmost-innermost rewriting with a step budget.

    `steps` accumulates (path, new_subterm, |- old = new) triples suitable for
    derived.transform_proof.
    """

    def __init__(self, rules, budget: int = 1000, fold_ground: bool = True):
        self.rules = list(rules)
        self.budget = budget
        self.fold_ground = fold_ground

    def rewrite(self, t: Term) -> tuple[Term, list]:
        steps = []
        while True:
            hit = self._find(t)
            if hit is None:
                return t, steps
            path, to, thm = hit
            t = replace_at(t, path, to)
            steps.append((path, to, thm))
            self.budget -= 1
            if self.budget < 0:
                raise TacticFails("rewrite budget exceeded (loop guard)")

    def _find(self, whole: Term):
        for path, s in _postorder(whole):
            got = self._redex(whole, path, s)
            if got is not None:
                return got
        return None

    def _redex(self, whole: Term, path, s: Term):
        if self.fold_ground and s.kind == "fn" and s.name in ("ADD", "MUL"):
            a, b = numeral_of(s.args[0]), numeral_of(s.args[1])
            if a is not None and b is not None:
                if s.name == "ADD":
                    return (path, numeral(a + b), prove_add_numerals(a, b))
                return (path, numeral(a * b), prove_mul_numerals(a, b))
        binders = binders_on_path(whole, path)
        for rule in self.rules:
            if rule.lhs.sort != s.sort:
                continue
            if binders and any(
                    x in binders for h in rule.thm.hyps for x in free_vars(h)):
                continue  # rewriting here would capture a binder in a hypothesis
            sigma = match(rule.lhs, s, rule.pattern_vars)
            if sigma is None:
                continue
            to = subst(rule.rhs, sigma)
            if to == s:
                continue
            if rule.permutative:
                candidate = replace_at(whole, path, to)
                if not term_order_key(candidate) < term_order_key(whole):
                    continue
            try:
                thm = rule.instantiated(sigma)
            except Exception:
                continue
            lhs_inst, _ = eqish_sides(thm)
            if lhs_inst != s:
                continue
            return (path, to, thm)
        return None
