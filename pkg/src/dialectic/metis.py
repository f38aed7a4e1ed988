"""Depth-bounded natural-deduction search.

Backward search over the goal structure with forward use of the supplied
facts (assumptions plus theorem arguments). Every success path constructs a
real kernel theorem, so whatever this closes is closed soundly. The depth
bound (default 8) is configurable; exceeding it is an ordinary failure.
"""

from __future__ import annotations

from .derived import (
    contradiction_from, prove_ground_atom, strip_foralls,
)
from .errors import RuleMismatch
from .kernel import (
    Thm, TheoremStore, assume, conj_elim_l, conj_elim_r, forall_intro,
    imp_elim, imp_intro, infer, sym,
)
from .terms import (
    NAT, Term, ZERO, free_vars, fresh_name, imp, is_quant, match,
    mk_var, quant_parts, subst, subterms_with_paths,
)

DEFAULT_DEPTH = 8


def _components(th: Thm) -> list[Thm]:
    c = th.concl
    if c.kind == "conn" and c.name == "AND":
        return _components(conj_elim_l(th)) + _components(conj_elim_r(th))
    return [th]


def _expand(facts) -> list[Thm]:
    """Conjunction-split every fact; add both directions of equivalences."""
    out: list[Thm] = []
    seen = set()
    for f in facts:
        for c in _components(f):
            if c.concl not in seen:
                seen.add(c.concl)
                out.append(c)
    extra = []
    for f in out:
        names, core = strip_foralls(f)
        if core.concl.kind == "conn" and core.concl.name == "IFF":
            for tag in ("IFF_ELIM_L", "IFF_ELIM_R"):
                side = infer(tag, (core,))
                try:
                    for x in reversed(names):
                        side = forall_intro(x, side)
                except RuleMismatch:
                    continue
                if side.concl not in seen:
                    seen.add(side.concl)
                    extra.append(side)
    return out + extra


def _imp_chain(t: Term) -> tuple[list[Term], Term]:
    ants = []
    while t.kind == "conn" and t.name == "IMP":
        ants.append(t.args[0])
        t = t.args[1]
    return ants, t


class _Search:
    def __init__(self, store: TheoremStore):
        self.store = store
        self.failed: set = set()
        self.fresh_counter = 0

    def prove(self, goal: Term, facts: list[Thm], depth: int) -> Thm | None:
        key = (goal, frozenset(f.concl for f in facts), depth > 0)
        if key in self.failed:
            return None
        got = self._prove(goal, facts, depth)
        if got is None:
            self.failed.add(key)
        return got

    def _prove(self, goal: Term, facts: list[Thm], depth: int) -> Thm | None:
        for f in facts:
            if f.concl == goal:
                return f
        got = prove_ground_atom(goal, self.store)
        if got is not None:
            return got
        # contradictory facts prove anything
        by_concl = {f.concl: f for f in facts}
        for f in facts:
            c = f.concl
            if c.kind == "conn" and c.name == "NOT" and c.args[0] in by_concl:
                return infer("CONTRADICTION", (by_concl[c.args[0]], f), (goal,))
            pair = contradiction_from(c, self.store)
            if pair is not None:
                return infer("CONTRADICTION", pair, (goal,))
        # symmetric equations
        if goal.kind == "pred" and goal.name == "EQ":
            for f in facts:
                c = f.concl
                if c.kind == "pred" and c.name == "EQ" and \
                        c.args[0] == goal.args[1] and c.args[1] == goal.args[0]:
                    return sym(f)

        kind, name = goal.kind, goal.name
        if kind == "conn" and name == "AND":
            a = self.prove(goal.args[0], facts, depth)
            if a is None:
                return None
            b = self.prove(goal.args[1], facts, depth)
            if b is None:
                return None
            return infer("CONJ_INTRO", (a, b))
        if kind == "conn" and name == "IMP":
            ant, cons = goal.args
            body = self.prove(cons, _expand(facts + [assume(ant)]), depth)
            if body is None:
                return None
            return imp_intro(ant, body)
        if kind == "conn" and name == "IFF":
            a, b = goal.args
            lr = self.prove(imp(a, b), facts, depth)
            rl = self.prove(imp(b, a), facts, depth) if lr else None
            if lr and rl:
                return infer("IFF_INTRO", (lr, rl))
            return None
        if kind == "conn" and name == "NOT":
            if depth > 0:
                inner = goal.args[0]
                extended = _expand(facts + [assume(inner)])
                for f in extended:
                    c = f.concl
                    if c.kind == "conn" and c.name == "NOT":
                        pos = self.prove(c.args[0], extended, depth - 1)
                        if pos is not None:
                            return infer("NOT_INTRO", (pos, f), (inner,))
            return None
        if kind == "quant" and is_quant(goal, "FORALL"):
            _, x, body = quant_parts(goal)
            avoid = set()
            for f in facts:
                for h in f.hyps:
                    avoid |= set(free_vars(h))
                avoid |= set(free_vars(f.concl))
            x2 = fresh_name(x, avoid | set(free_vars(body)) - {x})
            inner = self.prove(subst(body, {x: mk_var(x2, NAT)}), facts, depth)
            if inner is None:
                return None
            try:
                return forall_intro(x2, inner)
            except RuleMismatch:
                return None
        if kind == "quant" and is_quant(goal, "EXISTS"):
            if depth <= 0:
                return None
            _, x, body = quant_parts(goal)
            for w in self._witnesses(goal, facts):
                inner = self.prove(subst(body, {x: w}), facts, depth - 1)
                if inner is not None:
                    return infer("EXISTS_INTRO", (inner,), (goal, w))
            return None
        if kind == "conn" and name == "OR":
            a = self.prove(goal.args[0], facts, depth)
            if a is not None:
                return infer("DISJ_INTRO_L", (a,), (goal.args[1],))
            b = self.prove(goal.args[1], facts, depth)
            if b is not None:
                return infer("DISJ_INTRO_R", (b,), (goal.args[0],))

        if depth <= 0:
            return None
        # backward chaining through implications among facts
        for f in facts:
            names, core = strip_foralls(f)
            ants, concl = _imp_chain(core.concl)
            if not ants and not names:
                continue
            sigma = match(concl, goal, frozenset(names))
            if sigma is None:
                continue
            inst_th = f
            try:
                for x in names:
                    inst_th = infer("FORALL_ELIM", (inst_th,),
                                    (sigma.get(x, ZERO),))
            except RuleMismatch:
                continue
            ok = True
            for ant in ants:
                want = inst_th.concl.args[0]
                sub = self.prove(want, facts, depth - 1)
                if sub is None:
                    ok = False
                    break
                inst_th = imp_elim(inst_th, sub)
            if ok:
                return inst_th
        # case split on a disjunctive fact
        for f in facts:
            c = f.concl
            if c.kind == "conn" and c.name == "OR":
                rest = [g for g in facts if g is not f]
                t1 = self.prove(goal, _expand(rest + [assume(c.args[0])]),
                                depth - 1)
                if t1 is None:
                    continue
                t2 = self.prove(goal, _expand(rest + [assume(c.args[1])]),
                                depth - 1)
                if t2 is None:
                    continue
                return infer("DISJ_CASES", (f, t1, t2))
        return None

    def _witnesses(self, goal: Term, facts: list[Thm]):
        pool: list[Term] = []
        seen = set()
        sources = [goal] + [f.concl for f in facts]
        for src in sources:
            outer = set(free_vars(src))
            for _, s in subterms_with_paths(src):
                # skip candidates that leak variables bound inside the source
                if s.sort == NAT and s.kind in ("var", "fn") and \
                        set(free_vars(s)) <= outer and s not in seen:
                    seen.add(s)
                    pool.append(s)
                if len(pool) >= 10:
                    break
        if ZERO not in seen:
            pool.append(ZERO)
        return pool


def prove(goal_assumptions, goal_concl: Term, extra_thms, store: TheoremStore,
          depth: int = DEFAULT_DEPTH) -> Thm | None:
    """Close `assumptions |- concl` using assumptions plus extra theorems."""
    facts = [assume(h) for h in goal_assumptions] + list(extra_thms)
    search = _Search(store)
    return search.prove(goal_concl, _expand(facts), depth)
