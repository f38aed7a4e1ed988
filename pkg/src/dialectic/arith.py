"""Bounded arithmetic closer over Peano naturals.

Normalizes nat terms to a canonical sum-of-monomials form (constants first,
monomials sorted, like terms collected) purely through justified rewrite
steps, then closes equation and ordering goals by comparing normal forms and
difference polynomials. Every step is an instantiated store axiom or kernel
fact, so the resulting theorems replay through the kernel.

This is deliberately not a complete decision procedure; its scope (documented
in the README) covers polynomial equations modulo assumption equations, ground
comparisons, reflexive and additive-difference inequalities, and contradictory
assumptions.
"""

from __future__ import annotations

from .derived import (
    contradiction_from, eqish_sides, gsym, iff_mp_r, prove_ground_atom, spec,
    strip_foralls, transform_proof,
)
from .errors import TacticFails
from .kernel import (
    Thm, TheoremStore, assume, conj_elim_l, conj_elim_r, infer, inst, refl,
    sym, trans,
)
from .rewrite import Rewriter, rules_from_thm
from .terms import (
    Term, add, eq, free_vars, lt, match, mk_var, mul, numeral, numeral_of,
    render, replace_at, subst, subterm_at, suc,
)


def conj_components(th: Thm) -> list[Thm]:
    """Split a conjunction theorem into component theorems."""
    c = th.concl
    if c.kind == "conn" and c.name == "AND":
        return [*conj_components(conj_elim_l(th)), *conj_components(conj_elim_r(th))]
    return [th]


def _flat(op: str, t: Term) -> list[Term]:
    """Elements of a left-nested op chain, leftmost first."""
    out = []
    while t.kind == "fn" and t.name == op:
        out.append(t.args[1])
        t = t.args[0]
    out.append(t)
    out.reverse()
    return out


def _elem_path(n: int, i: int) -> tuple[int, ...]:
    if i == 0:
        return (0,) * (n - 1)
    return (0,) * (n - 1 - i) + (1,)


def _pair_path(n: int, i: int) -> tuple[int, ...]:
    """Path of the subterm containing chain elements i and i+1."""
    return (0,) * (n - 2 - i) if i > 0 else (0,) * (n - 2)


class ArithProver:
    def __init__(self, store: TheoremStore, budget: int = 4000):
        self.store = store
        self.budget = budget
        self._gsym_add_assoc = gsym(store["ADD_ASSOC"])
        self._gsym_mult_assoc = gsym(store["MULT_ASSOC"])
        self._gsym_rdistrib = gsym(store["RIGHT_ADD_DISTRIB"])
        mc = conj_components(_stripped(store["MULT_CLAUSES"]))
        self._mul_lzero, self._mul_rzero, self._mul_lone, self._mul_rone = mc[:4]
        ac = conj_components(_stripped(store["ADD_CLAUSES"]))
        self._add_lzero, self._add_rzero = ac[0], ac[1]

    # --- stage 1: eliminate SUC, distribute, associate left, fold ----------

    def _stage1_redex(self, whole: Term, path, s: Term):
        st = self.store
        if s.kind != "fn":
            return None
        if s.name == "SUC" and numeral_of(s) is None:
            return (path, spec(st["ADD1"], s.args[0]))
        if s.name == "ADD":
            a, b = s.args
            na, nb = numeral_of(a), numeral_of(b)
            if na is not None and nb is not None:
                from .derived import prove_add_numerals
                return (path, prove_add_numerals(na, nb))
            if na == 0:
                return (path, inst({"m": b}, self._add_lzero))
            if nb == 0:
                return (path, inst({"m": a}, self._add_rzero))
            if b.kind == "fn" and b.name == "ADD":
                return (path, spec(st["ADD_ASSOC"], a, b.args[0], b.args[1]))
        if s.name == "MUL":
            a, b = s.args
            na, nb = numeral_of(a), numeral_of(b)
            if na is not None and nb is not None:
                from .derived import prove_mul_numerals
                return (path, prove_mul_numerals(na, nb))
            if na == 0:
                return (path, inst({"m": b}, self._mul_lzero))
            if nb == 0:
                return (path, inst({"m": a}, self._mul_rzero))
            if na == 1:
                return (path, inst({"m": b}, self._mul_lone))
            if nb == 1:
                return (path, inst({"m": a}, self._mul_rone))
            if b.kind == "fn" and b.name == "ADD":
                return (path, spec(st["LEFT_ADD_DISTRIB"], b.args[0], b.args[1], a))
            if a.kind == "fn" and a.name == "ADD":
                return (path, spec(st["RIGHT_ADD_DISTRIB"], a.args[0], a.args[1], b))
            if b.kind == "fn" and b.name == "MUL":
                return (path, spec(st["MULT_ASSOC"], a, b.args[0], b.args[1]))
        return None

    def _apply(self, t: Term, steps: list, path, thm: Thm) -> Term:
        lhs, rhs = eqish_sides(thm)
        if subterm_at(t, path) != lhs:
            raise TacticFails("arithmetic step misaligned")
        steps.append((path, rhs, thm))
        self.budget -= 1
        if self.budget < 0:
            raise TacticFails("arithmetic budget exceeded")
        return replace_at(t, path, rhs)

    def _postorder(self, t: Term, path=()):
        for i, a in enumerate(t.args):
            yield from self._postorder(a, path + (i,))
        yield (path, t)

    def _run_stage1(self, t: Term, steps: list, base=()) -> Term:
        while True:
            hit = None
            for path, s in self._postorder(subterm_at(t, base), base):
                hit = self._stage1_redex(t, path, s)
                if hit is not None:
                    break
            if hit is None:
                return t
            t = self._apply(t, steps, hit[0], hit[1])

    # --- stage 2: sort and collect -----------------------------------------

    @staticmethod
    def _factor_key(f: Term):
        n = numeral_of(f)
        if n is not None:
            return (0, f"{n:012d}")
        return (1, render(f))

    @staticmethod
    def _atoms_of(m: Term) -> tuple:
        """Render keys of the non-numeral factors; () for a constant."""
        return tuple(render(f) for f in _flat("MUL", m) if numeral_of(f) is None)

    def _mono_key(self, m: Term):
        atoms = self._atoms_of(m)
        return (0 if not atoms else 1, atoms,
                numeral_of(m) if not atoms else 0)

    def _swap_batch(self, t: Term, base, chain: list, i: int,
                    comm: Thm, g_assoc: Thm, assoc: Thm) -> list:
        n = len(chain)
        pp = base + _pair_path(n, i)
        if i == 0:
            return [(pp, spec(comm, chain[0], chain[1]))]
        node = subterm_at(t, pp)
        prefix, x, y = node.args[0].args[0], node.args[0].args[1], node.args[1]
        return [
            (pp, spec(g_assoc, prefix, x, y)),
            (pp + (1,), spec(comm, x, y)),
            (pp, spec(assoc, prefix, y, x)),
        ]

    def _fix_product(self, t: Term, steps: list, base) -> Term | None:
        """One in-monomial fix at base path, or None when canonical.

        Canonical monomial: left-nested product, numeral coefficient (if any)
        as the deepest-left factor, atoms sorted by render key.
        """
        m = subterm_at(t, base)
        factors = _flat("MUL", m)
        if len(factors) < 2:
            return None
        n = len(factors)
        for i in range(n - 1):
            a, b = numeral_of(factors[i]), numeral_of(factors[i + 1])
            if a is not None and b is not None:
                from .derived import prove_mul_numerals
                pp = base + _pair_path(n, i)
                node = subterm_at(t, pp)
                if i > 0:
                    t = self._apply(t, steps, pp, spec(
                        self._gsym_mult_assoc, node.args[0].args[0],
                        node.args[0].args[1], node.args[1]))
                    pp = pp + (1,)
                return self._apply(t, steps, pp, prove_mul_numerals(a, b))
        for i in range(n - 1):
            if self._factor_key(factors[i]) > self._factor_key(factors[i + 1]):
                batch = self._swap_batch(t, base, factors, i,
                                         self.store["MULT_COMM"],
                                         self._gsym_mult_assoc,
                                         self.store["MULT_ASSOC"])
                for path, thm in batch:
                    t = self._apply(t, steps, path, thm)
                return t
        return None

    def _materialize_unit(self, t: Term, steps: list, epath) -> Term:
        """Give a coefficient-less monomial the explicit shape ((1*a1)*a2)..."""
        spine = epath
        while True:
            node = subterm_at(t, spine)
            if node.kind == "fn" and node.name == "MUL":
                spine = spine + (0,)
            else:
                break
        th = sym(inst({"m": subterm_at(t, spine)}, self._mul_lone))
        return self._apply(t, steps, spine, th)

    def _collect_lemma(self, m1: Term, m2: Term) -> Thm:
        """|- m1 + m2 = merged, for monomials with identical atom tails."""
        if m1.kind == "fn" and m1.name == "MUL" and \
                m2.kind == "fn" and m2.name == "MUL" and m1.args[1] == m2.args[1]:
            atom = m1.args[1]
            rec = self._collect_lemma(m1.args[0], m2.args[0])
            base = spec(self._gsym_rdistrib, m1.args[0], m2.args[0], atom)
            _, mid = eqish_sides(base)
            lifted = infer("CONGRUENCE", (rec,), (mid, (0,)))
            return trans(base, lifted)
        a, b = numeral_of(m1), numeral_of(m2)
        if a is None or b is None:
            raise TacticFails("collection shape mismatch")
        from .derived import prove_add_numerals
        return prove_add_numerals(a, b)

    def _fix_sum(self, t: Term, steps: list, base=()) -> Term | None:
        top = subterm_at(t, base)
        chain = _flat("ADD", top)
        n = len(chain)
        if n < 2:
            got = self._fix_product(t, steps, base) if top.kind == "fn" and \
                top.name == "MUL" else None
            return got
        # first, canonicalize each monomial
        for i in range(n):
            e = chain[i]
            if e.kind == "fn" and e.name == "MUL":
                got = self._fix_product(t, steps, base + _elem_path(n, i))
                if got is not None:
                    return got
        # adjacent numeral constants fold; 0 + m cleans up
        for i in range(n - 1):
            a, b = numeral_of(chain[i]), numeral_of(chain[i + 1])
            pp = base + _pair_path(n, i)
            if a is not None and b is not None:
                from .derived import prove_add_numerals
                node = subterm_at(t, pp)
                if i > 0:
                    t = self._apply(t, steps, pp, spec(
                        self._gsym_add_assoc, node.args[0].args[0],
                        node.args[0].args[1], node.args[1]))
                    pp = pp + (1,)
                return self._apply(t, steps, pp, prove_add_numerals(a, b))
            if a == 0 and i == 0:
                return self._apply(t, steps, pp,
                                   inst({"m": chain[1]}, self._add_lzero))
        # sort monomials
        for i in range(n - 1):
            if self._mono_key(chain[i]) > self._mono_key(chain[i + 1]):
                batch = self._swap_batch(t, base, chain, i,
                                         self.store["ADD_COMM"],
                                         self._gsym_add_assoc,
                                         self.store["ADD_ASSOC"])
                for path, thm in batch:
                    t = self._apply(t, steps, path, thm)
                return t
        # collect adjacent like monomials
        for i in range(n - 1):
            ka, kb = self._atoms_of(chain[i]), self._atoms_of(chain[i + 1])
            if ka and ka == kb:
                for j in (i, i + 1):
                    if numeral_of(_flat("MUL", chain[j])[0]) is None:
                        return self._materialize_unit(
                            t, steps, base + _elem_path(n, j))
                return self._collect_pair(t, steps, base, chain, i)
        return None

    def _collect_pair(self, t: Term, steps: list, base, chain, i) -> Term:
        n = len(chain)
        pp = base + _pair_path(n, i)
        node = subterm_at(t, pp)
        if i > 0:
            t = self._apply(t, steps, pp, spec(
                self._gsym_add_assoc, node.args[0].args[0],
                node.args[0].args[1], node.args[1]))
            pp = pp + (1,)
        pair = subterm_at(t, pp)
        return self._apply(t, steps, pp,
                           self._collect_lemma(pair.args[0], pair.args[1]))

    def normalize(self, t: Term, base=()) -> tuple[Term, list]:
        """Canonical form of the nat subterm at `base`, with justified steps."""
        steps: list = []
        t = self._run_stage1(t, steps, base)
        while True:
            got = self._fix_sum(t, steps, base)
            if got is None:
                # stage-2 moves can expose new stage-1 redexes (unit products)
                before = t
                t = self._run_stage1(t, steps, base)
                if t == before:
                    return t, steps
            else:
                t = got

    def prove_term_eq(self, t1: Term, t2: Term) -> Thm | None:
        n1, s1 = self.normalize(t1)
        n2, s2 = self.normalize(t2)
        if n1 != n2:
            return None
        th1 = transform_proof(t1, s1)
        th2 = transform_proof(t2, s2)
        return trans(th1, sym(th2))


def _stripped(th: Thm) -> Thm:
    return strip_foralls(th)[1]


def _poly(t: Term) -> dict:
    """Monomial atom-key tuple -> coefficient, for normalized terms."""
    out: dict = {}
    for m in _flat("ADD", t):
        factors = _flat("MUL", m)
        coeff = 1
        atoms = []
        for f in factors:
            v = numeral_of(f)
            if v is not None:
                coeff *= v
            else:
                atoms.append(render(f))
        key = tuple(sorted(atoms))
        out[key] = out.get(key, 0) + coeff
    return out


def _term_of_poly(p: dict, atom_terms: dict) -> Term | None:
    """Rebuild a term denoting the polynomial, using remembered atom terms."""
    parts = []
    for key in sorted(p, key=lambda k: (0 if not k else 1, k)):
        c = p[key]
        if c == 0:
            continue
        if not key:
            parts.append(numeral(c))
            continue
        chain = None
        for a in key:
            at = atom_terms[a]
            chain = at if chain is None else mul(chain, at)
        parts.append(chain if c == 1 else mul(numeral(c), chain))
    if not parts:
        return numeral(0)
    out = parts[0]
    for m in parts[1:]:
        out = add(out, m)
    return out


class ArithCloser:
    """Closes atom-level goals; the tactic layer strips quantifiers first."""

    def __init__(self, store: TheoremStore, budget: int = 4000):
        self.store = store
        self.budget = budget

    def _fact_thms(self, hyps) -> list[Thm]:
        facts = []
        for h in hyps:
            facts.extend(conj_components(assume(h)))
        return facts

    def contradiction_thm(self, hyps, concl: Term) -> Thm | None:
        facts = self._fact_thms(hyps)
        by_key = {f.concl: f for f in facts}
        for f in facts:
            c = f.concl
            neg_c = c.args[0] if c.kind == "conn" and c.name == "NOT" else None
            if neg_c is not None and neg_c in by_key:
                return infer("CONTRADICTION", (by_key[neg_c], f), (concl,))
            pair = contradiction_from(c, self.store)
            if pair is not None:
                return infer("CONTRADICTION", pair, (concl,))
        return None

    def _hyp_rules(self, prover: ArithProver, hyps) -> list:
        rules = []
        for f in self._fact_thms(hyps):
            core = _stripped(f)
            c = core.concl
            if not (c.kind == "pred" and c.name == "EQ"):
                continue
            try:
                nl, sl = prover.normalize(c.args[0])
                nr, sr = prover.normalize(c.args[1])
            except TacticFails:
                continue
            if nl == nr:
                continue
            thm = trans(sym(transform_proof(c.args[0], sl)),
                        trans(core, transform_proof(c.args[1], sr)))
            rules.extend(rules_from_thm(thm, schematic=False))
        return rules

    def close(self, hyps, concl: Term) -> Thm | None:
        th = self.contradiction_thm(hyps, concl)
        if th is not None:
            return th
        for f in self._fact_thms(hyps):
            if f.concl == concl:
                return f
        direct = prove_ground_atom(concl, self.store)
        if direct is not None:
            return direct
        if concl.kind != "pred":
            return None

        prover = ArithProver(self.store, self.budget)
        cur = concl
        steps: list = []
        try:
            hyp_rules = self._hyp_rules(prover, hyps)
            for _ in range(4):
                cur, s1 = self._normalize_sides(prover, cur)
                steps.extend(s1)
                if not hyp_rules:
                    break
                rw = Rewriter(hyp_rules, budget=200)
                nxt, s2 = rw.rewrite(cur)
                if nxt == cur:
                    break
                steps.extend(s2)
                cur = nxt
            cur, s3 = self._normalize_sides(prover, cur)
            steps.extend(s3)
        except TacticFails:
            return None
        closing = self._close_normalized(cur)
        if closing is None:
            return None
        chain = transform_proof(concl, steps)  # |- concl <=> cur
        return iff_mp_r(chain, closing)

    def _normalize_sides(self, prover: ArithProver, p: Term):
        steps: list = []
        for side in (0, 1):
            p, s = prover.normalize(p, base=(side,))
            steps.extend(s)
        return p, steps

    def _close_normalized(self, p: Term) -> Thm | None:
        a, b = p.args
        if p.name == "EQ":
            return refl(a) if a == b else None
        got = prove_ground_atom(p, self.store)
        if got is not None:
            return got
        pa, pb = _poly(a), _poly(b)
        diff = {k: pb.get(k, 0) - pa.get(k, 0) for k in set(pa) | set(pb)}
        if any(v < 0 for v in diff.values()):
            return None
        atom_terms = self._atom_terms(a, b)
        if p.name == "LE":
            if a == b:
                return prove_ground_atom(p, self.store)
            d = _term_of_poly(diff, atom_terms)
            th = spec(self.store["LESS_EQ_ADD"], a, d)  # |- a <= a + d
            return self._patch_rhs(th, add(a, d), b)
        if p.name == "LT":
            const = diff.get((), 0)
            if const < 1:
                return None
            diff[()] = const - 1
            d = _term_of_poly(diff, atom_terms)
            th = spec(self.store["LESS_ADD_SUC"], a, d)  # |- a < a + SUC d
            return self._patch_rhs(th, add(a, suc(d)), b)
        return None

    def _atom_terms(self, *terms) -> dict:
        out = {}
        for t in terms:
            for m in _flat("ADD", t):
                for f in _flat("MUL", m):
                    if numeral_of(f) is None:
                        out[render(f)] = f
        return out

    def _patch_rhs(self, th: Thm, built: Term, want: Term) -> Thm | None:
        """Rewrite |- a R built into |- a R want when built normalizes to want."""
        prover = ArithProver(self.store, self.budget)
        eqth = prover.prove_term_eq(built, want)
        if eqth is None:
            return None
        return infer("SUBST", (eqth, th), ((1,),))
