"""Sorted first-order terms for propositional logic plus Peano naturals.

A Term is one of: variable, function application (ZERO, SUC, ADD, MUL, SUM),
predicate (EQ, LT, LE), connective (NOT, AND, OR, IMP, IFF) or quantifier
(FORALL, EXISTS binding a nat variable). Every node is well-sorted by
construction. Equality and hashing are up to alpha-equivalence, so terms can
be used directly as dict keys and set members.

Numerals are sugar: the parser expands `2` to SUC (SUC 0) and the printer
re-sugars maximal SUC chains ending in 0.
"""

from __future__ import annotations

from typing import Iterator, Mapping

from .errors import SortError, TermSyntaxError

NAT = "nat"
BOOL = "bool"

# symbol -> (argument sorts, result sort)
FN_SIGS = {
    "ZERO": ((), NAT),
    "SUC": ((NAT,), NAT),
    "ADD": ((NAT, NAT), NAT),
    "MUL": ((NAT, NAT), NAT),
    "SUM": ((NAT,), NAT),
}
PRED_SIGS = {
    "EQ": ((NAT, NAT), BOOL),
    "LT": ((NAT, NAT), BOOL),
    "LE": ((NAT, NAT), BOOL),
}
CONN_SIGS = {
    "NOT": ((BOOL,), BOOL),
    "AND": ((BOOL, BOOL), BOOL),
    "OR": ((BOOL, BOOL), BOOL),
    "IMP": ((BOOL, BOOL), BOOL),
    "IFF": ((BOOL, BOOL), BOOL),
}
QUANTS = ("FORALL", "EXISTS")


class Term:
    """Immutable, well-sorted term; equality is alpha-equivalence."""

    __slots__ = ("kind", "name", "args", "sort", "_key", "_free")

    def __init__(self, kind: str, name: str, args: tuple["Term", ...], sort: str):
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "args", args)
        object.__setattr__(self, "sort", sort)
        object.__setattr__(self, "_key", None)
        object.__setattr__(self, "_free", None)

    def __setattr__(self, *_):
        raise AttributeError("Term is immutable")

    def key(self):
        """Canonical nameless form; alpha-equal terms have equal keys."""
        k = self._key
        if k is None:
            k = _alpha_key(self, ())
            object.__setattr__(self, "_key", k)
        return k

    def __eq__(self, other):
        return isinstance(other, Term) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"Term({render(self)!r})"

    def __str__(self):
        return render(self)


def _alpha_key(t: Term, bound: tuple[str, ...]):
    if t.kind == "var":
        for depth in range(len(bound) - 1, -1, -1):
            if bound[depth] == t.name:
                return ("b", len(bound) - 1 - depth)
        return ("v", t.name, t.sort)
    if t.kind == "quant":
        return ("q", _quant_kind(t), _alpha_key(t.args[0], bound + (_bname(t),)))
    return (t.kind[0], t.name) + tuple(_alpha_key(a, bound) for a in t.args)


def _bname(t: Term) -> str:
    # binder variable name is stored alongside the quantifier name
    return t.name.split(" ", 1)[1]


def _quant_kind(t: Term) -> str:
    return t.name.split(" ", 1)[0]


def mk_var(name: str, sort: str) -> Term:
    if sort not in (NAT, BOOL):
        raise SortError(f"bad sort {sort}")
    return Term("var", name, (), sort)


def mk_fn(sym: str, *args: Term) -> Term:
    arg_sorts, res = FN_SIGS[sym]
    _check_args(sym, arg_sorts, args)
    return Term("fn", sym, tuple(args), res)


def mk_pred(sym: str, *args: Term) -> Term:
    arg_sorts, res = PRED_SIGS[sym]
    _check_args(sym, arg_sorts, args)
    return Term("pred", sym, tuple(args), res)


def mk_conn(sym: str, *args: Term) -> Term:
    arg_sorts, res = CONN_SIGS[sym]
    _check_args(sym, arg_sorts, args)
    return Term("conn", sym, tuple(args), res)


def mk_quant(kind: str, var: str, body: Term) -> Term:
    if kind not in QUANTS:
        raise SortError(f"bad quantifier {kind}")
    if body.sort != BOOL:
        raise SortError("quantifier body must be bool")
    return Term("quant", f"{kind} {var}", (body,), BOOL)


def _check_args(sym, arg_sorts, args):
    if len(args) != len(arg_sorts):
        raise SortError(f"{sym} expects {len(arg_sorts)} arguments, got {len(args)}")
    for want, got in zip(arg_sorts, args):
        if got.sort != want:
            raise SortError(f"{sym} argument has sort {got.sort}, expected {want}")


# Convenience constructors used throughout the kernel and tactics.
ZERO = mk_fn("ZERO")


def suc(t: Term) -> Term:
    return mk_fn("SUC", t)


def add(a: Term, b: Term) -> Term:
    return mk_fn("ADD", a, b)


def mul(a: Term, b: Term) -> Term:
    return mk_fn("MUL", a, b)


def sum_fn(t: Term) -> Term:
    return mk_fn("SUM", t)


def eq(a: Term, b: Term) -> Term:
    return mk_pred("EQ", a, b)


def lt(a: Term, b: Term) -> Term:
    return mk_pred("LT", a, b)


def le(a: Term, b: Term) -> Term:
    return mk_pred("LE", a, b)


def neg(a: Term) -> Term:
    return mk_conn("NOT", a)


def conj(a: Term, b: Term) -> Term:
    return mk_conn("AND", a, b)


def disj(a: Term, b: Term) -> Term:
    return mk_conn("OR", a, b)


def imp(a: Term, b: Term) -> Term:
    return mk_conn("IMP", a, b)


def iff(a: Term, b: Term) -> Term:
    return mk_conn("IFF", a, b)


def forall(var: str, body: Term) -> Term:
    return mk_quant("FORALL", var, body)


def exists(var: str, body: Term) -> Term:
    return mk_quant("EXISTS", var, body)


def is_quant(t: Term, kind: str | None = None) -> bool:
    return t.kind == "quant" and (kind is None or _quant_kind(t) == kind)


def quant_parts(t: Term) -> tuple[str, str, Term]:
    """(FORALL|EXISTS, bound name, body) of a quantified term."""
    if t.kind != "quant":
        raise SortError("not a quantifier")
    return _quant_kind(t), _bname(t), t.args[0]


def numeral(n: int) -> Term:
    t = ZERO
    for _ in range(n):
        t = suc(t)
    return t


def numeral_of(t: Term) -> int | None:
    """The integer a pure SUC-chain denotes, or None."""
    n = 0
    while t.kind == "fn" and t.name == "SUC":
        n += 1
        t = t.args[0]
    if t.kind == "fn" and t.name == "ZERO":
        return n
    return None


def free_vars(t: Term) -> Mapping[str, str]:
    """Free variable name -> sort."""
    cached = t._free
    if cached is None:
        cached = dict(_free(t, frozenset()))
        object.__setattr__(t, "_free", cached)
    return cached


def _free(t: Term, bound: frozenset) -> Iterator[tuple[str, str]]:
    if t.kind == "var":
        if t.name not in bound:
            yield (t.name, t.sort)
    elif t.kind == "quant":
        yield from _free(t.args[0], bound | {_bname(t)})
    else:
        for a in t.args:
            yield from _free(a, bound)


def fresh_name(base: str, avoid) -> str:
    """A name not in `avoid`, derived from base by numeric suffixing."""
    base = base.rstrip("0123456789") or "x"
    if base not in avoid:
        return base
    i = 1
    while f"{base}{i}" in avoid:
        i += 1
    return f"{base}{i}"


def subst(t: Term, sigma: Mapping[str, Term]) -> Term:
    """Capture-avoiding substitution of free variables."""
    if not sigma:
        return t
    return _subst(t, dict(sigma))


def _subst(t: Term, sigma: dict) -> Term:
    if t.kind == "var":
        if t.name in sigma:
            v = sigma[t.name]
            if v.sort != t.sort:
                raise SortError(f"substituting {v.sort} term for {t.sort} var {t.name}")
            return v
        return t
    if t.kind == "quant":
        kind, b, body = quant_parts(t)
        inner = {k: v for k, v in sigma.items() if k != b}
        if not inner:
            return t
        clash = any(b in free_vars(v) for v in inner.values())
        if clash:
            avoid = set()
            for v in inner.values():
                avoid |= set(free_vars(v))
            avoid |= set(free_vars(body))
            nb = fresh_name(b, avoid)
            body = _subst(body, {b: mk_var(nb, NAT)})
            b = nb
        return mk_quant(kind, b, _subst(body, inner))
    if not t.args:
        return t
    new_args = tuple(_subst(a, sigma) for a in t.args)
    return Term(t.kind, t.name, new_args, t.sort)


# --- paths ---------------------------------------------------------------

def subterm_at(t: Term, path: tuple[int, ...]) -> Term:
    for i in path:
        t = t.args[i]
    return t


def replace_at(t: Term, path: tuple[int, ...], new: Term) -> Term:
    if not path:
        if new.sort != t.sort:
            raise SortError("replacement changes sort")
        return new
    i = path[0]
    args = list(t.args)
    args[i] = replace_at(args[i], path[1:], new)
    return Term(t.kind, t.name, tuple(args), t.sort)


def binders_on_path(t: Term, path: tuple[int, ...]) -> frozenset:
    names = set()
    for i in path:
        if t.kind == "quant":
            names.add(_bname(t))
        t = t.args[i]
    return frozenset(names)


def subterms_with_paths(t: Term) -> Iterator[tuple[tuple[int, ...], Term]]:
    stack = [((), t)]
    while stack:
        path, cur = stack.pop()
        yield path, cur
        for i in range(len(cur.args) - 1, -1, -1):
            stack.append((path + (i,), cur.args[i]))


# --- matching ------------------------------------------------------------

def match(pattern: Term, target: Term,
          pattern_vars: frozenset | None = None) -> dict[str, Term] | None:
    """First-order matching up to alpha-equivalence.

    Free variables of the pattern (restricted to `pattern_vars` when given)
    act as match variables. Returns the most general substitution, or None.
    A match variable never captures a variable bound in the target.
    """
    if pattern_vars is None:
        pattern_vars = frozenset(free_vars(pattern))
    sigma: dict[str, Term] = {}
    if _match(pattern, target, pattern_vars, {}, {}, sigma):
        return sigma
    return None


def _match(p: Term, t: Term, pvars, penv: dict, tenv: dict, sigma) -> bool:
    if p.kind == "var":
        if p.name in penv:
            # bound pattern variable: must correspond positionally
            return t.kind == "var" and tenv.get(t.name) == penv[p.name]
        if p.name in pvars:
            if p.sort != t.sort:
                return False
            # no target-bound variable may escape through the binding
            if any(name in tenv for name in free_vars(t)):
                return False
            if p.name in sigma:
                return sigma[p.name] == t
            sigma[p.name] = t
            return True
        return t.kind == "var" and t.name == p.name and t.name not in tenv
    if p.kind != t.kind:
        return False
    if p.kind == "quant":
        pk, pb, pbody = quant_parts(p)
        tk, tb, tbody = quant_parts(t)
        if pk != tk:
            return False
        depth = len(penv)
        return _match(pbody, tbody, pvars,
                      {**penv, pb: depth}, {**tenv, tb: depth}, sigma)
    if p.name != t.name or len(p.args) != len(t.args):
        return False
    return all(_match(pa, ta, pvars, penv, tenv, sigma)
               for pa, ta in zip(p.args, t.args))


# --- concrete syntax ------------------------------------------------------

_TOKEN_SPECS = (
    "<=>", "==>", "/\\", "\\/", "<>", "<=", "<", "=", "+", "*",
    "~", "!", "?", ".", "(", ")",
)


def _lex(src: str) -> list[tuple[str, str, int]]:
    toks = []
    i, n = 0, len(src)
    while i < n:
        c = src[i]
        if c.isspace():
            i += 1
            continue
        if c.isdigit():
            j = i
            while j < n and src[j].isdigit():
                j += 1
            toks.append(("num", src[i:j], i))
            i = j
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (src[j].isalnum() or src[j] == "_"):
                j += 1
            toks.append(("ident", src[i:j], i))
            i = j
            continue
        for op in _TOKEN_SPECS:
            if src.startswith(op, i):
                toks.append(("op", op, i))
                i += len(op)
                break
        else:
            raise TermSyntaxError(f"unexpected character {c!r}", i)
    toks.append(("end", "", n))
    return toks


_FN_WORDS = {"SUC": "SUC", "sum": "SUM"}
_COMPARATORS = {"=": "EQ", "<": "LT", "<=": "LE"}


class _TermParser:
    def __init__(self, src: str):
        self.src = src
        self.toks = _lex(src)
        self.pos = 0
        self.bound: list[str] = []

    def peek(self):
        return self.toks[self.pos]

    def next(self):
        t = self.toks[self.pos]
        self.pos += 1
        return t

    def expect(self, text):
        kind, val, at = self.next()
        if val != text:
            raise TermSyntaxError(f"expected {text!r}, found {val!r}", at)

    def fail(self, msg):
        kind, val, at = self.peek()
        raise TermSyntaxError(f"{msg} (found {val!r})", at)

    # formula levels, loosest first: IFF, IMP, OR, AND, NOT, atoms;
    # every binary connective associates to the right
    def formula(self) -> Term:
        t = self.imp_level()
        if self.peek()[1] == "<=>":
            self.next()
            return iff(t, self.formula())
        return t

    def imp_level(self) -> Term:
        t = self.or_level()
        if self.peek()[1] == "==>":
            self.next()
            return imp(t, self.imp_level())
        return t

    def or_level(self) -> Term:
        t = self.and_level()
        if self.peek()[1] == "\\/":
            self.next()
            return disj(t, self.or_level())
        return t

    def and_level(self) -> Term:
        t = self.neg_level()
        if self.peek()[1] == "/\\":
            self.next()
            return conj(t, self.and_level())
        return t

    def neg_level(self) -> Term:
        if self.peek()[1] == "~":
            self.next()
            return neg(self.neg_level())
        return self.formula_atom()

    def formula_atom(self) -> Term:
        kind, val, at = self.peek()
        if val in ("!", "?"):
            self.next()
            names = []
            while self.peek()[0] == "ident":
                names.append(self.next()[1])
            if not names:
                self.fail("expected bound variable")
            self.expect(".")
            self.bound.extend(names)
            body = self.formula()
            del self.bound[len(self.bound) - len(names):]
            q = forall if val == "!" else exists
            for nm in reversed(names):
                body = q(nm, body)
            return body
        # try comparison of two arith expressions, else a lone bool variable,
        # else a parenthesized formula
        save = self.pos
        try:
            lhs = self.arith()
            nxt = self.peek()[1]
            if nxt in _COMPARATORS:
                self.next()
                rhs = self.arith()
                return mk_pred(_COMPARATORS[nxt], lhs, rhs)
            if nxt == "<>":
                self.next()
                rhs = self.arith()
                return neg(eq(lhs, rhs))
            if lhs.kind == "var":
                return self.as_bool_var(lhs, at)
            raise TermSyntaxError("nat expression used as proposition", at)
        except TermSyntaxError:
            self.pos = save
        if val == "(":
            self.next()
            t = self.formula()
            self.expect(")")
            return t
        self.fail("expected a formula")

    def as_bool_var(self, v: Term, at: int) -> Term:
        if v.name in self.bound:
            raise SortError(f"bound nat variable {v.name} used as proposition")
        return mk_var(v.name, BOOL)

    # arithmetic levels: +, *, application, atoms
    def arith(self) -> Term:
        t = self.mul_level()
        while self.peek()[1] == "+":
            self.next()
            t = add(t, self.mul_level())
        return t

    def mul_level(self) -> Term:
        t = self.app_level()
        while self.peek()[1] == "*":
            self.next()
            t = mul(t, self.app_level())
        return t

    def app_level(self) -> Term:
        kind, val, at = self.peek()
        if kind == "ident" and val in _FN_WORDS:
            self.next()
            return mk_fn(_FN_WORDS[val], self.app_level())
        return self.arith_atom()

    def arith_atom(self) -> Term:
        kind, val, at = self.next()
        if kind == "num":
            return numeral(int(val))
        if kind == "ident":
            return mk_var(val, NAT)
        if val == "(":
            t = self.arith()
            self.expect(")")
            return t
        raise TermSyntaxError("expected a nat term", at)


def _check_sort_consistency(t: Term) -> Term:
    sorts: dict[str, str] = {}
    for name, sort in _all_var_sorts(t, frozenset()):
        if sorts.setdefault(name, sort) != sort:
            raise SortError(f"variable {name} used at both sorts")
    return t


def _all_var_sorts(t: Term, bound: frozenset) -> Iterator[tuple[str, str]]:
    if t.kind == "var":
        if t.name not in bound:
            yield (t.name, t.sort)
    elif t.kind == "quant":
        yield from _all_var_sorts(t.args[0], bound | {_bname(t)})
    else:
        for a in t.args:
            yield from _all_var_sorts(a, bound)


def parse_term(source: str) -> Term:
    """Parse the interior of a quotation; prefers a bool (proposition) reading."""
    p = _TermParser(source)
    try:
        t = p.formula()
        if p.peek()[0] != "end":
            p.fail("trailing input")
    except (TermSyntaxError, SortError):
        p = _TermParser(source)
        t = p.arith()
        if p.peek()[0] != "end":
            p.fail("trailing input")
    return _check_sort_consistency(t)


def parse_nat_term(source: str) -> Term:
    """Parse a quotation interior as a nat term (variables default to nat)."""
    p = _TermParser(source)
    t = p.arith()
    if p.peek()[0] != "end":
        p.fail("trailing input")
    if t.sort != NAT:
        raise SortError("expected a nat term")
    return _check_sort_consistency(t)


# printing precedences; higher binds tighter
_PREC = {"IFF": 1, "IMP": 2, "OR": 3, "AND": 4, "NOT": 5}


def render(t: Term) -> str:
    """Deterministic concrete syntax; parse_term(render(t)) is alpha-equal to t."""
    return _render(t, 0)


def _render(t: Term, ctx: int) -> str:
    if t.kind == "var":
        return t.name
    if t.kind == "fn":
        n = numeral_of(t)
        if n is not None:
            return str(n)
        if t.name == "SUC":
            return _wrap(f"SUC {_render(t.args[0], 9)}", ctx, 8)
        if t.name == "SUM":
            return _wrap(f"sum {_render(t.args[0], 9)}", ctx, 8)
        if t.name == "ADD":
            return _wrap(f"{_render(t.args[0], 6)} + {_render(t.args[1], 7)}", ctx, 6)
        if t.name == "MUL":
            return _wrap(f"{_render(t.args[0], 7)} * {_render(t.args[1], 8)}", ctx, 7)
    if t.kind == "pred":
        op = {"EQ": "=", "LT": "<", "LE": "<="}[t.name]
        return _wrap(f"{_render(t.args[0], 6)} {op} {_render(t.args[1], 6)}", ctx, 5.5)
    if t.kind == "conn":
        if t.name == "NOT":
            a = t.args[0]
            if a.kind == "pred" and a.name == "EQ":
                return _wrap(
                    f"{_render(a.args[0], 6)} <> {_render(a.args[1], 6)}", ctx, 5.5)
            return _wrap(f"~{_render(a, _PREC['NOT'])}", ctx, _PREC["NOT"])
        op = {"AND": "/\\", "OR": "\\/", "IMP": "==>", "IFF": "<=>"}[t.name]
        p = _PREC[t.name]
        # right-associated chains print without parentheses
        return _wrap(f"{_render(t.args[0], p + 0.5)} {op} {_render(t.args[1], p)}",
                     ctx, p)
    if t.kind == "quant":
        kind, b, body = quant_parts(t)
        mark = "!" if kind == "FORALL" else "?"
        names = [b]
        while is_quant(body, kind):
            _, b2, body2 = quant_parts(body)
            names.append(b2)
            body = body2
        inner = f"{mark}{' '.join(names)}. {_render(body, 0)}"
        return f"({inner})" if ctx > 0 else inner
    raise AssertionError(f"unprintable term {t.kind}")


def _wrap(s: str, ctx, mine) -> str:
    return f"({s})" if ctx > mine else s
