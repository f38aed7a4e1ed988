"""The semantic grammar: categories, rules with logical forms, core grammar.

Categories encode tactic-level types, which is what keeps parses unambiguous:
a token only parses at a functional category when the registry knows it at
that type. Theorem names are the exception (THM -> TOKEN accepts any word)
and resolve at evaluation time.

Infix rules carry precedence metadata (by/suffices_by bind tighter than
ORELSE, which binds tighter than THEN/THEN_LT; application tightest of all);
the chart parser enforces it, so the closed category set needs no extra
stratification nonterminals.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .errors import MalformedRule, TypeMismatch
from .tactics import (
    Apply, GsymOf, Infix, Lookup, QuotLit, QuotListLit, Registry, TacticExpr,
    ThmListLit, ThmRef, INFIX_OPS,
    TAC, THM, THMLIST, QUOT, QUOTLIST,
    THM_TAC, THMLIST_TAC, TAC_TAC, THMTAC_TAC, TAC_TAC_TAC, QUOT_TAC,
    QUOT_THMTAC_THM_TAC, QUOTLIST_THMTAC_THM_TAC, QUOT_THMTAC_TAC,
)

# categories; THMS/QUOTS are internal list helpers and QTOKEN matches a
# quotation token the way TOKEN matches a word token
CATEGORIES = (
    "ROOT", "TACTIC", "THM", "THMLIST", "QUOT", "QUOTLIST",
    "THM_TAC", "THMLIST_TAC", "TAC_TAC", "THMTAC_TAC", "TAC_TAC_TAC",
    "QUOT_TAC", "QUOT_THMTAC_THM_TAC", "QUOTLIST_THMTAC_THM_TAC",
    "QUOT_THMTAC_TAC", "TOKEN", "QTOKEN", "THMS", "QUOTS",
)

#: categories whose derivations count as abstractable arguments
ARG_CATEGORIES = ("THM", "THMLIST", "QUOT", "QUOTLIST", "TACTIC")

CAT_SORT = {
    "TACTIC": TAC, "THM": THM, "THMLIST": THMLIST, "QUOT": QUOT,
    "QUOTLIST": QUOTLIST, "THM_TAC": THM_TAC, "THMLIST_TAC": THMLIST_TAC,
    "TAC_TAC": TAC_TAC, "THMTAC_TAC": THMTAC_TAC, "TAC_TAC_TAC": TAC_TAC_TAC,
    "QUOT_TAC": QUOT_TAC, "QUOT_THMTAC_THM_TAC": QUOT_THMTAC_THM_TAC,
    "QUOTLIST_THMTAC_THM_TAC": QUOTLIST_THMTAC_THM_TAC,
    "QUOT_THMTAC_TAC": QUOT_THMTAC_TAC,
    "ROOT": TAC, "THMS": THMLIST, "QUOTS": QUOTLIST,
}

#: Fig-4 style database slice names, used in lookup logical forms and dumps
SLICE_NAMES = {
    "TACTIC": "tactic", "THM_TAC": "thm->tactic",
    "THMLIST_TAC": "thm list->tactic", "TAC_TAC": "tactic->tactic",
    "QUOT_TAC": "term quotation->tactic", "THMTAC_TAC": "(thm->tactic)->tactic",
    "TAC_TAC_TAC": "tactic->tactic->tactic",
    "QUOT_THMTAC_THM_TAC": "term quotation->(thm->tactic)->thm->tactic",
    "QUOTLIST_THMTAC_THM_TAC":
        "term quotation list->(thm->tactic)->thm->tactic",
    "QUOT_THMTAC_TAC": "term quotation->(thm->tactic)->tactic",
}


@dataclass(frozen=True)
class Terminal:
    text: str
    quotation: bool = False

    def __str__(self):
        return f"'{self.text}'" if self.quotation else self.text


@dataclass(frozen=True)
class Cat:
    name: str

    def __post_init__(self):
        if self.name not in CATEGORIES:
            raise MalformedRule(f"unknown category {self.name}")

    def __str__(self):
        return f"${self.name}"


# --- logical forms ---------------------------------------------------------

class Lf:
    def pretty(self) -> str:
        raise NotImplementedError


@dataclass(frozen=True)
class LfVar(Lf):
    index: int

    def pretty(self):
        return f"x{self.index}"


@dataclass(frozen=True)
class LfConst(Lf):
    value: TacticExpr

    def pretty(self):
        from .tactics import render_expr
        return render_expr(self.value)


@dataclass(frozen=True)
class LfLookup(Lf):
    category: str
    inner: Lf

    def pretty(self):
        return f'lookup "{SLICE_NAMES[self.category]}" {self.inner.pretty()}'


@dataclass(frozen=True)
class LfThmRef(Lf):
    inner: Lf

    def pretty(self):
        return f"thmref {self.inner.pretty()}"


@dataclass(frozen=True)
class LfQuot(Lf):
    inner: Lf

    def pretty(self):
        return f"quot {self.inner.pretty()}"


@dataclass(frozen=True)
class LfGsym(Lf):
    inner: Lf

    def pretty(self):
        return f"GSYM {self.inner.pretty()}"


@dataclass(frozen=True)
class LfApply(Lf):
    fn: Lf
    arg: Lf

    def pretty(self):
        return f"({self.fn.pretty()} {self.arg.pretty()})"


@dataclass(frozen=True)
class LfInfix(Lf):
    op: str
    left: Lf
    right: Lf

    def pretty(self):
        return f"({self.left.pretty()} {self.op} {self.right.pretty()})"


@dataclass(frozen=True)
class LfList(Lf):
    kind: str  # "thm" | "quot"
    items: tuple

    def pretty(self):
        inner = ", ".join(i.pretty() for i in self.items)
        return f"[{inner}]"


@dataclass(frozen=True)
class LfCons(Lf):
    head: Lf
    tail: Lf

    def pretty(self):
        return f"({self.head.pretty()} :: {self.tail.pretty()})"


@dataclass(frozen=True)
class LogicalForm:
    params: tuple[str, ...]  # parameter categories, in rhs order
    body: Lf

    def pretty(self) -> str:
        if not self.params:
            return self.body.pretty()
        names = " ".join(f"x{i}" for i in range(len(self.params)))
        return f"(lambda {names}. {self.body.pretty()})"


class LookupFailed(Exception):
    """Token not registered at the required type; the derivation is dropped."""


def beta_reduce(lf: LogicalForm, args: Sequence, registry: Registry):
    """Evaluate a logical form over child values (token text or TacticExpr)."""
    if len(args) != len(lf.params):
        raise TypeMismatch(
            f"logical form expects {len(lf.params)} arguments, got {len(args)}")
    return _eval_lf(lf.body, list(args), registry)


def _eval_lf(body: Lf, args: list, registry: Registry):
    if isinstance(body, LfVar):
        return args[body.index]
    if isinstance(body, LfConst):
        return body.value
    if isinstance(body, LfLookup):
        token = _eval_lf(body.inner, args, registry)
        ttype = CAT_SORT[body.category]
        entry = registry.lookup(token)
        if entry is None or entry.ttype != ttype:
            raise LookupFailed(token)
        return Lookup(token, ttype)
    if isinstance(body, LfThmRef):
        return ThmRef(_eval_lf(body.inner, args, registry))
    if isinstance(body, LfQuot):
        return QuotLit(_eval_lf(body.inner, args, registry))
    if isinstance(body, LfGsym):
        return GsymOf(_eval_lf(body.inner, args, registry))
    if isinstance(body, LfApply):
        return Apply(_eval_lf(body.fn, args, registry),
                     _eval_lf(body.arg, args, registry))
    if isinstance(body, LfInfix):
        return Infix(body.op, _eval_lf(body.left, args, registry),
                     _eval_lf(body.right, args, registry))
    if isinstance(body, LfList):
        items = tuple(_eval_lf(i, args, registry) for i in body.items)
        return ThmListLit(items) if body.kind == "thm" else QuotListLit(items)
    if isinstance(body, LfCons):
        head = _eval_lf(body.head, args, registry)
        tail = _eval_lf(body.tail, args, registry)
        if isinstance(tail, ThmListLit):
            return ThmListLit((head, *tail.items))
        if isinstance(tail, QuotListLit):
            return QuotListLit((head, *tail.items))
        raise TypeMismatch("cons onto a non-list")
    raise TypeMismatch(f"cannot evaluate logical form {body!r}")


# --- rules and grammars ------------------------------------------------------

@dataclass(frozen=True)
class GrammarRule:
    lhs: str
    rhs: tuple
    lf: LogicalForm
    source: str = "core"  # core | induced | custom | library(<name>)
    infix_prec: int | None = None
    open_slots: bool = False  # ROOT and parenthesis rules admit infix children
    head_slots: tuple[int, ...] = ()  # cat-slot indices that are heads

    def __post_init__(self):
        if self.lhs not in CATEGORIES:
            raise MalformedRule(f"unknown category {self.lhs}")
        if not self.rhs:
            raise MalformedRule("empty right-hand side")
        cats = []
        for item in self.rhs:
            if isinstance(item, Terminal):
                if not item.quotation and (not item.text or " " in item.text):
                    raise MalformedRule(f"bad terminal {item.text!r}")
            elif isinstance(item, Cat):
                cats.append(item.name)
            else:
                raise MalformedRule(f"bad rhs item {item!r}")
        if tuple(cats) != self.lf.params:
            raise MalformedRule(
                f"logical form parameters {self.lf.params} do not match "
                f"rhs categories {tuple(cats)}")

    def cat_slots(self) -> list[int]:
        return [i for i, item in enumerate(self.rhs) if isinstance(item, Cat)]

    def dump(self) -> str:
        rhs = " ".join(str(i) for i in self.rhs)
        return f"{self.lhs} -> {rhs} :: {self.lf.pretty()} :: {self.source}"


@dataclass(frozen=True)
class Grammar:
    rules: tuple[GrammarRule, ...]
    version: int = 0

    def add(self, rule: GrammarRule) -> "Grammar":
        return Grammar(self.rules + (rule,), self.version + 1)

    def dump(self) -> str:
        return "\n".join(r.dump() for r in self.rules)


def add_rule(g: Grammar, r: GrammarRule) -> Grammar:
    """Extend a grammar snapshot; the old snapshot is untouched."""
    return g.add(r)


def _apply_lf(*cats: str) -> LogicalForm:
    body: Lf = LfVar(0)
    for i in range(1, len(cats)):
        body = LfApply(body, LfVar(i))
    return LogicalForm(tuple(cats), body)


def core_grammar(registry: Registry) -> Grammar:
    """The initial typed grammar over the registry's built-ins."""
    C, T = Cat, Terminal
    rules = []

    def rule(lhs, rhs, lf, **kw):
        rules.append(GrammarRule(lhs, tuple(rhs), lf, "core", **kw))

    ident = LogicalForm(("TACTIC",), LfVar(0))
    rule("ROOT", [C("TACTIC")], ident, open_slots=True)
    rule("TACTIC", [T("("), C("TACTIC"), T(")")], ident, open_slots=True)
    rule("THM_TAC", [T("("), C("THM_TAC"), T(")")],
         LogicalForm(("THM_TAC",), LfVar(0)), open_slots=True)

    # lookups: one per functional category; theorem names defer resolution
    rule("TACTIC", [C("TOKEN")],
         LogicalForm(("TOKEN",), LfLookup("TACTIC", LfVar(0))))
    for cat in ("THM_TAC", "THMLIST_TAC", "TAC_TAC", "THMTAC_TAC",
                "TAC_TAC_TAC", "QUOT_TAC", "QUOT_THMTAC_THM_TAC",
                "QUOTLIST_THMTAC_THM_TAC", "QUOT_THMTAC_TAC"):
        rule(cat, [C("TOKEN")],
             LogicalForm(("TOKEN",), LfLookup(cat, LfVar(0))))
    rule("THM", [C("TOKEN")], LogicalForm(("TOKEN",), LfThmRef(LfVar(0))))

    # applications: one per signature
    rule("TACTIC", [C("THM_TAC"), C("THM")], _apply_lf("THM_TAC", "THM"),
         head_slots=(0,))
    rule("TACTIC", [C("THMLIST_TAC"), C("THMLIST")],
         _apply_lf("THMLIST_TAC", "THMLIST"), head_slots=(0,))
    rule("TACTIC", [C("TAC_TAC"), C("TACTIC")],
         _apply_lf("TAC_TAC", "TACTIC"), head_slots=(0,))
    rule("TACTIC", [C("THMTAC_TAC"), C("THM_TAC")],
         _apply_lf("THMTAC_TAC", "THM_TAC"), head_slots=(0,))
    rule("TACTIC", [C("QUOT_TAC"), C("QUOT")],
         _apply_lf("QUOT_TAC", "QUOT"), head_slots=(0,))
    rule("TACTIC", [C("TAC_TAC_TAC"), C("TACTIC"), C("TACTIC")],
         _apply_lf("TAC_TAC_TAC", "TACTIC", "TACTIC"), head_slots=(0,))
    rule("TACTIC", [C("QUOT_THMTAC_TAC"), C("QUOT"), C("THM_TAC")],
         _apply_lf("QUOT_THMTAC_TAC", "QUOT", "THM_TAC"), head_slots=(0,))
    rule("THM_TAC", [C("QUOT_THMTAC_THM_TAC"), C("QUOT"), C("THM_TAC")],
         _apply_lf("QUOT_THMTAC_THM_TAC", "QUOT", "THM_TAC"), head_slots=(0,))
    rule("THM_TAC", [C("QUOTLIST_THMTAC_THM_TAC"), C("QUOTLIST"), C("THM_TAC")],
         _apply_lf("QUOTLIST_THMTAC_THM_TAC", "QUOTLIST", "THM_TAC"),
         head_slots=(0,))

    # theorem orientation
    rule("THM", [T("GSYM"), C("THM")],
         LogicalForm(("THM",), LfGsym(LfVar(0))))
    rule("THM", [T("<-"), C("THM")],
         LogicalForm(("THM",), LfGsym(LfVar(0))))

    # lists
    rule("THMLIST", [T("["), T("]")],
         LogicalForm((), LfConst(ThmListLit(()))))
    rule("THMLIST", [T("["), C("THMS"), T("]")],
         LogicalForm(("THMS",), LfVar(0)))
    rule("THMS", [C("THM")],
         LogicalForm(("THM",), LfList("thm", (LfVar(0),))))
    rule("THMS", [C("THM"), T(","), C("THMS")],
         LogicalForm(("THM", "THMS"), LfCons(LfVar(0), LfVar(1))))
    rule("QUOTLIST", [T("["), T("]")],
         LogicalForm((), LfConst(QuotListLit(()))))
    rule("QUOTLIST", [T("["), C("QUOTS"), T("]")],
         LogicalForm(("QUOTS",), LfVar(0)))
    rule("QUOTS", [C("QUOT")],
         LogicalForm(("QUOT",), LfList("quot", (LfVar(0),))))
    rule("QUOTS", [C("QUOT"), T(","), C("QUOTS")],
         LogicalForm(("QUOT", "QUOTS"), LfCons(LfVar(0), LfVar(1))))

    # quotations: the token's interior text becomes the literal
    rule("QUOT", [C("QTOKEN")],
         LogicalForm(("QTOKEN",), LfQuot(LfVar(0))))

    # infix tacticals with precedence (higher binds tighter)
    for op in ("THEN", "THEN_LT", "ORELSE"):
        rule("TACTIC", [C("TACTIC"), T(op), C("TACTIC")],
             LogicalForm(("TACTIC", "TACTIC"),
                         LfInfix(op, LfVar(0), LfVar(1))),
             infix_prec=INFIX_OPS[op][0])
    for op in ("by", "suffices_by"):
        rule("TACTIC", [C("QUOT"), T(op), C("TACTIC")],
             LogicalForm(("QUOT", "TACTIC"),
                         LfInfix(op, LfVar(0), LfVar(1))),
             infix_prec=INFIX_OPS[op][0])

    return Grammar(tuple(rules), version=0)
