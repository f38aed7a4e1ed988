"""Independent oracles used by the parser and induction tests.

The brute-force enumerator re-implements "all derivations of a span" by naive
top-down search with the same guard and value semantics as the chart parser,
but shares none of its machinery.
"""

from __future__ import annotations

import random

from dialectic.grammar import Cat, Grammar, Terminal, beta_reduce
from dialectic.parser import Token
from dialectic.tactics import Registry, TacticExpr


class BruteDeriv:
    def __init__(self, rule, category, children, value):
        self.rule = rule
        self.category = category
        self.children = children
        self.value = value

    def infix_prec(self):
        return self.rule.infix_prec if self.rule is not None else None


def _terminal_matches(term: Terminal, tok: Token) -> bool:
    if term.quotation:
        if tok.kind != "quotation":
            return False
        from dialectic.terms import parse_term
        try:
            return parse_term(term.text) == parse_term(tok.text)
        except Exception:
            return term.text.strip() == tok.text.strip()
    return tok.kind != "quotation" and tok.text == term.text


def _guards_ok(rule, cat_children) -> bool:
    if rule.open_slots:
        return True
    if rule.infix_prec is not None:
        tactic_slots = [d for d in cat_children if d.category == "TACTIC"]
        if not tactic_slots:
            return True
        *init, last = tactic_slots
        for d in init:
            p = d.infix_prec()
            if p is not None and p < rule.infix_prec:
                return False
        p = last.infix_prec()
        return p is None or p > rule.infix_prec
    return all(not (d.category == "TACTIC" and d.infix_prec() is not None)
               for d in cat_children)


def brute_force_values(grammar: Grammar, tokens: list[Token], target: str,
                       registry: Registry) -> set:
    """Value keys of every full-span derivation, by exhaustive enumeration."""

    def derive(cat: str, i: int, j: int, depth: int):
        if depth < 0:
            return
        if cat == "TOKEN":
            if j == i + 1 and tokens[i].kind == "word":
                yield BruteDeriv(None, "TOKEN", (), tokens[i].text)
            return
        if cat == "QTOKEN":
            if j == i + 1 and tokens[i].kind == "quotation":
                yield BruteDeriv(None, "QTOKEN", (), tokens[i].text)
            return
        for rule in grammar.rules:
            if rule.lhs != cat:
                continue
            for children in cover(rule.rhs, i, j, depth):
                cat_children = [c for c in children if c is not None]
                if not _guards_ok(rule, cat_children):
                    continue
                try:
                    value = beta_reduce(rule.lf,
                                        [c.value for c in cat_children],
                                        registry)
                except Exception:
                    continue
                yield BruteDeriv(rule, cat, tuple(cat_children), value)

    def cover(items, i, j, depth):
        if not items:
            if i == j:
                yield ()
            return
        head, rest = items[0], items[1:]
        if isinstance(head, Terminal):
            if i < j and _terminal_matches(head, tokens[i]):
                for tail in cover(rest, i + 1, j, depth):
                    yield (None,) + tail
            return
        for k in range(i + 1, j + 1):
            here = list(derive(head.name, i, k,
                               depth - (1 if k == j and not rest else 0)))
            if not here:
                continue
            for tail in cover(rest, k, j, depth):
                for d in here:
                    yield (d,) + tail

    n = len(tokens)
    out = set()
    # unit-rule chains shrink no tokens; a depth budget cuts the cycles
    for d in derive(target, 0, n, depth=n + 12):
        v = d.value
        out.add(v.key() if isinstance(v, TacticExpr) else ("text", v))
    return out


def brute_maximal_spans(grammar: Grammar, tokens: list[Token],
                        registry: Registry):
    """maximal_spans re-derived from brute-force sub-span parses."""
    from dialectic.grammar import ARG_CATEGORIES
    n = len(tokens)
    parses: dict = {}
    for cat in ARG_CATEGORIES:
        for i in range(n):
            for j in range(i + 1, n + 1):
                vals = brute_force_values(grammar, tokens[i:j], cat, registry)
                if vals:
                    parses[(cat, i, j)] = vals
    out = []
    for (cat, i, j), vals in parses.items():
        if any((c2 == cat and (i2, j2) != (i, j) and i2 <= i and j <= j2)
               for (c2, i2, j2) in parses):
            continue
        for v in vals:
            out.append(((i, j), cat, v))
    return out


def sample_tokens(grammar: Grammar, registry: Registry, category: str,
                  rng: random.Random, max_depth: int = 6):
    """Sample a token string by random derivation from the grammar.

    Lookup TOKENs are drawn from the registry slice of the needed category;
    plain THM tokens from a small theorem-name pool.
    """
    from dialectic.grammar import CAT_SORT, LfLookup, LfThmRef

    thm_names = ["ADD_COMM", "ADD_ASSOC", "LE_LT", "MULT_CLAUSES", "sum_def"]
    quote_texts = ["0 = 0", "n + 0 = n", "n"]

    def expand(cat: str, depth: int):
        if cat == "QTOKEN":
            return [Token("quotation", rng.choice(quote_texts), 0, 0)]
        rules = [r for r in grammar.rules if r.lhs == cat]
        if depth <= 0:
            # prefer shortest expansions when out of fuel
            rules = sorted(rules, key=lambda r: len(r.rhs))[:2]
        if not rules:
            raise ValueError(f"no rules for {cat}")
        rule = rng.choice(rules)
        toks = []
        for item in rule.rhs:
            if isinstance(item, Terminal):
                kind = "quotation" if item.quotation else (
                    "punct" if item.text in "[]()," else "word")
                toks.append(Token(kind, item.text, 0, 0))
            elif item.name == "TOKEN":
                if isinstance(rule.lf.body, LfThmRef):
                    toks.append(Token("word", rng.choice(thm_names), 0, 0))
                else:
                    assert isinstance(rule.lf.body, LfLookup)
                    slice_cat = rule.lf.body.category
                    names = registry.names_of_type(CAT_SORT[slice_cat])
                    if not names:
                        raise ValueError(f"empty registry slice {slice_cat}")
                    toks.append(Token("word", rng.choice(names), 0, 0))
            else:
                toks.extend(expand(item.name, depth - 1))
        return toks

    for _ in range(30):
        try:
            return expand(category, max_depth)
        except (ValueError, RecursionError):
            continue
    raise ValueError("sampling failed")
