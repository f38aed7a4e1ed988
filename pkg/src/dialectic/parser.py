"""Tokenization and chart parsing of utterances under a grammar snapshot.

The chart is filled bottom-up by span length with a per-span fixpoint for
unit rules, memoizing every (category, span) cell, so parsing is polynomial
in the token count for a fixed grammar. Derivations carrying alpha-equal
values are deduplicated, which is what makes the type-encoded core grammar
effectively unambiguous.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import Ambiguous, NoParse, UnbalancedQuotation
from .grammar import (
    ARG_CATEGORIES, Cat, Grammar, GrammarRule, LookupFailed, Terminal,
    beta_reduce,
)
from .tactics import Registry, TacticExpr, render_expr
from .terms import parse_term

PUNCTS = ("[", "]", "(", ")", ",")
QUOTE_CHARS = ("'", "`")


@dataclass(frozen=True)
class Token:
    kind: str  # word | quotation | punct
    text: str
    start: int
    end: int

    def surface(self) -> str:
        if self.kind == "quotation":
            return f"'{self.text}'"
        return self.text


def tokenize(sentence: str) -> list[Token]:
    """Deterministic tokenization; quotation interiors are kept verbatim."""
    toks: list[Token] = []
    i, n = 0, len(sentence)
    while i < n:
        c = sentence[i]
        if c.isspace():
            i += 1
            continue
        if c in QUOTE_CHARS:
            j = sentence.find(c, i + 1)
            if j < 0:
                raise UnbalancedQuotation(i)
            toks.append(Token("quotation", sentence[i + 1:j], i, j + 1))
            i = j + 1
            continue
        if c in PUNCTS:
            toks.append(Token("punct", c, i, i + 1))
            i += 1
            continue
        if sentence.startswith("<-", i):
            toks.append(Token("word", "<-", i, i + 2))
            i += 2
            continue
        j = i
        while j < n and not sentence[j].isspace() and sentence[j] not in PUNCTS \
                and sentence[j] not in QUOTE_CHARS \
                and not sentence.startswith("<-", j):
            j += 1
        toks.append(Token("word", sentence[i:j], i, j))
        i = j
    return toks


@dataclass(frozen=True)
class Derivation:
    rule: GrammarRule | None  # None for TOKEN/QTOKEN leaves
    category: str
    span: tuple[int, int]
    children: tuple
    value: object  # TacticExpr, or token text for TOKEN/QTOKEN

    def infix_prec(self) -> int | None:
        return self.rule.infix_prec if self.rule is not None else None


def _value_key(v) -> object:
    if isinstance(v, TacticExpr):
        return v.key()
    return ("text", v)


class Chart:
    def __init__(self, grammar: Grammar, tokens: list[Token],
                 registry: Registry):
        self.grammar = grammar
        self.tokens = tokens
        self.registry = registry
        self.cells: dict = {}
        self._unit_rules = [r for r in grammar.rules
                            if len(r.rhs) == 1 and isinstance(r.rhs[0], Cat)]
        self._other_rules = [r for r in grammar.rules
                             if r not in self._unit_rules]
        self._min_len = {id(r): len(r.rhs) for r in grammar.rules}
        self._fill()

    def cell(self, cat: str, i: int, j: int) -> list[Derivation]:
        return list(self.cells.get((cat, i, j), {}).values())

    def _fill(self):
        n = len(self.tokens)
        for i, tok in enumerate(self.tokens):
            if tok.kind == "word":
                self._put(Derivation(None, "TOKEN", (i, i + 1), (), tok.text))
            elif tok.kind == "quotation":
                self._put(Derivation(None, "QTOKEN", (i, i + 1), (), tok.text))
        for length in range(1, n + 1):
            for i in range(0, n - length + 1):
                j = i + length
                # multi-item rules only reference strictly smaller spans
                for rule in self._other_rules:
                    if self._min_len[id(rule)] > length:
                        continue
                    first = rule.rhs[0]
                    if isinstance(first, Terminal) and \
                            not self._terminal_matches(first, self.tokens[i]):
                        continue
                    for children in self._matches(rule.rhs, i, j):
                        d = self._derive(rule, i, j, children)
                        if d is not None:
                            self._put(d)
                # unit rules can chain within the same span
                for _ in range(len(self._unit_rules) + 1):
                    added = False
                    for rule in self._unit_rules:
                        for d0 in self.cell(rule.rhs[0].name, i, j):
                            d = self._derive(rule, i, j, (d0,))
                            if d is not None and self._put(d):
                                added = True
                    if not added:
                        break

    def _put(self, d: Derivation) -> bool:
        key = (d.category, d.span[0], d.span[1])
        cell = self.cells.setdefault(key, {})
        vk = _value_key(d.value)
        if vk in cell:
            return False
        cell[vk] = d
        return True

    def _matches(self, items, i, j):
        """All ways to cover tokens[i:j] with the rhs item sequence."""
        if not items:
            if i == j:
                yield ()
            return
        head, rest = items[0], items[1:]
        min_rest = len(rest)
        if isinstance(head, Terminal):
            if i < j and j - (i + 1) >= min_rest and \
                    self._terminal_matches(head, self.tokens[i]):
                for tail in self._matches(rest, i + 1, j):
                    yield (None,) + tail
            return
        if not rest:
            cell = self.cells.get((head.name, i, j))
            if cell:
                for d in cell.values():
                    yield (d,)
            return
        for k in range(i + 1, j - min_rest + 1):
            cell = self.cells.get((head.name, i, k))
            if not cell:
                continue
            for tail in self._matches(rest, k, j):
                for d in cell.values():
                    yield (d,) + tail

    def _terminal_matches(self, term: Terminal, tok: Token) -> bool:
        if term.quotation:
            if tok.kind != "quotation":
                return False
            try:
                return parse_term(term.text) == parse_term(tok.text)
            except Exception:
                return term.text.strip() == tok.text.strip()
        return tok.kind != "quotation" and tok.text == term.text

    def _derive(self, rule: GrammarRule, i, j, children):
        cat_children = [d for d in children if d is not None]
        if not self._guards_ok(rule, cat_children):
            return None
        args = [d.value for d in cat_children]
        try:
            value = beta_reduce(rule.lf, args, self.registry)
        except LookupFailed:
            return None
        except Exception:
            return None
        return Derivation(rule, rule.lhs, (i, j), tuple(cat_children), value)

    def _guards_ok(self, rule: GrammarRule, cat_children) -> bool:
        if rule.open_slots:
            return True
        if rule.infix_prec is not None:
            # left operand may chain at equal precedence (left associativity),
            # the right operand must bind strictly tighter
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
        for d in cat_children:
            if d.category == "TACTIC" and d.infix_prec() is not None:
                return False
        return True


def parse_all(grammar: Grammar, tokens: list[Token], target: str,
              registry: Registry, chart: Chart | None = None
              ) -> list[Derivation]:
    """Every derivation of the full span at `target`, deduplicated by value."""
    if not tokens:
        return []
    chart = chart or Chart(grammar, tokens, registry)
    return chart.cell(target, 0, len(tokens))


def parse_unique(grammar: Grammar, tokens: list[Token], target: str,
                 registry: Registry) -> Derivation:
    """The unique derivation; NoParse/Ambiguous otherwise."""
    if not tokens:
        raise NoParse("empty input")
    chart = Chart(grammar, tokens, registry)
    ds = chart.cell(target, 0, len(tokens))
    if len(ds) == 1:
        return ds[0]
    if not ds:
        prefix = 0
        for j in range(len(tokens), 0, -1):
            if chart.cell(target, 0, j):
                prefix = j
                break
        covered = " ".join(t.surface() for t in tokens[:prefix])
        offending = tokens[prefix].surface() if prefix < len(tokens) else ""
        if prefix == 0:
            raise NoParse(f"no parse; first token {offending!r} begins no "
                          f"known {target.lower()} phrase")
        raise NoParse(f"longest parseable prefix: {covered!r}; "
                      f"cannot continue at {offending!r}")
    raise Ambiguous([_render_value(d.value) for d in ds])


def _render_value(v) -> str:
    if isinstance(v, TacticExpr):
        return render_expr(v)
    return repr(v)


def maximal_spans(grammar: Grammar, tokens: list[Token], registry: Registry,
                  chart: Chart | None = None):
    """Maximal argument-category spans: (span, category, value) triples.

    A span is maximal for a category when no strictly larger span parses at
    the same category. Ordered by start offset, then descending length.
    """
    if not tokens:
        return []
    chart = chart or Chart(grammar, tokens, registry)
    n = len(tokens)
    spans_by_cat: dict[str, list] = {}
    for cat in ARG_CATEGORIES:
        have = []
        for i in range(n):
            for j in range(i + 1, n + 1):
                if chart.cells.get((cat, i, j)):
                    have.append((i, j))
        spans_by_cat[cat] = have
    out = []
    for cat, have in spans_by_cat.items():
        have_set = set(have)
        for (i, j) in have:
            contained = any((i2, j2) != (i, j) and i2 <= i and j <= j2
                            for (i2, j2) in have_set)
            if contained:
                continue
            for d in chart.cell(cat, i, j):
                out.append(((i, j), cat, d.value))
    out.sort(key=lambda e: (e[0][0], -(e[0][1] - e[0][0]), e[1]))
    return out
