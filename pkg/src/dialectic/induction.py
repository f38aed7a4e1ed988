"""Definition by example: generalize (utterance, definition) pairs into rules.

`define` parses the definition under the current grammar, finds argument
correspondences between maximal parsable spans of the utterance and argument
occurrences inside the definition's derivation, and extends the grammar with
a literal rule plus (when correspondences exist) a generalized rule whose
logical form abstracts the matched arguments. An ambiguity gate re-parses the
utterance and one synthesized variant per abstracted argument and rolls the
extension back if any parse is no longer unique.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import (
    AlreadyDefined, Ambiguous, DefinitionAmbiguous, DefinitionUnparsable,
    DuplicateCustom, NoParse, WouldBeAmbiguous,
)
from .grammar import (
    ARG_CATEGORIES, CAT_SORT, Cat, Grammar, GrammarRule, LfApply, LfConst,
    LfGsym, LfInfix, LfList, LfVar, LogicalForm, Terminal, add_rule,
)
from .parser import Chart, Derivation, Token, maximal_spans, parse_all, \
    parse_unique, tokenize
from .tactics import (
    Apply, GsymOf, Infix, Lookup, QuotLit, QuotListLit, Registry,
    RegistryEntry, TacticExpr, ThmListLit, ThmRef, render_expr,
)


@dataclass(frozen=True)
class DefResult:
    literal_rule: GrammarRule | None
    generalized_rule: GrammarRule | None
    grammar: Grammar
    already_known: bool = False

    @property
    def rules_added(self) -> int:
        return sum(1 for r in (self.literal_rule, self.generalized_rule)
                   if r is not None)


def _argument_occurrences(d: Derivation) -> list[tuple[str, TacticExpr]]:
    """(category, value) of every argument-position subderivation, all depths."""
    out = []
    def walk(node: Derivation):
        rule = node.rule
        if rule is not None:
            slots = rule.cat_slots()
            for child_idx, child in enumerate(node.children):
                slot = slots[child_idx]
                if child.category in ARG_CATEGORIES and \
                        child_idx not in _head_positions(rule):
                    out.append((child.category, child.value))
        for child in node.children:
            walk(child)
    walk(d)
    return out


def _head_positions(rule: GrammarRule) -> set[int]:
    """Indices into the cat-children list that are functional heads."""
    slots = rule.cat_slots()
    return {slots.index(s) for s in rule.head_slots if s in slots} \
        if rule.head_slots else set()


def _abstract(value: TacticExpr, replacements: list[tuple[str, TacticExpr, int]]):
    """Rewrite `value` into an Lf body, replacing argument values by LfVar."""
    for cat, target, index in replacements:
        if value == target and _sort_matches(cat, value):
            return LfVar(index)
    if isinstance(value, Apply):
        return LfApply(_abstract(value.fn, replacements),
                       _abstract(value.arg, replacements))
    if isinstance(value, Infix):
        return LfInfix(value.op, _abstract(value.left, replacements),
                       _abstract(value.right, replacements))
    if isinstance(value, ThmListLit):
        return LfList("thm", tuple(_abstract(i, replacements)
                                   for i in value.items))
    if isinstance(value, QuotListLit):
        return LfList("quot", tuple(_abstract(i, replacements)
                                    for i in value.items))
    if isinstance(value, GsymOf):
        return LfGsym(_abstract(value.inner, replacements))
    return LfConst(value)


def _sort_matches(cat: str, value: TacticExpr) -> bool:
    return CAT_SORT[cat] == value.sort


def _literal_rhs(tokens: list[Token]) -> tuple:
    return tuple(Terminal(t.text, quotation=(t.kind == "quotation"))
                 for t in tokens)


_VARIANT_COUNTER = [0]


def _variant_tokens(cat: str, original_value: TacticExpr) -> list[Token]:
    """Fresh, valid replacement tokens for an abstracted argument."""
    _VARIANT_COUNTER[0] += 1
    n = _VARIANT_COUNTER[0]
    word = lambda s: Token("word", s, 0, 0)
    punct = lambda s: Token("punct", s, 0, 0)
    quote = lambda s: Token("quotation", s, 0, 0)
    if cat == "THM":
        return [word(f"SOME_OTHER_THM_{n}")]
    if cat == "THMLIST":
        return [punct("["), word(f"THM_A_{n}"), punct(","),
                word(f"THM_B_{n}"), punct("]")]
    if cat == "QUOT":
        return [quote(f"0 = {n}")]
    if cat == "QUOTLIST":
        return [punct("["), quote("0"), punct(","), quote("1"), punct("]")]
    if cat == "TACTIC":
        name = "all_tac"
        if isinstance(original_value, Lookup) and original_value.name == name:
            name = "gen_tac"
        return [word(name)]
    raise AssertionError(cat)


def define(grammar: Grammar, utterance: str, definition: str,
           registry: Registry, source: str = "induced") -> DefResult:
    """Teach the grammar a new phrase by example."""
    def_tokens = tokenize(definition)
    try:
        d = parse_unique(grammar, def_tokens, "TACTIC", registry)
    except NoParse as e:
        raise DefinitionUnparsable(e.diagnostic)
    except Ambiguous as e:
        raise DefinitionAmbiguous(e.renderings)

    utt_tokens = tokenize(utterance)
    if not utt_tokens:
        raise DefinitionUnparsable("empty utterance")
    existing = parse_all(grammar, utt_tokens, "TACTIC", registry)
    if existing:
        if any(e.value == d.value for e in existing):
            return DefResult(None, None, grammar, already_known=True)
        raise AlreadyDefined(utterance)

    occurrences = _argument_occurrences(d)
    occ_keys = {(cat, value) for cat, value in occurrences}

    chart = Chart(grammar, utt_tokens, registry)
    spans = [s for s in maximal_spans(grammar, utt_tokens, registry, chart)
             if (s[1], s[2]) in occ_keys]
    # longest-first greedy selection of non-overlapping spans
    spans.sort(key=lambda s: (-(s[0][1] - s[0][0]), s[0][0]))
    chosen: list = []
    taken: set = set()
    for span, cat, value in spans:
        if any(k in taken for k in range(*span)):
            continue
        taken.update(range(*span))
        chosen.append((span, cat, value))
    chosen.sort(key=lambda s: s[0][0])

    literal = GrammarRule("TACTIC", _literal_rhs(utt_tokens),
                          LogicalForm((), LfConst(d.value)), source)
    generalized = None
    if chosen:
        replacements = []
        for index, (span, cat, value) in enumerate(chosen):
            replacements.append((cat, value, index))
        # one variable per distinct value: later spans of an already-seen
        # value keep their slot but the body references the first
        seen_vals: dict = {}
        deduped = []
        for cat, value, index in replacements:
            key = (cat, value)
            if key in seen_vals:
                deduped.append((cat, value, seen_vals[key]))
            else:
                seen_vals[key] = index
                deduped.append((cat, value, index))
        rhs: list = []
        params: list = []
        at = 0
        for (span, cat, value) in chosen:
            i, j = span
            rhs.extend(_literal_rhs(utt_tokens[at:i]))
            rhs.append(Cat(cat))
            params.append(cat)
            at = j
        rhs.extend(_literal_rhs(utt_tokens[at:]))
        body = _abstract(d.value, [(c, v, i) for (c, v, i) in deduped])
        generalized = GrammarRule("TACTIC", tuple(rhs),
                                  LogicalForm(tuple(params), body), source)

    candidate = add_rule(add_rule(grammar, literal), generalized) \
        if generalized else add_rule(grammar, literal)

    # ambiguity gate: the utterance itself, plus one synthesized variant
    # per abstracted argument
    reparse = parse_all(candidate, utt_tokens, "TACTIC", registry)
    if len(reparse) != 1:
        raise WouldBeAmbiguous(utterance,
                               [render_expr(e.value) for e in reparse])
    if generalized:
        for k, (span, cat, value) in enumerate(chosen):
            i, j = span
            variant = (list(utt_tokens[:i]) + _variant_tokens(cat, value)
                       + list(utt_tokens[j:]))
            got = parse_all(candidate, variant, "TACTIC", registry)
            if len(got) > 1:
                witness = " ".join(t.surface() for t in variant)
                raise WouldBeAmbiguous(witness,
                                       [render_expr(e.value) for e in got])
    return DefResult(literal, generalized, candidate)


CUSTOM_KINDS = ("TACTIC", "THM_TAC", "THMLIST_TAC")


def add_custom(grammar: Grammar, registry: Registry, name: str, kind: str,
               implementation=None) -> tuple[Grammar, Registry]:
    """Register a custom tactic name as a new grammar terminal.

    With no implementation the entry is OPAQUE: it parses and renders but
    refuses execution.
    """
    if kind not in CUSTOM_KINDS:
        raise DuplicateCustom(f"unsupported custom kind {kind}")
    if name in registry:
        raise DuplicateCustom(name)
    ttype = CAT_SORT[kind]
    reg2 = registry.with_entry(RegistryEntry(name, ttype, implementation))
    rule = GrammarRule(kind, (Terminal(name),),
                       LogicalForm((), LfConst(Lookup(name, ttype))), "custom")
    return add_rule(grammar, rule), reg2
