"""Proof sessions: sentence splitting, nltac, nlexplain, undo, export, qed.

A session owns a grammar snapshot, a registry, a theorem store, a goal tree
and an undo history. All operations are pure: they return a new SessionState,
which makes undo exact by construction.
"""

from __future__ import annotations

from dataclasses import dataclass, replace as _dc_replace

from .errors import (
    Ambiguous, DialecticError, DirectiveNotSupported, NoParse, NoSuchSubgoal,
    NothingToUndo, NotUnderstood, OpaqueTactic, ProofAlreadyComplete,
    ProofIncomplete, JustificationInvalid, RuleMismatch, SessionBusy,
    TacticFails, UnbalancedQuotation, UnknownTactic, UnknownTheorem,
)
from .grammar import Grammar, core_grammar
from .induction import DefResult, add_custom, define
from .kernel import Thm, TheoremStore, replay
from .parser import Token, parse_unique, tokenize
from .tactics import (
    Goal, Registry, TacticExpr, Tactic, apply_tactic, builtin_registry,
    eval_expr, mk_goal, render_expr, render_goal,
)
from .terms import Term, parse_term, render

SCRIPT_SEP = "\\\\"


@dataclass(frozen=True)
class TreeNode:
    """Goal tree node; a node with no tactic is an open leaf."""
    goal: Goal
    tactic: TacticExpr | None = None
    children: tuple = ()
    justification: object = None

    @property
    def is_open(self) -> bool:
        return self.tactic is None

    def open_leaves(self) -> list[Goal]:
        out = []
        def walk(n: TreeNode):
            if n.is_open:
                out.append(n.goal)
            for c in n.children:
                walk(c)
        walk(self)
        return out

    @property
    def closed(self) -> bool:
        return not self.open_leaves()


def _replace_open_leaf(node: TreeNode, k: int, new_node: TreeNode):
    """Replace the k-th open leaf (DFS order); returns (node', leaves_used)."""
    if node.is_open:
        if k == 0:
            return new_node, 1
        return node, 1
    used = 0
    new_children = []
    replaced = False
    for c in node.children:
        if replaced:
            new_children.append(c)
            continue
        opens = len(c.open_leaves())
        if k < opens:
            c2, _ = _replace_open_leaf(c, k, new_node)
            new_children.append(c2)
            replaced = True
        else:
            k -= opens
            new_children.append(c)
    return _dc_replace(node, children=tuple(new_children)), used


def collapse(node: TreeNode) -> Thm:
    """Fold justifications bottom-up; only valid on a closed tree."""
    if node.is_open:
        raise ProofIncomplete(1)
    ths = [collapse(c) for c in node.children]
    th = node.justification(ths)
    if th.concl != node.goal.conclusion or \
            not set(th.hyps) <= set(node.goal.assumptions):
        raise JustificationInvalid(
            f"tactic {render_expr(node.tactic)} certified the wrong sequent")
    return th


@dataclass(frozen=True)
class SessionState:
    grammar: Grammar
    registry: Registry
    store: TheoremStore
    tree: TreeNode | None = None
    focus: int = 0
    history: tuple = ()
    transcript: tuple[str, ...] = ()
    validate: bool = False  # eager justification checking (used by tests)

    # -- rendering --

    def focused_goal(self) -> Goal | None:
        if self.tree is None:
            return None
        leaves = self.tree.open_leaves()
        if not leaves:
            return None
        return leaves[min(self.focus, len(leaves) - 1)]

    def render_state(self) -> str:
        if self.tree is None:
            return "(no proof in progress)"
        leaves = self.tree.open_leaves()
        if not leaves:
            return "Initial goal proved"
        parts = [f"{len(leaves)} subgoal(s):"]
        g = self.focused_goal()
        parts.append(render_goal(g))
        return "\n".join(parts)


def new_session(store: TheoremStore, registry: Registry | None = None,
                grammar: Grammar | None = None,
                validate: bool = False) -> SessionState:
    registry = registry or builtin_registry(store)
    grammar = grammar or core_grammar(registry)
    return SessionState(grammar, registry, store, validate=validate)


def start_proof(s: SessionState, goal_text: str) -> SessionState:
    """Begin a proof; the goal quotation must parse as a proposition."""
    if s.tree is not None and not s.tree.closed:
        raise SessionBusy("a proof is already in progress")
    t = parse_term(goal_text)
    if t.sort != "bool":
        raise SessionBusy("goal must be a proposition")
    node = TreeNode(mk_goal(t))
    return _dc_replace(s, tree=node, focus=0, history=(), transcript=())


def split_sentences(script: str) -> list[str]:
    """Split on top-level periods; quotation and bracket interiors protected."""
    out = []
    buf = []
    depth = 0
    quote = None
    i = 0
    n = len(script)
    while i < n:
        c = script[i]
        if quote is not None:
            buf.append(c)
            if c == quote:
                quote = None
            i += 1
            continue
        if c in ("'", "`"):
            if script.find(c, i + 1) < 0:
                raise UnbalancedQuotation(i)
            quote = c
            buf.append(c)
            i += 1
            continue
        if c in "([":
            depth += 1
        elif c in ")]":
            depth = max(0, depth - 1)
        if c == "." and depth == 0:
            out.append("".join(buf))
            buf = []
        else:
            buf.append(c)
        i += 1
    out.append("".join(buf))
    return [x.strip() for x in out if x.strip()]


# --- navigation directives (session built-ins, never shadowed by def) -------

def _directive_of(sentence: str):
    try:
        toks = tokenize(sentence)
    except UnbalancedQuotation:
        return None
    if len(toks) == 1 and toks[0].text == "End" and toks[0].kind == "word":
        return ("end",)
    if len(toks) == 2 and [t.text for t in toks[:2]] == ["Next", "Goal"]:
        return ("next",)
    if len(toks) == 2 and toks[0].text == "Goal" and toks[1].kind == "quotation":
        return ("goal", toks[1].text)
    return None


def _directive_text(directive) -> str:
    if directive[0] == "end":
        return "End"
    if directive[0] == "next":
        return "Next Goal"
    return f"Goal ` {directive[1].strip()} `"


def _apply_directive(s: SessionState, directive) -> SessionState:
    leaves = s.tree.open_leaves()
    if not leaves:
        # `End` after the bracketed goal closed is structural, not an error
        if directive[0] == "end":
            return _dc_replace(s, focus=0)
        raise ProofAlreadyComplete(_directive_text(directive))
    if directive[0] == "end":
        return _dc_replace(s, focus=0)
    if directive[0] == "next":
        return _dc_replace(s, focus=(s.focus + 1) % len(leaves))
    want = parse_term(directive[1])
    for i, g in enumerate(leaves):
        if g.conclusion == want:
            return _dc_replace(s, focus=i)
    raise NoSuchSubgoal(directive[1])


# --- sentence execution ------------------------------------------------------

def _parse_sentence(s: SessionState, sentence: str) -> TacticExpr:
    try:
        d = parse_unique(s.grammar, tokenize(sentence), "TACTIC", s.registry)
    except (NoParse, Ambiguous, UnbalancedQuotation) as e:
        raise NotUnderstood(sentence, str(e))
    return d.value


def _execute_expr(s: SessionState, sentence: str,
                  expr: TacticExpr) -> SessionState:
    leaves = s.tree.open_leaves()
    if not leaves:
        raise ProofAlreadyComplete(sentence)
    focus = min(s.focus, len(leaves) - 1)
    goal = leaves[focus]
    try:
        tac = eval_expr(expr, s.registry, s.store)
        if not isinstance(tac, Tactic):
            raise TacticFails("expression is not a complete tactic")
        subgoals, just = apply_tactic(tac, goal, checked=s.validate,
                                      store=s.store)
    except (UnknownTheorem, UnknownTactic, OpaqueTactic, RuleMismatch,
            TacticFails) as e:
        raise TacticFails(f"{sentence!r}: {e}") from e
    new_node = TreeNode(goal, expr,
                        tuple(TreeNode(g) for g in subgoals), just)
    tree, _ = _replace_open_leaf(s.tree, focus, new_node)
    remaining = len(tree.open_leaves())
    new_focus = min(focus, remaining - 1) if remaining else 0
    return _dc_replace(s, tree=tree, focus=new_focus)


def _push_history(prior: SessionState, s: SessionState, sentence: str,
                  fragment: str | None) -> SessionState:
    frame = (sentence, prior.tree, prior.focus, prior.grammar,
             prior.registry, prior.store, prior.transcript)
    transcript = s.transcript + (fragment,) if fragment is not None \
        else s.transcript
    return _dc_replace(s, history=prior.history + (frame,),
                       transcript=transcript)


def nltac(s: SessionState, script: str, allow_directives: bool = True
          ) -> SessionState:
    """Run a period-separated script against the focused subgoal(s)."""
    if s.tree is None:
        raise SessionBusy("no proof in progress")
    for sentence in split_sentences(script):
        directive = _directive_of(sentence)
        if directive is not None:
            if not allow_directives:
                raise DirectiveNotSupported(sentence)
            prior = s
            s = _apply_directive(s, directive)
            s = _push_history(prior, s, sentence, _directive_text(directive))
            continue
        expr = _parse_sentence(s, sentence)
        prior = s
        s = _execute_expr(s, sentence, expr)
        s = _push_history(prior, s, sentence, render_expr(expr))
    return s


def nlexplain(s: SessionState, sentence: str
              ) -> tuple[SessionState, str, str]:
    """One sentence against the first open subgoal; returns the emitted
    low-level fragment and the new goal rendering."""
    if s.tree is None:
        raise SessionBusy("no proof in progress")
    sentences = split_sentences(sentence)
    if len(sentences) != 1:
        raise NotUnderstood(sentence, "nlexplain steps one sentence at a time")
    sentence = sentences[0]
    if _directive_of(sentence) is not None:
        raise DirectiveNotSupported(sentence)
    s = _dc_replace(s, focus=0)
    expr = _parse_sentence(s, sentence)
    prior = s
    s = _execute_expr(s, sentence, expr)
    fragment = render_expr(expr)
    s = _push_history(prior, s, sentence, fragment)
    return s, fragment, s.render_state()


def undo(s: SessionState) -> SessionState:
    if not s.history:
        raise NothingToUndo()
    sentence, tree, focus, grammar, registry, store, transcript = s.history[-1]
    return _dc_replace(s, tree=tree, focus=focus, grammar=grammar,
                       registry=registry, store=store, transcript=transcript,
                       history=s.history[:-1])


def session_define(s: SessionState, utterance: str,
                   definition: str) -> tuple[SessionState, DefResult]:
    result = define(s.grammar, utterance, definition, s.registry)
    prior = s
    s = _dc_replace(s, grammar=result.grammar)
    s = _push_history(prior, s, f"def {utterance!r}", None)
    return s, result


def session_custom(s: SessionState, name: str, kind: str,
                   implementation=None) -> SessionState:
    grammar, registry = add_custom(s.grammar, s.registry, name, kind,
                                   implementation)
    prior = s
    s = _dc_replace(s, grammar=grammar, registry=registry)
    return _push_history(prior, s, f"custom {name}", None)


def export_script(s: SessionState) -> str:
    """Transcript fragments joined with the two-backslash separator."""
    return f" {SCRIPT_SEP}\n  ".join(s.transcript)


def split_script_fragments(text: str) -> list[str]:
    """Inverse of export_script: split on top-level double backslashes."""
    out = []
    buf = []
    quote = None
    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if quote is not None:
            buf.append(c)
            if c == quote:
                quote = None
            i += 1
            continue
        if c in ("'", "`"):
            quote = c
            buf.append(c)
            i += 1
            continue
        if text.startswith(SCRIPT_SEP, i):
            out.append("".join(buf))
            buf = []
            i += len(SCRIPT_SEP)
            continue
        buf.append(c)
        i += 1
    out.append("".join(buf))
    return [x.strip() for x in out if x.strip()]


def replay_script(s: SessionState, goal_text: str, script: str,
                  core_only: bool = True) -> SessionState:
    """Re-execute an exported script from a fresh goal.

    With core_only, induced rules are removed: exported fragments must parse
    under the core grammar (plus custom terminals) alone.
    """
    grammar = s.grammar
    if core_only:
        from .grammar import Grammar as _G
        kept = tuple(r for r in s.grammar.rules
                     if r.source in ("core", "custom"))
        grammar = _G(kept, s.grammar.version)
    fresh = SessionState(grammar, s.registry, s.store, validate=s.validate)
    fresh = start_proof(fresh, goal_text)
    for frag in split_script_fragments(script):
        directive = _directive_of(frag)
        if directive is not None:
            prior = fresh
            fresh = _apply_directive(fresh, directive)
            fresh = _push_history(prior, fresh, frag, _directive_text(directive))
            continue
        expr = _parse_sentence(fresh, frag)
        prior = fresh
        fresh = _execute_expr(fresh, frag, expr)
        fresh = _push_history(prior, fresh, frag, render_expr(expr))
    return fresh


def qed(s: SessionState) -> tuple[SessionState, Thm]:
    """Collapse a closed tree through its justifications; kernel-replay it."""
    if s.tree is None:
        raise ProofIncomplete(0)
    open_count = len(s.tree.open_leaves())
    if open_count:
        raise ProofIncomplete(open_count)
    th = collapse(s.tree)
    try:
        replay(th, s.store, allow_validation=False)
    except RuleMismatch as e:
        raise JustificationInvalid(str(e))
    if th.concl != s.tree.goal.conclusion or th.hyps:
        raise JustificationInvalid("collapsed theorem does not match the goal")
    return _dc_replace(s, tree=None, focus=0, history=(), transcript=()), th


def store_theorem(s: SessionState, name: str, th: Thm) -> SessionState:
    return _dc_replace(s, store=s.store.extended(name, th))
