"""Define-your-own tactic language over a miniature LCF-style proof kernel.

Layer map:
    terms / kernel     sorted terms, inference rules, theorem store
    derived / rewrite / arith / metis
                       derived rules, justified rewriting, bounded closers
    tactics            typed tactic values, registry, evaluation, rendering
    grammar / parser   semantic grammar with logical forms, chart parsing
    induction          definition by example (def) and custom tactics
    session            proof sessions: nltac, nlexplain, undo, export, qed
    library            portable tactic-language libraries
    prooffile / cli / server
                       batch runner, terminal REPL, HTTP session service
"""

from . import errors  # noqa: F401
from .terms import Term, parse_term, render  # noqa: F401
from .kernel import Thm, TheoremStore, infer, replay  # noqa: F401
from .tactics import (  # noqa: F401
    Goal, Registry, apply_tactic, builtin_registry, eval_expr, mk_goal,
    render_expr,
)
from .grammar import Grammar, GrammarRule, add_rule, core_grammar  # noqa: F401
from .parser import maximal_spans, parse_all, parse_unique, tokenize  # noqa: F401
from .induction import DefResult, add_custom, define  # noqa: F401
from .session import (  # noqa: F401
    SessionState, export_script, new_session, nlexplain, nltac, qed,
    split_sentences, start_proof, undo,
)
from .library import (  # noqa: F401
    Library, LibraryStore, load_libraries, register_library, save_library,
)
from .prooffile import run_file  # noqa: F401
from .stdlib import base_store, bundled_library  # noqa: F401

__all__ = [
    "errors", "Term", "parse_term", "render", "Thm", "TheoremStore", "infer",
    "replay", "Goal", "Registry", "apply_tactic", "builtin_registry",
    "eval_expr", "mk_goal", "render_expr", "Grammar", "GrammarRule",
    "add_rule", "core_grammar", "maximal_spans", "parse_all", "parse_unique",
    "tokenize", "DefResult", "add_custom", "define", "SessionState",
    "export_script", "new_session", "nlexplain", "nltac", "qed",
    "split_sentences", "start_proof", "undo", "Library", "LibraryStore",
    "load_libraries", "register_library", "save_library", "run_file",
    "base_store", "bundled_library",
]
