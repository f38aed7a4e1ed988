"""Exception taxonomy shared by all layers.

Every error a user can trigger maps to one class here so the session, CLI
and HTTP layers can translate them uniformly.
"""

from __future__ import annotations


class DialecticError(Exception):
    """Base class for all errors raised by this package."""


# --- term layer ---

class TermSyntaxError(DialecticError):
    def __init__(self, message: str, position: int = -1):
        super().__init__(message if position < 0 else f"{message} (at {position})")
        self.position = position


class SortError(DialecticError):
    """Ill-sorted application of a symbol."""


# --- kernel ---

class RuleMismatch(DialecticError):
    """Premises or arguments do not fit an inference rule's schema."""


class UnknownTheorem(DialecticError):
    def __init__(self, name: str):
        super().__init__(f"unknown theorem: {name}")
        self.name = name


# --- tactic engine ---

class UnknownTactic(DialecticError):
    def __init__(self, name: str):
        super().__init__(f"unknown tactic: {name}")
        self.name = name


class OpaqueTactic(DialecticError):
    def __init__(self, name: str):
        super().__init__(f"tactic {name} is registered for parsing only")
        self.name = name


class TacticFails(DialecticError):
    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


class JustificationInvalid(DialecticError):
    """A tactic certified a goal its subgoals do not entail."""


# --- grammar / parsing ---

class MalformedRule(DialecticError):
    """Rule right-hand side and logical form disagree in arity or type."""


class TypeMismatch(DialecticError):
    """Logical-form application at an incompatible type."""


class UnbalancedQuotation(DialecticError):
    def __init__(self, position: int):
        super().__init__(f"unbalanced quotation starting at {position}")
        self.position = position


class NoParse(DialecticError):
    def __init__(self, diagnostic: str):
        super().__init__(diagnostic)
        self.diagnostic = diagnostic


class Ambiguous(DialecticError):
    def __init__(self, renderings: list[str]):
        super().__init__("ambiguous parse:\n  " + "\n  ".join(renderings))
        self.renderings = renderings


# --- induction engine ---

class DefinitionUnparsable(DialecticError):
    def __init__(self, diagnostic: str):
        super().__init__(f"definition not parsable: {diagnostic}")
        self.diagnostic = diagnostic


class DefinitionAmbiguous(DialecticError):
    def __init__(self, renderings: list[str]):
        super().__init__("definition is ambiguous:\n  " + "\n  ".join(renderings))
        self.renderings = renderings


class AlreadyDefined(DialecticError):
    def __init__(self, utterance: str):
        super().__init__(f"utterance already parses to a different tactic: {utterance}")
        self.utterance = utterance


class WouldBeAmbiguous(DialecticError):
    def __init__(self, witness: str, renderings: list[str]):
        super().__init__(
            f"rule would make {witness!r} ambiguous:\n  " + "\n  ".join(renderings))
        self.witness = witness
        self.renderings = renderings


class DuplicateCustom(DialecticError):
    def __init__(self, name: str):
        super().__init__(f"custom tactic already registered: {name}")
        self.name = name


# --- session ---

class SessionBusy(DialecticError):
    """A proof is already in progress."""


class NotUnderstood(DialecticError):
    def __init__(self, sentence: str, diagnostic: str):
        super().__init__(f"did not understand {sentence!r}: {diagnostic}")
        self.sentence = sentence
        self.diagnostic = diagnostic


class NoSuchSubgoal(DialecticError):
    def __init__(self, term_text: str):
        super().__init__(f"no open subgoal with conclusion {term_text!r}")
        self.term_text = term_text


class DirectiveNotSupported(DialecticError):
    def __init__(self, directive: str):
        super().__init__(f"nlexplain does not support goal selection: {directive!r}")
        self.directive = directive


class NothingToUndo(DialecticError):
    pass


class ProofIncomplete(DialecticError):
    def __init__(self, open_count: int):
        super().__init__(f"proof incomplete: {open_count} open subgoal(s)")
        self.open_count = open_count


class ProofAlreadyComplete(DialecticError):
    def __init__(self, sentence: str):
        super().__init__(f"all goals are closed but input remains: {sentence!r}")
        self.sentence = sentence


# --- libraries / files ---

class DuplicateLibrary(DialecticError):
    def __init__(self, name: str):
        super().__init__(f"library name already registered: {name}")
        self.name = name


class ReplayFailure(DialecticError):
    def __init__(self, index: int, underlying: Exception):
        super().__init__(f"library entry {index} failed to replay: {underlying}")
        self.index = index
        self.underlying = underlying


class FormatError(DialecticError):
    def __init__(self, message: str, line: int = -1):
        super().__init__(message if line < 0 else f"line {line}: {message}")
        self.line = line


class BindError(DialecticError):
    pass
