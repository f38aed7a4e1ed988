"""Persistence and sharing of learned tactic languages.

A library is declarative data: an ordered list of custom-tactic declarations
followed by (utterance, definition) entries. Registering validates the
library by replaying it against a scratch core grammar; loading replays onto
a live session, skipping (and reporting) entries that conflict with what is
already defined.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace as _dc_replace

from .errors import (
    AlreadyDefined, DialecticError, DuplicateCustom, DuplicateLibrary,
    FormatError, ReplayFailure, WouldBeAmbiguous,
)
from .grammar import core_grammar
from .induction import add_custom, define
from .kernel import TheoremStore
from .session import SessionState
from .tactics import builtin_registry, custom_implementations

KIND_NAMES = {"tactic": "TACTIC", "thm_tactic": "THM_TAC",
              "thmlist_tactic": "THMLIST_TAC"}
KIND_TOKENS = {v: k for k, v in KIND_NAMES.items()}


@dataclass(frozen=True)
class Library:
    name: str
    entries: tuple  # of (utterance, definition)
    customs: tuple  # of (name, kind) with kind in KIND_NAMES values

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "version": 1,
            "customs": [{"name": n, "kind": KIND_TOKENS[k]}
                        for n, k in self.customs],
            "entries": [{"utterance": u, "definition": d}
                        for u, d in self.entries],
        }


def _validate_replay(lib: Library, store: TheoremStore) -> None:
    registry = builtin_registry(store)
    grammar = core_grammar(registry)
    impls = custom_implementations(store)
    index = 0
    for name, kind in lib.customs:
        impl = impls.get(name, (None, None))[1]
        try:
            grammar, registry = add_custom(grammar, registry, name, kind, impl)
        except DialecticError as e:
            raise ReplayFailure(index, e)
        index += 1
    for utterance, definition in lib.entries:
        try:
            result = define(grammar, utterance, definition, registry)
            grammar = result.grammar
        except DialecticError as e:
            raise ReplayFailure(index, e)
        index += 1


class LibraryStore:
    """Registered libraries by unique name."""

    def __init__(self, store: TheoremStore):
        self.store = store
        self._libs: dict[str, Library] = {}

    def names(self) -> list[str]:
        return list(self._libs)

    def get(self, name: str) -> Library:
        if name not in self._libs:
            raise FormatError(f"no such library: {name}")
        return self._libs[name]

    def register(self, name: str, entries, customs=()) -> Library:
        if name in self._libs:
            raise DuplicateLibrary(name)
        lib = Library(name, tuple(tuple(e) for e in entries),
                      tuple(tuple(c) for c in customs))
        _validate_replay(lib, self.store)
        self._libs[name] = lib
        return lib


def register_library(store: LibraryStore, name: str, entries,
                     customs=()) -> Library:
    return store.register(name, entries, customs)


def save_library(lib: Library, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(lib.to_json(), fh, indent=2)
        fh.write("\n")


def load_library_file(path) -> Library:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except FileNotFoundError:
        raise
    except json.JSONDecodeError as e:
        raise FormatError(f"not valid JSON: {e}")
    return library_from_json(data)


def library_from_json(data) -> Library:
    if not isinstance(data, dict):
        raise FormatError("library must be a JSON object")
    allowed = {"name", "version", "customs", "entries"}
    unknown = set(data) - allowed
    if unknown:
        raise FormatError(f"unknown fields: {sorted(unknown)}")
    if data.get("version") != 1:
        raise FormatError("unsupported library version")
    name = data.get("name")
    if not isinstance(name, str) or not name:
        raise FormatError("library name must be a non-empty string")
    customs = []
    for c in data.get("customs", []):
        if set(c) != {"name", "kind"} or c["kind"] not in KIND_NAMES:
            raise FormatError(f"bad custom declaration: {c}")
        customs.append((c["name"], KIND_NAMES[c["kind"]]))
    entries = []
    for e in data.get("entries", []):
        if set(e) != {"utterance", "definition"}:
            raise FormatError(f"bad entry: {e}")
        entries.append((e["utterance"], e["definition"]))
    return Library(name, tuple(entries), tuple(customs))


@dataclass(frozen=True)
class LoadReport:
    library: str
    skipped: tuple  # of (utterance-or-name, reason)

    @property
    def ok(self) -> bool:
        return not self.skipped


def load_libraries(s: SessionState, libs) -> tuple[SessionState, list]:
    """Replay libraries onto a session grammar, in order.

    Conflicting entries (already defined differently, or would introduce
    ambiguity) are skipped and reported; the rest continue loading.
    """
    reports = []
    impls = custom_implementations(s.store)
    for lib in libs:
        if isinstance(lib, (str, bytes)):
            lib = load_library_file(lib)
        skipped = []
        grammar, registry = s.grammar, s.registry
        for name, kind in lib.customs:
            impl = impls.get(name, (None, None))[1]
            try:
                grammar, registry = add_custom(grammar, registry, name,
                                               kind, impl)
            except DuplicateCustom as e:
                skipped.append((name, str(e)))
        for utterance, definition in lib.entries:
            try:
                result = define(grammar, utterance, definition, registry,
                                source=f"library({lib.name})")
                grammar = result.grammar
            except (AlreadyDefined, WouldBeAmbiguous, DialecticError) as e:
                skipped.append((utterance, str(e)))
        s = _dc_replace(s, grammar=grammar, registry=registry)
        reports.append(LoadReport(lib.name, tuple(skipped)))
    return s, reports
