"""Proof file format and the batch runner.

    theorem <name>: "<formula>"
    proof
      <sentences, period-separated, free-form layout>
    qed

Multiple theorem blocks per file; `def "<utterance>" = "<definition>"` and
`custom <kind> <name>` statements are allowed between blocks. Proved theorems
are stored under their names and are usable in later blocks.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import DialecticError, FormatError
from .kernel import TheoremStore
from .library import KIND_NAMES, load_libraries
from .session import (
    SessionState, export_script, new_session, nltac, qed, session_custom,
    session_define, start_proof, store_theorem,
)
from .tactics import custom_implementations

_THEOREM_RE = re.compile(r'^theorem\s+(\w+)\s*:\s*"(.*)"\s*$')
_DEF_RE = re.compile(r'^def\s+"(.*)"\s*=\s*"(.*)"\s*$')
_CUSTOM_RE = re.compile(r"^custom\s+(\w+)\s+(\S+)\s*$")


@dataclass(frozen=True)
class Statement:
    kind: str  # theorem | def | custom
    line: int
    name: str = ""
    formula: str = ""
    body: str = ""
    utterance: str = ""
    definition: str = ""
    custom_kind: str = ""


def parse_proof_file(text: str) -> list[Statement]:
    lines = text.splitlines()
    out: list[Statement] = []
    i = 0
    n = len(lines)
    while i < n:
        raw = lines[i]
        line = raw.strip()
        if not line or line.startswith("#"):
            i += 1
            continue
        m = _DEF_RE.match(line)
        if m:
            out.append(Statement("def", i + 1, utterance=m.group(1),
                                 definition=m.group(2)))
            i += 1
            continue
        m = _CUSTOM_RE.match(line)
        if m:
            kind = m.group(1)
            if kind not in KIND_NAMES:
                raise FormatError(f"unknown custom kind {kind!r}", i + 1)
            out.append(Statement("custom", i + 1, name=m.group(2),
                                 custom_kind=KIND_NAMES[kind]))
            i += 1
            continue
        m = _THEOREM_RE.match(line)
        if m:
            name, formula = m.group(1), m.group(2)
            i += 1
            while i < n and not lines[i].strip():
                i += 1
            if i >= n or lines[i].strip() != "proof":
                raise FormatError("expected `proof` after theorem header",
                                  i + 1)
            i += 1
            body: list[str] = []
            while i < n and lines[i].strip() != "qed":
                body.append(lines[i])
                i += 1
            if i >= n:
                raise FormatError(f"theorem {name}: missing `qed`", i)
            i += 1
            out.append(Statement("theorem", i, name=name, formula=formula,
                                 body="\n".join(body)))
            continue
        raise FormatError(f"unrecognized statement: {line!r}", i + 1)
    return out


@dataclass(frozen=True)
class TheoremResult:
    name: str
    ok: bool
    error: str = ""
    script: str = ""


@dataclass(frozen=True)
class RunReport:
    results: tuple[TheoremResult, ...]

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.results)

    def summary(self) -> str:
        lines = []
        for r in self.results:
            status = "ok" if r.ok else f"FAILED: {r.error}"
            lines.append(f"{r.name}: {status}")
        passed = sum(1 for r in self.results if r.ok)
        lines.append(f"{passed}/{len(self.results)} theorems proved")
        return "\n".join(lines)


def run_statements(s: SessionState, statements) -> tuple[SessionState,
                                                         RunReport]:
    impls = custom_implementations(s.store)
    results = []
    for st in statements:
        if st.kind == "def":
            s, _ = session_define(s, st.utterance, st.definition)
            continue
        if st.kind == "custom":
            impl = impls.get(st.name, (None, None))[1]
            s = session_custom(s, st.name, st.custom_kind, impl)
            continue
        try:
            s2 = start_proof(s, st.formula)
            s2 = nltac(s2, st.body)
            script = export_script(s2)
            s2, th = qed(s2)
            s = store_theorem(s2, st.name, th)
            results.append(TheoremResult(st.name, True, script=script))
        except DialecticError as e:
            results.append(TheoremResult(st.name, False, error=str(e)))
    return s, RunReport(tuple(results))


def run_file(path, libraries=(), store: TheoremStore | None = None,
             validate: bool = False) -> tuple[SessionState, RunReport]:
    """Execute every theorem block of a proof file; see RunReport.summary."""
    if store is None:
        from .stdlib import base_store
        store = base_store()
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    statements = parse_proof_file(text)
    s = new_session(store, validate=validate)
    if libraries:
        s, _reports = load_libraries(s, list(libraries))
    return run_statements(s, statements)
