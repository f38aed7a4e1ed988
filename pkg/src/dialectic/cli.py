"""Command-line entry points: repl, run, export, serve, --grammar-dump."""

from __future__ import annotations

import argparse
import sys

from . import errors as E
from .library import load_libraries, load_library_file
from .prooffile import parse_proof_file, run_statements
from .session import (
    SessionState, export_script, new_session, nlexplain, nltac, qed,
    session_custom, session_define, start_proof, store_theorem, undo,
)
from .stdlib import base_store, bundled_library, BUNDLED_LIBRARIES
from .tactics import custom_implementations


def _session_with_libs(lib_args, validate=False) -> SessionState:
    store = base_store()
    s = new_session(store, validate=validate)
    libs = []
    for name in lib_args or ():
        if name in BUNDLED_LIBRARIES:
            libs.append(bundled_library(name))
        else:
            libs.append(load_library_file(name))
    if libs:
        s, reports = load_libraries(s, libs)
        for r in reports:
            for what, why in r.skipped:
                print(f"note: library {r.library}: skipped {what!r}: {why}",
                      file=sys.stderr)
    return s


# --- repl -------------------------------------------------------------------

REPL_HELP = """\
commands:
  goal <formula>            start a proof of the formula
  def "<utt>" = "<def>"     teach a new phrase by example
  custom <kind> <name>      register a custom tactic terminal
  load <path>               load a library file
  mode nltac|nlexplain      switch stepping mode (default nltac)
  undo                      undo the last step
  state                     show the goal state
  export                    print the low-level script so far
  qed <name>                finish the proof and store the theorem
  grammar                   dump the current grammar
  help                      this text
  quit                      leave
anything else is parsed as tactic sentences."""


class ReplDriver:
    """One REPL interaction step; used by both the terminal loop and tests."""

    def __init__(self, session: SessionState):
        self.session = session
        self.mode = "nltac"

    def step(self, line: str) -> str:
        line = line.strip()
        if not line:
            return ""
        try:
            return self._dispatch(line)
        except E.DialecticError as e:
            return f"error: {e}"

    def _dispatch(self, line: str) -> str:
        import re
        if line in ("quit", "exit"):
            raise EOFError
        if line == "help":
            return REPL_HELP
        if line == "state":
            return self.session.render_state()
        if line == "export":
            return export_script(self.session)
        if line == "grammar":
            return self.session.grammar.dump()
        if line == "undo":
            self.session = undo(self.session)
            return self.session.render_state()
        if line.startswith("mode "):
            mode = line.split(None, 1)[1]
            if mode not in ("nltac", "nlexplain"):
                return "error: mode must be nltac or nlexplain"
            self.mode = mode
            return f"mode: {mode}"
        if line.startswith("goal "):
            self.session = start_proof(self.session, line[5:].strip())
            return self.session.render_state()
        m = re.match(r'^def\s+"(.*)"\s*=\s*"(.*)"$', line)
        if m:
            self.session, result = session_define(self.session, m.group(1),
                                                  m.group(2))
            if result.already_known:
                return "already known (no rules added)"
            return f"{result.rules_added} rule(s) added"
        m = re.match(r"^custom\s+(\w+)\s+(\S+)$", line)
        if m:
            from .library import KIND_NAMES
            kind = m.group(1)
            if kind not in KIND_NAMES:
                return f"error: unknown custom kind {kind!r}"
            impl = custom_implementations(self.session.store).get(
                m.group(2), (None, None))[1]
            self.session = session_custom(self.session, m.group(2),
                                          KIND_NAMES[kind], impl)
            return f"custom {m.group(2)} registered"
        if line.startswith("load "):
            lib = load_library_file(line[5:].strip())
            self.session, reports = load_libraries(self.session, [lib])
            notes = [f"skipped {w!r}: {why}"
                     for r in reports for w, why in r.skipped]
            return "\n".join([f"loaded {lib.name}"] + notes)
        m = re.match(r"^qed(?:\s+(\w+))?$", line)
        if m:
            self.session, th = qed(self.session)
            name = m.group(1)
            if name:
                self.session = store_theorem(self.session, name, th)
                return f"theorem {name} stored: {th!r}"
            return f"proved: {th!r}"
        if self.mode == "nlexplain":
            out = []
            from .session import split_sentences
            for sentence in split_sentences(line):
                self.session, fragment, rendering = nlexplain(self.session,
                                                              sentence)
                out.append(f"  {fragment} \\\\")
                out.append(rendering)
            return "\n".join(out)
        self.session = nltac(self.session, line)
        return self.session.render_state()


def repl(args) -> int:
    driver = ReplDriver(_session_with_libs(args.lib))
    print("dialectic repl; `help` lists commands")
    while True:
        try:
            line = input("> ")
        except (EOFError, KeyboardInterrupt):
            print()
            return 0
        try:
            out = driver.step(line)
        except EOFError:
            return 0
        if out:
            print(out)


def run(args) -> int:
    s = _session_with_libs(args.lib)
    with open(args.file, "r", encoding="utf-8") as fh:
        statements = parse_proof_file(fh.read())
    _s, report = run_statements(s, statements)
    print(report.summary())
    return 0 if report.ok else 1


def export(args) -> int:
    s = _session_with_libs(args.lib)
    with open(args.file, "r", encoding="utf-8") as fh:
        statements = parse_proof_file(fh.read())
    _s, report = run_statements(s, statements)
    if not report.ok:
        print(report.summary(), file=sys.stderr)
        return 1
    lines = []
    for st, r in zip([x for x in statements if x.kind == "theorem"],
                     report.results):
        lines.append(f'theorem {r.name}: "{st.formula}"')
        lines.append("script")
        lines.append("  " + r.script.replace("\n", "\n  "))
        lines.append("end")
        lines.append("")
    text = "\n".join(lines)
    if args.output and args.output != "-":
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        print(text)
    return 0


def serve_cmd(args) -> int:
    from .server import serve
    print(f"serving on http://127.0.0.1:{args.port}")
    serve(args.port, base_libraries=list(args.lib or ()))
    return 0


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(
        prog="dialectic",
        description="define your own tactic language by example")
    ap.add_argument("--grammar-dump", action="store_true",
                    help="print the grammar (respecting --lib) and exit")
    ap.add_argument("--lib", action="append", default=[],
                    help="library name or path (repeatable)")
    sub = ap.add_subparsers(dest="command")

    p = sub.add_parser("repl", help="interactive proof session")
    p.add_argument("--lib", action="append", default=[])
    p.set_defaults(fn=repl)

    p = sub.add_parser("run", help="run a proof file")
    p.add_argument("file")
    p.add_argument("--lib", action="append", default=[])
    p.set_defaults(fn=run)

    p = sub.add_parser("export", help="run a proof file and export scripts")
    p.add_argument("file")
    p.add_argument("-o", "--output", default="-")
    p.add_argument("--lib", action="append", default=[])
    p.set_defaults(fn=export)

    p = sub.add_parser("serve", help="start the HTTP session service")
    p.add_argument("--port", type=int, default=8950)
    p.add_argument("--lib", action="append", default=[])
    p.set_defaults(fn=serve_cmd)

    args = ap.parse_args(argv)
    if args.grammar_dump:
        s = _session_with_libs(args.lib)
        print(s.grammar.dump())
        return 0
    if not getattr(args, "command", None):
        ap.print_help()
        return 2
    try:
        return args.fn(args)
    except E.DialecticError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except FileNotFoundError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
