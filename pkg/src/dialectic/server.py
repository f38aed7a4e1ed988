"""HTTP+JSON session service.

Endpoints (all bodies JSON):
    POST   /sessions                 {libraries: [name-or-path, ...]} -> {id}
    DELETE /sessions/{id}
    POST   /sessions/{id}/start     {goal}
    POST   /sessions/{id}/step      {sentence, mode: "nltac"|"nlexplain"}
    POST   /sessions/{id}/undo
    POST   /sessions/{id}/def       {utterance, definition}
    POST   /sessions/{id}/custom    {name, kind}
    GET    /sessions/{id}/state
    GET    /sessions/{id}/script
    GET    /grammar                 [?session=id]
    POST   /libraries/load          {path}
    GET    /libraries

Session-level failures come back as {ok: false, error: <taxonomy>, ...} with
status 200 so clients can branch on the error kind (the def dialog opens on
"not_understood"). Unknown routes and sessions are 404.
"""

from __future__ import annotations

import json
import re
import threading
import uuid
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from . import errors as E
from .kernel import TheoremStore
from .library import LibraryStore, load_libraries, load_library_file
from .session import (
    SessionState, export_script, new_session, nlexplain, nltac,
    session_custom, session_define, start_proof, undo,
)
from .stdlib import BUNDLED_LIBRARIES, base_store, bundled_library
from .terms import render

ERROR_NAMES = {
    E.NotUnderstood: "not_understood",
    E.TacticFails: "tactic_fails",
    E.NoSuchSubgoal: "no_such_subgoal",
    E.DirectiveNotSupported: "directive_not_supported",
    E.ProofAlreadyComplete: "proof_already_complete",
    E.ProofIncomplete: "proof_incomplete",
    E.NothingToUndo: "nothing_to_undo",
    E.SessionBusy: "session_busy",
    E.AlreadyDefined: "already_defined",
    E.WouldBeAmbiguous: "would_be_ambiguous",
    E.DefinitionUnparsable: "definition_unparsable",
    E.DefinitionAmbiguous: "definition_ambiguous",
    E.DuplicateCustom: "duplicate_custom",
    E.DuplicateLibrary: "duplicate_library",
    E.FormatError: "format_error",
    E.UnbalancedQuotation: "unbalanced_quotation",
    E.TermSyntaxError: "syntax_error",
    E.SortError: "sort_error",
}


def error_payload(e: Exception) -> dict:
    name = ERROR_NAMES.get(type(e), "error")
    out = {"ok": False, "error": name, "diagnostic": str(e)}
    if isinstance(e, E.NotUnderstood):
        out["sentence"] = e.sentence
    return out


def state_payload(s: SessionState) -> dict:
    goals = []
    if s.tree is not None:
        leaves = s.tree.open_leaves()
        focus = min(s.focus, len(leaves) - 1) if leaves else 0
        for i, g in enumerate(leaves):
            goals.append({
                "assumptions": [render(a) for a in g.assumptions],
                "conclusion": render(g.conclusion),
                "focused": i == focus,
            })
    return {
        "goals": goals,
        "closed": s.tree is not None and s.tree.closed,
        "transcript": list(s.transcript),
    }


class SessionHub:
    """Sessions plus the shared library registry; one lock per session id."""

    def __init__(self, store: TheoremStore | None = None,
                 base_libraries=()):
        self.store = store or base_store()
        self.libraries = LibraryStore(self.store)
        for name in BUNDLED_LIBRARIES:
            lib = bundled_library(name)
            self.libraries.register(lib.name, lib.entries, lib.customs)
        self.base_library_names = list(base_libraries)
        self._sessions: dict[str, SessionState] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._global = threading.Lock()

    def _resolve_libs(self, names):
        out = []
        for n in names:
            if n in self.libraries.names():
                out.append(self.libraries.get(n))
            else:
                out.append(load_library_file(n))
        return out

    def create(self, libraries=()) -> str:
        s = new_session(self.store)
        wanted = list(self.base_library_names) + list(libraries)
        if wanted:
            s, _ = load_libraries(s, self._resolve_libs(wanted))
        sid = uuid.uuid4().hex[:12]
        with self._global:
            self._sessions[sid] = s
            self._locks[sid] = threading.Lock()
        return sid

    def drop(self, sid: str):
        with self._global:
            self._sessions.pop(sid, None)
            self._locks.pop(sid, None)

    def lock(self, sid: str) -> threading.Lock:
        with self._global:
            if sid not in self._locks:
                raise KeyError(sid)
            return self._locks[sid]

    def get(self, sid: str) -> SessionState:
        with self._global:
            return self._sessions[sid]

    def put(self, sid: str, s: SessionState):
        with self._global:
            self._sessions[sid] = s


def make_handler(hub: SessionHub):
    routes = [
        ("POST", re.compile(r"^/sessions$"), _create),
        ("DELETE", re.compile(r"^/sessions/(\w+)$"), _delete),
        ("POST", re.compile(r"^/sessions/(\w+)/start$"), _start),
        ("POST", re.compile(r"^/sessions/(\w+)/step$"), _step),
        ("POST", re.compile(r"^/sessions/(\w+)/undo$"), _undo),
        ("POST", re.compile(r"^/sessions/(\w+)/def$"), _def),
        ("POST", re.compile(r"^/sessions/(\w+)/custom$"), _custom),
        ("GET", re.compile(r"^/sessions/(\w+)/state$"), _state),
        ("GET", re.compile(r"^/sessions/(\w+)/script$"), _script),
        ("GET", re.compile(r"^/grammar(?:\?session=(\w+))?$"), _grammar),
        ("POST", re.compile(r"^/libraries/load$"), _load_library),
        ("GET", re.compile(r"^/libraries$"), _libraries),
    ]

    class Handler(BaseHTTPRequestHandler):
        def log_message(self, *args):
            pass

        def _json(self, code: int, payload: dict):
            body = json.dumps(payload).encode()
            self.send_response(code)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(body)))
            self.send_header("Access-Control-Allow-Origin", "*")
            self.send_header("Access-Control-Allow-Methods",
                             "GET, POST, DELETE, OPTIONS")
            self.send_header("Access-Control-Allow-Headers", "Content-Type")
            self.end_headers()
            self.wfile.write(body)

        def _body(self) -> dict:
            length = int(self.headers.get("Content-Length") or 0)
            if not length:
                return {}
            raw = self.rfile.read(length)
            try:
                return json.loads(raw.decode())
            except json.JSONDecodeError:
                raise ValueError("request body is not valid JSON")

        def do_OPTIONS(self):
            self._json(200, {"ok": True})

        def _dispatch(self, method: str):
            for m, rx, fn in routes:
                if m != method:
                    continue
                match = rx.match(self.path)
                if match:
                    try:
                        body = self._body() if method in ("POST",) else {}
                    except ValueError as e:
                        self._json(400, {"ok": False, "error": "bad_json",
                                         "diagnostic": str(e)})
                        return
                    try:
                        code, payload = fn(hub, match.groups(), body)
                    except KeyError:
                        code, payload = 404, {"ok": False,
                                              "error": "no_such_session"}
                    except E.DialecticError as e:
                        code, payload = 200, error_payload(e)
                    except Exception as e:  # pragma: no cover
                        code, payload = 500, {"ok": False, "error": "internal",
                                              "diagnostic": str(e)}
                    self._json(code, payload)
                    return
            self._json(404, {"ok": False, "error": "no_such_route"})

        def do_GET(self):
            self._dispatch("GET")

        def do_POST(self):
            self._dispatch("POST")

        def do_DELETE(self):
            self._dispatch("DELETE")

    return Handler


def _create(hub: SessionHub, groups, body):
    sid = hub.create(body.get("libraries", []))
    return 200, {"ok": True, "id": sid}


def _delete(hub, groups, body):
    hub.lock(groups[0])
    hub.drop(groups[0])
    return 200, {"ok": True}


def _with_session(hub, sid, fn):
    lock = hub.lock(sid)
    with lock:
        s = hub.get(sid)
        s2, payload = fn(s)
        hub.put(sid, s2)
        return 200, payload


def _start(hub, groups, body):
    def go(s):
        s2 = start_proof(s, body.get("goal", ""))
        return s2, {"ok": True, **state_payload(s2)}
    return _with_session(hub, groups[0], go)


def _step(hub, groups, body):
    sentence = body.get("sentence", "")
    mode = body.get("mode", "nltac")
    def go(s):
        if mode == "nlexplain":
            s2, fragment, rendering = nlexplain(s, sentence)
            return s2, {"ok": True, "fragment": fragment,
                        "rendering": rendering, **state_payload(s2)}
        s2 = nltac(s, sentence)
        frag = s2.transcript[len(s.transcript):]
        return s2, {"ok": True, "fragment": " \\\\ ".join(frag),
                    **state_payload(s2)}
    return _with_session(hub, groups[0], go)


def _undo(hub, groups, body):
    def go(s):
        s2 = undo(s)
        return s2, {"ok": True, **state_payload(s2)}
    return _with_session(hub, groups[0], go)


def _def(hub, groups, body):
    def go(s):
        s2, result = session_define(s, body.get("utterance", ""),
                                    body.get("definition", ""))
        return s2, {"ok": True, "rulesAdded": result.rules_added,
                    "alreadyKnown": result.already_known}
    return _with_session(hub, groups[0], go)


def _custom(hub, groups, body):
    from .library import KIND_NAMES
    from .tactics import custom_implementations
    kind = body.get("kind", "tactic")
    if kind not in KIND_NAMES:
        raise E.FormatError(f"unknown custom kind {kind!r}")
    def go(s):
        impl = custom_implementations(s.store).get(
            body.get("name", ""), (None, None))[1]
        s2 = session_custom(s, body.get("name", ""), KIND_NAMES[kind], impl)
        return s2, {"ok": True}
    return _with_session(hub, groups[0], go)


def _state(hub, groups, body):
    def go(s):
        return s, {"ok": True, **state_payload(s)}
    return _with_session(hub, groups[0], go)


def _script(hub, groups, body):
    def go(s):
        return s, {"ok": True, "script": export_script(s)}
    return _with_session(hub, groups[0], go)


def _grammar(hub, groups, body):
    sid = groups[0]
    if sid:
        lock = hub.lock(sid)
        with lock:
            g = hub.get(sid).grammar
    else:
        s = new_session(hub.store)
        if hub.base_library_names:
            s, _ = load_libraries(s, hub._resolve_libs(hub.base_library_names))
        g = s.grammar
    return 200, {"ok": True, "rules": g.dump().splitlines(),
                 "version": g.version}


def _load_library(hub, groups, body):
    lib = load_library_file(body.get("path", ""))
    hub.libraries.register(lib.name, lib.entries, lib.customs)
    return 200, {"ok": True, "name": lib.name}


def _libraries(hub, groups, body):
    return 200, {"ok": True, "libraries": hub.libraries.names()}


def serve(port: int, base_libraries=(), store=None,
          ready: threading.Event | None = None):
    """Run the service until interrupted; BindError if the port is taken."""
    hub = SessionHub(store, base_libraries)
    try:
        httpd = ThreadingHTTPServer(("127.0.0.1", port), make_handler(hub))
    except OSError as e:
        raise E.BindError(f"cannot bind port {port}: {e}")
    if ready is not None:
        ready.server = httpd  # type: ignore[attr-defined]
        ready.set()
    try:
        httpd.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        httpd.server_close()
