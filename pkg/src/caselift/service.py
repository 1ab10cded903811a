"""Shared editing service: HTTP + JSON over one repository directory.

Every mutating request must carry ``X-Stakeholder-Token``; the token file
maps opaque tokens to registered stakeholders, and nothing mutates without
a resolved identity.  Commits serialize through the store's writer lock;
racing writers get 409 rather than a merge.  The service adds no state of
its own: anything reachable here is reachable through the library.
"""

from __future__ import annotations

import json
import re
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import parse_qs, unquote, urlsplit

from caselift import metrics, patterns, render, workflow
from caselift.core import Role, Stage, RebuttalStatus
from caselift.errors import (
    AlreadyResolvedError,
    BadTargetError,
    CaseliftError,
    EmptyRepositoryError,
    FixedWithoutChangeError,
    IdCollisionError,
    InvalidDocumentError,
    MissingParameterError,
    OpenConflictsError,
    ReviewStateError,
    StaleBaseError,
    UnknownAuthorError,
    UnknownHighlightError,
    UnknownIdError,
    UnknownPatternError,
    UnknownReviewError,
    UnknownRevisionError,
)
from caselift.store import Repository
from caselift.text import ParseError, parse
from caselift.workflow import ReviewLog

_STATUS_BY_ERROR = [
    (StaleBaseError, 409),
    (OpenConflictsError, 409),
    (AlreadyResolvedError, 409),
    (ReviewStateError, 409),
    (EmptyRepositoryError, 409),
    (ParseError, 422),
    (InvalidDocumentError, 422),
    (BadTargetError, 422),
    (FixedWithoutChangeError, 422),
    (MissingParameterError, 422),
    (UnknownPatternError, 422),
    (IdCollisionError, 422),
    (UnknownHighlightError, 422),
    (UnknownAuthorError, 422),
    (UnknownIdError, 404),
    (UnknownRevisionError, 404),
    (UnknownReviewError, 404),
]

_UI_TYPES = {
    ".html": "text/html; charset=utf-8",
    ".js": "text/javascript; charset=utf-8",
    ".mjs": "text/javascript; charset=utf-8",
    ".css": "text/css; charset=utf-8",
    ".svg": "image/svg+xml",
    ".map": "application/json",
    ".json": "application/json",
}


def load_tokens(path: str | Path) -> dict[str, str]:
    """Token file: {"<token>": {"name": ..., "role": ...}} -> token to name."""
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    tokens: dict[str, str] = {}
    for token, entry in data.items():
        Role(entry["role"])  # verifies the role string early
        tokens[token] = entry["name"]
    return tokens


def _json_bytes(data) -> bytes:
    return (json.dumps(data, indent=2, ensure_ascii=False) + "\n").encode("utf-8")


class _Response(Exception):
    """Early exit from a handler with a ready response."""

    def __init__(self, status: int, content_type: str, body: bytes):
        self.status = status
        self.content_type = content_type
        self.body = body


def _error_response(status: int, code: str, message: str, extra: dict | None = None) -> _Response:
    payload = {"error": code, "message": message}
    if extra:
        payload.update(extra)
    return _Response(status, "application/json", _json_bytes(payload))


class CaseService:
    """Request dispatcher over a repository, its review log and tokens."""

    def __init__(
        self,
        repo: Repository,
        log: ReviewLog,
        tokens: dict[str, str],
        ui_dir: str | Path | None = None,
    ):
        self.repo = repo
        self.log = log
        self.tokens = dict(tokens)
        self.ui_dir = Path(ui_dir) if ui_dir else None
        self._routes = [
            ("GET", re.compile(r"^/$"), self._get_index),
            ("GET", re.compile(r"^/api/doc/revisions$"), self._get_revisions),
            ("GET", re.compile(r"^/api/doc/revisions/(\d+)$"), self._get_revision),
            ("POST", re.compile(r"^/api/doc/revisions$"), self._post_revision),
            ("POST", re.compile(r"^/api/doc/rebuttals$"), self._post_rebuttal),
            ("POST", re.compile(r"^/api/doc/rebuttals/([^/]+)/resolution$"), self._post_resolution),
            ("GET", re.compile(r"^/api/doc/goals/([^/]+)/status$"), self._get_goal_status),
            ("POST", re.compile(r"^/api/doc/reviews$"), self._post_review),
            ("POST", re.compile(r"^/api/doc/reviews/([^/]+)/close$"), self._post_review_close),
            ("GET", re.compile(r"^/api/doc/metrics/growth$"), self._get_growth),
            ("GET", re.compile(r"^/api/doc/render/(\d+)$"), self._get_render),
            ("POST", re.compile(r"^/api/doc/patterns/apply$"), self._post_pattern_apply),
            ("GET", re.compile(r"^/ui(/.*)?$"), self._get_ui),
        ]

    # -- plumbing -----------------------------------------------------------

    def handle_request(
        self, method: str, path: str, headers: dict[str, str], body: bytes
    ) -> tuple[int, str, bytes]:
        split = urlsplit(path)
        query = {k: v[-1] for k, v in parse_qs(split.query).items()}
        headers = {k.lower(): v for k, v in headers.items()}
        try:
            for route_method, pattern, handler in self._routes:
                match = pattern.match(split.path)
                if match and route_method == method:
                    return self._finish(handler(match, query, headers, body))
            raise _error_response(404, "not-found", f"no route for {method} {split.path}")
        except _Response as response:
            return response.status, response.content_type, response.body
        except CaseliftError as exc:
            status = 500
            for error_type, mapped in _STATUS_BY_ERROR:
                if isinstance(exc, error_type):
                    status = mapped
                    break
            extra: dict = {}
            if isinstance(exc, OpenConflictsError):
                extra["open_rebuttals"] = exc.rebuttal_ids
            if isinstance(exc, InvalidDocumentError):
                extra["violations"] = [
                    {"element_id": v.element_id, "code": v.code.value, "message": v.message}
                    for v in exc.violations
                ]
            if isinstance(exc, ParseError):
                extra["line"] = exc.line
            payload = {"error": exc.code, "message": exc.message, **extra}
            return status, "application/json", _json_bytes(payload)

    def _finish(self, result) -> tuple[int, str, bytes]:
        status, content_type, body = result
        return status, content_type, body

    # -- identity -----------------------------------------------------------

    def _identify(self, headers: dict[str, str]) -> str:
        token = headers.get("x-stakeholder-token")
        if not token or token not in self.tokens:
            raise _error_response(401, "unknown-token", "a valid X-Stakeholder-Token is required")
        name = self.tokens[token]
        if not self.repo.is_registered(name):
            raise _error_response(
                401, "unknown-token", f"token resolves to unregistered stakeholder {name!r}"
            )
        return name

    def _read_json(self, body: bytes) -> dict:
        try:
            data = json.loads(body.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise _error_response(400, "bad-request", f"request body is not valid JSON: {exc}")
        if not isinstance(data, dict):
            raise _error_response(400, "bad-request", "request body must be a JSON object")
        return data

    def _field(self, data: dict, name: str, kind=str):
        if name not in data:
            raise _error_response(422, "missing-field", f"field {name!r} is required")
        value = data[name]
        if not isinstance(value, kind):
            raise _error_response(422, "bad-field", f"field {name!r} has the wrong type")
        return value

    # -- handlers -----------------------------------------------------------

    def _get_index(self, match, query, headers, body):
        data = {
            "service": "caselift",
            "document_id": self.repo.document_id,
            "head": self.repo.head,
            "ui": "/ui/" if self.ui_dir else None,
        }
        return 200, "application/json", _json_bytes(data)

    def _revision_meta(self, revision) -> dict:
        return {
            "number": revision.number,
            "author": revision.author.name,
            "message": revision.message,
            "timestamp": revision.timestamp.isoformat(),
            "content_hash": revision.content_hash,
        }

    def _get_revisions(self, match, query, headers, body):
        data = [self._revision_meta(r) for r in self.repo.revisions]
        return 200, "application/json", _json_bytes(data)

    def _get_revision(self, match, query, headers, body):
        number = int(match.group(1))
        meta = self._revision_meta(self.repo.revision(number))
        meta["gsn"] = self.repo.payload(number)
        return 200, "application/json", _json_bytes(meta)

    def _post_revision(self, match, query, headers, body):
        author = self._identify(headers)
        data = self._read_json(body)
        base = self._field(data, "base", int)
        message = self._field(data, "message")
        doc = parse(self._field(data, "gsn"))
        revision = self.repo.commit(doc, author, message, base)
        return 201, "application/json", _json_bytes({"number": revision.number})

    def _post_rebuttal(self, match, query, headers, body):
        author = self._identify(headers)
        data = self._read_json(body)
        target = self._field(data, "target")
        text = self._field(data, "text")
        rebuttal_id, number = workflow.submit_rebuttal(self.repo, target, author, text)
        return 201, "application/json", _json_bytes({"id": rebuttal_id, "revision": number})

    def _post_resolution(self, match, query, headers, body):
        author = self._identify(headers)
        data = self._read_json(body)
        decision_token = self._field(data, "decision")
        try:
            decision = RebuttalStatus(decision_token)
        except ValueError:
            raise _error_response(
                422, "bad-field", f"decision must be fixed, withdrawn or residual-risk, not {decision_token!r}"
            )
        note = data.get("note", "")
        resolution, number = workflow.apply_resolution(
            self.repo, self.log, unquote(match.group(1)), decision, author, note
        )
        return 200, "application/json", _json_bytes(
            {"id": resolution.rebuttal_id, "status": resolution.decision.value, "revision": number}
        )

    def _get_goal_status(self, match, query, headers, body):
        goal_id = unquote(match.group(1))
        at = int(query["at"]) if "at" in query else self.repo.head
        status = workflow.claim_status(self.repo, self.log, goal_id, at)
        names = sorted(
            s.name for s in workflow.responsibility(self.repo, self.log, goal_id, at)
        )
        data = {"goal": goal_id, "at": at, "status": status.value, "responsibility": names}
        return 200, "application/json", _json_bytes(data)

    def _review_data(self, review: workflow.Review) -> dict:
        return {
            "name": review.name,
            "phase": review.phase.value,
            "participants": sorted(review.participants),
            "opened_at": review.opened_at,
            "closed_at": review.closed_at,
            "status": review.status.value,
        }

    def _post_review(self, match, query, headers, body):
        self._identify(headers)
        data = self._read_json(body)
        name = self._field(data, "name")
        phase_token = self._field(data, "phase")
        try:
            phase = Stage(phase_token)
        except ValueError:
            raise _error_response(422, "bad-field", f"unknown phase {phase_token!r}")
        participants = self._field(data, "participants", list)
        review = workflow.open_review(self.repo, self.log, name, phase, tuple(participants))
        return 201, "application/json", _json_bytes(self._review_data(review))

    def _post_review_close(self, match, query, headers, body):
        self._identify(headers)
        review = workflow.close_review(
            self.repo, self.log, unquote(match.group(1)), self.repo.head
        )
        return 200, "application/json", _json_bytes(self._review_data(review))

    def _get_growth(self, match, query, headers, body):
        series = metrics.growth_series(self.repo)
        if query.get("format") == "csv":
            return 200, "text/csv; charset=utf-8", metrics.export_csv(series).encode("utf-8")
        data = [
            {
                "revision": p.revision,
                "goals": p.goals,
                "strategies": p.strategies,
                "evidences": p.evidences,
                "contexts": p.contexts,
                "rebuttals": p.rebuttals,
                "total": p.total,
            }
            for p in series
        ]
        return 200, "application/json", _json_bytes(data)

    def _get_render(self, match, query, headers, body):
        number = int(match.group(1))
        doc = self.repo.checkout(number)
        highlight = frozenset(h for h in query.get("highlight", "").split(",") if h)
        options = render.RenderOptions(
            highlight=highlight,
            relabel_rebuttal_as_risk=query.get("relabel", "") == "risk",
        )
        if query.get("format", "svg") == "dot":
            return 200, "text/vnd.graphviz; charset=utf-8", render.to_dot(doc, options).encode("utf-8")
        return 200, "image/svg+xml", render.to_svg(doc, options).encode("utf-8")

    def _post_pattern_apply(self, match, query, headers, body):
        author = self._identify(headers)
        data = self._read_json(body)
        target = self._field(data, "target")
        pattern_token = self._field(data, "pattern")
        try:
            pattern = patterns.PatternId(pattern_token)
        except ValueError:
            raise _error_response(422, "bad-field", f"unknown pattern {pattern_token!r}")
        params = self._pattern_params(data.get("params", {}), author)
        base = self.repo.head
        self.repo.require_nonempty()
        doc, added = patterns.apply(self.repo.checkout(base), target, pattern, params)
        revision = self.repo.commit(
            doc, author, data.get("message", f"apply pattern {pattern.value} under {target}"), base
        )
        return 201, "application/json", _json_bytes({"revision": revision.number, "added": added})

    def _pattern_params(self, raw: dict, author: str) -> patterns.PatternParams:
        if not isinstance(raw, dict):
            raise _error_response(422, "bad-field", "params must be a JSON object")
        try:
            attributes = tuple(patterns.Attribute(a) for a in raw.get("attributes", []))
            statements = {
                patterns.Attribute(k): v for k, v in raw.get("statements", {}).items()
            }
            modes = tuple(
                patterns.FailureMode(
                    name=m["name"], monitor=m.get("monitor"), threshold=m.get("threshold")
                )
                for m in raw.get("modes", [])
            )
        except (ValueError, KeyError, TypeError) as exc:
            raise _error_response(422, "bad-field", f"malformed pattern params: {exc}")
        return patterns.PatternParams(
            author=author,
            system=raw.get("system", ""),
            attributes=attributes,
            statements=statements,
            modes=modes,
        )

    def _get_ui(self, match, query, headers, body):
        if self.ui_dir is None:
            raise _error_response(404, "not-found", "no UI bundle configured (serve --ui <dir>)")
        rel = unquote(match.group(1) or "/index.html").lstrip("/") or "index.html"
        target = (self.ui_dir / rel).resolve()
        if not target.is_relative_to(self.ui_dir.resolve()) or not target.is_file():
            raise _error_response(404, "not-found", f"no UI asset {rel!r}")
        content_type = _UI_TYPES.get(target.suffix, "application/octet-stream")
        return 200, content_type, target.read_bytes()


class _Handler(BaseHTTPRequestHandler):
    service: CaseService
    quiet = True

    def _dispatch(self):
        length = int(self.headers.get("Content-Length", 0) or 0)
        body = self.rfile.read(length) if length else b""
        status, content_type, payload = self.service.handle_request(
            self.command, self.path, dict(self.headers.items()), body
        )
        self.send_response(status)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(payload)))
        self.end_headers()
        self.wfile.write(payload)

    do_GET = _dispatch
    do_POST = _dispatch

    def log_message(self, fmt, *args):
        if not self.quiet:
            super().log_message(fmt, *args)


def make_server(service: CaseService, host: str = "127.0.0.1", port: int = 0) -> ThreadingHTTPServer:
    """A threading HTTP server bound to the service; caller runs serve_forever."""
    handler = type("BoundHandler", (_Handler,), {"service": service})
    return ThreadingHTTPServer((host, port), handler)


def start_background(service: CaseService, host: str = "127.0.0.1", port: int = 0):
    """Start the server on a daemon thread; returns (server, 'host:port')."""
    server = make_server(service, host, port)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    bound_host, bound_port = server.server_address[:2]
    return server, f"{bound_host}:{bound_port}"
