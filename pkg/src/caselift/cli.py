"""Command-line surface over the library; the scriptable path for everything.

Exit codes: 0 success, 1 validation or workflow failure, 2 usage error,
3 I/O or store error.  Mutating commands take the acting stakeholder from
``--author`` or ``CASELIFT_AUTHOR``; there is no default identity.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from caselift import metrics, patterns, render, workflow
from caselift.core import Role, Stage, RebuttalStatus, StakeholderId
from caselift.errors import (
    CaseliftError,
    OpenConflictsError,
    InvalidDocumentError,
    RepositoryCorruptError,
    StaleBaseError,
    UnknownRevisionError,
)
from caselift.service import CaseService, load_tokens, make_server
from caselift.store import Repository
from caselift.text import parse
from caselift.workflow import ReviewLog

_STORE_ERRORS = (StaleBaseError, UnknownRevisionError, RepositoryCorruptError)


def _author(args) -> str:
    author = getattr(args, "author", None) or os.environ.get("CASELIFT_AUTHOR")
    if not author:
        raise _Usage("an author is required: pass --author or set CASELIFT_AUTHOR")
    return author


class _Usage(Exception):
    pass


def _repo(args) -> Repository:
    return Repository.open(args.repo)


def _log(args) -> ReviewLog:
    return ReviewLog.load(args.repo)


def _emit_json(data) -> int:
    print(json.dumps(data, indent=2, ensure_ascii=False))
    return 0


# -- commands -------------------------------------------------------------


def cmd_init(args) -> int:
    stakeholders = []
    for spec in args.stakeholder:
        name, sep, role = spec.partition(":")
        if not sep:
            raise _Usage(f"--stakeholder takes name:role, got {spec!r}")
        try:
            stakeholders.append(StakeholderId(name, Role(role)))
        except ValueError:
            roles = ", ".join(r.value for r in Role)
            raise _Usage(f"role must be one of {roles}, got {role!r}")
    repo = Repository.init(args.repo, args.doc_id, stakeholders)
    print(f"Initialized repository {repo.document_id!r} at {repo.path} "
          f"({len(stakeholders)} stakeholders)")
    return 0


def cmd_check(args) -> int:
    doc = parse(Path(args.file).read_text(encoding="utf-8"))
    if args.json:
        return _emit_json({"ok": True, "elements": len(doc)})
    plural = "element" if len(doc) == 1 else "elements"
    print(f"OK ({len(doc)} {plural})")
    return 0


def cmd_commit(args) -> int:
    repo = _repo(args)
    doc = parse(Path(args.file).read_text(encoding="utf-8"))
    base = repo.head if args.base is None else args.base
    revision = repo.commit(doc, _author(args), args.message, base)
    if args.json:
        return _emit_json({"number": revision.number, "content_hash": revision.content_hash})
    print(f"Committed revision {revision.number} ({revision.content_hash[:12]})")
    return 0


def cmd_log(args) -> int:
    repo = _repo(args)
    if args.json:
        return _emit_json([
            {
                "number": r.number,
                "author": r.author.name,
                "message": r.message,
                "timestamp": r.timestamp.isoformat(),
                "content_hash": r.content_hash,
            }
            for r in repo.revisions
        ])
    for r in repo.revisions:
        print(f"#{r.number:<3} {r.timestamp.date().isoformat()}  {r.author.name:<10} {r.message}")
    return 0


def cmd_show(args) -> int:
    repo = _repo(args)
    if args.json:
        revision = repo.revision(args.number)
        return _emit_json({
            "number": revision.number,
            "author": revision.author.name,
            "message": revision.message,
            "gsn": repo.payload(args.number),
        })
    sys.stdout.write(repo.payload(args.number))
    return 0


def cmd_diff(args) -> int:
    repo = _repo(args)
    change_set = repo.diff(args.a, args.b)
    if args.json:
        return _emit_json({
            "added": change_set.added,
            "removed": change_set.removed,
            "modified": [{"id": eid, "fields": list(fields)} for eid, fields in change_set.modified],
        })
    if change_set.is_empty():
        print("no changes")
        return 0
    for eid in change_set.added:
        print(f"added    {eid}")
    for eid in change_set.removed:
        print(f"removed  {eid}")
    for eid, fields in change_set.modified:
        print(f"modified {eid} ({', '.join(fields)})")
    return 0


def cmd_status(args) -> int:
    repo = _repo(args)
    log = _log(args)
    at = repo.head if args.at is None else args.at
    status = workflow.claim_status(repo, log, args.goal, at)
    names = sorted(s.name for s in workflow.responsibility(repo, log, args.goal, at))
    if args.json:
        return _emit_json({"goal": args.goal, "at": at, "status": status.value, "responsibility": names})
    print(f"{args.goal} at #{at}: {status.value}; responsibility: {', '.join(names)}")
    return 0


def cmd_rebut(args) -> int:
    repo = _repo(args)
    rebuttal_id, number = workflow.submit_rebuttal(repo, args.target, _author(args), args.message)
    print(f"Raised rebuttal {rebuttal_id} on {args.target} in revision {number}")
    return 0


def cmd_resolve(args) -> int:
    repo = _repo(args)
    log = _log(args)
    decision = RebuttalStatus(args.decision)
    resolution, number = workflow.apply_resolution(
        repo, log, args.id, decision, _author(args), args.message or ""
    )
    print(f"Resolved {resolution.rebuttal_id} as {resolution.decision.value} in revision {number}")
    return 0


def cmd_review_open(args) -> int:
    repo = _repo(args)
    log = _log(args)
    participants = tuple(p for p in args.participants.split(",") if p)
    review = workflow.open_review(repo, log, args.name, Stage(args.phase), participants)
    print(f"Opened review {review.name!r} ({review.phase.value}) at revision {review.opened_at}")
    return 0


def cmd_review_close(args) -> int:
    repo = _repo(args)
    log = _log(args)
    review = workflow.close_review(repo, log, args.name, repo.head)
    print(f"Closed review {review.name!r} at revision {review.closed_at}")
    return 0


def cmd_pattern_apply(args) -> int:
    repo = _repo(args)
    author = _author(args)
    modes = []
    for raw in args.mode or []:
        name, _, rest = raw.partition("|")
        monitor, _, threshold = rest.partition("|")
        modes.append(patterns.FailureMode(name=name, monitor=monitor or None, threshold=threshold or None))
    statements = {}
    for raw in args.statement or []:
        key, sep, text = raw.partition("=")
        if not sep:
            raise _Usage(f"--statement takes attribute=text, got {raw!r}")
        statements[patterns.Attribute(key)] = text
    params = patterns.PatternParams(
        author=author,
        system=args.system or "",
        attributes=tuple(patterns.Attribute(a) for a in (args.attributes or "").split(",") if a),
        statements=statements,
        modes=tuple(modes),
    )
    base = repo.head
    repo.require_nonempty()
    doc, added = patterns.apply(repo.checkout(base), args.target, patterns.PatternId(args.pattern), params)
    revision = repo.commit(doc, author, args.message or f"apply pattern {args.pattern} under {args.target}", base)
    print(f"Applied {args.pattern} under {args.target} in revision {revision.number}: {', '.join(added)}")
    return 0


def cmd_metrics(args) -> int:
    repo = _repo(args)
    series = metrics.growth_series(repo)
    if args.csv:
        sys.stdout.write(metrics.export_csv(series))
        return 0
    if args.json:
        return _emit_json([
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
        ])
    print(f"{'rev':>4} {'goals':>6} {'strat':>6} {'evid':>6} {'ctx':>6} {'rebut':>6} {'total':>6}")
    for p in series:
        print(f"{p.revision:>4} {p.goals:>6} {p.strategies:>6} {p.evidences:>6} "
              f"{p.contexts:>6} {p.rebuttals:>6} {p.total:>6}")
    activity = metrics.review_activity(repo, _log(args).reviews)
    for phase, count in sorted(activity.items(), key=lambda kv: kv[0].value):
        print(f"review activity [{phase.value}]: {count} revisions")
    return 0


def cmd_render(args) -> int:
    repo = _repo(args)
    doc = repo.checkout(args.number)
    options = render.RenderOptions(
        highlight=frozenset(h for h in (args.highlight or "").split(",") if h),
        relabel_rebuttal_as_risk=args.risk,
    )
    output = render.to_dot(doc, options) if args.format == "dot" else render.to_svg(doc, options)
    if args.output:
        Path(args.output).write_text(output, encoding="utf-8")
        print(f"Wrote {args.format.upper()} for revision {args.number} to {args.output}")
    else:
        sys.stdout.write(output)
    return 0


def cmd_serve(args) -> int:
    config = {}
    if args.config:
        config = json.loads(Path(args.config).read_text(encoding="utf-8"))
    repo_path = config.get("repo", args.repo) if args.repo == "." else args.repo
    host = args.host or config.get("host", "127.0.0.1")
    port = args.port if args.port is not None else config.get("port", 8080)
    tokens_path = args.tokens or config.get("tokens")
    ui_dir = args.ui or config.get("ui")
    if not tokens_path:
        raise _Usage("a token file is required: pass --tokens or set it in --config")
    repo = Repository.open(repo_path)
    log = ReviewLog.load(repo_path)
    tokens = load_tokens(tokens_path)
    service = CaseService(repo, log, tokens, ui_dir=ui_dir)
    server = make_server(service, host, port)
    host, port = server.server_address[:2]
    ui_note = f", ui at http://{host}:{port}/ui/" if ui_dir else ""
    print(f"Serving {repo.document_id!r} at http://{host}:{port}/api/doc{ui_note}")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return 0


# -- wiring ----------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="caselift",
        description="Manage GSN assurance cases with stakeholder accountability and cross-review.",
    )
    parser.add_argument("--repo", default=".", help="repository directory (default: current directory)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("init", help="create an empty repository")
    p.add_argument("--doc-id", required=True)
    p.add_argument("--stakeholder", action="append", required=True, metavar="NAME:ROLE",
                   help="register a stakeholder (roles: owner, developer, operator, user)")
    p.set_defaults(func=cmd_init)

    p = sub.add_parser("check", help="parse and validate a .gsn file")
    p.add_argument("file")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("commit", help="commit a .gsn file as the next revision")
    p.add_argument("file")
    p.add_argument("-m", "--message", required=True)
    p.add_argument("--author")
    p.add_argument("--base", type=int, help="expected head (default: current head)")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_commit)

    p = sub.add_parser("log", help="list revisions")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_log)

    p = sub.add_parser("show", help="print the canonical text of a revision")
    p.add_argument("number", type=int)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_show)

    p = sub.add_parser("diff", help="compare two revisions")
    p.add_argument("a", type=int)
    p.add_argument("b", type=int)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_diff)

    p = sub.add_parser("status", help="claim status and responsibility of a goal")
    p.add_argument("goal")
    p.add_argument("--at", type=int)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_status)

    p = sub.add_parser("rebut", help="raise a rebuttal against a goal or evidence")
    p.add_argument("target")
    p.add_argument("-m", "--message", required=True, help="rebuttal text")
    p.add_argument("--author")
    p.set_defaults(func=cmd_rebut)

    p = sub.add_parser("resolve", help="record the terminal decision for a rebuttal")
    p.add_argument("id")
    p.add_argument("--decision", required=True, choices=["fixed", "withdrawn", "residual-risk"])
    p.add_argument("-m", "--message", help="resolution note")
    p.add_argument("--author")
    p.set_defaults(func=cmd_resolve)

    p = sub.add_parser("review", help="open or close a cross-review round")
    review_sub = p.add_subparsers(dest="review_command", required=True)
    po = review_sub.add_parser("open")
    po.add_argument("name")
    po.add_argument("--phase", required=True, choices=[s.value for s in Stage])
    po.add_argument("--participants", required=True, help="comma-separated stakeholder names")
    po.set_defaults(func=cmd_review_open)
    pc = review_sub.add_parser("close")
    pc.add_argument("name")
    pc.set_defaults(func=cmd_review_close)

    p = sub.add_parser("pattern", help="instantiate an argument pattern")
    pattern_sub = p.add_subparsers(dest="pattern_command", required=True)
    pa = pattern_sub.add_parser("apply")
    pa.add_argument("--target", required=True, help="goal id to graft under")
    pa.add_argument("--pattern", required=True, choices=[p.value for p in patterns.PatternId])
    pa.add_argument("--system")
    pa.add_argument("--attributes", help="comma-separated subset of availability,reliability,integrity,privacy")
    pa.add_argument("--statement", action="append", metavar="ATTRIBUTE=TEXT")
    pa.add_argument("--mode", action="append", metavar="NAME|MONITOR|THRESHOLD")
    pa.add_argument("--author")
    pa.add_argument("-m", "--message")
    pa.set_defaults(func=cmd_pattern_apply)

    p = sub.add_parser("metrics", help="growth series and review activity")
    p.add_argument("--csv", action="store_true")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("render", help="export a revision as DOT or SVG")
    p.add_argument("number", type=int)
    p.add_argument("--format", required=True, choices=["dot", "svg"])
    p.add_argument("--risk", action="store_true", help="label rebuttals as risks")
    p.add_argument("--highlight", help="comma-separated element ids to highlight")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("serve", help="run the shared editing service")
    p.add_argument("--config", help="JSON config file: {repo, host, port, tokens, ui}")
    p.add_argument("--host")
    p.add_argument("--port", type=int)
    p.add_argument("--tokens", help="token file (JSON); flags override --config values")
    p.add_argument("--ui", help="directory with the UI bundle to serve under /ui/")
    p.set_defaults(func=cmd_serve)

    return parser


def run(argv: list[str] | None = None) -> int:
    try:
        args = _build_parser().parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return args.func(args)
    except _Usage as exc:
        print(f"caselift: error[usage]: {exc}", file=sys.stderr)
        return 2
    except _STORE_ERRORS as exc:
        print(f"caselift: error[{exc.code}]: {exc.message}", file=sys.stderr)
        return 3
    except OpenConflictsError as exc:
        print(f"caselift: error[{exc.code}]: {len(exc.rebuttal_ids)} unresolved rebuttals", file=sys.stderr)
        for rid in exc.rebuttal_ids:
            print(f"  {rid}", file=sys.stderr)
        return 1
    except InvalidDocumentError as exc:
        print(f"caselift: error[{exc.code}]: document is not well-formed", file=sys.stderr)
        for violation in exc.violations:
            print(f"  {violation.element_id}: [{violation.code.value}] {violation.message}", file=sys.stderr)
        return 1
    except CaseliftError as exc:
        print(f"caselift: error[{exc.code}]: {exc.message}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"caselift: error[io]: {exc}", file=sys.stderr)
        return 3


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
