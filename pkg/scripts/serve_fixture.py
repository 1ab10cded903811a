#!/usr/bin/env python3
"""Serve a freshly replayed ASPEN fixture for demos and UI development.

Replays the fixture into a scratch directory (so mutations never touch the
bundled copy), then serves it with the demo tokens.  ``--upto 21`` is the
interesting state for walking the review loop in the UI: nine rebuttals
open, the development round still unclosed.
"""

from __future__ import annotations

import argparse
import tempfile
from pathlib import Path

from caselift.fixtures import build_aspen_repository
from caselift.service import CaseService, make_server
from caselift.workflow import ReviewLog

from build_aspen_fixture import DEMO_TOKENS

ROOT = Path(__file__).resolve().parent.parent


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8080)
    parser.add_argument("--upto", type=int, default=21)
    parser.add_argument("--ui", default=str(ROOT / "frontend" / "dist"),
                        help="UI bundle directory (skipped when missing)")
    args = parser.parse_args()

    scratch = Path(tempfile.mkdtemp(prefix="caselift-aspen-"))
    repo, log = build_aspen_repository(scratch / "aspen", upto=args.upto)
    tokens = {token: entry["name"] for token, entry in DEMO_TOKENS.items()}
    ui_dir = Path(args.ui) if Path(args.ui).is_dir() else None
    service = CaseService(repo, ReviewLog.load(repo.path), tokens, ui_dir=ui_dir)
    server = make_server(service, args.host, args.port)
    host, port = server.server_address[:2]
    print(f"ASPEN at revision {repo.head} in {scratch}")
    print(f"API:    http://{host}:{port}/api/doc")
    if ui_dir:
        print(f"UI:     http://{host}:{port}/ui/")
    print(f"Tokens: {', '.join(DEMO_TOKENS)}")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()


if __name__ == "__main__":
    main()
