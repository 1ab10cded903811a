#!/usr/bin/env python3
"""Regenerate the bundled ASPEN fixture repository under fixtures/aspen.

The replay is deterministic (fixed timestamps, fixed content), so running
this script never changes a committed fixture unless the builder changed.
"""

from __future__ import annotations

import argparse
import json
import shutil
import sys
from pathlib import Path

from caselift.fixtures import build_aspen_repository

ROOT = Path(__file__).resolve().parent.parent

DEMO_TOKENS = {
    "tok-owner": {"name": "owner", "role": "owner"},
    "tok-developer": {"name": "developer", "role": "developer"},
    "tok-operator": {"name": "operator", "role": "operator"},
    "tok-user": {"name": "user", "role": "user"},
}


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--dest", default=str(ROOT / "fixtures" / "aspen"))
    parser.add_argument("--upto", type=int, default=40, help="stop the replay at this revision")
    parser.add_argument("--force", action="store_true", help="replace an existing fixture")
    args = parser.parse_args()

    dest = Path(args.dest)
    if dest.exists():
        if not args.force:
            print(f"{dest} already exists; pass --force to regenerate", file=sys.stderr)
            return 1
        shutil.rmtree(dest)
    repo, log = build_aspen_repository(dest, upto=args.upto)
    tokens_path = dest.parent / "tokens.json"
    tokens_path.write_text(json.dumps(DEMO_TOKENS, indent=2) + "\n", encoding="utf-8")
    print(f"Built {repo.document_id!r} fixture: {repo.head} revisions, "
          f"{len(log.reviews)} reviews, at {dest}")
    print(f"Demo tokens at {tokens_path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
