#!/usr/bin/env python3
"""Serve the review workflow over HTTP with the built-in demo study.

Tokens are tok-r1, tok-r2, tok-r3 (reviewers) and tok-adj (adjudicator).
Used by the frontend end-to-end tests and handy for manual poking.
"""

import argparse

import uvicorn

from pvlens.demo import demo_service
from pvlens.review_service import build_app


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8642)
    parser.add_argument("--seed", type=int, default=4)
    args = parser.parse_args()
    app = build_app(demo_service(seed=args.seed))
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")


if __name__ == "__main__":
    main()
