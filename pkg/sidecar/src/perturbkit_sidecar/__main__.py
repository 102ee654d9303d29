"""Run the sidecar: ``perturbkit-sidecar --fake --port 8008``."""

from __future__ import annotations

import argparse

import uvicorn

from .registry import build_registry
from .service import DEFAULT_MAX_PENDING, create_app


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="perturbkit-sidecar", description=__doc__)
    parser.add_argument("--fake", action="store_true", help="deterministic fake backends, no model downloads")
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8008)
    parser.add_argument("--device", default="cpu")
    parser.add_argument("--max-pending", type=int, default=DEFAULT_MAX_PENDING)
    args = parser.parse_args(argv)

    registry = build_registry(fake_mode=args.fake, device=args.device)
    app = create_app(registry, max_pending=args.max_pending)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
