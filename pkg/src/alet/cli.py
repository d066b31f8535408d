"""Command-line client for the run service.

``alet run`` validates a JSON config and executes it, either in process
or against a running server (--server), then writes the report and CSV
artifacts to the output directory. ``alet serve`` starts the HTTP
service. Exit codes: 0 success, 2 invalid configuration, 3 certificate
anomaly.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

from pydantic import ValidationError

from . import __version__
from .config import RunConfig
from .reporting import render_json

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_VALIDATION = 2
EXIT_ANOMALY = 3


def _load_config(path: str):
    try:
        with open(path, "r", encoding="utf-8") as handle:
            raw = json.load(handle)
    except FileNotFoundError:
        print(f"error: config file not found: {path}", file=sys.stderr)
        return None
    except json.JSONDecodeError as exc:
        print(f"error: config is not valid JSON: {exc}", file=sys.stderr)
        return None
    try:
        return RunConfig.model_validate(raw)
    except ValidationError as exc:
        print(f"error: invalid configuration ({exc.error_count()} problem(s)):",
              file=sys.stderr)
        for err in exc.errors():
            loc = ".".join(str(part) for part in err["loc"]) or "<root>"
            print(f"  {loc}: {err['msg']}", file=sys.stderr)
        return None


def _write_artifacts(out_dir: Path, report_text: str, artifacts, timing: dict):
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "report.json").write_text(report_text, encoding="utf-8")
    (out_dir / "timing.json").write_text(
        json.dumps(timing, indent=2) + "\n", encoding="utf-8"
    )
    for path, content in artifacts:
        target = out_dir / path
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(content, encoding="utf-8")


def _run_remote(server: str, config: RunConfig, workers: int):
    import httpx

    response = httpx.post(
        server.rstrip("/") + "/run",
        json=config.model_dump(mode="json", by_alias=True, exclude_none=True),
        params={"workers": workers},
        timeout=None,
    )
    if response.status_code == 422:
        print("error: server rejected the configuration:", file=sys.stderr)
        for err in response.json().get("detail", []):
            loc = ".".join(str(part) for part in err.get("loc", [])) or "<root>"
            print(f"  {loc}: {err.get('msg')}", file=sys.stderr)
        return None
    response.raise_for_status()
    return response.json()


def cmd_run(args) -> int:
    config = _load_config(args.config)
    if config is None:
        return EXIT_VALIDATION
    if args.seed is not None:
        config = config.model_copy(update={"seed": args.seed})
    out_dir = Path(args.out or config.output_dir or "alet-out")
    workers = args.workers or os.cpu_count() or 1

    if args.server:
        payload = _run_remote(args.server, config, workers)
        if payload is None:
            return EXIT_VALIDATION
        report = payload["report"]
        artifacts = [(a["path"], a["content"]) for a in payload["artifacts"]]
        timing = payload["timing"]
        exit_code = int(payload["exit_code"])
    else:
        from .runner import execute

        started = time.monotonic()
        outcome = execute(config, workers=workers)
        timing = {"wall_seconds": time.monotonic() - started}
        report = outcome.report
        artifacts = sorted(outcome.artifacts.items())
        exit_code = outcome.exit_code

    _write_artifacts(out_dir, render_json(report) + "\n", artifacts, timing)
    status = report["status"]
    queries = report["totals"]["queries"]
    print(f"mode={config.mode} status={status} queries={queries} out={out_dir}")
    if status == "certificate-anomaly":
        detail = report["results"].get("message") or report["results"].get("anomalies")
        print(f"certificate anomaly: {detail}", file=sys.stderr)
    return exit_code


def cmd_serve(args) -> int:
    import uvicorn

    from .service import app

    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="alet", description=__doc__)
    parser.add_argument("--version", action="version", version=f"alet {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="execute a run configuration")
    run_p.add_argument("--config", required=True, help="path to a JSON run config")
    run_p.add_argument("--seed", type=int, default=None, help="override the config seed")
    run_p.add_argument("--workers", type=int, default=None,
                       help="worker pool size (default: machine parallelism)")
    run_p.add_argument("--out", default=None, help="output directory for report and CSVs")
    run_p.add_argument("--server", default=None,
                       help="base URL of a running service; omit to run in process")
    run_p.set_defaults(func=cmd_run)

    serve_p = sub.add_parser("serve", help="start the HTTP service")
    serve_p.add_argument("--host", default="127.0.0.1")
    serve_p.add_argument("--port", type=int, default=8321)
    serve_p.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE


def entrypoint():
    sys.exit(main())
