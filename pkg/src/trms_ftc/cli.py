"""Command-line client for the simulation service.

Every subcommand drives the HTTP API.  By default the service runs
in-process (no server needed); --server points the same calls at a remote
instance.  `serve` starts the service under uvicorn.
"""

from __future__ import annotations

import argparse
import asyncio
import json
import sys

import httpx


def _call(server: str | None, method: str, path: str, payload: dict):
    async def go():
        if server:
            transport = None
            base = server.rstrip("/")
        else:
            from .service.app import app
            transport = httpx.ASGITransport(app=app)
            base = "http://service"
        async with httpx.AsyncClient(transport=transport, base_url=base,
                                     timeout=None) as client:
            return await client.request(method, path, json=payload)

    return asyncio.run(go())


def _load_config(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _fail_on_error(resp: httpx.Response) -> None:
    if resp.status_code >= 400:
        try:
            detail = resp.json().get("detail")
        except ValueError:
            detail = resp.text
        sys.exit(f"error ({resp.status_code}): {detail}")


def _cmd_sim(args) -> None:
    resp = _call(args.server, "POST", "/sim", _load_config(args.config))
    _fail_on_error(resp)
    with open(args.out, "wb") as fh:
        fh.write(resp.content)
    rows = resp.text.count("\n") - 1
    print(f"wrote {rows} samples to {args.out}")


def _cmd_design(args) -> None:
    resp = _call(args.server, "POST", "/design", _load_config(args.config))
    _fail_on_error(resp)
    with open(args.out, "w", encoding="utf-8") as fh:
        json.dump(resp.json(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"wrote design document to {args.out}")


def _cmd_linearize(args) -> None:
    resp = _call(args.server, "POST", "/linearize", _load_config(args.config))
    _fail_on_error(resp)
    with open(args.out, "w", encoding="utf-8") as fh:
        json.dump(resp.json(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"wrote model bank to {args.out}")


def _cmd_metrics(args) -> None:
    with open(args.trace, "r", encoding="utf-8") as fh:
        csv_text = fh.read()
    payload = {"csv": csv_text, "u_sat": args.u_sat, "band": args.band}
    if args.fault_start is not None:
        payload["fault_start"] = args.fault_start
    resp = _call(args.server, "POST", "/metrics", payload)
    _fail_on_error(resp)
    text = json.dumps(resp.json(), indent=2, sort_keys=True)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    print(text)


def _cmd_serve(args) -> None:
    import uvicorn

    from .service.app import app
    uvicorn.run(app, host=args.host, port=args.port)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="trms-ftc",
        description="Twin-rotor fault-tolerant control: simulate, design, analyze")
    parser.add_argument("--server", default=None,
                        help="base URL of a running service (default: in-process)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sim", help="run a closed-loop scenario, write the CSV trace")
    p.add_argument("--config", required=True, help="scenario JSON file")
    p.add_argument("--out", required=True, help="output CSV path")
    p.set_defaults(func=_cmd_sim)

    p = sub.add_parser("design", help="synthesize gains, write the design document")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_design)

    p = sub.add_parser("linearize", help="build the local-model bank, write it as JSON")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_linearize)

    p = sub.add_parser("metrics", help="compute tracking/estimation metrics from a trace")
    p.add_argument("--trace", required=True, help="trace CSV produced by sim")
    p.add_argument("--u-sat", type=float, default=2.5, dest="u_sat")
    p.add_argument("--band", type=float, default=0.02)
    p.add_argument("--fault-start", type=float, default=None, dest="fault_start")
    p.add_argument("--out", default=None, help="optional JSON output path")
    p.set_defaults(func=_cmd_metrics)

    p = sub.add_parser("serve", help="start the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    args.func(args)
    return 0


if __name__ == "__main__":
    sys.exit(main())
