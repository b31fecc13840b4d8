"""Command-line client for the analysis service.

Subcommands:
    analyze            controllability + contraction analysis, writes a report
    steer              analysis + steering, writes report, CSVs, plot data
    check-contraction  empirical contraction ratios over random pairs
    dump-config        echo the parsed config with defaults filled in
    serve              run the HTTP service

The CLI is a thin client: all computation happens in the service, which by
default is instantiated in-process (no daemon or socket needed). Point
--server at a running instance to use a remote one instead. Exit codes:
0 success (verdicts like "not controllable" are still success), 1 usage or
parse errors, 2 validation failures.
"""

from __future__ import annotations

import argparse
import asyncio
import sys
from pathlib import Path

import httpx

from . import __version__
from .config import ConfigError, load_config
from .reports import render_json, write_control_csv, write_plot_data, write_text, write_trajectory_csv

__all__ = ["main", "build_parser", "EXIT_OK", "EXIT_USAGE", "EXIT_VALIDATION"]

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VALIDATION = 2


class ClientError(Exception):
    """Service interaction failed; carries the exit code to use."""

    def __init__(self, message, exit_code=EXIT_USAGE):
        super().__init__(message)
        self.exit_code = exit_code


class _Parser(argparse.ArgumentParser):
    # usage problems exit 1, not argparse's default 2
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


class ServiceClient:
    """POSTs to a remote service or to an in-process ASGI app."""

    def __init__(self, server=None):
        self._server = server.rstrip("/") if server else None
        self._app = None
        if self._server is None:
            from .service.app import create_app

            self._app = create_app()

    def post(self, path, payload):
        try:
            if self._server is not None:
                with httpx.Client(base_url=self._server, timeout=600.0) as client:
                    response = client.post(path, json=payload)
            else:
                response = asyncio.run(self._post_inprocess(path, payload))
        except httpx.HTTPError as exc:
            raise ClientError(f"service request failed: {exc}", EXIT_USAGE) from exc
        return self._handle(response)

    async def _post_inprocess(self, path, payload):
        transport = httpx.ASGITransport(app=self._app)
        async with httpx.AsyncClient(transport=transport, base_url="http://service.internal") as client:
            return await client.post(path, json=payload, timeout=600.0)

    @staticmethod
    def _handle(response):
        if response.status_code == 200:
            return response.json()
        if response.status_code == 400:
            detail = response.json().get("detail", {})
            if isinstance(detail, dict) and "diagnostics" in detail:
                lines = "\n".join("  " + str(d) for d in detail["diagnostics"])
                raise ClientError(f"validation failed:\n{lines}", EXIT_VALIDATION)
            raise ClientError(f"validation failed: {detail}", EXIT_VALIDATION)
        if response.status_code == 422:
            raise ClientError(f"request rejected by service schema: {response.text}", EXIT_USAGE)
        raise ClientError(f"service error {response.status_code}: {response.text}", EXIT_USAGE)


def _resolve_out(out_dir, configured):
    if out_dir is not None:
        return Path(out_dir) / Path(configured).name
    return Path(configured)


def _print_report_summary(report):
    n = report["dimensions"]["n"]
    print(f"kalman rank: {report['kalman_rank']} of {n}")
    print(f"controllable: {'yes' if report['controllable'] else 'no'}")
    if report["m"] is not None:
        bw = report["boyd_wong"]
        verdict = "satisfied for all distances" if bw["satisfied_globally"] else (
            "satisfied only on an interval" if bw["valid_interval"] is not None else "not satisfied"
        )
        print(f"M = {report['m']:.6g} (rho = {report['rho']:.6g}), contraction condition {verdict}")
    steering = report.get("steering")
    if steering is not None:
        status = "converged" if steering["converged"] else "did not converge"
        print(
            f"steering {status} in {steering['iterations']} iterations; "
            f"terminal error {steering['terminal_error_fixed_point']:.3e} (fixed point), "
            f"{steering['terminal_error_simulated']:.3e} (simulated)"
        )
    for warning in report["warnings"]:
        print(f"warning: {warning}")


def _cmd_analyze(args):
    cfg = load_config(args.config)
    client = ServiceClient(args.server)
    payload = {
        "config": cfg.model_dump(mode="json"),
        "quadrature_check": args.quadrature_check,
        "seed": args.seed,
    }
    report = client.post("/analyze", payload)
    path = _resolve_out(args.out, cfg.outputs.report)
    write_text(path, render_json(report))
    _print_report_summary(report)
    print(f"report: {path}")
    return EXIT_OK


def _cmd_steer(args):
    cfg = load_config(args.config)
    client = ServiceClient(args.server)
    payload = {
        "config": cfg.model_dump(mode="json"),
        "quadrature_check": args.quadrature_check,
        "seed": args.seed,
    }
    data = client.post("/steer", payload)
    report = data["report"]
    path = _resolve_out(args.out, cfg.outputs.report)
    write_text(path, render_json(report))
    _print_report_summary(report)
    print(f"report: {path}")
    if data["states"] is None:
        print("no trajectory written: system is not controllable")
        return EXIT_OK
    traj_path = _resolve_out(args.out, cfg.outputs.trajectory)
    control_path = _resolve_out(args.out, cfg.outputs.control)
    write_trajectory_csv(traj_path, data["grid"], data["states"])
    write_control_csv(control_path, data["grid"], data["controls"])
    print(f"trajectory: {traj_path}")
    print(f"control: {control_path}")
    if cfg.outputs.plot_data is not None:
        plot_dir = Path(args.out) / Path(cfg.outputs.plot_data).name if args.out else Path(cfg.outputs.plot_data)
        write_plot_data(plot_dir, data["grid"], data["states"], data["controls"], data["successive_deltas"])
        print(f"plot data: {plot_dir}")
    return EXIT_OK


def _cmd_contraction(args):
    cfg = load_config(args.config)
    client = ServiceClient(args.server)
    payload = {"config": cfg.model_dump(mode="json"), "pairs": args.pairs, "seed": args.seed}
    report = client.post("/contraction", payload)
    text = render_json(report)
    if args.out is not None:
        path = Path(args.out) / "contraction.json"
        write_text(path, text)
        print(f"contraction report: {path}")
    else:
        print(text, end="")
    verdict = "within" if report["within_bound"] else "exceeds"
    print(
        f"max ratio {report['max_ratio_sup']:.6g} {verdict} bound M = {report['m']:.6g} "
        f"over {report['pairs']} pairs"
    )
    return EXIT_OK


def _cmd_dump_config(args):
    cfg = load_config(args.config)
    client = ServiceClient(args.server)
    data = client.post("/config/normalize", {"config": cfg.model_dump(mode="json")})
    text = render_json(data["config"])
    if args.out is not None:
        path = Path(args.out) / "config.json"
        write_text(path, text)
        print(f"normalized config: {path}")
    else:
        print(text, end="")
    return EXIT_OK


def _cmd_serve(args):
    import uvicorn

    from .service.app import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port)
    return EXIT_OK


def build_parser():
    parser = _Parser(prog="netsteer", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--version", action="version", version=f"netsteer {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, quadrature=False):
        p.add_argument("--config", required=True, help="path to a JSON run configuration")
        p.add_argument("--out", default=None, help="directory for output files (created if missing)")
        p.add_argument("--seed", type=int, default=None, help="override the sampling seed")
        p.add_argument("--server", default=None, help="URL of a running service; default is in-process")
        if quadrature:
            p.add_argument(
                "--quadrature-check",
                action="store_true",
                help="also compare the Gramian against a doubled grid",
            )

    p_analyze = sub.add_parser("analyze", help="controllability and contraction analysis")
    add_common(p_analyze, quadrature=True)
    p_analyze.set_defaults(handler=_cmd_analyze)

    p_steer = sub.add_parser("steer", help="synthesize and verify a steering control")
    add_common(p_steer, quadrature=True)
    p_steer.set_defaults(handler=_cmd_steer)

    p_contr = sub.add_parser("check-contraction", help="empirical contraction ratios on random pairs")
    add_common(p_contr)
    p_contr.add_argument("--pairs", type=int, default=200, help="number of random trajectory pairs")
    p_contr.set_defaults(handler=_cmd_contraction)

    p_dump = sub.add_parser("dump-config", help="echo the validated config with defaults filled in")
    add_common(p_dump)
    p_dump.set_defaults(handler=_cmd_dump_config)

    p_serve = sub.add_parser("serve", help="run the HTTP service")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)
    p_serve.set_defaults(handler=_cmd_serve)

    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code is not None else EXIT_OK
    try:
        return args.handler(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ClientError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
