"""Command line front end; experiments run through the HTTP service.

The CLI is a thin client.  It assembles the request from flags and an
optional config file, posts it to an in-process instance of the service
(or to a remote URL given with --server), then writes report tables and
the summary client-side and prints one verdict line per gate.
"""
from __future__ import annotations

import argparse
import sys

from .config import EXPERIMENTS, ExperimentConfig, apply_overrides, load_config
from .report import ConvergenceReport, emit_report


def _add_common(sp) -> None:
    sp.add_argument("--config", metavar="PATH",
                    help="key=value config file; flags override it")
    sp.add_argument("--out", metavar="DIR", help="report directory")
    sp.add_argument("--k-list", metavar="K1,K2,...",
                    help="strictly increasing k schedule")
    sp.add_argument("--weight", metavar="NAME", help="weight id (fs, ln, quad)")
    sp.add_argument("--domain", metavar="NAME",
                    help="domain id (ball, ball_affine, ellipsoid)")
    sp.add_argument("--tol-override", action="append", metavar="KEY=VAL",
                    default=[], help="override one gate tolerance; repeatable")
    sp.add_argument("--cache", metavar="DIR", help="kernel state cache directory")
    sp.add_argument("--server", metavar="URL",
                    help="run against a remote service instead of in-process")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="bergmanlab",
        description="Bergman kernel laboratory: scaling limits, weak-* "
                    "pairings, mass identities, equilibrium measures.")
    sub = p.add_subparsers(dest="command", required=True)
    descriptions = {
        "morse": "dimension growth vs curvature-plus-boundary mass",
        "scale-int": "interior scaled kernel vs the Gaussian model",
        "scale-bd": "boundary scaled kernel vs the half-space model",
        "weakstar": "measure/metric pairings against test functions",
        "rate": "log-kernel envelope distance fitted in ln k / k",
        "bm": "sup growth exponent of the weighted kernel diagonal",
        "appendix": "damped normal-profile bound at the boundary",
        "equilibrium": "envelope measure vs geometric measure plus kernels",
        "all": "every experiment on its canonical example",
    }
    for name in EXPERIMENTS + ("all",):
        _add_common(sub.add_parser(name, help=descriptions[name]))
    serve = sub.add_parser("serve", help="start the HTTP service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    return p


def make_config(args) -> ExperimentConfig:
    if args.config:
        config = load_config(args.config, experiment=args.command)
    else:
        config = ExperimentConfig(experiment=args.command)
    updates = {}
    if args.weight:
        updates["weight"] = args.weight
    if args.domain:
        updates["domain"] = args.domain
    if args.k_list:
        updates["k_list"] = tuple(int(t) for t in args.k_list.split(",")
                                  if t.strip())
    if args.cache:
        updates["cache_dir"] = args.cache
    if args.out:
        updates["out_dir"] = args.out
    if updates:
        config = config.replace(**updates)
    if args.tol_override:
        config = apply_overrides(config, args.tol_override)
    return config


def _payload(config: ExperimentConfig) -> dict:
    return {
        "experiment": config.experiment,
        "weight": config.weight,
        "domain": config.domain,
        "k_list": list(config.k_list),
        "weight_params": config.weight_params,
        "domain_params": config.domain_params,
        "resolution": config.resolution,
        "seed": config.seed,
        "cache_dir": config.cache_dir,
        "tolerances": config.tolerances,
    }


def _post(config: ExperimentConfig, server: str | None) -> dict:
    payload = _payload(config)
    if server:
        import httpx
        resp = httpx.post(server.rstrip("/") + "/run", json=payload,
                          timeout=None)
    else:
        import warnings
        with warnings.catch_warnings():
            # the testclient shim warns about its httpx backend; nothing
            # actionable for an in-process call
            warnings.filterwarnings("ignore", message=".*httpx.*")
            from fastapi.testclient import TestClient

        from .service import app
        with TestClient(app) as client:
            resp = client.post("/run", json=payload)
    if resp.status_code != 200:
        try:
            detail = resp.json().get("detail", resp.text)
        except ValueError:
            detail = resp.text
        raise SystemExit(f"service error {resp.status_code}: {detail}")
    return resp.json()


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "serve":
        import uvicorn

        from .service import app
        uvicorn.run(app, host=args.host, port=args.port)
        return 0
    config = make_config(args)
    body = _post(config, args.server)
    reports = [ConvergenceReport.from_dict(d) for d in body["reports"]]
    emit_report(reports, config.out_dir)
    for rep in reports:
        for gate, ok in sorted(rep.gates.items()):
            print(f"[{'PASS' if ok else 'FAIL'}] {rep.experiment}: {gate}")
    print(f"reports written to {config.out_dir}")
    return 0 if body["all_passed"] else 1


if __name__ == "__main__":
    sys.exit(main())
