"""Command line front end.

Runs scenarios in-process by default; with ``--server`` the same payloads are
POSTed to a running service instead. Exit codes: 0 all requested checks
passed, 1 usage or config error, 2 an inequality violated beyond tolerance or
a point failed to compute. The report is written whenever the config was
usable.
"""

from __future__ import annotations

import argparse
import json
import sys

from pydantic import ValidationError

from . import __version__
from .errors import ScgtError
from .runner import run_scenario, run_sweep
from .schemas import Report, ScenarioConfig, SweepResponse

# Discriminator tags that pydantic inserts into tagged-union error paths;
# stripped so messages cite the key the user wrote (povm.epsilon, not
# povm.depolarized_projective.epsilon).
_UNION_TAGS = {
    "bloch_qubit",
    "unitary_encoding",
    "explicit_grid",
    "depolarized_projective",
    "explicit",
}


class _UsageError(Exception):
    pass


def _load_scenario(path: str) -> ScenarioConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise _UsageError(f"cannot read config {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise _UsageError(
            f"invalid JSON in {path} at line {exc.lineno} column {exc.colno}: "
            f"{exc.msg}"
        ) from exc
    try:
        return ScenarioConfig.model_validate(data)
    except ValidationError as exc:
        lines = [f"invalid config {path}:"]
        for err in exc.errors():
            loc = ".".join(
                str(p) for p in err["loc"] if str(p) not in _UNION_TAGS
            )
            lines.append(f"  {loc or '(root)'}: {err['msg']}")
        raise _UsageError("\n".join(lines)) from exc


def _write_text(path: str, text: str) -> None:
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise _UsageError(f"cannot write {path}: {exc}") from exc


def _write_json(path: str, payload: dict) -> None:
    _write_text(path, json.dumps(payload, indent=2) + "\n")


def _post(server: str, route: str, payload: dict) -> dict:
    import httpx

    url = server.rstrip("/") + route
    try:
        resp = httpx.post(url, json=payload, timeout=600.0)
    except httpx.HTTPError as exc:
        raise _UsageError(f"cannot reach {url}: {exc}") from exc
    if resp.status_code != 200:
        raise _UsageError(f"server returned {resp.status_code}: {resp.text}")
    return resp.json()


def _cmd_run(args: argparse.Namespace) -> int:
    config = _load_scenario(args.config)
    if args.grid_scale is not None:
        if args.grid_scale <= 0:
            raise _UsageError("--grid-scale must be positive")
        c0, c1 = config.phases.cells
        config.phases.cells = (
            max(1, round(c0 * args.grid_scale)),
            max(1, round(c1 * args.grid_scale)),
        )
    if args.seed is not None:
        config.seed = args.seed

    if args.server:
        report = Report.model_validate(
            _post(args.server, "/v1/run", config.model_dump(mode="json"))
        )
    else:
        try:
            report = run_scenario(config)
        except (ScgtError, ValueError) as exc:
            raise _UsageError(f"{type(exc).__name__}: {exc}") from exc

    _write_json(args.out, report.model_dump(mode="json"))
    summary = report.summary
    if summary.passed:
        return 0
    for line in summary.violations:
        print(f"violation: {line}", file=sys.stderr)
    if summary.points_with_errors:
        print(
            f"{summary.points_with_errors} point(s) failed to compute; "
            f"see {args.out}",
            file=sys.stderr,
        )
    return 2


def _parse_epsilons(spec: str) -> list[float]:
    try:
        values = [float(tok) for tok in spec.split(",") if tok.strip()]
    except ValueError as exc:
        raise _UsageError(f"invalid --epsilons value: {exc}") from exc
    if not values:
        raise _UsageError("--epsilons is empty")
    bad = [v for v in values if not 0.0 <= v <= 1.0]
    if bad:
        raise _UsageError(f"epsilons outside [0, 1]: {bad}")
    return values


def _cmd_sweep(args: argparse.Namespace) -> int:
    config = _load_scenario(args.config)
    epsilons = _parse_epsilons(args.epsilons)

    if args.server:
        response = SweepResponse.model_validate(
            _post(
                args.server,
                "/v1/sweep-epsilon",
                {
                    "config": config.model_dump(mode="json"),
                    "epsilons": epsilons,
                },
            )
        )
    else:
        try:
            response = run_sweep(config, epsilons)
        except ValueError as exc:
            raise _UsageError(str(exc)) from exc
        except ScgtError as exc:
            print(f"sweep failed: {type(exc).__name__}: {exc}", file=sys.stderr)
            return 2

    if args.out.endswith(".csv"):
        _write_text(args.out, response.csv)
    else:
        _write_json(args.out, response.model_dump(mode="json"))
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .api import app

    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="scgt",
        description="Geometric tensors, Fisher bounds and measured phases "
        "for parametrized quantum states.",
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__}"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run a scenario and write a report")
    run_p.add_argument("--config", required=True, help="scenario JSON path")
    run_p.add_argument("--out", required=True, help="report output path")
    run_p.add_argument(
        "--grid-scale",
        type=float,
        default=None,
        metavar="K",
        help="multiply phase-grid cell counts by K",
    )
    run_p.add_argument(
        "--seed", type=int, default=None, help="override the scenario seed"
    )
    run_p.add_argument(
        "--server", default=None, metavar="URL", help="POST to a service"
    )
    run_p.set_defaults(func=_cmd_run)

    sweep_p = sub.add_parser(
        "sweep-epsilon",
        help="winding-number curve versus measurement visibility",
    )
    sweep_p.add_argument("--config", required=True, help="scenario JSON path")
    sweep_p.add_argument(
        "--epsilons", required=True, help="comma-separated values in [0, 1]"
    )
    sweep_p.add_argument(
        "--out", required=True, help="output path (.csv for bare table)"
    )
    sweep_p.add_argument(
        "--server", default=None, metavar="URL", help="POST to a service"
    )
    sweep_p.set_defaults(func=_cmd_sweep)

    serve_p = sub.add_parser("serve", help="start the HTTP service")
    serve_p.add_argument("--host", default="127.0.0.1")
    serve_p.add_argument("--port", type=int, default=8000)
    serve_p.set_defaults(func=_cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _UsageError as exc:
        print(f"scgt: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
