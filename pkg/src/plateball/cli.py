"""Command-line front end: tables, certificates, and curve data as CSV/JSON.

The CLI is a thin HTTP client of the service app.  By default it mounts the
app in-process over an ASGI transport (no socket, no server to start); with
``--server URL`` the same requests go to a remote instance instead.  All
outputs are deterministic: identical configuration produces byte-identical
files.

Exit codes: 0 all requested verifications passed, 1 a verification failed,
2 usage error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import asyncio
import json
import os
import sys
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import httpx

from . import __version__

EXIT_PASS = 0
EXIT_VERIFICATION = 1
EXIT_USAGE = 2
EXIT_NUMERICAL = 3

OUT_DIR_ENV = "PLATEBALL_OUT_DIR"

_TABULAR = ("constants", "table1", "table2", "table3", "mu-curve", "f-curve")


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    """Everything one invocation needs; argparse output normalized."""

    command: str
    dims: str = "4..9"
    dim: int = 4
    samples: int = 101
    r_in: float = 0.5
    r_out: float = 1.0
    r_max: float | None = None
    quadrature_n: int = 4096
    tolerance: float = 1e-6
    margin_guard: float = 1e-6
    enclosure_tol: float = 1e-12
    max_len: int = 64
    seed: int = 0
    count: int = 1000
    p_values: tuple[int, ...] = (1, 2, 3)
    out: Path | None = None
    fmt: str | None = None  # csv | json | None (infer)
    digits: int = 17
    server: str | None = None

    def __post_init__(self) -> None:
        for name in ("tolerance", "margin_guard", "enclosure_tol"):
            if getattr(self, name) <= 0:
                raise UsageError(f"--{name.replace('_', '-')} must be positive")
        if self.digits < 1 or self.digits > 17:
            raise UsageError("--digits must be in 1..17")

    @property
    def format(self) -> str:
        if self.fmt is not None:
            return self.fmt
        if self.out is not None and self.out.suffix in (".csv", ".json"):
            return self.out.suffix[1:]
        return "csv" if self.command in _TABULAR else "json"


def _fmt_cell(x: Any, digits: int) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return str(x).lower()
    if isinstance(x, float):
        return format(x, f".{digits}g")
    return str(x)


def _to_csv(columns: list[str], rows: list[list[Any]], digits: int) -> str:
    lines = [",".join(columns)]
    lines.extend(",".join(_fmt_cell(c, digits) for c in row) for row in rows)
    return "\n".join(lines) + "\n"


def _write_atomic(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(config: RunConfig, text: str) -> None:
    if config.out is None:
        sys.stdout.write(text)
        return
    out = config.out
    if not out.is_absolute() and OUT_DIR_ENV in os.environ:
        out = Path(os.environ[OUT_DIR_ENV]) / out
    _write_atomic(out, text)


async def _request(client: httpx.AsyncClient, config: RunConfig) -> dict:
    """One HTTP exchange per command; raises UsageError/RuntimeError on 4xx/5xx."""
    cmd = config.command
    if cmd == "constants":
        resp = await client.get("/constants", params={"dims": config.dims})
    elif cmd in ("table1", "table2", "table3"):
        resp = await client.get(f"/tables/{cmd}", params={"dims": config.dims})
    elif cmd == "certify":
        from .service import parse_dims

        resp = await client.post(
            "/certify",
            json={
                "dims": list(parse_dims(config.dims)),
                "margin_guard": config.margin_guard,
                "enclosure_tol": config.enclosure_tol,
                "max_len": config.max_len,
            },
        )
    elif cmd == "mu-curve":
        resp = await client.post(
            "/curves/mu",
            json={
                "dimension": config.dim,
                "samples": config.samples,
                "enclosure_tol": config.enclosure_tol,
            },
        )
    elif cmd == "f-curve":
        body: dict[str, Any] = {"dimension": config.dim, "samples": config.samples}
        if config.r_max is not None:
            body["r_max"] = config.r_max
        resp = await client.post("/curves/f", json=body)
    elif cmd == "compare-annulus":
        resp = await client.post(
            "/compare-annulus",
            json={
                "dimension": config.dim,
                "r_in": config.r_in,
                "r_out": config.r_out,
                "quadrature_n": config.quadrature_n,
                "tolerance": config.tolerance,
            },
        )
    elif cmd == "prop-suite":
        resp = await client.post(
            "/prop-suite",
            json={
                "seed": config.seed,
                "count": config.count,
                "p_values": list(config.p_values),
            },
        )
    else:  # pragma: no cover - argparse restricts choices
        raise UsageError(f"unknown command {cmd!r}")

    if resp.status_code >= 500:
        raise RuntimeError(_error_detail(resp))
    if resp.status_code >= 400:
        raise UsageError(_error_detail(resp))
    return resp.json()


def _error_detail(resp: httpx.Response) -> str:
    try:
        payload = resp.json()
    except ValueError:
        return resp.text
    detail = payload.get("detail", payload)
    return detail if isinstance(detail, str) else json.dumps(detail)


def _csv_view(config: RunConfig, payload: dict) -> tuple[list[str], list[list[Any]]]:
    cmd = config.command
    if cmd == "constants":
        cols = ["d"]
        for name in ("j1", "j2", "k", "aI", "aS", "necessary_condition"):
            cols += [f"{name}_lo", f"{name}_hi"]
        rows = []
        for e in payload["entries"]:
            row: list[Any] = [e["dimension"]]
            for name in ("j1", "j2", "k", "aI", "aS", "necessary_condition"):
                row += [e[name]["lo"], e[name]["hi"]]
            rows.append(row)
        return cols, rows
    if cmd in ("table1", "table2", "table3"):
        cols = ["d", *payload["columns"]]
        rows = [[r["d"], *(r["values"][c] for c in payload["columns"])] for r in payload["rows"]]
        if cmd == "table1":
            cols.append("rounded")
            for row in rows:
                row.append(format(row[1], ".4f"))
        return cols, rows
    if cmd == "mu-curve":
        rows = [list(t) for t in zip(payload["a"], payload["mu_lo"], payload["mu_hi"])]
        return ["a", "mu_lo", "mu_hi"], rows
    if cmd == "f-curve":
        rows = [
            list(t)
            for t in zip(payload["r"], payload["f"], payload["f_prime"], payload["g"], payload["s"])
        ]
        return ["r", "f", "f_prime", "g", "s"], rows
    if cmd == "compare-annulus":
        cols = ["d", "r_in", "r_out", "max_violation", "kappa", "passed"]
        return cols, [[payload[k] for k in ("dimension", "r_in", "r_out", "max_violation", "kappa", "passed")]]
    if cmd == "prop-suite":
        cols = [
            "seed",
            "count",
            "split_failures",
            "coincidence_failures",
            "restriction_failures",
            "worst_discrepancy",
            "passed",
        ]
        return cols, [[payload[k] for k in cols]]
    raise UsageError(f"command {cmd!r} has no CSV representation; use --format json")


def _passed(config: RunConfig, payload: dict) -> bool:
    if config.command == "certify":
        return bool(payload["all_passed"])
    return bool(payload.get("passed", True))


async def _run_async(config: RunConfig) -> int:
    if config.server is not None:
        client = httpx.AsyncClient(base_url=config.server, timeout=300.0)
    else:
        from .service import app

        client = httpx.AsyncClient(
            transport=httpx.ASGITransport(app=app), base_url="http://plateball.internal"
        )
    async with client:
        payload = await _request(client, config)

    if config.format == "json":
        text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    else:
        columns, rows = _csv_view(config, payload)
        text = _to_csv(columns, rows, config.digits)
    _emit(config, text)
    return EXIT_PASS if _passed(config, payload) else EXIT_VERIFICATION


def run(config: RunConfig) -> int:
    """Execute one configured command; returns the process exit status."""
    try:
        return asyncio.run(_run_async(config))
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (httpx.HTTPError, RuntimeError, ArithmeticError, OSError) as exc:
        print(f"numerical/transport failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


def _add_output_args(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--out", type=Path, default=None, help="output file (default: stdout)")
    sp.add_argument(
        "--format",
        dest="fmt",
        choices=("csv", "json"),
        default=None,
        help="output format (default: inferred from --out suffix, else per command)",
    )
    sp.add_argument("--digits", type=int, default=17, help="CSV significant digits (1..17)")
    sp.add_argument("--server", default=None, help="remote service URL (default: in-process)")


def _add_dims(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--dims", default="4..9", help="dimensions, e.g. '4..9' or '4,6'")


def _add_dim(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--dim", type=int, default=4, help="single dimension")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plateball",
        description="Certified numerics for the asymmetric two-ball clamped-plate problem.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("constants", help="directed spectral constants per dimension")
    _add_dims(sp)
    _add_output_args(sp)

    for kind, blurb in (
        ("table1", "necessary-condition values"),
        ("table2", "displayed directed constants"),
        ("table3", "certificate margins at the reference checkpoints"),
    ):
        sp = sub.add_parser(kind, help=blurb)
        _add_dims(sp)
        _add_output_args(sp)

    sp = sub.add_parser("certify", help="run the zigzag certification per dimension")
    _add_dims(sp)
    sp.add_argument("--margin-guard", dest="margin_guard", type=float, default=1e-6)
    sp.add_argument("--enclosure-tol", dest="enclosure_tol", type=float, default=1e-12)
    sp.add_argument("--max-len", dest="max_len", type=int, default=64)
    _add_output_args(sp)

    sp = sub.add_parser("mu-curve", help="two-ball eigenvalue bound along the volume split")
    _add_dim(sp)
    sp.add_argument("--samples", type=int, default=101)
    sp.add_argument("--enclosure-tol", dest="enclosure_tol", type=float, default=1e-12)
    _add_output_args(sp)

    sp = sub.add_parser("f-curve", help="f_nu and friends on (0, k_nu]")
    _add_dim(sp)
    sp.add_argument("--samples", type=int, default=512)
    sp.add_argument("--r-max", dest="r_max", type=float, default=None)
    _add_output_args(sp)

    sp = sub.add_parser("compare-annulus", help="improved comparison check on an annulus")
    _add_dim(sp)
    sp.add_argument("--r-in", dest="r_in", type=float, default=0.5)
    sp.add_argument("--r-out", dest="r_out", type=float, default=1.0)
    sp.add_argument("--panels", dest="quadrature_n", type=int, default=4096)
    sp.add_argument("--tolerance", type=float, default=1e-6)
    _add_output_args(sp)

    sp = sub.add_parser("prop-suite", help="seeded exact rearrangement identity corpus")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--count", type=int, default=1000)
    sp.add_argument(
        "--p-values",
        dest="p_values",
        default="1,2,3",
        help="comma-separated moment orders",
    )
    _add_output_args(sp)

    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    fields = {k: v for k, v in vars(args).items() if k != "p_values" and v is not None}
    if hasattr(args, "p_values") and args.p_values is not None:
        try:
            fields["p_values"] = tuple(int(t) for t in str(args.p_values).split(","))
        except ValueError:
            raise UsageError(f"cannot parse --p-values {args.p_values!r}")
    return RunConfig(**fields)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits 2 on bad usage, 0 on --help
        return int(exc.code or 0)
    try:
        config = config_from_args(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
