"""Command-line client for the minent service.

Every subcommand builds a request, sends it over HTTP, and renders the
response.  By default the request is served by an in-process instance of
the FastAPI app (no server needed); pass ``--server URL`` to talk to a
running one, or start one with ``minent serve``.

Exit codes: 0 success, 2 usage error, 3 input parse error, 4 the sequence
cannot support the requested estimation (too short / empty tuple range),
1 anything else.
"""

from __future__ import annotations

import argparse
import asyncio
import base64
import csv
import io
import json
import sys

import httpx

from . import __version__

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_PARSE = 3
EXIT_DOMAIN = 4

_FORMATS = ["raw_bitpacked", "bytes_one_symbol", "text_symbols"]
_FAMILIES = ["bms", "markov", "near_uniform", "inverted_near_uniform"]


class ServiceError(Exception):
    def __init__(self, status: int, payload):
        self.status = status
        self.payload = payload
        super().__init__(f"HTTP {status}: {payload}")

    @property
    def exit_code(self) -> int:
        code = self.payload.get("error_code") if isinstance(self.payload, dict) else None
        if code == "parse_error":
            return EXIT_PARSE
        if code == "estimation_error":
            return EXIT_DOMAIN
        return EXIT_USAGE if 400 <= self.status < 500 else 1


def call_service(server: str | None, path: str, payload: dict) -> dict:
    """POST one request, in-process unless a server URL is given."""

    async def _run():
        if server:
            transport = None
            base_url = server.rstrip("/")
        else:
            from .service.app import app

            transport = httpx.ASGITransport(app=app)
            base_url = "http://minent.internal"
        async with httpx.AsyncClient(
            transport=transport, base_url=base_url, timeout=None
        ) as client:
            response = await client.post(path, json=payload)
            try:
                body = response.json()
            except ValueError:
                body = {"detail": response.text}
            if response.status_code != 200:
                raise ServiceError(response.status_code, body)
            return body

    return asyncio.run(_run())


def _config_payload(args) -> dict:
    return {
        "alpha": args.alpha,
        "cutoff": args.cutoff,
        "confidence_z": args.z,
        "mode": args.mode,
        "bisect_tol": args.bisect_tol,
        "apply_confidence": not args.no_confidence,
        "allow_high_alpha": args.allow_high_alpha,
    }


def _add_config_flags(parser):
    parser.add_argument("--alpha", type=int, default=2, help="order for the generalized estimator")
    parser.add_argument("--cutoff", type=int, default=35, help="u-rule occurrence threshold")
    parser.add_argument("--z", type=float, default=2.576, help="confidence multiplier")
    parser.add_argument(
        "--mode",
        choices=["overlapping", "non_overlapping"],
        default="overlapping",
        help="tuple counting mode",
    )
    parser.add_argument("--bisect-tol", type=float, default=1e-12)
    parser.add_argument(
        "--no-confidence",
        action="store_true",
        help="skip the 99%% confidence offset (bias studies)",
    )
    parser.add_argument("--allow-high-alpha", action="store_true", help="permit alpha > 8")


def _add_format_flags(parser, with_max=True):
    parser.add_argument("--format", choices=_FORMATS, default="raw_bitpacked")
    parser.add_argument("--bits-per-symbol", type=int, default=1)
    if with_max:
        parser.add_argument(
            "--max-symbols",
            type=int,
            default=None,
            help="read at most this many symbols (needed for exact bitpacked round trips)",
        )


def _emit(args, text: str):
    if getattr(args, "out", None):
        with open(args.out, "w") as fh:
            fh.write(text)
            if not text.endswith("\n"):
                fh.write("\n")
    else:
        print(text)


def _emit_table(args, body: dict):
    if args.table_format == "csv":
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=body["columns"])
        writer.writeheader()
        for row in body["rows"]:
            writer.writerow(row)
        _emit(args, buf.getvalue().rstrip("\n"))
    else:
        _emit(args, json.dumps(body, indent=2))


def cmd_estimate(args) -> int:
    try:
        with open(args.input, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        print(f"error: cannot read {args.input}: {exc}", file=sys.stderr)
        return EXIT_PARSE
    payload = {
        "data_base64": base64.b64encode(data).decode("ascii"),
        "format": args.format,
        "bits_per_symbol": args.bits_per_symbol,
        "max_symbols": args.max_symbols,
        "estimator": args.estimator,
        "config": _config_payload(args),
    }
    body = call_service(args.server, "/estimate", payload)
    _emit(args, json.dumps(body, indent=2))
    return EXIT_OK


def cmd_simulate(args) -> int:
    param, k = _family_param(args)
    payload = {
        "family": args.family,
        "param": param,
        "L": args.L,
        "k": k,
        "seed": args.seed,
        "stream": args.stream,
        "binarize": args.binarize,
        "format": args.format,
        "bits_per_symbol": args.bits_per_symbol,
    }
    body = call_service(args.server, "/simulate", payload)
    data = base64.b64decode(body["data_base64"])
    with open(args.out, "wb") as fh:
        fh.write(data)
    replay = {key: body[key] for key in ("family", "param", "L", "k", "seed", "stream", "binarized", "n_symbols", "format", "bits_per_symbol", "output_sha256")}
    print(json.dumps(replay, indent=2), file=sys.stderr)
    return EXIT_OK


def _family_param(args):
    given = [name for name in ("p", "theta", "psi") if getattr(args, name) is not None]
    if len(given) != 1:
        raise SystemExit("exactly one of --p / --theta / --psi is required")
    name = given[0]
    expected = {"bms": "p", "markov": "p", "near_uniform": "theta", "inverted_near_uniform": "psi"}[args.family]
    if name != expected:
        raise SystemExit(f"family {args.family} takes --{expected}, not --{name}")
    k = args.k if args.k is not None else (2 if args.family in ("bms", "markov") else 64)
    return getattr(args, name), k


def cmd_sweep(args) -> int:
    estimators = []
    for name in args.estimators.split(","):
        name = name.strip()
        if name == "generalized":
            for alpha in args.alphas:
                estimators.append({"estimator": "generalized", "alpha": alpha})
        elif name:
            estimators.append({"estimator": name, "alpha": 2})
    payload = {
        "family": args.family,
        "params": args.params,
        "estimators": estimators,
        "L": args.L,
        "k": args.k,
        "n_trials": args.trials,
        "base_seed": args.seed,
        "config": _config_payload(args),
    }
    body = call_service(args.server, "/sweep/bias", payload)
    _emit_table(args, body)
    return EXIT_OK


def cmd_variance(args) -> int:
    payload = {
        "alphas": args.alphas,
        "L": args.L,
        "n_trials": args.trials,
        "base_seed": args.seed,
        "cutoff": args.cutoff,
        "mode": args.mode,
    }
    body = call_service(args.server, "/sweep/variance", payload)
    _emit_table(args, body)
    return EXIT_OK


def cmd_bounds(args) -> int:
    if args.pc is not None:
        pc_values = args.pc
    else:
        lo = args.pc_min if args.pc_min is not None else 1.0 / args.k
        hi = args.pc_max if args.pc_max is not None else 1.0
        n = args.pc_count
        step = (hi - lo) / (n - 1) if n > 1 else 0.0
        pc_values = [lo + i * step for i in range(n)]
    body = call_service(args.server, "/bounds", {"k": args.k, "pc_values": pc_values})
    _emit_table(args, body)
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service.app import app

    uvicorn.run(app, host=args.host, port=args.port)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="minent",
        description="Min-entropy estimation for random-number sources.",
    )
    parser.add_argument("--version", action="version", version=f"minent {__version__}")
    parser.add_argument(
        "--server",
        default=None,
        help="base URL of a running minent service; default runs in-process",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_est = sub.add_parser("estimate", help="estimate entropy of a sequence file")
    p_est.add_argument("--input", required=True, help="path to the sequence file")
    p_est.add_argument(
        "--estimator",
        choices=["lrs", "improved", "generalized"],
        default="improved",
        help="lrs reports collision entropy; the others report min-entropy",
    )
    _add_format_flags(p_est)
    _add_config_flags(p_est)
    p_est.add_argument("--out", default=None, help="write the JSON result here instead of stdout")
    p_est.set_defaults(func=cmd_estimate)

    p_sim = sub.add_parser("simulate", help="generate a seeded simulated sequence file")
    p_sim.add_argument("--family", choices=_FAMILIES, required=True)
    p_sim.add_argument("--p", type=float, default=None, help="bms/markov parameter")
    p_sim.add_argument("--theta", type=float, default=None, help="near_uniform maximum probability")
    p_sim.add_argument("--psi", type=float, default=None, help="inverted_near_uniform maximum probability")
    p_sim.add_argument("--k", type=int, default=None, help="alphabet size (default 2, or 64 for the non-binary families)")
    p_sim.add_argument("--L", type=int, required=True, help="number of symbols")
    p_sim.add_argument("--seed", type=int, default=0)
    p_sim.add_argument("--stream", type=int, default=0)
    p_sim.add_argument("--binarize", action="store_true", help="emit bits instead of symbols")
    _add_format_flags(p_sim, with_max=False)
    p_sim.add_argument("--out", required=True, help="output file")
    p_sim.set_defaults(func=cmd_simulate)

    p_sweep = sub.add_parser("sweep", help="bias sweep over a parameter grid")
    p_sweep.add_argument("--family", choices=_FAMILIES, default="bms")
    p_sweep.add_argument("--params", type=float, nargs="+", required=True)
    p_sweep.add_argument(
        "--estimators",
        default="lrs,improved",
        help="comma list of lrs,improved,generalized; generalized expands over --alphas",
    )
    p_sweep.add_argument("--alphas", type=int, nargs="+", default=[2])
    p_sweep.add_argument("--L", type=int, default=100_000)
    p_sweep.add_argument("--k", type=int, default=2)
    p_sweep.add_argument("--trials", type=int, default=100)
    p_sweep.add_argument("--seed", type=int, default=0)
    _add_config_flags(p_sweep)
    p_sweep.add_argument("--table-format", choices=["json", "csv"], default="json")
    p_sweep.add_argument("--out", default=None)
    p_sweep.set_defaults(func=cmd_sweep)

    p_var = sub.add_parser("variance", help="variance of the theta estimate vs alpha")
    p_var.add_argument("--alphas", type=int, nargs="+", default=[2, 3, 4, 5])
    p_var.add_argument("--L", type=int, default=100_000)
    p_var.add_argument("--trials", type=int, default=200)
    p_var.add_argument("--seed", type=int, default=0)
    p_var.add_argument("--cutoff", type=int, default=35)
    p_var.add_argument(
        "--mode",
        choices=["overlapping", "non_overlapping"],
        default="non_overlapping",
    )
    p_var.add_argument("--table-format", choices=["json", "csv"], default="json")
    p_var.add_argument("--out", default=None)
    p_var.set_defaults(func=cmd_variance)

    p_bounds = sub.add_parser("bounds", help="sharp theta/entropy bounds along a collision-probability grid")
    p_bounds.add_argument("--k", type=int, required=True)
    p_bounds.add_argument("--pc", type=float, nargs="+", default=None, help="explicit grid values")
    p_bounds.add_argument("--pc-min", type=float, default=None)
    p_bounds.add_argument("--pc-max", type=float, default=None)
    p_bounds.add_argument("--pc-count", type=int, default=50)
    p_bounds.add_argument("--table-format", choices=["json", "csv"], default="json")
    p_bounds.add_argument("--out", default=None)
    p_bounds.set_defaults(func=cmd_bounds)

    p_serve = sub.add_parser("serve", help="run the HTTP service")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8710)
    p_serve.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ServiceError as exc:
        if isinstance(exc.payload, dict) and "error_code" in exc.payload:
            print(json.dumps(exc.payload), file=sys.stderr)
            print(f"error: {exc.payload.get('detail', '')}", file=sys.stderr)
        else:
            print(f"error: {exc.payload}", file=sys.stderr)
        return exc.exit_code
    except httpx.HTTPError as exc:
        print(f"error: cannot reach service: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
