"""Command-line front end.

Exit codes: 0 on success, 1 on usage errors, 2 when a numerical self-check
fails. Output is byte-identical for identical arguments.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass

import numpy as np

from . import __version__
from .channels import amplitude_damping, channel_from_json, constant_channel, erasure_channel
from .decouple import CodeError, decoupling_mc
from .entropix import ChannelSpec, OptimizerConfig, capacity_curve, critical_region, max_increase
from .protosim import alphadit_classical_protocol
from .resource import ParseError, evaluate

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2
CAPACITY_HEADER = ("alpha", "eta", "value_bits", "phase", "witness_p")
PHASE_HEADER = ("eta", "alpha_lo", "alpha_hi", "width")


class UsageError(Exception):
    pass


class NumericalFailure(Exception):
    pass


def fmt(x) -> str:
    """Locale-independent 9-significant-digit float text."""
    x = float(x)
    if math.isnan(x):
        return "nan"
    out = f"{x:.9g}"
    return "0" if out == "-0" else out


def _round9(x):
    if isinstance(x, float):
        return x if math.isnan(x) or math.isinf(x) else float(fmt(x))
    if isinstance(x, dict):
        return {k: _round9(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_round9(v) for v in x]
    return x


def dumps_json(obj) -> str:
    return json.dumps(_round9(obj), indent=2, sort_keys=True) + "\n"


@dataclass(frozen=True)
class Grid:
    lo: float
    hi: float
    step: float

    @classmethod
    def parse(cls, text: str) -> "Grid":
        try:
            lo, hi, step = (float(v) for v in text.split(":"))
        except ValueError:
            raise UsageError(f"grid must be lo:hi:step, got {text!r}") from None
        if not step > 0:
            raise UsageError("grid step must be positive")
        if lo > hi:
            raise UsageError("grid needs lo <= hi")
        return cls(lo, hi, step)

    def values(self) -> list[float]:
        n = int(math.floor((self.hi - self.lo) / self.step + 1e-9)) + 1
        return [round(self.lo + i * self.step, 10) for i in range(n)]


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _load_channel(args):
    if args.channel == "kraus-file":
        if not args.kraus_file:
            raise UsageError("--channel kraus-file needs --kraus-file")
        try:
            with open(args.kraus_file) as fh:
                return channel_from_json(fh.read())
        except (OSError, ValueError, KeyError) as exc:
            raise UsageError(f"cannot read channel: {exc}") from None
    if args.eta is None:
        raise UsageError("--eta is required")
    return ChannelSpec(args.channel, float(args.eta))


def cmd_capacity(args) -> str:
    spec = _load_channel(args)
    alphas = Grid.parse(args.alpha).values()
    method = args.method
    if not isinstance(spec, ChannelSpec) and method == "closed":
        method = "optimizer"
    opt = OptimizerConfig(restarts=args.restarts, seed=args.seed)
    try:
        pts = capacity_curve(spec, alphas, method=method, opt=opt)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if max_increase(pts) > 1e-6:
        raise NumericalFailure(f"capacity curve increases by {max_increase(pts):.3g}")
    eta = spec.eta if isinstance(spec, ChannelSpec) else float("nan")
    if args.format == "json":
        return dumps_json([
            {"alpha": p.alpha, "eta": eta, "value_bits": p.value, "phase": p.phase.value, "witness_p": p.witness_p}
            for p in pts
        ])
    rows = [(fmt(p.alpha), fmt(eta), fmt(p.value), p.phase.value, fmt(p.witness_p)) for p in pts]
    return csv_text(CAPACITY_HEADER, rows)


def cmd_phase(args) -> str:
    if args.channel not in ("damping", "erasure"):
        raise UsageError("phase sweeps support erasure and damping")
    etas = Grid.parse(args.eta_grid).values()
    try:
        regs = [critical_region(e, kind=args.channel) for e in etas]
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if any(r.width < -1e-9 for r in regs):
        raise NumericalFailure("critical region with negative width")
    best = max(regs, key=lambda r: r.width)
    if args.format == "json":
        return dumps_json({
            "rows": [{"eta": r.eta, "alpha_lo": r.alpha_lo, "alpha_hi": r.alpha_hi, "width": r.width} for r in regs],
            "max": {"eta": best.eta, "width": best.width},
        })
    rows = [(fmt(r.eta), fmt(r.alpha_lo), fmt(r.alpha_hi), fmt(r.width)) for r in regs]
    # summary row: the eta column carries the label, the rest repeat the widest row
    rows.append(("max", fmt(best.alpha_lo), fmt(best.alpha_hi), fmt(best.width)))
    return csv_text(PHASE_HEADER, rows)


def _parse_dims(text: str) -> tuple[int, ...]:
    try:
        dims = tuple(int(v) for v in text.split(","))
    except ValueError:
        raise UsageError(f"--dims must be four integers, got {text!r}") from None
    if len(dims) != 4:
        raise UsageError("--dims needs d_hat,d_b,d_e,d_r")
    return dims


def cmd_decouple(args) -> str:
    if args.format != "json":
        raise UsageError("decouple reports are JSON only")
    dims = _parse_dims(args.dims)
    try:
        rep = decoupling_mc(dims, args.ensemble, args.samples, args.seed, d_l=args.d_l, threads=args.threads)
    except (ValueError, CodeError) as exc:
        raise UsageError(str(exc)) from None
    if rep.oracle_mean > rep.bound_value + 1e-12:
        raise NumericalFailure("exact average exceeds its bound")
    out = rep.to_dict()
    out["d_l"] = rep.d_l
    out["agrees"] = bool(rep.agrees_with_oracle)
    if args.strict and not rep.agrees_with_oracle:
        raise NumericalFailure("Monte Carlo mean is more than 4 sigma from the exact average")
    return dumps_json(out)


def _transport(args, d: int):
    kind = args.transport
    if kind == "noiseless":
        return None
    if kind == "constant":
        return constant_channel(np.eye(d) / d, d)
    if d != 2:
        raise UsageError(f"{kind} transport needs d = 2")
    if args.eta is None:
        raise UsageError("--eta is required")
    return erasure_channel(args.eta, flagged_input=False) if kind == "erasure" else amplitude_damping(args.eta)


def cmd_protocol(args) -> str:
    if args.format != "json":
        raise UsageError("protocol reports are JSON only")
    d = args.d
    if not 2 <= d <= 8:
        raise UsageError("d must lie in [2, 8]")
    alpha = float(args.alpha_value)
    try:
        res = alphadit_classical_protocol(d, alpha, _transport(args, d), rng=args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if not all(-1e-9 <= p <= 1 + 1e-9 for p in res.per_message):
        raise NumericalFailure("success probability outside [0, 1]")
    out = res.to_dict()
    out["transport"] = args.transport
    return dumps_json(out)


def cmd_resource(args) -> str:
    try:
        return evaluate(args.expr) + "\n"
    except ParseError as exc:
        raise UsageError(f"parse error: {exc}") from None


# --- argument handling ----------------------------------------------------------------

def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--config", help="JSON file of option defaults; explicit flags win")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--output", "-o", help="write here instead of stdout")
    p.add_argument("--format", choices=("csv", "json"), default=None)
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="alphabit", description="alpha-bit numerics workbench")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("capacity", parents=[common], help="capacity curve as CSV")
    p.add_argument("--channel", choices=("erasure", "damping", "kraus-file"), default="erasure")
    p.add_argument("--eta", type=float)
    p.add_argument("--kraus-file")
    p.add_argument("--alpha", default="0.1:1.0:0.1", help="grid lo:hi:step")
    p.add_argument("--method", choices=("closed", "optimizer"), default="closed")
    p.add_argument("--restarts", type=int, default=32)
    p.set_defaults(func=cmd_capacity, default_format="csv")

    p = sub.add_parser("phase", parents=[common], help="critical-region width over an eta grid")
    p.add_argument("--channel", choices=("erasure", "damping"), default="damping")
    p.add_argument("--eta-grid", default="0.5:1.0:0.005", help="grid lo:hi:step")
    p.set_defaults(func=cmd_phase, default_format="csv")

    p = sub.add_parser("decouple", parents=[common], help="decoupling Monte Carlo against the exact average")
    p.add_argument("--dims", default="16,4,4,2", help="d_hat,d_b,d_e,d_r")
    p.add_argument("--samples", type=int, default=2000)
    p.add_argument("--ensemble", choices=("haar", "clifford"), default="haar")
    p.add_argument("--d-l", type=int, default=1)
    p.add_argument("--strict", action="store_true", help="exit 2 if the mean misses the exact value by > 4 sigma")
    p.set_defaults(func=cmd_decouple, default_format="json")

    p = sub.add_parser("protocol", parents=[common], help="classical transmission over an alpha-dit")
    p.add_argument("--d", type=int, default=8)
    p.add_argument("--alpha", dest="alpha_value", type=float, default=1 / 3)
    p.add_argument("--transport", choices=("noiseless", "constant", "erasure", "damping"), default="noiseless")
    p.add_argument("--eta", type=float)
    p.set_defaults(func=cmd_protocol, default_format="json")

    p = sub.add_parser("resource", parents=[common], help="evaluate a resource expression or relation")
    p.add_argument("expr")
    p.set_defaults(func=cmd_resource, default_format="text")
    return parser


def _apply_config(parser: argparse.ArgumentParser, argv: list[str]) -> argparse.Namespace:
    args = parser.parse_args(argv)
    if args.config:
        try:
            with open(args.config) as fh:
                cfg = json.load(fh)
        except (OSError, ValueError) as exc:
            raise UsageError(f"cannot read config: {exc}") from None
        if not isinstance(cfg, dict):
            raise UsageError("config must be a JSON object")
        cfg = {k.replace("-", "_"): v for k, v in cfg.items()}
        if cfg.get("command", args.command) != args.command:
            raise UsageError(f"config is for {cfg['command']!r}, not {args.command!r}")
        cfg.pop("command", None)
        if args.command == "protocol" and "alpha" in cfg:
            cfg["alpha_value"] = cfg.pop("alpha")
        sub = parser._subparsers._group_actions[0].choices[args.command]
        known = {a.dest for a in sub._actions}
        unknown = sorted(set(cfg) - known)
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(unknown)}")
        # config values become defaults, so flags given on the command line still win
        sub.set_defaults(**cfg)
        args = parser.parse_args(argv)
    if args.format is None:
        args.format = args.default_format
    if args.threads < 1:
        raise UsageError("--threads must be at least 1")
    return args


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        try:
            args = _apply_config(parser, argv)
        except SystemExit as exc:
            # argparse exits 2 on bad usage; map to the usage code
            return EXIT_OK if exc.code == 0 else EXIT_USAGE
        text = args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalFailure as exc:
        print(f"numerical check failed: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    if args.output:
        with open(args.output, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
