"""Single entry point exposing the toolkit as subcommands with file I/O.

Exit codes: 0 ok, 2 input/validation error, 3 network/runtime error.
Rates accept suffixes bps / kbps / mbps (10^0 / 10^3 / 10^6 bytes per
second, case-insensitive); bare numbers are bytes per second.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

from . import decision, scenario as scn
from .netharness import agents
from .profile import ProfileError, analyze_bottlenecks, load_profile, ModelProfile

log = logging.getLogger("splitwise")

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_RUNTIME = 3

DEFAULT_RATES_BPS = [float(2**k) * 1_000_000 for k in range(8)]  # 1..128 MBps, x2 steps
DEFAULT_BATCHES = [2**k for k in range(7)]  # 1..64, x2 steps

_SUFFIXES = {"kbps": 1e3, "mbps": 1e6, "bps": 1.0}  # longest first: bps is a suffix of the others


class CliError(Exception):
    def __init__(self, message: str, code: int = EXIT_INPUT):
        super().__init__(message)
        self.code = code


def parse_rate(text: str) -> float:
    raw = text.strip().lower()
    scale = 1.0
    for suffix, mult in _SUFFIXES.items():
        if raw.endswith(suffix):
            raw = raw[: -len(suffix)]
            scale = mult
            break
    try:
        value = float(raw) * scale
    except ValueError:
        raise CliError(f"cannot parse rate {text!r} (expected e.g. 5000bps, 64kbps, 8mbps)")
    if value <= 0:
        raise CliError(f"rate must be positive: {text!r}")
    return value


def parse_rate_list(text: str) -> list[float]:
    items = [t for t in (piece.strip() for piece in text.split(",")) if t]
    if not items:
        raise CliError("empty rate list")
    return [parse_rate(t) for t in items]


def parse_batch_list(text: str) -> list[int]:
    items = [t for t in (piece.strip() for piece in text.split(",")) if t]
    if not items:
        raise CliError("empty batch list")
    try:
        batches = [int(t, 10) for t in items]
    except ValueError:
        raise CliError(f"cannot parse batch list {text!r}")
    if any(b < 1 for b in batches):
        raise CliError("batch sizes must be >= 1")
    return batches


def parse_address(text: str) -> tuple[str, int]:
    host, sep, port = text.rpartition(":")
    if not sep or not host:
        raise CliError(f"address must be host:port, got {text!r}")
    try:
        return host, int(port, 10)
    except ValueError:
        raise CliError(f"bad port in {text!r}")


def _load_profile_arg(path: str) -> ModelProfile:
    try:
        with open(path, "rb") as handle:
            return load_profile(handle)
    except FileNotFoundError:
        raise CliError(f"profile file not found: {path}")
    except ProfileError as exc:
        raise CliError(f"invalid profile {path}: {exc}")


def _load_scenario_arg(path: str) -> scn.Scenario:
    try:
        with open(path, "rb") as handle:
            return scn.load_scenario(handle)
    except FileNotFoundError:
        raise CliError(f"scenario file not found: {path}")
    except ValueError as exc:
        raise CliError(f"invalid scenario {path}: {exc}")


def _write_output(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        with open(out, "w", encoding="utf-8") as handle:
            handle.write(text)


def _pick_format(fmt: str | None, out: str | None, default: str) -> str:
    if fmt:
        return fmt
    if out and out.endswith(".json"):
        return "json"
    if out and out.endswith(".csv"):
        return "csv"
    return default


def cmd_bottlenecks(args: argparse.Namespace) -> int:
    profile = _load_profile_arg(args.profile)
    report = analyze_bottlenecks(profile)
    if args.json:
        obj = {
            "name": profile.name,
            "ratios": list(report.ratios),
            "natural": sorted(report.natural),
            "compressive": list(report.compressive),
        }
        _write_output(json.dumps(obj, indent=2), args.out)
    else:
        lines = [
            f"profile: {profile.name} (L={profile.num_layers}, "
            f"input {profile.input_bytes_per_sample} B/sample)",
            f"natural bottlenecks ({len(report.natural)}): {sorted(report.natural)}",
            f"compressive bottlenecks ({len(report.compressive)}): {list(report.compressive)}",
        ]
        for i, (layer, ratio) in enumerate(zip(profile.layers, report.ratios), start=1):
            mark = "C" if i in report.compressive else ("n" if i in report.natural else " ")
            lines.append(f"  [{mark}] {i:3d} {layer.name:24s} c={ratio:.6g}")
        _write_output("\n".join(lines), args.out)
    return EXIT_OK


def cmd_surface(args: argparse.Namespace) -> int:
    profile = _load_profile_arg(args.profile)
    batches = DEFAULT_BATCHES if args.batches is None else parse_batch_list(args.batches)
    rates = DEFAULT_RATES_BPS if args.rates is None else parse_rate_list(args.rates)
    try:
        surface = decision.decision_surface(
            profile,
            batches,
            rates,
            allow_full_offload=not args.no_full_offload,
            all_layers=args.all_layers,
            interpolate=args.interpolate,
        )
    except (decision.UnmeasuredBatchError, ValueError) as exc:
        raise CliError(str(exc))
    fmt = _pick_format(args.format, args.out, "csv")
    if fmt == "json":
        _write_output(json.dumps(decision.surface_to_obj(surface), indent=2), args.out)
    else:
        _write_output(decision.surface_to_csv(surface), args.out)
    return EXIT_OK


def cmd_scenario(args: argparse.Namespace) -> int:
    profile = _load_profile_arg(args.profile)
    scenario = _load_scenario_arg(args.scenario)
    try:
        baseline = scn.baseline_strategy(args.baseline)
        report = scn.evaluate_scenario(
            profile,
            scenario,
            baseline,
            allow_full_offload=not args.no_full_offload,
            switch_penalty_ms=args.penalty_ms,
            interpolate=args.interpolate,
        )
    except (decision.UnmeasuredBatchError, ValueError) as exc:
        raise CliError(str(exc))
    fmt = _pick_format(args.format, args.out, "json")
    if fmt == "csv":
        _write_output(scn.report_to_csv(report), args.out)
    else:
        _write_output(json.dumps(scn.report_to_obj(report), indent=2), args.out)
    log.info("gain %.6f over %d steps (%d switches)", report.gain, len(report.per_step), report.switch_count)
    return EXIT_OK


def cmd_serve(args: argparse.Namespace) -> int:
    profile = _load_profile_arg(args.profile)
    address = parse_address(args.listen)
    try:
        agents.serve(address, profile)
    except OSError as exc:
        print(f"error: cannot serve on {args.listen}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


def cmd_device(args: argparse.Namespace) -> int:
    profile = _load_profile_arg(args.profile)
    scenario = _load_scenario_arg(args.scenario) if args.scenario else None
    address = parse_address(args.connect)
    steps = scenario.steps if scenario else ()
    try:
        report = agents.run_device(
            address,
            profile,
            steps,
            allow_full_offload=not args.no_full_offload,
            no_offload_silent=args.no_offload_silent,
            interpolate=args.interpolate,
        )
    except OSError as exc:
        print(f"error: cannot reach server at {args.connect}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    fmt = _pick_format(args.format, args.report, "json")
    if fmt == "csv":
        _write_output(agents.report_to_csv(report), args.report)
    else:
        _write_output(json.dumps(agents.report_to_obj(report), indent=2), args.report)
    if report.connection_error is not None:
        print(f"error: {report.connection_error}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="splitwise",
        description="Bandwidth-adaptive split computing: bottlenecks, decision "
        "surfaces, scenario replay, and a loopback measurement harness.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bottlenecks", help="compression ratios and bottleneck sets")
    p.add_argument("profile")
    p.add_argument("--json", action="store_true", help="emit JSON instead of text")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_bottlenecks)

    p = sub.add_parser("surface", help="optimal strategy over a (batch, rate) grid")
    p.add_argument("profile")
    p.add_argument("--batches", default=None, help="comma list (default 1..64 in x2 steps)")
    p.add_argument("--rates", default=None, help="comma list with bps/kbps/mbps suffixes (default 1..128 mbps x2)")
    p.add_argument("--no-full-offload", action="store_true", help="privacy mode: drop full offloading")
    p.add_argument("--all-layers", action="store_true", help="debug: consider every split layer")
    p.add_argument("--interpolate", action="store_true", help="interpolate timings for unmeasured batches")
    p.add_argument("--out", default=None)
    p.add_argument("--format", choices=("csv", "json"), default=None)
    p.set_defaults(func=cmd_surface)

    p = sub.add_parser("scenario", help="replay a scenario and report the gain over a baseline")
    p.add_argument("profile")
    p.add_argument("scenario")
    p.add_argument("--baseline", required=True, help="static:<layer> | full | none")
    p.add_argument("--penalty-ms", type=float, default=0.0, help="per-switch penalty on the dynamic side")
    p.add_argument("--no-full-offload", action="store_true")
    p.add_argument("--interpolate", action="store_true")
    p.add_argument("--out", default=None)
    p.add_argument("--format", choices=("csv", "json"), default=None)
    p.set_defaults(func=cmd_scenario)

    p = sub.add_parser("serve", help="run the emulated server agent")
    p.add_argument("profile")
    p.add_argument("--listen", default="127.0.0.1:9400", help="host:port")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("device", help="run the device agent against a server")
    p.add_argument("profile")
    p.add_argument("scenario")
    p.add_argument("--connect", required=True, help="host:port")
    p.add_argument("--report", default=None, help="report path (default stdout)")
    p.add_argument("--format", choices=("csv", "json"), default=None)
    p.add_argument("--no-offload-silent", action="store_true", help="skip the network entirely for no-offload steps")
    p.add_argument("--no-full-offload", action="store_true")
    p.add_argument("--interpolate", action="store_true")
    p.set_defaults(func=cmd_device)

    return parser


def _configure_logging() -> None:
    level = os.environ.get("SPLITWISE_LOG", "warn").lower()
    mapping = {"error": logging.ERROR, "warn": logging.WARNING, "info": logging.INFO, "debug": logging.DEBUG}
    logging.basicConfig(level=mapping.get(level, logging.WARNING), format="%(levelname)s %(name)s: %(message)s")


def main(argv: list[str] | None = None) -> int:
    _configure_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except KeyboardInterrupt:
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
