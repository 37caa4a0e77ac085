"""Command-line interface.

Verbs:
  teleport    run one experiment (exact enumeration or sampled shots)
  verify      run the invariant suites and report pass/fail per check
  synthesize  emit a recovery netlist in the text format

Exit codes: 0 success, 1 check failure, 2 bad input. Reports are written
as deterministic JSON (or CSV when --out ends in .csv); wall time goes to
stderr so output bytes depend only on config and seed.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .channel import ChannelSpec
from .harness import (
    ConfigError,
    ExperimentConfig,
    channel_from_obj,
    message_from_obj,
    resolve_inputs,
    run_exact,
    run_sampled,
    run_verify,
)
from .netlist import netlist_to_text, recovery_cnot_netlist, recovery_netlist
from .report import Report

EXIT_OK = 0
EXIT_CHECK_FAILURE = 1
EXIT_BAD_INPUT = 2


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="qteleport",
        description="Probabilistic teleportation simulator and verifier.",
    )
    sub = p.add_subparsers(dest="verb", required=True)

    def common(sp, with_message: bool):
        sp.add_argument("--n", type=int, default=2, help="message qubit count (1..4)")
        sp.add_argument(
            "--channel",
            default="random",
            help="channel JSON file path, or 'random' (drawn from the seed)",
        )
        if with_message:
            sp.add_argument(
                "--message",
                default="random",
                help="message JSON file path, or 'random' (drawn from the seed)",
            )
        sp.add_argument("--seed", type=int, default=0, help="64-bit experiment seed")
        sp.add_argument(
            "--un-path",
            default="matrix",
            choices=["matrix", "netlist", "cnot"],
            help="recovery-unitary realization (cnot only for --n 2)",
        )
        sp.add_argument("--out", default=None, help="write report/netlist to this file")

    t = sub.add_parser("teleport", help="run a teleportation experiment")
    common(t, with_message=True)
    t.add_argument("--mode", default="exact", choices=["exact", "sample"])
    t.add_argument("--shots", type=int, default=10000, help="shot count (sample mode)")

    v = sub.add_parser("verify", help="run the invariant suites")
    v.add_argument("--n", type=int, default=4, help="largest message size to check")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument(
        "--shots", type=int, default=20, help="randomized trials per check"
    )
    v.add_argument("--out", default=None)

    s = sub.add_parser("synthesize", help="emit a recovery netlist as text")
    common(s, with_message=False)
    return p


def _load_json(path: str, what: str):
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except OSError as exc:
        raise ConfigError(f"{what}: cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{what}: invalid JSON in {path}: {exc}") from None


def _resolve_channel_arg(arg: str, n: int) -> ChannelSpec | str:
    if arg == "random":
        return "random"
    ch = channel_from_obj(_load_json(arg, "channel"))
    if ch.n != n:
        raise ConfigError(f"channel.n: file has n={ch.n}, --n is {n}")
    return ch


def _emit(report: Report, out: str | None) -> None:
    if out and out.endswith(".csv"):
        text = report.branch_csv()
    else:
        text = report.to_json()
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    print(f"wall_time_s={report.wall_time_s:.3f}", file=sys.stderr)


def _cmd_teleport(args) -> int:
    cfg = ExperimentConfig(
        n=args.n,
        channel=_resolve_channel_arg(args.channel, args.n),
        message=(
            "random"
            if args.message == "random"
            else message_from_obj(_load_json(args.message, "message"))
        ),
        mode=args.mode,
        shots=args.shots,
        seed=args.seed,
        un_path=args.un_path,
    )
    if args.out and args.out.endswith(".csv") and args.mode != "exact":
        raise ConfigError("out: CSV export is only available in exact mode")
    report = run_exact(cfg) if args.mode == "exact" else run_sampled(cfg)
    _emit(report, args.out)
    if not report.ok:
        for msg in report.failures:
            print(f"check failure: {msg}", file=sys.stderr)
        return EXIT_CHECK_FAILURE
    return EXIT_OK


def _cmd_verify(args) -> int:
    if not 1 <= args.n <= 4:
        raise ConfigError(f"n: must be in 1..4, got {args.n}")
    report = run_verify(max_n=args.n, trials=args.shots, seed=args.seed)
    _emit(report, args.out)
    for item in report.payload["checks"]["results"]:
        status = "PASS" if item["passed"] else "FAIL"
        print(f"{status} {item['name']}", file=sys.stderr)
    return EXIT_OK if report.ok else EXIT_CHECK_FAILURE


def _cmd_synthesize(args) -> int:
    cfg = ExperimentConfig(
        n=args.n,
        channel=_resolve_channel_arg(args.channel, args.n),
        seed=args.seed,
        un_path=args.un_path,
    )
    ch, _ = resolve_inputs(cfg)
    if args.un_path == "matrix":
        raise ConfigError("un_path: synthesize emits gate programs; use netlist or cnot")
    nl = recovery_cnot_netlist(ch) if args.un_path == "cnot" else recovery_netlist(ch)
    text = netlist_to_text(nl)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.verb == "teleport":
            return _cmd_teleport(args)
        if args.verb == "verify":
            return _cmd_verify(args)
        return _cmd_synthesize(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
