"""Experiment configuration, exact/sampled runs, and report assembly.

Channel/message input files are JSON:

    {"n": 2, "y": [0.3, 0.3, 0.3, 0.8544003745317531]}
    {"n": 2, "x_re": [1.0, 0.0, 0.0, 0.0], "x_im": [0.0, 0.0, 0.0, 0.0]}

``channel``/``message`` may instead be the string "random", in which case
values are drawn deterministically from the experiment seed. Validation
errors cite the offending field path.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Any

import numpy as np

from .channel import ChannelSpec, MessageSpec, random_channel, random_message
from .protocol import (
    UN_PATHS,
    enumerate_branches,
    sample_shots,
    success_probability,
)
from .report import Report
from .verify import run_checks


class ConfigError(ValueError):
    """Invalid experiment configuration; message names the offending field."""


@dataclass
class ExperimentConfig:
    n: int
    channel: ChannelSpec | str = "random"
    message: MessageSpec | str = "random"
    mode: str = "exact"
    shots: int = 10000
    seed: int = 0
    un_path: str = "matrix"

    def __post_init__(self):
        if not 1 <= self.n <= 4:
            raise ConfigError(f"n: must be in 1..4, got {self.n}")
        if self.mode not in ("exact", "sample"):
            raise ConfigError(f"mode: must be 'exact' or 'sample', got {self.mode!r}")
        if self.mode == "sample" and self.shots < 1:
            raise ConfigError(f"shots: must be >= 1 in sample mode, got {self.shots}")
        if self.un_path not in UN_PATHS:
            raise ConfigError(f"un_path: must be one of {UN_PATHS}, got {self.un_path!r}")
        if self.un_path == "cnot" and self.n != 2:
            raise ConfigError("un_path: 'cnot' is only valid for n = 2")
        if isinstance(self.channel, ChannelSpec) and self.channel.n != self.n:
            raise ConfigError(f"channel.n: expected {self.n}, got {self.channel.n}")
        if isinstance(self.message, MessageSpec) and self.message.n != self.n:
            raise ConfigError(f"message.n: expected {self.n}, got {self.message.n}")


def channel_from_obj(obj: Any, where: str = "channel") -> ChannelSpec:
    """Build a ChannelSpec from parsed JSON, citing field paths on error."""
    if not isinstance(obj, dict):
        raise ConfigError(f"{where}: expected an object")
    if "n" not in obj or "y" not in obj:
        raise ConfigError(f"{where}: required fields 'n' and 'y'")
    if not isinstance(obj["n"], int):
        raise ConfigError(f"{where}.n: expected an integer")
    if not isinstance(obj["y"], list):
        raise ConfigError(f"{where}.y: expected a list of reals")
    for i, v in enumerate(obj["y"]):
        if not isinstance(v, (int, float)) or isinstance(v, bool):
            raise ConfigError(f"{where}.y[{i}]: expected a real number")
    try:
        return ChannelSpec(obj["n"], tuple(float(v) for v in obj["y"]))
    except ValueError as exc:
        raise ConfigError(f"{where}: {exc}") from None


def message_from_obj(obj: Any, where: str = "message") -> MessageSpec:
    """Build a MessageSpec from parsed JSON, citing field paths on error."""
    if not isinstance(obj, dict):
        raise ConfigError(f"{where}: expected an object")
    for key in ("n", "x_re", "x_im"):
        if key not in obj:
            raise ConfigError(f"{where}: required fields 'n', 'x_re', 'x_im'")
    if not isinstance(obj["n"], int):
        raise ConfigError(f"{where}.n: expected an integer")
    for key in ("x_re", "x_im"):
        if not isinstance(obj[key], list):
            raise ConfigError(f"{where}.{key}: expected a list of reals")
        for i, v in enumerate(obj[key]):
            if not isinstance(v, (int, float)) or isinstance(v, bool):
                raise ConfigError(f"{where}.{key}[{i}]: expected a real number")
    if len(obj["x_re"]) != len(obj["x_im"]):
        raise ConfigError(f"{where}.x_im: length differs from x_re")
    x = np.array(obj["x_re"], dtype=float) + 1j * np.array(obj["x_im"], dtype=float)
    try:
        return MessageSpec(obj["n"], x)
    except ValueError as exc:
        raise ConfigError(f"{where}: {exc}") from None


def resolve_inputs(cfg: ExperimentConfig) -> tuple[ChannelSpec, MessageSpec]:
    """Materialize 'random' channel/message deterministically from the seed."""
    ch = cfg.channel
    if ch == "random":
        rng = np.random.default_rng(np.random.SeedSequence(cfg.seed, spawn_key=(101,)))
        ch = random_channel(cfg.n, rng)
    msg = cfg.message
    if msg == "random":
        rng = np.random.default_rng(np.random.SeedSequence(cfg.seed, spawn_key=(202,)))
        msg = random_message(cfg.n, rng)
    return ch, msg


def _config_echo(cfg: ExperimentConfig, ch: ChannelSpec, msg: MessageSpec) -> dict:
    return {
        "n": cfg.n,
        "mode": cfg.mode,
        "shots": cfg.shots if cfg.mode == "sample" else None,
        "seed": cfg.seed,
        "un_path": cfg.un_path,
        "channel": {"n": ch.n, "y": [float(v) for v in ch.y]},
        "message": {
            "n": msg.n,
            "x_re": [float(v) for v in np.asarray(msg.x).real],
            "x_im": [float(v) for v in np.asarray(msg.x).imag],
        },
    }


def _bits(t: tuple[int, ...]) -> str:
    return "".join(str(b) for b in t)


def run_exact(cfg: ExperimentConfig) -> Report:
    """Full branch enumeration with theory/observation cross-checks."""
    if cfg.mode != "exact":
        raise ConfigError(f"mode: run_exact requires mode='exact', got {cfg.mode!r}")
    t0 = time.perf_counter()
    ch, msg = resolve_inputs(cfg)
    records = enumerate_branches(msg, ch, un_path=cfg.un_path)

    theoretical = success_probability(ch)
    observed = sum(r.probability for r in records if r.outcome.ancilla == 0)
    total = sum(r.probability for r in records)
    succ = [r for r in records if r.outcome.ancilla == 0 and r.probability > 0.0]
    mean_fid = (
        sum(r.probability * r.fidelity for r in succ) / observed if observed > 0 else 0.0
    )

    failures = []
    if abs(total - 1.0) > 1e-10:
        failures.append(f"branch probabilities sum to {total!r}, not 1")
    if abs(observed - theoretical) > 1e-10:
        failures.append(
            f"observed success probability {observed!r} != theoretical {theoretical!r}"
        )
    bad_fid = max((abs(r.fidelity - 1.0) for r in succ), default=0.0)
    if bad_fid > 1e-10:
        failures.append(f"worst success-branch fidelity residual {bad_fid!r}")

    payload = {
        "schema": "qteleport-report@1",
        "config": _config_echo(cfg, ch, msg),
        "success_probability_theoretical": theoretical,
        "success_probability_observed": observed,
        "mean_success_fidelity": mean_fid,
        "branches": [
            {
                "m": _bits(r.outcome.m),
                "nbits": _bits(r.outcome.nbits),
                "ancilla": r.outcome.ancilla,
                "probability": r.probability,
                "fidelity": r.fidelity,
            }
            for r in records
        ],
        "checks": {
            "probabilities_sum_to_one": abs(total - 1.0) <= 1e-10,
            "success_matches_theory": abs(observed - theoretical) <= 1e-10,
            "success_fidelities_perfect": bad_fid <= 1e-10,
        },
    }
    return Report(payload, time.perf_counter() - t0, failures)


def run_sampled(cfg: ExperimentConfig) -> Report:
    """Monte Carlo run; per-shot randomness derived from (seed, shot index)."""
    if cfg.mode != "sample":
        raise ConfigError(f"mode: run_sampled requires mode='sample', got {cfg.mode!r}")
    t0 = time.perf_counter()
    ch, msg = resolve_inputs(cfg)
    records = sample_shots(msg, ch, cfg.seed, cfg.shots, un_path=cfg.un_path)

    theoretical = success_probability(ch)
    successes = sum(1 for r in records if r.outcome.ancilla == 0)
    rate = successes / cfg.shots
    stderr = math.sqrt(theoretical * (1.0 - theoretical) / cfg.shots)
    mean_fid = (
        sum(r.fidelity for r in records if r.outcome.ancilla == 0) / successes
        if successes
        else 0.0
    )
    within = abs(rate - theoretical) <= 3.0 * stderr if stderr > 0 else rate == theoretical

    failures = []
    if not within:
        failures.append(
            f"empirical success rate {rate!r} outside 3 sigma of {theoretical!r}"
        )

    payload = {
        "schema": "qteleport-report@1",
        "config": _config_echo(cfg, ch, msg),
        "success_probability_theoretical": theoretical,
        "success_probability_observed": rate,
        "mean_success_fidelity": mean_fid,
        "shot_tally": {
            "shots": cfg.shots,
            "successes": successes,
            "success_rate": rate,
            "binomial_stderr": stderr,
        },
        "checks": {"success_rate_within_3_sigma": within},
    }
    return Report(payload, time.perf_counter() - t0, failures)


def run_verify(max_n: int = 4, trials: int = 20, seed: int = 0) -> Report:
    """Execute every invariant check and wrap the results as a report."""
    t0 = time.perf_counter()
    results = run_checks(max_n=max_n, trials=trials, seed=seed)
    failures = [r.name for r in results if not r.passed]
    payload = {
        "schema": "qteleport-report@1",
        "config": {"mode": "verify", "max_n": max_n, "trials": trials, "seed": seed},
        "checks": {
            "all_passed": not failures,
            "results": [
                {
                    "name": r.name,
                    "passed": r.passed,
                    "worst_residual": r.worst,
                    "detail": r.detail,
                }
                for r in results
            ],
        },
    }
    return Report(payload, time.perf_counter() - t0, failures)
