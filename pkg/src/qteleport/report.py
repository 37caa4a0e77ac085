"""Machine-readable reports with byte-reproducible serialization.

Identical configuration and seed must produce identical output bytes, so
the JSON payload contains only deterministic content (wall time is
reported on stderr by the CLI, never inside the payload) and floats are
printed with 17 significant digits.

Report schema (JSON object, keys in this order):

  schema                            "qteleport-report@1"
  config                            echo of the resolved experiment config,
                                    including drawn channel/message values
  success_probability_theoretical   2^n * y0^2
  success_probability_observed      exact branch sum or empirical rate
  mean_success_fidelity             probability-weighted over success branches
                                    (shot-averaged in sample mode)
  branches                          exact mode: list of {m, nbits, ancilla,
                                    probability, fidelity}, bit strings
                                    most-significant first
  shot_tally                        sample mode: {shots, successes,
                                    success_rate, binomial_stderr}
  checks                            pass/fail flags; verify mode adds a
                                    per-check list with worst residuals

The CSV branch-table export has the same rows as ``branches`` with header
``m,nbits,ancilla,probability,fidelity``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any


def format_float(x: float) -> str:
    """17-significant-digit decimal form (round-trips double precision)."""
    if x != x or x in (float("inf"), float("-inf")):
        raise ValueError(f"non-finite float in report: {x}")
    return format(float(x), ".17g")


def dumps_canonical(obj: Any) -> str:
    """JSON text with deterministic float formatting and no whitespace drift."""
    if isinstance(obj, dict):
        items = ",".join(
            f"{json.dumps(str(k))}:{dumps_canonical(v)}" for k, v in obj.items()
        )
        return "{" + items + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ",".join(dumps_canonical(v) for v in obj) + "]"
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return format_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__} into a report")


@dataclass
class Report:
    """Deterministic payload plus out-of-band wall time."""

    payload: dict[str, Any]
    wall_time_s: float = 0.0
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_json(self) -> str:
        return dumps_canonical(self.payload) + "\n"

    def branch_csv(self) -> str:
        rows = self.payload.get("branches")
        if rows is None:
            raise ValueError("report has no branch table (sample/verify mode?)")
        lines = ["m,nbits,ancilla,probability,fidelity"]
        for r in rows:
            lines.append(
                f"{r['m']},{r['nbits']},{r['ancilla']},"
                f"{format_float(r['probability'])},{format_float(r['fidelity'])}"
            )
        return "\n".join(lines) + "\n"
