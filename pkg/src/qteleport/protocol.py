"""End-to-end probabilistic teleportation of an n-qubit message.

Layout over 3n qubits: message on 1..n, the sender's channel half on
n+1..2n, the receiver's half on 2n+1..3n. Encoding is a CNOT from each
message qubit onto its channel partner followed by Hadamards on the
message qubits. The sender measures qubits 1..2n (results m on 1..n,
nbits on n+1..2n); the receiver appends a |0> ancilla as least-significant
qubit, applies the block-diagonal recovery unitary, and measures the
ancilla. Ancilla 1 heralds failure; ancilla 0 leaves the receiver's
register equal to the message up to bit flips selected by nbits and sign
flips selected by m, undone by applying X then Z per qubit. Overall
success probability is 2^n * y0^2, independent of the message.

Everything here is pure and deterministic given its inputs; sampled runs
derive per-shot randomness from (master_seed, shot_index) so shot order
and parallelism cannot change results.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import kernels
from .channel import ChannelSpec, MessageSpec
from .gates import ry, standard_gate
from .netlist import (
    Cnot,
    MultiControlled,
    Netlist,
    Single,
    XLayer,
    apply_netlist_raw,
    recovery_cnot_netlist,
    recovery_matrix,
    recovery_netlist,
)
from .statevector import (
    StateVector,
    apply_cnot,
    apply_multi_controlled,
    apply_single,
    basis_state,
    tensor,
)

_X = standard_gate("X")
_Z = standard_gate("Z")

UN_PATHS = ("matrix", "netlist", "cnot")


@dataclass(frozen=True)
class Outcome:
    """One classical measurement record: sender bits m and nbits, ancilla bit.

    ``ancilla`` is None while unmeasured. Bit tuples are most-significant
    first, matching qubit order.
    """

    m: tuple[int, ...]
    nbits: tuple[int, ...]
    ancilla: int | None = None

    def __post_init__(self):
        if len(self.m) != len(self.nbits):
            raise ValueError("m and nbits must have equal width")
        if any(b not in (0, 1) for b in self.m + self.nbits):
            raise ValueError("outcome bits must be 0 or 1")
        if self.ancilla not in (None, 0, 1):
            raise ValueError("ancilla must be 0, 1 or None")

    @property
    def n(self) -> int:
        return len(self.m)

    @property
    def m_index(self) -> int:
        return int("".join(map(str, self.m)), 2) if self.m else 0

    @property
    def n_index(self) -> int:
        return int("".join(map(str, self.nbits)), 2) if self.nbits else 0

    @staticmethod
    def from_indices(n: int, m_index: int, n_index: int, ancilla: int | None = None) -> "Outcome":
        m = tuple((m_index >> (n - 1 - j)) & 1 for j in range(n))
        nb = tuple((n_index >> (n - 1 - j)) & 1 for j in range(n))
        return Outcome(m, nb, ancilla)


@dataclass(frozen=True)
class CorrectionPlan:
    """Per receiver qubit j: X iff nbits[j], then Z iff m[j]."""

    apply_x: tuple[bool, ...]
    apply_z: tuple[bool, ...]


@dataclass
class OutcomeRecord:
    """One branch or shot: outcome, its probability, the receiver's
    post-correction state, and its fidelity against the message."""

    outcome: Outcome
    probability: float
    bob_state: StateVector
    fidelity: float


def message_state(msg: MessageSpec) -> StateVector:
    """The message amplitudes as an n-qubit state."""
    return StateVector(msg.n, msg.x)


def prepare_channel_direct(ch: ChannelSpec) -> StateVector:
    """The 2n-qubit resource state sum_i y_i |i>|i> written out directly."""
    n = ch.n
    amps = np.zeros(1 << (2 * n), dtype=complex)
    for i, v in enumerate(ch.y):
        amps[i * (1 << n) + i] = v
    return StateVector(2 * n, amps)


def prepare_channel_circuit(ch: ChannelSpec) -> Netlist:
    """A netlist mapping |0...0> to the channel state.

    A binary tree of y-rotations loads the amplitudes onto qubits 1..n (one
    rotation per tree node, pattern-conditioned via X-layer conjugation),
    then CNOT fan-outs j -> n+j duplicate the basis index.
    """
    n = ch.n
    y = np.asarray(ch.y, dtype=float)
    nl = Netlist(2 * n, [], labels=tuple(str(n + 1 + j) for j in range(2 * n)))
    # subtree_norm[d][p]: norm of amplitudes whose first d bits equal p
    for d in range(1, n + 1):
        width = 1 << (d - 1)
        seg = y.reshape(width, -1)
        for p in range(width):
            block = seg[p]
            half = block.size // 2
            r0 = math.sqrt(float(np.sum(block[:half] ** 2)))
            r1 = math.sqrt(float(np.sum(block[half:] ** 2)))
            theta = 2.0 * math.atan2(r1, r0)
            if d == 1:
                nl.append(Single(ry(theta), 1))
                continue
            zeros = frozenset(j for j in range(1, d) if not (p >> (d - 1 - j)) & 1)
            if zeros:
                nl.append(XLayer(zeros))
            nl.append(MultiControlled(tuple(range(1, d)), ry(theta), d))
            if zeros:
                nl.append(XLayer(zeros))
    for j in range(1, n + 1):
        nl.append(Cnot(j, n + j))
    return nl


def alice_encode(total: StateVector, n: int) -> StateVector:
    """Sender encoding: CNOT(j -> n+j) for j = 1..n, then H on qubits 1..n."""
    if total.n_qubits != 3 * n:
        raise ValueError(f"expected a {3 * n}-qubit combined state, got {total.n_qubits}")
    sv = total
    for j in range(1, n + 1):
        sv = apply_cnot(sv, j, n + j)
    h = standard_gate("H")
    for j in range(1, n + 1):
        sv = apply_single(sv, h, j)
    return sv


def correction_plan(out: Outcome) -> CorrectionPlan:
    """Derive the per-qubit X-then-Z fix-up from a success outcome."""
    if out.ancilla != 0:
        raise ValueError("corrections apply only to ancilla = 0 outcomes")
    return CorrectionPlan(
        apply_x=tuple(b == 1 for b in out.nbits),
        apply_z=tuple(b == 1 for b in out.m),
    )


def apply_correction(sv: StateVector, plan: CorrectionPlan) -> StateVector:
    """Apply the plan to an n-qubit state: per qubit, X first, then Z."""
    if len(plan.apply_x) != sv.n_qubits or len(plan.apply_z) != sv.n_qubits:
        raise ValueError("plan width does not match the state")
    for j, (fx, fz) in enumerate(zip(plan.apply_x, plan.apply_z), start=1):
        if fx:
            sv = apply_single(sv, _X, j)
        if fz:
            sv = apply_single(sv, _Z, j)
    return sv


def success_probability(ch: ChannelSpec) -> float:
    """Closed-form heralded-success probability 2^n * y0^2."""
    return (1 << ch.n) * ch.y0 * ch.y0


# ---------------------------------------------------------------------------
# recovery

def _make_recovery(ch: ChannelSpec, un_path: str) -> Callable[[np.ndarray], np.ndarray]:
    """Returns f(branch amps over n qubits) -> amps over n+1 qubits (ancilla LSB)."""
    n = ch.n
    if un_path == "matrix":
        u = recovery_matrix(ch)

        def run(b: np.ndarray) -> np.ndarray:
            s = np.zeros(1 << (n + 1), dtype=complex)
            s[0::2] = b
            return u @ s

    elif un_path == "netlist":
        nl = recovery_netlist(ch)

        def run(b: np.ndarray) -> np.ndarray:
            s = np.zeros(1 << (n + 1), dtype=complex)
            s[0::2] = b
            apply_netlist_raw(s, nl)
            return s

    elif un_path == "cnot":
        if n != 2:
            raise ValueError("un_path 'cnot' is only available for n = 2")
        nl = recovery_cnot_netlist(ch)

        def run(b: np.ndarray) -> np.ndarray:
            s = np.zeros(1 << (n + 1), dtype=complex)
            s[0::2] = b
            apply_netlist_raw(s, nl)
            return s

    else:
        raise ValueError(f"unknown un_path {un_path!r}; expected one of {UN_PATHS}")
    return run


def _apply_plan_raw(amps: np.ndarray, n: int, m_index: int, n_index: int) -> None:
    """In-place X-then-Z correction on a 2^n amplitude array."""
    kernels.apply_xlayer(amps, n_index)
    for pos in range(n):
        if (m_index >> pos) & 1:
            kernels.apply_ctrl_2x2(amps, 0, 1 << pos, 1.0, 0.0, 0.0, -1.0)


def _norm_sq(a: np.ndarray) -> float:
    return float(np.vdot(a, a).real)


def bob_recover(
    branch: StateVector,
    ch: ChannelSpec,
    out: Outcome,
    use_netlist: bool = False,
) -> tuple[tuple[float, float], StateVector]:
    """Receiver recovery on one unnormalized branch state.

    Appends the ancilla, applies the recovery unitary (matrix or netlist
    path), and returns the ancilla outcome probabilities conditioned on the
    branch together with the renormalized, correction-applied ancilla-0
    state.
    """
    if branch.n_qubits != ch.n:
        raise ValueError(f"branch has {branch.n_qubits} qubits, channel expects {ch.n}")
    total = branch.squared_norm()
    if total <= 0.0:
        raise ValueError("cannot recover a zero branch")
    run = _make_recovery(ch, "netlist" if use_netlist else "matrix")
    s = run(np.asarray(branch.amps))
    a0, a1 = s[0::2].copy(), s[1::2].copy()
    p0_abs, p1_abs = _norm_sq(a0), _norm_sq(a1)
    a0 *= 1.0 / math.sqrt(p0_abs)
    _apply_plan_raw(a0, ch.n, out.m_index, out.n_index)
    return (p0_abs / total, p1_abs / total), StateVector(ch.n, a0)


# ---------------------------------------------------------------------------
# exact enumeration

def enumerate_branches(
    msg: MessageSpec, ch: ChannelSpec, un_path: str = "matrix"
) -> list[OutcomeRecord]:
    """All 2 * 4^n measurement branches with exact probabilities.

    Every (m, nbits) sender outcome is paired with both ancilla values;
    probabilities sum to 1. Success records carry the corrected receiver
    state; failure records carry the renormalized residual (with the same
    correction applied, for comparability). Zero-probability records carry
    a zero state and fidelity 0.
    """
    if msg.n != ch.n:
        raise ValueError(f"message is over {msg.n} qubits, channel over {ch.n}")
    n = ch.n
    dim_b = 1 << n
    message = message_state(msg)
    enc = alice_encode(tensor(message, prepare_channel_direct(ch)), n)
    rows = enc.amps.reshape(1 << (2 * n), dim_b)
    run = _make_recovery(ch, un_path)
    msg_amps = np.asarray(msg.x)
    zero_state = StateVector(n, np.zeros(dim_b, dtype=complex))

    records: list[OutcomeRecord] = []
    for a_idx in range(1 << (2 * n)):
        m_index, n_index = a_idx >> n, a_idx & (dim_b - 1)
        s = run(rows[a_idx].copy())
        for anc in (0, 1):
            part = s[anc::2].copy()
            p = _norm_sq(part)
            outcome = Outcome.from_indices(n, m_index, n_index, anc)
            if p <= 0.0:
                records.append(OutcomeRecord(outcome, 0.0, zero_state, 0.0))
                continue
            part *= 1.0 / math.sqrt(p)
            _apply_plan_raw(part, n, m_index, n_index)
            fid = float(abs(np.vdot(msg_amps, part)) ** 2)
            records.append(OutcomeRecord(outcome, p, StateVector._wrap(n, part), fid))
    return records


def enumerate_branches_coherent(msg: MessageSpec, ch: ChannelSpec) -> list[OutcomeRecord]:
    """Same branch table via coherent (pre-measurement) controlled corrections.

    The whole 3n+1 qubit system is evolved unitarily: recovery on the
    receiver register plus ancilla, then CNOT corrections controlled by the
    channel-half qubits and controlled-Z corrections controlled by the
    message qubits, and only then is everything read out. Must agree with
    ``enumerate_branches`` branch for branch.
    """
    if msg.n != ch.n:
        raise ValueError(f"message is over {msg.n} qubits, channel over {ch.n}")
    n = ch.n
    enc = alice_encode(tensor(message_state(msg), prepare_channel_direct(ch)), n)
    full = tensor(enc, basis_state(1, 0))  # ancilla appended as least significant
    u = recovery_matrix(ch)
    amps = full.amps.reshape(1 << (2 * n), 1 << (n + 1)) @ u.T
    sv = StateVector(3 * n + 1, amps.reshape(-1))
    for j in range(1, n + 1):
        sv = apply_cnot(sv, n + j, 2 * n + j)
    for j in range(1, n + 1):
        sv = apply_multi_controlled(sv, [j], _Z, 2 * n + j)

    dim_b = 1 << n
    msg_amps = np.asarray(msg.x)
    zero_state = StateVector(n, np.zeros(dim_b, dtype=complex))
    grid = sv.amps.reshape(1 << (2 * n), dim_b, 2)
    records: list[OutcomeRecord] = []
    for a_idx in range(1 << (2 * n)):
        for anc in (0, 1):
            part = grid[a_idx, :, anc].copy()
            p = _norm_sq(part)
            outcome = Outcome.from_indices(n, a_idx >> n, a_idx & (dim_b - 1), anc)
            if p <= 0.0:
                records.append(OutcomeRecord(outcome, 0.0, zero_state, 0.0))
                continue
            part *= 1.0 / math.sqrt(p)
            fid = float(abs(np.vdot(msg_amps, part)) ** 2)
            records.append(OutcomeRecord(outcome, p, StateVector(n, part), fid))
    return records


# ---------------------------------------------------------------------------
# sampling

@dataclass(frozen=True)
class _ShotContext:
    n: int
    encoded: np.ndarray
    msg_amps: np.ndarray
    recover: Callable[[np.ndarray], np.ndarray]


def _shot_context(msg: MessageSpec, ch: ChannelSpec, un_path: str) -> _ShotContext:
    enc = alice_encode(tensor(message_state(msg), prepare_channel_direct(ch)), ch.n)
    return _ShotContext(ch.n, enc.amps, np.asarray(msg.x), _make_recovery(ch, un_path))


def shot_rng(master_seed: int, shot_index: int) -> np.random.Generator:
    """Per-shot generator derived from (master_seed, shot_index)."""
    return np.random.default_rng(
        np.random.SeedSequence(entropy=master_seed, spawn_key=(shot_index,))
    )


def _measure_bit_raw(amps: np.ndarray, mask: int, r: float) -> tuple[int, float]:
    p0_abs, total = kernels.bit0_and_total_sq(amps, mask)
    p0 = p0_abs / total
    if r < p0:
        bit, prob, kept = 0, p0, p0_abs
    else:
        bit, prob, kept = 1, 1.0 - p0, total - p0_abs
    kernels.project_bit(amps, mask, bit)
    amps *= 1.0 / math.sqrt(kept)
    return bit, prob


def sample_shot(
    msg: MessageSpec,
    ch: ChannelSpec,
    master_seed: int,
    shot_index: int,
    un_path: str = "matrix",
    _ctx: _ShotContext | None = None,
) -> OutcomeRecord:
    """One sampled protocol run in deferred-measurement order.

    The sender's 2n qubits are measured first (qubit 1 outward), the
    recovery and the classically-controlled corrections run afterwards.
    The record's probability is the joint probability of everything
    observed in the shot. Deterministic given (master_seed, shot_index).
    """
    ctx = _ctx if _ctx is not None else _shot_context(msg, ch, un_path)
    n = ctx.n
    rng = shot_rng(master_seed, shot_index)

    amps = ctx.encoded.copy()
    joint = 1.0
    a_idx = 0
    for q in range(1, 2 * n + 1):
        bit, prob = _measure_bit_raw(amps, 1 << (3 * n - q), rng.random())
        joint *= prob
        a_idx = (a_idx << 1) | bit
    m_index, n_index = a_idx >> n, a_idx & ((1 << n) - 1)

    branch = amps.reshape(1 << (2 * n), 1 << n)[a_idx].copy()
    s = ctx.recover(branch)
    p0 = _norm_sq(s[0::2])
    anc = 0 if rng.random() < p0 else 1
    joint *= p0 if anc == 0 else 1.0 - p0
    part = s[anc::2].copy()
    part *= 1.0 / math.sqrt(_norm_sq(part))
    _apply_plan_raw(part, n, m_index, n_index)
    fid = float(abs(np.vdot(ctx.msg_amps, part)) ** 2)
    outcome = Outcome.from_indices(n, m_index, n_index, anc)
    return OutcomeRecord(outcome, joint, StateVector._wrap(n, part), fid)


def sample_shots(
    msg: MessageSpec,
    ch: ChannelSpec,
    master_seed: int,
    shots: int,
    un_path: str = "matrix",
) -> list[OutcomeRecord]:
    """``shots`` independent runs; identical to calling sample_shot per index."""
    ctx = _shot_context(msg, ch, un_path)
    return [
        sample_shot(msg, ch, master_seed, i, un_path, _ctx=ctx) for i in range(shots)
    ]
