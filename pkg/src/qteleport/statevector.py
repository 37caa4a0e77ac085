"""Dense complex state vectors over n qubits.

Qubit indexing is 1-based with qubit 1 the most significant bit of the
basis index, so basis states are lexicographically ordered (|00..0>,
|00..1>, ..., |11..1>). All operations are pure: they return new
StateVectors and never mutate their inputs, so values are safe to share
across threads.

A "normalized" state has squared norm within 1e-10 of 1; unnormalized
branch states (squared norm = branch probability) are produced by
``split_on_qubit`` and keep full dimension with the complement zeroed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .gates import Gate2x2

NORM_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class StateVector:
    n_qubits: int
    amps: np.ndarray

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError("n_qubits must be >= 1")
        a = np.ascontiguousarray(self.amps, dtype=complex)
        if a.shape != (1 << self.n_qubits,):
            raise ValueError(
                f"amps must have length 2^{self.n_qubits}, got shape {a.shape}"
            )
        if not np.all(np.isfinite(a.view(float))):
            raise ValueError("amplitudes must be finite")
        a.setflags(write=False)
        object.__setattr__(self, "amps", a)

    @classmethod
    def _wrap(cls, n_qubits: int, amps: np.ndarray) -> "StateVector":
        """Adopt an internally produced contiguous complex128 array, skipping
        validation (hot paths only; amps must not be aliased elsewhere)."""
        sv = object.__new__(cls)
        amps.setflags(write=False)
        object.__setattr__(sv, "n_qubits", n_qubits)
        object.__setattr__(sv, "amps", amps)
        return sv

    def squared_norm(self) -> float:
        return float(np.vdot(self.amps, self.amps).real)

    def is_normalized(self, tol: float = NORM_TOL) -> bool:
        return abs(self.squared_norm() - 1.0) <= tol

    def bit_mask(self, qubit: int) -> int:
        """Basis-index mask for a 1-based qubit (qubit 1 = most significant)."""
        if not 1 <= qubit <= self.n_qubits:
            raise ValueError(f"qubit {qubit} out of range 1..{self.n_qubits}")
        return 1 << (self.n_qubits - qubit)


def basis_state(n_qubits: int, index: int) -> StateVector:
    """Computational basis state |index> over n_qubits."""
    if n_qubits < 1:
        raise ValueError("n_qubits must be >= 1")
    dim = 1 << n_qubits
    if not 0 <= index < dim:
        raise ValueError(f"basis index {index} out of range [0, {dim})")
    amps = np.zeros(dim, dtype=complex)
    amps[index] = 1.0
    return StateVector(n_qubits, amps)


def from_amplitudes(n_qubits: int, amps) -> StateVector:
    """StateVector from an explicit amplitude array (validated, copied)."""
    return StateVector(n_qubits, np.asarray(amps, dtype=complex))


def tensor(a: StateVector, b: StateVector) -> StateVector:
    """Tensor product with a's qubits first (most significant)."""
    return StateVector(a.n_qubits + b.n_qubits, np.kron(a.amps, b.amps))


def apply_single(sv: StateVector, g: Gate2x2, target: int) -> StateVector:
    """Apply a single-qubit gate to ``target``, identity elsewhere."""
    mask = sv.bit_mask(target)
    amps = sv.amps.copy()
    kernels.apply_ctrl_2x2(amps, 0, mask, *g.entries())
    return StateVector(sv.n_qubits, amps)


def apply_cnot(sv: StateVector, control: int, target: int) -> StateVector:
    """XOR the target bit with the control bit on every basis component."""
    if control == target:
        raise ValueError("control and target must differ")
    cmask = sv.bit_mask(control)
    tmask = sv.bit_mask(target)
    amps = sv.amps.copy()
    kernels.apply_ctrl_2x2(amps, cmask, tmask, 0.0, 1.0, 1.0, 0.0)
    return StateVector(sv.n_qubits, amps)


def apply_multi_controlled(sv: StateVector, controls, u: Gate2x2, target: int) -> StateVector:
    """Apply ``u`` to ``target`` on components where all controls read 1.

    Zero controls reduces to ``apply_single``.
    """
    controls = list(controls)
    if len(set(controls)) != len(controls):
        raise ValueError(f"control qubits must be distinct, got {controls}")
    if target in controls:
        raise ValueError(f"target {target} overlaps a control qubit")
    tmask = sv.bit_mask(target)
    cmask = 0
    for c in controls:
        cmask |= sv.bit_mask(c)
    amps = sv.amps.copy()
    kernels.apply_ctrl_2x2(amps, cmask, tmask, *u.entries())
    return StateVector(sv.n_qubits, amps)


def apply_x_layer(sv: StateVector, targets) -> StateVector:
    """Parallel X on every qubit in ``targets`` (a basis permutation)."""
    xmask = 0
    for q in set(targets):
        xmask |= sv.bit_mask(q)
    amps = sv.amps.copy()
    kernels.apply_xlayer(amps, xmask)
    return StateVector(sv.n_qubits, amps)


def split_on_qubit(sv: StateVector, q: int) -> tuple[StateVector, StateVector]:
    """Unnormalized projections onto qubit q = 0 and q = 1.

    Both keep full dimension with the complementary components zeroed;
    squared norms sum to the parent's.
    """
    mask = sv.bit_mask(q)
    a0 = sv.amps.copy()
    a1 = sv.amps.copy()
    kernels.project_bit(a0, mask, 0)
    kernels.project_bit(a1, mask, 1)
    return StateVector(sv.n_qubits, a0), StateVector(sv.n_qubits, a1)


def measure_qubit(sv: StateVector, q: int, rand01: float) -> tuple[int, StateVector, float]:
    """Projective measurement of qubit q driven by one uniform draw.

    Outcome 0 is chosen iff ``rand01 < P(q=0)``. Returns
    (outcome, renormalized post-state, probability of that outcome).
    """
    if not 0.0 <= rand01 < 1.0:
        raise ValueError(f"rand01 must be in [0, 1), got {rand01}")
    mask = sv.bit_mask(q)
    p0_abs, total = kernels.bit0_and_total_sq(sv.amps, mask)
    if total <= 0.0:
        raise ValueError("cannot measure a zero-norm state")
    p0 = p0_abs / total
    outcome = 0 if rand01 < p0 else 1
    prob = p0 if outcome == 0 else 1.0 - p0
    kept = p0_abs if outcome == 0 else total - p0_abs
    amps = sv.amps.copy()
    kernels.project_bit(amps, mask, outcome)
    amps *= 1.0 / math.sqrt(kept)
    return outcome, StateVector(sv.n_qubits, amps), prob


def fidelity(a: StateVector, b: StateVector) -> float:
    """|<a|b>|^2 for normalized states; insensitive to global phase."""
    if a.n_qubits != b.n_qubits:
        raise ValueError(
            f"dimension mismatch: {a.n_qubits} vs {b.n_qubits} qubits"
        )
    if not a.is_normalized() or not b.is_normalized():
        raise ValueError("fidelity requires normalized states")
    return float(abs(np.vdot(a.amps, b.amps)) ** 2)
