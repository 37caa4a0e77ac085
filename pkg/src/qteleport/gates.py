"""Single-qubit gate constructors and the multi-controlled gate matrix.

Conventions: ``ry(theta)`` returns the real rotation
``[[cos(theta/2), -sin(theta/2)], [sin(theta/2), cos(theta/2)]]``, the sign
convention under which ``compensator(y0, yi)`` equals
``ry(2*arccos(y0/yi))``. ``multi_controlled_matrix(n, u)`` is the
2^(n+1)-dimensional operation that applies ``u`` to the last qubit exactly
when the first ``n`` qubits are all 1 (basis states lexicographically
ordered, first qubit most significant).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

UNITARY_TOL = 1e-10

_STANDARD = {
    "I": np.array([[1, 0], [0, 1]], dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
    "H": np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2),
}


def is_unitary(m, tol: float = UNITARY_TOL) -> bool:
    """True iff max entry of |M†M - I| is at most ``tol``."""
    m = np.asarray(m.matrix if isinstance(m, Gate2x2) else m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    delta = m.conj().T @ m - np.eye(m.shape[0])
    return float(np.max(np.abs(delta))) <= tol


@dataclass(frozen=True, eq=False)
class Gate2x2:
    """A 2x2 unitary (tolerance 1e-10), stored row-major.

    ``angle`` is metadata set by ``ry`` so netlist serialization can emit an
    RY line instead of raw entries; it does not participate in equality.
    """

    matrix: np.ndarray
    angle: float | None = None

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.shape != (2, 2):
            raise ValueError(f"gate must be 2x2, got shape {m.shape}")
        if not np.all(np.isfinite(m.view(float))):
            raise ValueError("gate entries must be finite")
        if not is_unitary(m, UNITARY_TOL):
            raise ValueError("gate is not unitary within 1e-10")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def entries(self) -> tuple[complex, complex, complex, complex]:
        """Row-major entries (g00, g01, g10, g11) as python complex."""
        m = self.matrix
        return complex(m[0, 0]), complex(m[0, 1]), complex(m[1, 0]), complex(m[1, 1])

    def __eq__(self, other) -> bool:
        if not isinstance(other, Gate2x2):
            return NotImplemented
        return bool(np.array_equal(self.matrix, other.matrix))

    def __repr__(self) -> str:
        g00, g01, g10, g11 = self.entries()
        return f"Gate2x2([[{g00}, {g01}], [{g10}, {g11}]])"


def standard_gate(name: str) -> Gate2x2:
    """One of the fixed gates I, X, Z, H."""
    try:
        return Gate2x2(_STANDARD[name])
    except KeyError:
        raise ValueError(f"unknown gate name {name!r}; expected one of I, X, Z, H") from None


def ry(theta: float) -> Gate2x2:
    """Real y-rotation [[cos t/2, -sin t/2], [sin t/2, cos t/2]] with t = theta."""
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return Gate2x2(np.array([[c, -s], [s, c]], dtype=complex), angle=float(theta))


def compensator(y0: float, yi: float) -> Gate2x2:
    """Rotation [[y0/yi, -sqrt(1-(y0/yi)^2)], [sqrt(...), y0/yi]].

    Equalizes a channel amplitude yi down to y0; requires 0 < y0 <= yi so the
    entries stay real.
    """
    if not (yi > 0):
        raise ValueError(f"yi must be positive, got {yi}")
    if not (0 < y0 <= yi):
        raise ValueError(f"need 0 < y0 <= yi, got y0={y0}, yi={yi}")
    r = y0 / yi
    s = math.sqrt(max(0.0, 1.0 - r * r))
    return Gate2x2(np.array([[r, -s], [s, r]], dtype=complex))


def multi_controlled_matrix(n_controls: int, u: Gate2x2) -> np.ndarray:
    """Identity of dimension 2^(n_controls+1) with ``u`` in the final 2x2 block.

    Applies ``u`` to the last qubit iff all ``n_controls`` leading qubits are
    1; with zero controls this is ``u`` itself.
    """
    if n_controls < 0:
        raise ValueError("n_controls must be >= 0")
    dim = 1 << (n_controls + 1)
    m = np.eye(dim, dtype=complex)
    m[-2:, -2:] = u.matrix
    return m
