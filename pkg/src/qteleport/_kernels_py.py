"""Pure-numpy state-vector kernels.

All kernels operate on a flat, C-contiguous complex128 amplitude array of
length 2**n and address qubits through *bit masks over the basis index*
(bit k set means basis-index bit k is 1). They mutate ``amps`` in place;
callers own copy semantics. The compiled extension ``_kernels_cy``
implements the identical contract and is preferred at import time when
available.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np


@lru_cache(maxsize=1024)
def _subspace_indices(dim: int, ctrl_mask: int, targ_mask: int) -> np.ndarray:
    """Indices with every ctrl_mask bit set and every targ_mask bit clear."""
    idx = np.arange(dim, dtype=np.int64)
    sel = (idx & (ctrl_mask | targ_mask)) == ctrl_mask
    out = idx[sel]
    out.setflags(write=False)
    return out


@lru_cache(maxsize=1024)
def _xor_permutation(dim: int, xmask: int) -> np.ndarray:
    out = np.arange(dim, dtype=np.int64) ^ xmask
    out.setflags(write=False)
    return out


def apply_ctrl_2x2(amps, ctrl_mask, targ_mask, g00, g01, g10, g11):
    """Apply a 2x2 gate to the target bit where all ctrl_mask bits are 1.

    ctrl_mask == 0 gives a plain single-qubit gate; ctrl_mask with one bit
    and gate X gives a CNOT.
    """
    i0 = _subspace_indices(amps.size, ctrl_mask, targ_mask)
    i1 = i0 | targ_mask
    a0 = amps[i0]
    a1 = amps[i1]
    amps[i0] = g00 * a0 + g01 * a1
    amps[i1] = g10 * a0 + g11 * a1


def apply_xlayer(amps, xmask):
    """Permute amplitudes by XOR: amps[i] <- amps[i ^ xmask]."""
    if xmask == 0:
        return
    amps[:] = amps[_xor_permutation(amps.size, xmask)]


def bit0_and_total_sq(amps, targ_mask):
    """Return (squared norm of the targ_mask-bit-0 part, total squared norm)."""
    i0 = _subspace_indices(amps.size, 0, targ_mask)
    sq = np.abs(amps) ** 2
    total = float(sq.sum())
    return float(sq[i0].sum()), total


def project_bit(amps, targ_mask, bit):
    """Zero every component whose targ_mask bit differs from ``bit``."""
    keep_ctrl = targ_mask if bit == 0 else 0
    dead = _subspace_indices(amps.size, keep_ctrl, targ_mask ^ keep_ctrl)
    amps[dead] = 0.0
