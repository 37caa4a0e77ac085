"""Backend parity and kernel-vs-matrix oracles.

The compiled and pure-numpy kernels must be interchangeable bit for bit at
the semantic level (same outputs within float determinism), and both must
match explicit dense-matrix application built independently with np.kron.
"""

import numpy as np
import pytest

from qteleport import _kernels_py
from qteleport import kernels
from conftest import random_state, random_unitary_2x2

try:
    from qteleport import _kernels_cy

    BACKENDS = [("python", _kernels_py), ("cython", _kernels_cy)]
except ImportError:
    _kernels_cy = None
    BACKENDS = [("python", _kernels_py)]


def _dense_ctrl_2x2(n, ctrl_mask, targ_mask, g):
    """Independent oracle: full matrix of the controlled 2x2 op."""
    dim = 1 << n
    m = np.eye(dim, dtype=complex)
    for i in range(dim):
        if (i & (ctrl_mask | targ_mask)) == ctrl_mask:
            j = i | targ_mask
            m[i, i], m[i, j] = g[0, 0], g[0, 1]
            m[j, i], m[j, j] = g[1, 0], g[1, 1]
    return m


@pytest.mark.parametrize("name,backend", BACKENDS)
def test_ctrl_2x2_matches_dense_oracle(name, backend, rng):
    for _ in range(25):
        n = int(rng.integers(1, 7))
        bits = list(rng.permutation(n))
        targ = 1 << bits[0]
        n_ctrl = int(rng.integers(0, n))
        ctrl = 0
        for b in bits[1 : 1 + n_ctrl]:
            ctrl |= 1 << b
        g = random_unitary_2x2(rng).matrix
        amps = random_state(n, rng)
        got = amps.copy()
        backend.apply_ctrl_2x2(got, ctrl, targ, g[0, 0], g[0, 1], g[1, 0], g[1, 1])
        want = _dense_ctrl_2x2(n, ctrl, targ, g) @ amps
        assert np.max(np.abs(got - want)) < 1e-14


@pytest.mark.parametrize("name,backend", BACKENDS)
def test_xlayer_is_xor_permutation(name, backend, rng):
    for _ in range(25):
        n = int(rng.integers(1, 7))
        xmask = int(rng.integers(0, 1 << n))
        amps = random_state(n, rng)
        got = amps.copy()
        backend.apply_xlayer(got, xmask)
        want = amps[np.arange(1 << n) ^ xmask]
        assert np.array_equal(got, want)


@pytest.mark.parametrize("name,backend", BACKENDS)
def test_bit0_and_project(name, backend, rng):
    for _ in range(25):
        n = int(rng.integers(1, 7))
        mask = 1 << int(rng.integers(0, n))
        amps = random_state(n, rng) * rng.uniform(0.5, 2.0)
        idx = np.arange(1 << n)
        p0_want = float(np.sum(np.abs(amps[(idx & mask) == 0]) ** 2))
        tot_want = float(np.sum(np.abs(amps) ** 2))
        p0, tot = backend.bit0_and_total_sq(amps, mask)
        assert p0 == pytest.approx(p0_want, abs=1e-14)
        assert tot == pytest.approx(tot_want, abs=1e-14)
        kept = amps.copy()
        backend.project_bit(kept, mask, 1)
        assert np.all(kept[(idx & mask) == 0] == 0)
        assert np.array_equal(kept[(idx & mask) != 0], amps[(idx & mask) != 0])


@pytest.mark.skipif(_kernels_cy is None, reason="compiled backend not built")
def test_backends_agree(rng):
    # gate updates may differ by 1 ulp (numpy vectorizes complex multiplies
    # with FMA); permutation/zeroing kernels must match exactly
    for _ in range(50):
        n = int(rng.integers(1, 8))
        amps = random_state(n, rng)
        a, b = amps.copy(), amps.copy()
        g = random_unitary_2x2(rng).matrix
        targ = 1 << int(rng.integers(0, n))
        ctrl_candidates = [1 << k for k in range(n) if (1 << k) != targ]
        ctrl = sum(c for c in ctrl_candidates if rng.random() < 0.4)
        _kernels_py.apply_ctrl_2x2(a, ctrl, targ, g[0, 0], g[0, 1], g[1, 0], g[1, 1])
        _kernels_cy.apply_ctrl_2x2(b, ctrl, targ, g[0, 0], g[0, 1], g[1, 0], g[1, 1])
        assert np.max(np.abs(a - b)) < 1e-15
        b = a.copy()
        xm = int(rng.integers(0, 1 << n))
        _kernels_py.apply_xlayer(a, xm)
        _kernels_cy.apply_xlayer(b, xm)
        assert np.array_equal(a, b)
        assert _kernels_py.bit0_and_total_sq(a, targ) == pytest.approx(
            _kernels_cy.bit0_and_total_sq(b, targ), abs=1e-15
        )
        _kernels_py.project_bit(a, targ, 0)
        _kernels_cy.project_bit(b, targ, 0)
        assert np.array_equal(a, b)


def test_selected_backend_exports():
    assert kernels.backend_name() in ("python", "cython")
    for fn in ("apply_ctrl_2x2", "apply_xlayer", "bit0_and_total_sq", "project_bit"):
        assert callable(getattr(kernels, fn))
