"""Channel and message descriptors.

A channel over n message qubits is the 2n-qubit entangled resource
sum_i y_i |i>|i> with strictly positive real amplitudes y summing (in
squares) to 1; y[0] must literally be the smallest amplitude because the
recovery unitary's first diagonal block is pinned to the identity. A
message is an arbitrary normalized complex amplitude vector over n qubits.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

NORM_TOL = 1e-10


@dataclass(frozen=True)
class ChannelSpec:
    """Amplitudes y of the shared entangled resource for n message qubits."""

    n: int
    y: tuple[float, ...]

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("channel.n must be >= 1")
        y = tuple(float(v) for v in self.y)
        if len(y) != 1 << self.n:
            raise ValueError(
                f"channel.y must have length 2^{self.n} = {1 << self.n}, got {len(y)}"
            )
        for i, v in enumerate(y):
            if not np.isfinite(v) or v <= 0.0:
                raise ValueError(f"channel.y[{i}] must be a positive finite real, got {v}")
        if abs(sum(v * v for v in y) - 1.0) > NORM_TOL:
            raise ValueError("channel.y must satisfy sum(y^2) = 1 within 1e-10")
        if y[0] > min(y):
            raise ValueError(
                "channel.y[0] must be the smallest amplitude "
                "(relabel the basis so the smallest comes first)"
            )
        object.__setattr__(self, "y", y)

    @property
    def y0(self) -> float:
        return self.y[0]


@dataclass(frozen=True, eq=False)
class MessageSpec:
    """Normalized complex amplitudes x of the state to teleport."""

    n: int
    x: np.ndarray

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("message.n must be >= 1")
        x = np.array(self.x, dtype=complex)
        if x.shape != (1 << self.n,):
            raise ValueError(
                f"message.x must have length 2^{self.n} = {1 << self.n}, got shape {x.shape}"
            )
        if not np.all(np.isfinite(x.view(float))):
            raise ValueError("message.x entries must be finite")
        if abs(float(np.vdot(x, x).real) - 1.0) > NORM_TOL:
            raise ValueError("message.x must satisfy sum(|x|^2) = 1 within 1e-10")
        x.setflags(write=False)
        object.__setattr__(self, "x", x)


def maximal_channel(n: int) -> ChannelSpec:
    """All amplitudes equal (the deterministic-success resource)."""
    v = 2.0 ** (-n / 2)
    return ChannelSpec(n, (v,) * (1 << n))


def random_channel(n: int, rng: np.random.Generator) -> ChannelSpec:
    """Random valid channel: positive draws, normalized, minimum moved to slot 0."""
    y = rng.uniform(0.1, 1.0, size=1 << n)
    y /= np.sqrt(np.sum(y * y))
    k = int(np.argmin(y))
    y[0], y[k] = y[k], y[0]
    return ChannelSpec(n, tuple(float(v) for v in y))


def random_message(n: int, rng: np.random.Generator) -> MessageSpec:
    """Random message: complex standard-normal draws, normalized."""
    x = rng.standard_normal(1 << n) + 1j * rng.standard_normal(1 << n)
    x /= np.sqrt(np.vdot(x, x).real)
    return MessageSpec(n, x)
