"""Circuit intermediate representation and recovery-unitary construction.

A Netlist is an ordered gate program over 1-based qubits; ``ops`` are in
temporal order (ops[0] acts first). Four op kinds exist: Single (any 2x2
unitary on one qubit), Cnot, XLayer (parallel NOTs, kept first-class so
layer structure survives into structural tests), and MultiControlled
(a 2x2 unitary applied to the target iff every control reads 1).

The recovery unitary for a channel is the block-diagonal matrix
diag(I, u_1, ..., u_{2^n - 1}) built from compensator rotations
(``recovery_matrix``). ``recovery_netlist`` emits it as an alternating
sequence of X-layers and all-controls-on MultiControlled ops: iterating
block i from 2^n - 1 down to 1, an X-layer first moves the cumulative
control-flip mask to ~i so the MultiControlled fires exactly on pattern i,
and a final layer clears the mask. For n = 2 the blocks expand further to
CNOTs plus y-rotations (``recovery_cnot_netlist``).

Text serialization (one op per line, lossless round trip):

    qubits q5 q6 qa
    X q5 q6
    CNOT q5 qa
    RY -0.785398... qa
    U qa (re+imj) (re+imj) (re+imj) (re+imj)
    CU q5 q6 -> qa (re+imj) (re+imj) (re+imj) (re+imj)

The header names every qubit in order (names are arbitrary labels, by
default the particle numbers of the protocol narrative). Floats use
shortest round-trip decimal form; complex entries are row-major python
complex literals. Blank lines and ``#`` comments are ignored on parse.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .channel import ChannelSpec
from .gates import Gate2x2, compensator, multi_controlled_matrix, ry

MATRIX_TOL = 1e-12
EXPANSION_TOL = 1e-10


@dataclass(frozen=True)
class Single:
    gate: Gate2x2
    target: int


@dataclass(frozen=True)
class Cnot:
    control: int
    target: int


@dataclass(frozen=True)
class XLayer:
    targets: frozenset[int]

    def __post_init__(self):
        object.__setattr__(self, "targets", frozenset(int(q) for q in self.targets))
        if not self.targets:
            raise ValueError("XLayer must act on at least one qubit")


@dataclass(frozen=True)
class MultiControlled:
    controls: tuple[int, ...]
    gate: Gate2x2
    target: int

    def __post_init__(self):
        object.__setattr__(self, "controls", tuple(int(c) for c in self.controls))
        if len(set(self.controls)) != len(self.controls):
            raise ValueError(f"controls must be distinct, got {self.controls}")
        if self.target in self.controls:
            raise ValueError(f"target {self.target} overlaps a control")


GateOp = Single | Cnot | XLayer | MultiControlled


def _op_qubits(op: GateOp) -> tuple[int, ...]:
    if isinstance(op, Single):
        return (op.target,)
    if isinstance(op, Cnot):
        return (op.control, op.target)
    if isinstance(op, XLayer):
        return tuple(op.targets)
    return op.controls + (op.target,)


@dataclass
class Netlist:
    """Ordered gate program; ``labels`` are display names for serialization."""

    n_qubits: int
    ops: list[GateOp] = field(default_factory=list)
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError("n_qubits must be >= 1")
        if self.labels is not None:
            labels = tuple(str(s) for s in self.labels)
            if len(labels) != self.n_qubits:
                raise ValueError(
                    f"expected {self.n_qubits} labels, got {len(labels)}"
                )
            if len(set(labels)) != len(labels) or any(not s for s in labels):
                raise ValueError("labels must be unique and nonempty")
            object.__setattr__(self, "labels", labels)
        self.ops = list(self.ops)
        for op in self.ops:
            self._check(op)

    def _check(self, op: GateOp) -> None:
        qs = _op_qubits(op)
        if isinstance(op, Cnot) and op.control == op.target:
            raise ValueError("CNOT control and target must differ")
        for q in qs:
            if not 1 <= q <= self.n_qubits:
                raise ValueError(f"qubit {q} out of range 1..{self.n_qubits}")

    def append(self, op: GateOp) -> None:
        self._check(op)
        self.ops.append(op)

    def display_labels(self) -> tuple[str, ...]:
        if self.labels is not None:
            return self.labels
        return tuple(str(q) for q in range(1, self.n_qubits + 1))


# ---------------------------------------------------------------------------
# evaluation

def _bit(n_qubits: int, qubit: int) -> int:
    return 1 << (n_qubits - qubit)


def apply_netlist_raw(amps: np.ndarray, nl: Netlist) -> None:
    """Run every op, in temporal order, in place on a flat amplitude array."""
    n = nl.n_qubits
    for op in nl.ops:
        if isinstance(op, Single):
            kernels.apply_ctrl_2x2(amps, 0, _bit(n, op.target), *op.gate.entries())
        elif isinstance(op, Cnot):
            kernels.apply_ctrl_2x2(
                amps, _bit(n, op.control), _bit(n, op.target), 0.0, 1.0, 1.0, 0.0
            )
        elif isinstance(op, XLayer):
            xmask = 0
            for q in op.targets:
                xmask |= _bit(n, q)
            kernels.apply_xlayer(amps, xmask)
        else:
            cmask = 0
            for c in op.controls:
                cmask |= _bit(n, c)
            kernels.apply_ctrl_2x2(amps, cmask, _bit(n, op.target), *op.gate.entries())


def run_netlist(sv, nl: Netlist):
    """Apply a netlist to a StateVector, returning a new StateVector."""
    from .statevector import StateVector

    if sv.n_qubits != nl.n_qubits:
        raise ValueError(
            f"netlist is over {nl.n_qubits} qubits, state over {sv.n_qubits}"
        )
    amps = sv.amps.copy()
    apply_netlist_raw(amps, nl)
    return StateVector(sv.n_qubits, amps)


def op_matrix(op: GateOp, n_qubits: int) -> np.ndarray:
    """Full-space matrix of one op, built by explicit index rules.

    Independent of the gate-application kernels, so products of these
    matrices serve as a brute-force oracle for the kernel path.
    """
    dim = 1 << n_qubits
    if isinstance(op, XLayer):
        xmask = 0
        for q in op.targets:
            xmask |= _bit(n_qubits, q)
        m = np.zeros((dim, dim), dtype=complex)
        for i in range(dim):
            m[i ^ xmask, i] = 1.0
        return m
    if isinstance(op, Cnot):
        cmask = _bit(n_qubits, op.control)
        tmask = _bit(n_qubits, op.target)
        m = np.zeros((dim, dim), dtype=complex)
        for i in range(dim):
            m[i ^ (tmask if i & cmask else 0), i] = 1.0
        return m
    if isinstance(op, Single):
        cmask, tmask, g = 0, _bit(n_qubits, op.target), op.gate
    else:
        cmask = 0
        for c in op.controls:
            cmask |= _bit(n_qubits, c)
        tmask, g = _bit(n_qubits, op.target), op.gate
    g00, g01, g10, g11 = g.entries()
    m = np.eye(dim, dtype=complex)
    for i0 in range(dim):
        if (i0 & (cmask | tmask)) == cmask:
            i1 = i0 | tmask
            m[i0, i0] = g00
            m[i0, i1] = g01
            m[i1, i0] = g10
            m[i1, i1] = g11
    return m


def netlist_matrix(nl: Netlist) -> np.ndarray:
    """Ordered product of the ops' full-space matrices (ops[0] rightmost)."""
    dim = 1 << nl.n_qubits
    m = np.eye(dim, dtype=complex)
    for op in nl.ops:
        m = op_matrix(op, nl.n_qubits) @ m
    return m


# ---------------------------------------------------------------------------
# verification diagnostics

@dataclass(frozen=True)
class MatrixMismatch:
    """Where and how badly two matrices diverge."""

    max_abs_diff: float
    first_index: tuple[int, int]
    tol: float

    def __str__(self) -> str:
        return (
            f"max |diff| = {self.max_abs_diff:.3e} at entry {self.first_index} "
            f"(tolerance {self.tol:.1e})"
        )


class DecompositionError(Exception):
    """A constructed gate sequence failed verification against its oracle."""

    def __init__(self, context: str, mismatch: MatrixMismatch):
        super().__init__(f"{context}: {mismatch}")
        self.context = context
        self.mismatch = mismatch


def compare_matrices(actual: np.ndarray, expected: np.ndarray, tol: float) -> MatrixMismatch | None:
    """None if entrywise within tol, else a structured mismatch report."""
    diff = np.abs(actual - expected)
    worst = float(diff.max())
    if worst <= tol:
        return None
    bad = np.argwhere(diff > tol)
    return MatrixMismatch(worst, (int(bad[0][0]), int(bad[0][1])), tol)


# ---------------------------------------------------------------------------
# recovery unitary

def bob_particle_labels(n: int) -> tuple[str, ...]:
    """Display names for the recovery register: particles 2n+1..3n plus ancilla."""
    return tuple(str(2 * n + 1 + j) for j in range(n)) + ("a",)


def recovery_matrix(channel: ChannelSpec) -> np.ndarray:
    """Block-diagonal diag(I, u_1, ..., u_{2^n - 1}) over n+1 qubits.

    Block i carries compensator(y0, y[i]); block 0 is the identity. Applied
    to a channel-weighted state with a fresh ancilla, it concentrates weight
    y0 on the ancilla-0 subspace uniformly across blocks.
    """
    n = channel.n
    dim = 1 << (n + 1)
    m = np.eye(dim, dtype=complex)
    for i in range(1, 1 << n):
        m[2 * i : 2 * i + 2, 2 * i : 2 * i + 2] = compensator(channel.y0, channel.y[i]).matrix
    return m


def _mask_qubits(n: int, mask: int) -> frozenset[int]:
    return frozenset(j for j in range(1, n + 1) if mask & (1 << (n - j)))


def recovery_netlist(channel: ChannelSpec) -> Netlist:
    """The recovery unitary as alternating X-layers and controlled blocks.

    Blocks are applied from the top index down; before each one, an X-layer
    flips exactly the control qubits where the cumulative flip mask differs
    from the complement of the block index (no-op layers omitted), and a
    final layer restores the controls. Evaluates to ``recovery_matrix``.
    """
    n = channel.n
    controls = tuple(range(1, n + 1))
    target = n + 1
    nl = Netlist(n + 1, [], labels=bob_particle_labels(n))
    mask = 0
    full = (1 << n) - 1
    for i in range(full, 0, -1):
        want = full ^ i
        diff = mask ^ want
        if diff:
            nl.append(XLayer(_mask_qubits(n, diff)))
        nl.append(MultiControlled(controls, compensator(channel.y0, channel.y[i]), target))
        mask = want
    if mask:
        nl.append(XLayer(_mask_qubits(n, mask)))
    return nl


def compensator_angle(channel: ChannelSpec, i: int) -> float:
    """Rotation angle of block i: cos(theta/2) = y0/y[i]."""
    if not 1 <= i < (1 << channel.n):
        raise ValueError(f"block index {i} out of range 1..{(1 << channel.n) - 1}")
    return 2.0 * math.acos(min(1.0, channel.y0 / channel.y[i]))


def two_control_rotation_ops(theta: float, c1: int, c2: int, t: int) -> list[GateOp]:
    """A two-control y-rotation as CNOTs plus quarter-angle singles.

    Temporal order; the product telescopes so the rotation fires only when
    both controls read 1. Uses 8 CNOTs and 6 rotations (a = ry(theta/4),
    b = ry(-theta/4)): the controlled-half-rotation structure
    [c2-half, c1c2-CNOT pair, c1-half] written out gate by gate.
    """
    a = ry(theta / 4.0)
    b = ry(-theta / 4.0)
    return [
        Cnot(c2, t),
        Single(b, t),
        Cnot(c2, t),
        Single(a, t),
        Cnot(c1, c2),
        Cnot(c2, t),
        Single(a, t),
        Cnot(c2, t),
        Single(b, t),
        Cnot(c1, c2),
        Cnot(c1, t),
        Single(b, t),
        Cnot(c1, t),
        Single(a, t),
    ]


def reference_two_control_rotation_ops(theta: float, c1: int, c2: int, t: int) -> list[GateOp]:
    """Independent two-control y-rotation oracle (multiplexed form, 4 CNOTs).

    Alternating quarter-angle rotations and CNOTs from each control; sign
    cancellation leaves a net rotation exactly on the both-controls-on
    pattern. Used to cross-check ``two_control_rotation_ops``.
    """
    a = ry(theta / 4.0)
    b = ry(-theta / 4.0)
    return [
        Single(a, t),
        Cnot(c1, t),
        Single(b, t),
        Cnot(c2, t),
        Single(a, t),
        Cnot(c1, t),
        Single(b, t),
        Cnot(c2, t),
    ]


def two_control_expansion(channel: ChannelSpec, i: int, reference: bool = False) -> Netlist:
    """CNOT-level netlist for controlled block i of a two-qubit channel.

    Verified on construction against the explicit multi-controlled matrix;
    a construction slip raises DecompositionError with diagnostics rather
    than being patched over.
    """
    if channel.n != 2:
        raise ValueError("CNOT-level expansion is provided for n = 2 only")
    theta = compensator_angle(channel, i)
    builder = reference_two_control_rotation_ops if reference else two_control_rotation_ops
    nl = Netlist(3, builder(theta, 1, 2, 3), labels=bob_particle_labels(2))
    expected = multi_controlled_matrix(2, compensator(channel.y0, channel.y[i]))
    mismatch = compare_matrices(netlist_matrix(nl), expected, EXPANSION_TOL)
    if mismatch is not None:
        raise DecompositionError(
            f"two-control expansion of block {i} ({'reference' if reference else 'expanded'} form)",
            mismatch,
        )
    return nl


def recovery_cnot_netlist(channel: ChannelSpec, reference: bool = False) -> Netlist:
    """Full n=2 recovery unitary from CNOTs, y-rotations and X-layers.

    Temporal order: flip layer for block 1's pattern, block 1 expansion,
    flip layer, block 2 expansion, flip layer, block 3 expansion. Matrix-
    equal to ``recovery_matrix`` within 1e-10 (verified on construction).
    With ``reference=True`` the independent 4-CNOT-per-block oracle form is
    emitted instead of the default 8-CNOT form.
    """
    if channel.n != 2:
        raise ValueError("CNOT-level expansion is provided for n = 2 only")
    builder = reference_two_control_rotation_ops if reference else two_control_rotation_ops
    ops: list[GateOp] = []
    ops.append(XLayer(frozenset({1})))
    ops.extend(builder(compensator_angle(channel, 1), 1, 2, 3))
    ops.append(XLayer(frozenset({1, 2})))
    ops.extend(builder(compensator_angle(channel, 2), 1, 2, 3))
    ops.append(XLayer(frozenset({2})))
    ops.extend(builder(compensator_angle(channel, 3), 1, 2, 3))
    nl = Netlist(3, ops, labels=bob_particle_labels(2))
    mismatch = compare_matrices(netlist_matrix(nl), recovery_matrix(channel), EXPANSION_TOL)
    if mismatch is not None:
        raise DecompositionError(
            f"CNOT-level recovery expansion ({'reference' if reference else 'expanded'} form)",
            mismatch,
        )
    return nl


# ---------------------------------------------------------------------------
# text serialization

def _fmt_complex(z: complex) -> str:
    return repr(complex(z))


def netlist_to_text(nl: Netlist) -> str:
    """Serialize to the line-oriented text format (see module docstring)."""
    labels = nl.display_labels()

    def name(q: int) -> str:
        return "q" + labels[q - 1]

    lines = ["qubits " + " ".join("q" + s for s in labels)]
    for op in nl.ops:
        if isinstance(op, XLayer):
            lines.append("X " + " ".join(name(q) for q in sorted(op.targets)))
        elif isinstance(op, Cnot):
            lines.append(f"CNOT {name(op.control)} {name(op.target)}")
        elif isinstance(op, Single):
            if op.gate.angle is not None:
                lines.append(f"RY {op.gate.angle!r} {name(op.target)}")
            else:
                entries = " ".join(_fmt_complex(z) for z in op.gate.entries())
                lines.append(f"U {name(op.target)} {entries}")
        else:
            entries = " ".join(_fmt_complex(z) for z in op.gate.entries())
            head = "CU " + " ".join(name(c) for c in op.controls) if op.controls else "CU"
            lines.append(f"{head} -> {name(op.target)} {entries}")
    return "\n".join(lines) + "\n"


class NetlistParseError(ValueError):
    """Raised with a line number when the text form is malformed."""


def _parse_gate_entries(tokens: list[str], lineno: int) -> Gate2x2:
    if len(tokens) != 4:
        raise NetlistParseError(f"line {lineno}: expected 4 matrix entries, got {len(tokens)}")
    try:
        vals = [complex(t) for t in tokens]
    except ValueError as exc:
        raise NetlistParseError(f"line {lineno}: bad complex literal ({exc})") from None
    try:
        return Gate2x2(np.array(vals, dtype=complex).reshape(2, 2))
    except ValueError as exc:
        raise NetlistParseError(f"line {lineno}: {exc}") from None


def netlist_from_text(text: str) -> Netlist:
    """Parse the text format back into a Netlist (inverse of netlist_to_text)."""
    lines = text.splitlines()
    header_seen = False
    labels: tuple[str, ...] = ()
    index: dict[str, int] = {}
    ops: list[GateOp] = []

    def qubit(tok: str, lineno: int) -> int:
        if tok not in index:
            raise NetlistParseError(f"line {lineno}: unknown qubit {tok!r}")
        return index[tok]

    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        kind = toks[0]
        if not header_seen:
            if kind != "qubits":
                raise NetlistParseError(f"line {lineno}: expected 'qubits' header first")
            if len(toks) < 2 or any(not t.startswith("q") or len(t) < 2 for t in toks[1:]):
                raise NetlistParseError(f"line {lineno}: qubit names must look like q<label>")
            labels = tuple(t[1:] for t in toks[1:])
            index = {t: i + 1 for i, t in enumerate(toks[1:])}
            if len(index) != len(labels):
                raise NetlistParseError(f"line {lineno}: duplicate qubit names")
            header_seen = True
            continue
        if kind == "X":
            if len(toks) < 2:
                raise NetlistParseError(f"line {lineno}: X needs at least one qubit")
            ops.append(XLayer(frozenset(qubit(t, lineno) for t in toks[1:])))
        elif kind == "CNOT":
            if len(toks) != 3:
                raise NetlistParseError(f"line {lineno}: CNOT needs control and target")
            ops.append(Cnot(qubit(toks[1], lineno), qubit(toks[2], lineno)))
        elif kind == "RY":
            if len(toks) != 3:
                raise NetlistParseError(f"line {lineno}: RY needs an angle and a qubit")
            try:
                theta = float(toks[1])
            except ValueError:
                raise NetlistParseError(f"line {lineno}: bad angle {toks[1]!r}") from None
            ops.append(Single(ry(theta), qubit(toks[2], lineno)))
        elif kind == "U":
            if len(toks) != 6:
                raise NetlistParseError(f"line {lineno}: U needs a qubit and 4 entries")
            ops.append(Single(_parse_gate_entries(toks[2:], lineno), qubit(toks[1], lineno)))
        elif kind == "CU":
            if "->" not in toks:
                raise NetlistParseError(f"line {lineno}: CU needs '->' before the target")
            arrow = toks.index("->")
            ctrl_toks, rest = toks[1:arrow], toks[arrow + 1 :]
            if len(rest) != 5:
                raise NetlistParseError(f"line {lineno}: CU needs a target and 4 entries")
            ops.append(
                MultiControlled(
                    tuple(qubit(t, lineno) for t in ctrl_toks),
                    _parse_gate_entries(rest[1:], lineno),
                    qubit(rest[0], lineno),
                )
            )
        else:
            raise NetlistParseError(f"line {lineno}: unknown op {kind!r}")
    if not header_seen:
        raise NetlistParseError("missing 'qubits' header")
    return Netlist(len(labels), ops, labels=labels)
