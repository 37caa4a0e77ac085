"""Probabilistic teleportation of general n-qubit states through a
nonmaximally entangled 2n-qubit channel: state-vector simulation, the
block-diagonal recovery unitary and its gate-level decompositions, the
classically controlled correction protocol, and an experiment harness.
"""

from .channel import ChannelSpec, MessageSpec, maximal_channel, random_channel, random_message
from .gates import Gate2x2, compensator, is_unitary, multi_controlled_matrix, ry, standard_gate
from .kernels import backend_name
from .netlist import (
    Cnot,
    DecompositionError,
    MultiControlled,
    Netlist,
    Single,
    XLayer,
    netlist_from_text,
    netlist_matrix,
    netlist_to_text,
    recovery_cnot_netlist,
    recovery_matrix,
    recovery_netlist,
    run_netlist,
    two_control_expansion,
)
from .protocol import (
    CorrectionPlan,
    Outcome,
    OutcomeRecord,
    alice_encode,
    apply_correction,
    bob_recover,
    correction_plan,
    enumerate_branches,
    enumerate_branches_coherent,
    message_state,
    prepare_channel_circuit,
    prepare_channel_direct,
    sample_shot,
    sample_shots,
    success_probability,
)
from .statevector import (
    StateVector,
    apply_cnot,
    apply_multi_controlled,
    apply_single,
    apply_x_layer,
    basis_state,
    fidelity,
    from_amplitudes,
    measure_qubit,
    split_on_qubit,
    tensor,
)

__version__ = "0.1.0"

__all__ = [
    "ChannelSpec",
    "CorrectionPlan",
    "Cnot",
    "DecompositionError",
    "Gate2x2",
    "MessageSpec",
    "MultiControlled",
    "Netlist",
    "Outcome",
    "OutcomeRecord",
    "Single",
    "StateVector",
    "XLayer",
    "alice_encode",
    "apply_cnot",
    "apply_correction",
    "apply_multi_controlled",
    "apply_single",
    "apply_x_layer",
    "backend_name",
    "basis_state",
    "bob_recover",
    "compensator",
    "correction_plan",
    "enumerate_branches",
    "enumerate_branches_coherent",
    "fidelity",
    "from_amplitudes",
    "is_unitary",
    "maximal_channel",
    "measure_qubit",
    "message_state",
    "multi_controlled_matrix",
    "netlist_from_text",
    "netlist_matrix",
    "netlist_to_text",
    "prepare_channel_circuit",
    "prepare_channel_direct",
    "random_channel",
    "random_message",
    "recovery_cnot_netlist",
    "recovery_matrix",
    "recovery_netlist",
    "run_netlist",
    "ry",
    "sample_shot",
    "sample_shots",
    "split_on_qubit",
    "standard_gate",
    "success_probability",
    "tensor",
    "two_control_expansion",
]
