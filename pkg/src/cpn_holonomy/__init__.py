"""Holonomic quantum computation on the CP^n control manifold.

Numerical engine and CLI for: the adiabatic gauge connection over the chart,
path-ordered loop holonomies, compilation of target unitaries into loop
programs (including the explicit two-qubit constructions on n = 4), and two
independent dynamical verifiers (adiabatic Schrodinger transport and the
repeated-pulse kick scheme).
"""
from .chart import ControlPoint, HamiltonianFamily, eigenstate, frame_unitary, hamiltonian_at
from .connection import (ConnectionValue, DiscretizationError, connection_analytic,
                         connection_numeric)
from .dynamics import (KickPlan, Schedule, TimescaleReport, adiabatic_transport,
                       kick_code_block, kick_evolution, program_schedule,
                       propagate_frames, smoothstep, timescale_check)
from .gates import (AreaRangeError, GateProgram, GateStep, compile_u2_block,
                    compile_unitary, named_gate_matrix, primitive_holonomy,
                    realize_step_as_loop, single_qubit_block, two_qubit_gate)
from .holonomy import UnitarityError, UnitaryMatrix, holonomy
from .loops import (LoopPath, PlaneTag, circle_loop, concatenate, enclosed_area,
                    l_shape_loop, loop_from_plane_vertices, rectangle_loop, reverse)
from .multipartite import (CostReport, EmbeddedGate, Register, apply_circuit,
                           embed_local_gate, gate_count)

__all__ = [
    "ControlPoint", "HamiltonianFamily", "frame_unitary", "eigenstate", "hamiltonian_at",
    "ConnectionValue", "connection_analytic", "connection_numeric", "DiscretizationError",
    "LoopPath", "PlaneTag", "concatenate", "reverse", "enclosed_area",
    "rectangle_loop", "circle_loop", "l_shape_loop", "loop_from_plane_vertices",
    "UnitaryMatrix", "UnitarityError", "holonomy",
    "GateStep", "GateProgram", "AreaRangeError", "primitive_holonomy",
    "realize_step_as_loop", "compile_u2_block", "compile_unitary",
    "two_qubit_gate", "named_gate_matrix", "single_qubit_block",
    "Schedule", "KickPlan", "adiabatic_transport", "kick_evolution", "kick_code_block",
    "timescale_check", "TimescaleReport", "propagate_frames", "program_schedule",
    "smoothstep",
    "Register", "EmbeddedGate", "embed_local_gate", "apply_circuit", "gate_count",
    "CostReport",
]

__version__ = "0.1.0"
