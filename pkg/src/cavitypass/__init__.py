"""Two delayed two-level atoms crossing a single quantized cavity mode.

The package follows one physical setting through all of its layers: a pair of
identical atoms traverses a Gaussian cavity mode one after the other, so each
atom sees a Gaussian coupling pulse and the two pulses overlap by an amount
set by the delay.  Total excitation number is conserved, which cuts the
problem into blocks of dimension at most four.

Layers, bottom up:

- model:    pulse configuration, bare bases, block Hamiltonians.
- spectrum: closed-form adiabatic energies and states, the inner-pair
            crossing at tau = 0, and the crossing-aware frame.
- dynamics: Schrodinger integration across the pulse pair, adiabaticity
            diagnostics, and the frozen-basis two-level reduction.
- angle:    the accumulated outer-branch phase (the conditional rotation
            angle), its asymptotics, and the multiplicity solver.
- gates:    asymptotic crossing maps and the protocol stack built on them,
            state transfer, entanglement, SWAP, phase gate, C-NOT.
- cli:      command-line front end with figure presets and CSV/JSON output.
"""

from .model import (
    PhysicalParams,
    PulseConfig,
    ManifoldBasis,
    SystemState,
    coupling_envelope,
    manifold_basis,
    build_hamiltonian,
    decompose_product_state,
)
from .spectrum import (
    AdiabaticFrame,
    DegeneracyData,
    DegeneratePointError,
    adiabatic_energies,
    adiabatic_states,
    boundary_states,
    characteristic_poly,
    crossing_frame,
    degeneracy_states,
)
from .dynamics import (
    EffectiveCrossingModel,
    EvolutionResult,
    adiabaticity_Q,
    default_tau0,
    dynamical_phase,
    effective_two_level_evolve,
    evolve,
    frozen_hamiltonian,
    nonadiabaticity_eps,
)
from .angle import (
    AngleSolution,
    angle_asymptotic,
    mixing_angle,
    solve_gsigma_for_angle,
    unit_integral,
)
from .gates import (
    AtomRotation,
    CavityPass,
    EntangleResult,
    GateReport,
    ScatteringMap,
    apply_protocol,
    cnot_gate,
    concurrence,
    concurrence_traced,
    entangle_atoms,
    fidelity_scan,
    map_atom_to_atom,
    map_atom_to_cavity,
    map_cavity_to_atom,
    phase_gate,
    scattering_map,
    swap_factorization,
    swap_gate,
)

__version__ = "0.1.0"
