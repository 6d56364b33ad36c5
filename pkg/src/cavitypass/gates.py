"""Protocol layer: asymptotic crossing maps and the gate stack built on them.

One crossing of the cavity acts on each excitation block as a fixed unitary
that exchanges the atomic excitations and mixes two of the branches by the
block's accumulated angle.  Chaining crossings with single-atom rotations
between them gives state transfer between the atoms, atom-cavity state
mapping, deterministic entanglement, a controlled phase gate and a C-NOT.

Every protocol runs in two modes.  "ideal" applies the asymptotic block
unitaries directly; "dynamics" integrates the Schrodinger equation across
the pulse pair, so the asymptotic picture's accuracy is itself measurable.
In both modes the coupling strength behind a pass is chosen by the angle
solver, which trades angle multiplicity (extra full turns) for adiabaticity.

Reports carry the leaked-photon probability alongside the outputs; nothing
is post-selected, the conditional (cavity-empty) state is reported next to
the unconditional one.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from .angle import DEFAULT_MIN_GSIGMA, solve_gsigma_for_angle, unit_integral
from .dynamics import evolve
from .model import (
    PulseConfig,
    SystemState,
    decompose_product_state,
    manifold_basis,
)

__all__ = [
    "HADAMARD",
    "FLIP_EXCITED",
    "QUARTER_EXCITED",
    "ScatteringMap",
    "CavityPass",
    "AtomRotation",
    "PassRecord",
    "GateReport",
    "EntangleResult",
    "scattering_map",
    "swap_factorization",
    "basis_product",
    "apply_protocol",
    "swap_gate",
    "phase_gate",
    "cnot_gate",
    "entangle_atoms",
    "map_atom_to_atom",
    "map_cavity_to_atom",
    "map_atom_to_cavity",
    "fidelity_scan",
    "concurrence",
    "concurrence_traced",
]

_R2 = math.sqrt(0.5)

# Single-atom rotations, matrix rows and columns ordered (g, e).
HADAMARD = np.array([[_R2, _R2], [_R2, -_R2]])
FLIP_EXCITED = np.diag([1.0, -1.0])
QUARTER_EXCITED = np.diag([1.0, 1.0j])

# Truth-table inputs in reporting order; labels name atom 1 then atom 2.
_TABLE_INPUTS = (
    ("e1e2", ("e", "e")),
    ("g1e2", ("g", "e")),
    ("e1g2", ("e", "g")),
    ("g1g2", ("g", "g")),
)


@dataclass(frozen=True, eq=False)
class ScatteringMap:
    """Asymptotic unitary of one crossing on one excitation block.

    n counts background photons under the doubly excited state; matrix is
    written over the manifold_basis(n + 2) order.
    """

    n: int
    phi: float
    matrix: np.ndarray


def scattering_map(n: int, phi: float) -> ScatteringMap:
    """Asymptotic crossing unitary for the block with n background photons.

    The doubly excited state rides through untouched; the trailing atom's
    excitation hops onto the leading atom with a sign flip regardless of
    phi; the leading atom's excitation and the photon-rich state mix by the
    angle.  n = -2 is the inert vacuum block.
    """
    c = math.cos(phi)
    s = math.sin(phi)
    if n >= 0:
        M = np.array([
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, c, -1j * s],
            [0.0, -1.0, 0.0, 0.0],
            [0.0, 0.0, -1j * s, c],
        ])
    elif n == -1:
        M = np.array([
            [0.0, c, -1j * s],
            [-1.0, 0.0, 0.0],
            [0.0, -1j * s, c],
        ])
    elif n == -2:
        M = np.eye(1, dtype=complex)
    else:
        raise ValueError("n must be >= -2")
    return ScatteringMap(n=n, phi=phi, matrix=M)


def swap_factorization(n: int, phi: float):
    """Split one crossing into a conditional rotation after an atomic swap.

    The phi = 0 crossing is a pure (signed) exchange of the atomic states;
    dividing it out, U(phi) U(0)^T, leaves the identity on the two branches
    that accumulate no angle and a genuine rotation by phi on the other
    two.  Returns (rotation, exchange) with U(phi) == rotation @ exchange.
    """
    U = scattering_map(n, phi).matrix
    S = scattering_map(n, 0.0).matrix
    return U @ S.conj().T, S


@dataclass(frozen=True)
class CavityPass:
    """One crossing of a cavity, requesting the vacuum-sector angle phi.

    phi is the angle of the single-excitation block, the one every
    vacuum-cavity protocol rides on; the solver picks the coupling strength
    g sigma realizing phi modulo full turns, and the other blocks then get
    their own angles from that same g sigma.  cavity indexes the photon
    slot the pass acts on in multi-cavity sequences.
    """

    phi: float
    cavity: int = 0
    delta: float = 1.0
    min_gsigma: float = DEFAULT_MIN_GSIGMA

    def __post_init__(self):
        if self.phi <= 0:
            raise ValueError("phi must be positive")
        if self.cavity < 0:
            raise ValueError("cavity index must be >= 0")
        if self.delta <= 0:
            raise ValueError("delta must be positive")


@dataclass(frozen=True, eq=False)
class AtomRotation:
    """Single-atom unitary between passes, matrix over (g, e)."""

    atom: int
    matrix: np.ndarray

    def __post_init__(self):
        if self.atom not in (1, 2):
            raise ValueError("atom must be 1 or 2")
        if np.asarray(self.matrix).shape != (2, 2):
            raise ValueError("rotation matrix must be 2x2")


@dataclass(frozen=True)
class PassRecord:
    """Solved parameters actually used for one pass."""

    cavity: int
    phi: float
    g_sigma: float
    multiplicity: int
    delta: float


def _state_json(state: SystemState) -> dict:
    out = {}
    for (s1, s2, ph), a in sorted(state.items()):
        key = s1 + s2 + "|" + ",".join(str(m) for m in ph)
        out[key] = [float(np.real(a)), float(np.imag(a))]
    return out


@dataclass
class GateReport:
    """Outcome of one protocol run (or one truth-table sweep).

    For truth-table reports final holds the output of the last tabulated
    input (g1g2), fidelity the worst input fidelity and leak the worst
    leaked-photon probability; per-input values sit in the dicts.  Scan
    reports populate scan with (sigma_error, delay_error, fidelity, leak)
    rows in grid order.
    """

    protocol: str
    mode: str
    passes: list
    final: SystemState
    fidelity: float | None = None
    leak: float | None = None
    norm: float | None = None
    truth_table: dict | None = None
    input_fidelities: dict | None = None
    input_leaks: dict | None = None
    scan: list | None = None

    def as_dict(self) -> dict:
        d = {
            "protocol": self.protocol,
            "mode": self.mode,
            "passes": [asdict(p) for p in self.passes],
            "fidelity": self.fidelity,
            "leak": self.leak,
            "norm": self.norm,
            "final": _state_json(self.final),
        }
        if self.truth_table is not None:
            d["truth_table"] = {
                label: _state_json(s) for label, s in self.truth_table.items()
            }
            d["input_fidelities"] = self.input_fidelities
            d["input_leaks"] = self.input_leaks
        if self.scan is not None:
            d["scan"] = {
                "columns": ["dσ_rel", "dΔt_rel", "fidelity", "P_leak"],
                "rows": [[float(v) for v in row] for row in self.scan],
            }
        return d

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(self.as_dict(), indent=indent, ensure_ascii=False)

    def scan_csv(self) -> str:
        """Scan rows as CSV text (header row; no parameter comment)."""
        if self.scan is None:
            raise ValueError("report carries no scan")
        lines = ["dσ_rel,dΔt_rel,fidelity,P_leak"]
        for x, y, fid, leak in self.scan:
            lines.append(f"{x:.10g},{y:.10g},{fid:.12f},{leak:.6e}")
        return "\n".join(lines) + "\n"


def basis_product(s1: str, s2: str, n_cavities: int = 1) -> SystemState:
    """Bare product state with both cavities empty."""
    if s1 not in ("g", "e") or s2 not in ("g", "e"):
        raise ValueError("atom states must be 'g' or 'e'")
    return SystemState({(s1, s2, (0,) * n_cavities): 1.0 + 0.0j})


def _apply_rotation(state: SystemState, rot: AtomRotation) -> SystemState:
    M = np.asarray(rot.matrix, dtype=complex)
    out = {}
    for (s1, s2, ph), amp in state.items():
        col = 0 if (s1 if rot.atom == 1 else s2) == "g" else 1
        for row, new in enumerate(("g", "e")):
            c = M[row, col]
            if c == 0:
                continue
            key = (new, s2, ph) if rot.atom == 1 else (s1, new, ph)
            out[key] = out.get(key, 0.0) + c * amp
    return SystemState(out)


def _apply_pass_with(state: SystemState, cavity: int, g_sigma: float,
                     delta: float, mode: str) -> SystemState:
    """Run one crossing of the given cavity at explicit pulse parameters.

    Amplitudes are grouped by conserved excitation number of the visited
    cavity (photons there plus excited atoms), with photons in the other
    cavities riding along as spectators; each group is one block unitary.
    """
    if mode not in ("ideal", "dynamics"):
        raise ValueError("mode must be 'ideal' or 'dynamics'")
    cfg = PulseConfig(g_sigma=g_sigma, delta=delta)
    groups = {}
    for (s1, s2, ph), amp in state.items():
        if cavity >= len(ph):
            raise ValueError(f"state has no cavity index {cavity}")
        N = ph[cavity] + (s1 == "e") + (s2 == "e")
        spect = ph[:cavity] + ph[cavity + 1:]
        groups.setdefault((N, spect), {})[(ph[cavity], s1, s2)] = amp
    out = {}

    def put(m, s1, s2, spect, a):
        if a == 0:
            return
        key = (s1, s2, spect[:cavity] + (m,) + spect[cavity:])
        out[key] = out.get(key, 0.0) + a

    for (N, spect), amps in groups.items():
        if N == 0:
            # nothing in this block couples to anything
            for (m, s1, s2), a in amps.items():
                put(m, s1, s2, spect, a)
            continue
        basis = manifold_basis(N)
        vec = np.zeros(basis.dim, dtype=complex)
        for label, a in amps.items():
            vec[basis.index(label)] = a
        if mode == "ideal":
            phi_n = 2.0 * g_sigma * unit_integral(N - 2, delta)
            vec = scattering_map(N - 2, phi_n).matrix @ vec
        else:
            vec = evolve(N - 2, vec, cfg, n_samples=2).final_state
        for i, (m, s1, s2) in enumerate(basis.labels):
            put(m, s1, s2, spect, vec[i])
    return SystemState(out)


def apply_protocol(initial: SystemState, steps, mode: str = "ideal",
                   protocol: str = "custom", target=None) -> GateReport:
    """Run a sequence of CavityPass and AtomRotation steps.

    Each pass solves its own coupling strength from the requested angle.
    When a target SystemState is given the report's fidelity is the squared
    overlap with it over the full state, cavity factors included.
    """
    if mode not in ("ideal", "dynamics"):
        raise ValueError("mode must be 'ideal' or 'dynamics'")
    state = initial.copy()
    records = []
    for step in steps:
        if isinstance(step, CavityPass):
            sol = solve_gsigma_for_angle(step.phi, -1, step.delta,
                                         step.min_gsigma)
            state = _apply_pass_with(state, step.cavity, sol.g_sigma,
                                     step.delta, mode)
            records.append(PassRecord(cavity=step.cavity, phi=step.phi,
                                      g_sigma=sol.g_sigma,
                                      multiplicity=sol.multiplicity,
                                      delta=step.delta))
        elif isinstance(step, AtomRotation):
            state = _apply_rotation(state, step)
        else:
            raise TypeError(f"unsupported protocol step {step!r}")
    fid = None
    if target is not None:
        fid = float(abs(state.overlap(target)) ** 2)
    return GateReport(protocol=protocol, mode=mode, passes=records,
                      final=state, fidelity=fid, leak=state.photon_leak(),
                      norm=state.norm())


def _table_report(protocol: str, steps, targets: dict, mode: str,
                  n_cavities: int) -> GateReport:
    """Run every computational-basis input and collect the truth table."""
    table, fids, leaks = {}, {}, {}
    last = None
    for label, (s1, s2) in _TABLE_INPUTS:
        initial = basis_product(s1, s2, n_cavities)
        last = apply_protocol(initial, steps, mode=mode, protocol=protocol,
                              target=targets[label])
        table[label] = last.final
        fids[label] = last.fidelity
        leaks[label] = last.leak
    return GateReport(protocol=protocol, mode=mode, passes=last.passes,
                      final=last.final, fidelity=min(fids.values()),
                      leak=max(leaks.values()), norm=last.norm,
                      truth_table=table, input_fidelities=fids,
                      input_leaks=leaks)


def _single(s1: str, s2: str, amp, n_cavities: int = 1) -> SystemState:
    return SystemState({(s1, s2, (0,) * n_cavities): complex(amp)})


def swap_gate(mode: str = "ideal", delta: float = 1.0,
              min_gsigma: float = DEFAULT_MIN_GSIGMA) -> GateReport:
    """Exchange the atomic states in one pass at phi = pi.

    Targets: e1e2 -> e1e2, g1e2 -> -e1g2, e1g2 -> -g1e2, g1g2 -> g1g2.
    The doubly excited and ground inputs ride through at any angle; the
    single-excitation pair needs phi = pi modulo full turns to close the
    photon channel.
    """
    steps = (CavityPass(phi=math.pi, delta=delta, min_gsigma=min_gsigma),)
    targets = {
        "e1e2": _single("e", "e", 1.0),
        "g1e2": _single("e", "g", -1.0),
        "e1g2": _single("g", "e", -1.0),
        "g1g2": _single("g", "g", 1.0),
    }
    return _table_report("swap", steps, targets, mode, n_cavities=1)


def _phase_gate_steps(delta: float, min_gsigma: float):
    # first cavity at 2 pi, second at pi: the double exchange cancels and
    # only e1g2 keeps a net minus sign
    return (CavityPass(phi=2.0 * math.pi, cavity=0, delta=delta,
                       min_gsigma=min_gsigma),
            CavityPass(phi=math.pi, cavity=1, delta=delta,
                       min_gsigma=min_gsigma))


def phase_gate(mode: str = "ideal", delta: float = 1.0,
               min_gsigma: float = DEFAULT_MIN_GSIGMA) -> GateReport:
    """Controlled phase flip from two sequential cavity crossings.

    Both atoms leave the first cavity before entering the second.  Targets:
    e1e2, g1e2 and g1g2 return to themselves, e1g2 picks up a minus sign.
    """
    steps = _phase_gate_steps(delta, min_gsigma)
    targets = {
        "e1e2": _single("e", "e", 1.0, 2),
        "g1e2": _single("g", "e", 1.0, 2),
        "e1g2": _single("e", "g", -1.0, 2),
        "g1g2": _single("g", "g", 1.0, 2),
    }
    return _table_report("phase", steps, targets, mode, n_cavities=2)


def cnot_gate(mode: str = "ideal", delta: float = 1.0,
              min_gsigma: float = DEFAULT_MIN_GSIGMA) -> GateReport:
    """C-NOT: the phase gate dressed by Hadamards on atom 1.

    Atom 2 controls: with atom 2 in g the state of atom 1 flips, with
    atom 2 in e it is left alone.  Targets: e1e2 -> e1e2, g1e2 -> g1e2,
    e1g2 -> g1g2, g1g2 -> e1g2.
    """
    h1 = AtomRotation(1, HADAMARD)
    steps = (h1,) + _phase_gate_steps(delta, min_gsigma) + (h1,)
    targets = {
        "e1e2": _single("e", "e", 1.0, 2),
        "g1e2": _single("g", "e", 1.0, 2),
        "e1g2": _single("g", "g", 1.0, 2),
        "g1g2": _single("e", "g", 1.0, 2),
    }
    return _table_report("cnot", steps, targets, mode, n_cavities=2)


@dataclass
class EntangleResult:
    """Entangling-pass outcome with its conditional (cavity-empty) state.

    conditional is the normalized zero-photon atomic 4-vector in the order
    (g1g2, g1e2, e1g2, e1e2); p_en the probability of finding the cavity
    empty; concurrence is evaluated on the conditional state (zero when no
    population is left there).
    """

    report: GateReport
    state: SystemState
    conditional: np.ndarray
    p_en: float
    concurrence: float


def entangle_atoms(alpha1: float, beta1: float, theta1: float,
                   alpha2: float, beta2: float, theta2: float,
                   phi: float, mode: str = "ideal", delta: float = 1.0,
                   min_gsigma: float = DEFAULT_MIN_GSIGMA) -> EntangleResult:
    """One pass plus a Hadamard on atom 1, from a product input.

    Each atom enters as alpha |g> + beta e^{i theta} |e>.  With balanced
    atoms and phi a full turn the output is the maximally entangled
    (e^{i theta1} |g1 e2> + |e1 g2>) / sqrt(2); the report's fidelity is
    measured against that target in every case.  The entangled fraction
    p_en = 1 - beta1^2 alpha2^2 sin^2(phi) in ideal mode: only the
    leading-atom excitation channel can deposit a photon.
    """
    initial = decompose_product_state((alpha1, beta1, theta1),
                                      (alpha2, beta2, theta2), [1.0])
    target = SystemState({
        ("g", "e", (0,)): _R2 * np.exp(1j * theta1),
        ("e", "g", (0,)): _R2 + 0.0j,
    })
    steps = (CavityPass(phi=phi, delta=delta, min_gsigma=min_gsigma),
             AtomRotation(1, HADAMARD))
    report = apply_protocol(initial, steps, mode=mode, protocol="entangle",
                            target=target)
    cond = report.final.zero_photon_vector()
    w = float(np.sum(np.abs(cond) ** 2))
    if w > 1e-24:
        cond = cond / math.sqrt(w)
        conc = concurrence(cond)
    else:
        cond = np.zeros(4, dtype=complex)
        conc = 0.0
    p_en = float(1.0 - report.leak)
    return EntangleResult(report=report, state=report.final, conditional=cond,
                          p_en=p_en, concurrence=conc)


def map_atom_to_atom(alpha: float, beta: float, theta: float = 0.0,
                     mode: str = "ideal", phi: float = math.pi,
                     delta: float = 1.0,
                     min_gsigma: float = DEFAULT_MIN_GSIGMA) -> GateReport:
    """Carry the trailing atom's qubit onto the leading atom.

    Input: atom 1 ground, atom 2 in alpha |g> + beta e^{i theta} |e>,
    cavity empty.  The transfer rides the angle-independent channel
    (trailing excitation hops with a sign), so any phi works; a flip of
    the excited leading atom then absorbs the sign.
    """
    initial = decompose_product_state((1.0, 0.0, 0.0),
                                      (alpha, beta, theta), [1.0])
    target = SystemState({
        ("g", "g", (0,)): complex(alpha),
        ("e", "g", (0,)): beta * np.exp(1j * theta),
    })
    steps = (CavityPass(phi=phi, delta=delta, min_gsigma=min_gsigma),
             AtomRotation(1, FLIP_EXCITED))
    return apply_protocol(initial, steps, mode=mode,
                          protocol="map_atom_to_atom", target=target)


def map_cavity_to_atom(c0, c1, mode: str = "ideal",
                       phi: float = 0.5 * math.pi, delta: float = 1.0,
                       min_gsigma: float = DEFAULT_MIN_GSIGMA) -> GateReport:
    """Carry a cavity qubit c0 |0> + c1 |1> onto the trailing atom.

    Both atoms enter ground.  A quarter-turn pass moves the photon onto the
    trailing atom with a -i factor, which the diag(1, i) rotation on that
    atom undoes.
    """
    initial = decompose_product_state((1.0, 0.0, 0.0), (1.0, 0.0, 0.0),
                                      [c0, c1])
    target = SystemState({
        ("g", "g", (0,)): complex(c0),
        ("g", "e", (0,)): complex(c1),
    })
    steps = (CavityPass(phi=phi, delta=delta, min_gsigma=min_gsigma),
             AtomRotation(2, QUARTER_EXCITED))
    return apply_protocol(initial, steps, mode=mode,
                          protocol="map_cavity_to_atom", target=target)


def map_atom_to_cavity(alpha: float, beta: float, theta: float = 0.0,
                       mode: str = "ideal", phi: float = 0.5 * math.pi,
                       delta: float = 1.0,
                       min_gsigma: float = DEFAULT_MIN_GSIGMA) -> GateReport:
    """Deposit the leading atom's qubit into the cavity field.

    Input: atom 1 in alpha |g> + beta e^{i theta} |e>, atom 2 ground,
    cavity empty.  The diag(1, i) rotation on atom 1 pre-compensates the -i
    the quarter-turn pass attaches to the deposited photon.
    """
    initial = decompose_product_state((alpha, beta, theta), (1.0, 0.0, 0.0),
                                      [1.0])
    target = SystemState({
        ("g", "g", (0,)): complex(alpha),
        ("g", "g", (1,)): beta * np.exp(1j * theta),
    })
    steps = (AtomRotation(1, QUARTER_EXCITED),
             CavityPass(phi=phi, delta=delta, min_gsigma=min_gsigma))
    return apply_protocol(initial, steps, mode=mode,
                          protocol="map_atom_to_cavity", target=target)


def fidelity_scan(protocol: str = "entangle",
                  sigma_errors=(-0.05, 0.0, 0.05),
                  delay_errors=(0.0, 0.05, 0.10),
                  mode: str = "dynamics", delta: float = 1.0,
                  theta1: float = 0.0,
                  min_gsigma: float = DEFAULT_MIN_GSIGMA) -> GateReport:
    """Fidelity of the maximal-entanglement pass under calibration errors.

    The pass is solved once at nominal parameters (full-turn angle at the
    given delta); each grid point then rescales the interaction time by
    (1 + x) and the delay by (1 + y).  Since the half-delay is the ratio of
    delay to interaction time, the effective parameters are
    g sigma (1 + x) and delta (1 + y) / (1 + x).  Fidelity is against the
    fixed maximally entangled target; rows are
    (sigma_error, delay_error, fidelity, leak) in grid order.
    """
    if protocol != "entangle":
        raise ValueError("only the entangle protocol is scanned")
    sol = solve_gsigma_for_angle(2.0 * math.pi, -1, delta, min_gsigma)
    initial = decompose_product_state((_R2, _R2, theta1), (_R2, _R2, 0.0),
                                      [1.0])
    target = SystemState({
        ("g", "e", (0,)): _R2 * np.exp(1j * theta1),
        ("e", "g", (0,)): _R2 + 0.0j,
    })
    h1 = AtomRotation(1, HADAMARD)
    rows = []
    state = initial
    for x in sigma_errors:
        gs = sol.g_sigma * (1.0 + x)
        for y in delay_errors:
            d_eff = delta * (1.0 + y) / (1.0 + x)
            state = _apply_pass_with(initial, 0, gs, d_eff, mode)
            state = _apply_rotation(state, h1)
            fid = float(abs(state.overlap(target)) ** 2)
            rows.append((float(x), float(y), fid, state.photon_leak()))
    record = PassRecord(cavity=0, phi=2.0 * math.pi, g_sigma=sol.g_sigma,
                        multiplicity=sol.multiplicity, delta=delta)
    return GateReport(protocol="entangle", mode=mode, passes=[record],
                      final=state, norm=state.norm(), scan=rows)


def concurrence(amps4) -> float:
    """Concurrence of a pure two-atom state (g1g2, g1e2, e1g2, e1e2).

    C = 2 |a_gg a_ee - a_ge a_eg|, scaled by the squared norm so an
    unnormalized vector gives the value of its normalized version.
    """
    a = np.asarray(amps4, dtype=complex)
    if a.shape != (4,):
        raise ValueError("expected four amplitudes")
    n2 = float(np.sum(np.abs(a) ** 2))
    if n2 == 0.0:
        raise ValueError("zero vector has no concurrence")
    return float(2.0 * abs(a[0] * a[3] - a[1] * a[2]) / n2)


def concurrence_traced(state: SystemState) -> float:
    """Concurrence of the two-atom state after tracing out the cavities.

    Standard spin-flip construction on the reduced density matrix: with
    R = rho (sy x sy) rho* (sy x sy) and l_i the decreasing square roots of
    R's eigenvalues, C = max(0, l1 - l2 - l3 - l4).
    """
    order = (("g", "g"), ("g", "e"), ("e", "g"), ("e", "e"))
    vecs = {}
    for (s1, s2, ph), a in state.items():
        v = vecs.setdefault(ph, np.zeros(4, dtype=complex))
        v[order.index((s1, s2))] += a
    if not vecs:
        raise ValueError("empty state has no concurrence")
    rho = sum(np.outer(v, v.conj()) for v in vecs.values())
    tr = float(np.trace(rho).real)
    if tr == 0.0:
        raise ValueError("zero state has no concurrence")
    rho = rho / tr
    sy = np.array([[0.0, -1j], [1j, 0.0]])
    yy = np.kron(sy, sy)
    R = rho @ yy @ rho.conj() @ yy
    ev = np.linalg.eigvals(R).real
    lam = np.sqrt(np.clip(ev, 0.0, None))
    lam[::-1].sort()
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))
