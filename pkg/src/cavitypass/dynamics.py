"""Schrodinger evolution across the pulse pair and adiabaticity diagnostics.

With Hamiltonians in units of g the scaled-time equation is

    i d/dtau |psi> = 2 g sigma  H'(tau) |psi>

so the whole parameter space collapses onto (g sigma, delta, n).  The
couplings fall below 1e-15 beyond |tau| = delta + 6, which fixes the default
integration span.

Diagnostics follow the adiabatic-theorem bookkeeping: the Q parameter
compares the frame rotation rate against the squared gap, and the projection
defect eps measures how much population leaves an adiabatic branch along a
trajectory.  The frozen-basis reduction near the crossing is exact about the
structure of the projected Hamiltonian and keeps only the inner pair, whose
members acquire opposite phases and exchange no population.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad, solve_ivp

from .model import PulseConfig, build_hamiltonian, coupling_envelope
from .spectrum import (
    DegeneratePointError,
    adiabatic_energies,
    adiabatic_states,
    crossing_frame,
    degeneracy_states,
    pair_magnitudes,
)

__all__ = [
    "EvolutionResult",
    "EffectiveCrossingModel",
    "EffectiveCrossingResult",
    "branch_index",
    "default_tau0",
    "evolve",
    "dynamical_phase",
    "hamiltonian_rate",
    "adiabaticity_Q",
    "nonadiabaticity_eps",
    "frozen_hamiltonian",
    "effective_two_level_evolve",
]

BRANCHES = ("1'", "2'", "3", "4")
_QUAD_OPTS = dict(epsabs=1e-13, epsrel=1e-13, limit=400)


def branch_index(n: int, branch: str) -> int:
    """Column of a branch label in the frame matrices for block n.

    Four-state blocks order (1, 2, 3, 4) with the crossing labels 1', 2'
    sharing the inner columns.  In the three-state block the inner labels
    all mean the single dark state and the outer pair shifts down a slot.
    """
    if branch not in ("1'", "2'", "1", "2", "3", "4"):
        raise ValueError(f"unknown branch label {branch!r}")
    if n == -1:
        return {"1'": 0, "2'": 0, "1": 0, "2": 0, "3": 1, "4": 2}[branch]
    return {"1'": 0, "2'": 1, "1": 0, "2": 1, "3": 2, "4": 3}[branch]


def default_tau0(cfg: PulseConfig) -> float:
    """Half-span after which both couplings are numerically zero."""
    return cfg.delta + 6.0


@dataclass
class EvolutionResult:
    """Trajectory of one excitation block across the cavity.

    states holds the bare amplitudes column-per-sample; norm_drift is the
    worst deviation of the state norm from one over the returned samples.
    """

    n: int
    cfg: PulseConfig
    tau: np.ndarray
    states: np.ndarray
    final_state: np.ndarray
    norm_drift: float


def evolve(n: int, initial, cfg: PulseConfig, tau_span=None,
           n_samples: int = 2001, rtol: float = 1e-10,
           atol: float = 1e-10) -> EvolutionResult:
    """Integrate the block Schrodinger equation with DOP853.

    initial is a bare-basis vector for the block with n background photons
    (dimension 4 for n >= 0, 3 for n = -1).  tau_span defaults to the full
    crossing (-tau0, tau0).
    """
    if tau_span is None:
        t0 = default_tau0(cfg)
        tau_span = (-t0, t0)
    N = n + 2
    two_gs = 2.0 * cfg.g_sigma

    def rhs(t, y):
        return -1j * two_gs * (build_hamiltonian(N, t, cfg) @ y)

    y0 = np.asarray(initial, dtype=complex)
    t_eval = np.linspace(tau_span[0], tau_span[1], n_samples)
    sol = solve_ivp(rhs, tau_span, y0, method="DOP853",
                    rtol=rtol, atol=atol, t_eval=t_eval)
    if not sol.success:
        raise RuntimeError(f"integration failed: {sol.message}")
    norms = np.sqrt(np.sum(np.abs(sol.y) ** 2, axis=0))
    return EvolutionResult(
        n=n, cfg=cfg, tau=sol.t, states=sol.y, final_state=sol.y[:, -1],
        norm_drift=float(np.max(np.abs(norms - 1.0))))


def dynamical_phase(n: int, branch: str, cfg: PulseConfig, tau_span=None) -> float:
    """Accumulated phase 2 g sigma * integral of one branch energy.

    Branches carry the crossing labels: "1'" and "2'" are the signed inner
    pair (energy +-sign(tau) E_minus), "3" and "4" the outer pair -+E_plus.
    Over a symmetric span the inner phases vanish identically, the signed
    halves cancelling across the crossing; the n = -1 block maps "1'", "2'"
    onto its zero-energy dark state.
    """
    if branch not in BRANCHES:
        raise ValueError(f"branch must be one of {BRANCHES}")
    if tau_span is None:
        t0 = default_tau0(cfg)
        tau_span = (-t0, t0)
    delta = cfg.delta

    def energy(t):
        em, ep = pair_magnitudes(n, t, delta)
        if branch == "3":
            return -ep
        if branch == "4":
            return ep
        signed = math.copysign(em, t) if t != 0.0 else 0.0
        return signed if branch == "1'" else -signed

    a, b = tau_span
    pts = sorted({x for x in (-delta, 0.0, delta) if a < x < b})
    val = quad(energy, a, b, points=pts or None, **_QUAD_OPTS)[0]
    return 2.0 * cfg.g_sigma * val


def hamiltonian_rate(n: int, tau: float, cfg: PulseConfig) -> np.ndarray:
    """Analytic d/dtau of the block Hamiltonian, units of g."""
    e1 = coupling_envelope(1, tau, cfg)
    e2 = coupling_envelope(2, tau, cfg)
    d1 = -2.0 * (tau + cfg.delta) * e1
    d2 = -2.0 * (tau - cfg.delta) * e2
    if n == -1:
        return np.array([
            [0.0, 0.0, d2],
            [0.0, 0.0, d1],
            [d2, d1, 0.0],
        ])
    if n < -1:
        raise ValueError("n must be >= -1")
    a = math.sqrt(n + 1.0)
    b = math.sqrt(n + 2.0)
    return np.array([
        [0.0, d1 * a, d2 * a, 0.0],
        [d1 * a, 0.0, 0.0, d2 * b],
        [d2 * a, 0.0, 0.0, d1 * b],
        [0.0, d2 * b, d1 * b, 0.0],
    ])


def adiabaticity_Q(n: int, i: int, j: int, tau: float, cfg: PulseConfig,
                   method: str = "analytic", dtau: float = 0.01) -> float:
    """Frame-rotation rate over squared gap for raw branches i, j (1-based).

    Q = |<psi_i| dH/dtau |psi_j>| / (2 (E_i - E_j)^2).  The analytic method
    differentiates the couplings exactly; "fd" uses a centred difference of
    the Hamiltonian with step dtau as an independent check.  The (1, 2) pair
    loses meaning near tau = 0 where its gap closes; probe it away from the
    crossing.
    """
    M = adiabatic_states(n, tau, cfg)
    E = adiabatic_energies(n, tau, cfg)
    if method == "analytic":
        dH = hamiltonian_rate(n, tau, cfg)
    elif method == "fd":
        N = n + 2
        dH = (build_hamiltonian(N, tau + dtau, cfg)
              - build_hamiltonian(N, tau - dtau, cfg)) / (2.0 * dtau)
    else:
        raise ValueError("method must be 'analytic' or 'fd'")
    num = abs(M[:, i - 1] @ dH @ M[:, j - 1])
    gap = E[i - 1] - E[j - 1]
    return float(num / (2.0 * gap * gap))


def nonadiabaticity_eps(result: EvolutionResult, branch: str) -> np.ndarray:
    """Projection defect |1 - |<branch state|psi>|^2| along a trajectory.

    branch "1'"/"2'" track the crossing frame; "1".."4" the raw ordering,
    with the raw inner labels falling back to their tau -> 0- limits at the
    single touching sample.
    """
    if branch not in ("1'", "2'", "1", "2", "3", "4"):
        raise ValueError(f"unknown branch label {branch!r}")
    crossing = branch in ("1'", "2'")
    idx = branch_index(result.n, branch)
    out = np.empty(result.tau.size)
    for k, t in enumerate(result.tau):
        if crossing:
            M = crossing_frame(result.n, t, result.cfg).states
        else:
            try:
                M = adiabatic_states(result.n, t, result.cfg)
            except DegeneratePointError:
                M = degeneracy_states(result.n, "0-").states
        ref = M[:, idx]
        out[k] = abs(1.0 - abs(np.vdot(ref, result.states[:, k])) ** 2)
    return out


@dataclass(frozen=True)
class EffectiveCrossingModel:
    """Scales of the frozen-basis Hamiltonian around the crossing.

    omega1 = sqrt(K / (6+4n)) / 2 sets the inner-pair splitting and
    omega2 = sqrt(6+4n) / 2 the outer one; their product is sqrt(K) / 4 for
    every n, with K = (n+1)(n+2).
    """

    n: int

    @property
    def omega1(self) -> float:
        K = (self.n + 1.0) * (self.n + 2.0)
        return 0.5 * math.sqrt(K / (6.0 + 4.0 * self.n))

    @property
    def omega2(self) -> float:
        return 0.5 * math.sqrt(6.0 + 4.0 * self.n)


@dataclass
class EffectiveCrossingResult:
    """Reduced inner-pair amplitudes across the crossing window."""

    model: EffectiveCrossingModel
    tau: np.ndarray
    c1: np.ndarray
    c2: np.ndarray
    window_exceeded: bool


def frozen_hamiltonian(n: int, tau: float, cfg: PulseConfig) -> np.ndarray:
    """Exact block Hamiltonian projected onto the tau = 0 frozen basis.

    With Omega_pm = eta_1 +- eta_2 the projection is, in units of g,

        diagonal   (-4 w1 Omega_-, +4 w1 Omega_-, -w2 Omega_+, +w2 Omega_+)
        couplings  (1,3) = (1,4) = -Omega_- / (4 w2)
                   (2,3) = (2,4) = +Omega_- / (4 w2)

    with no matrix element inside either pair; w1, w2 as in
    EffectiveCrossingModel.  Computed by direct projection, so it is exact
    at every tau; the structure above is what the projection evaluates to.
    """
    B = degeneracy_states(n, "0-").states
    H = build_hamiltonian(n + 2, tau, cfg)
    return B.T @ H @ B


def effective_two_level_evolve(n: int, cfg: PulseConfig, tau_span=None,
                               initial=(1.0, 0.0),
                               n_samples: int = 501) -> EffectiveCrossingResult:
    """Phase-only evolution of the frozen inner pair through the crossing.

    Near tau = 0 the inner pair decouples from the outer one to leading
    order and its members accumulate opposite phases

        Theta(tau) = 8 g sigma w1 * integral of (eta_1 - eta_2) dtau'

    with no population exchange, so c1 -> c1 e^{+i Theta} and
    c2 -> c2 e^{-i Theta}.  The reduction only tracks the true adiabatic
    frame while |tau| stays within about a quarter of the delay; a span
    reaching beyond that trips the window flag and a warning.
    """
    if n < 0:
        raise ValueError("the inner-pair reduction needs n >= 0")
    model = EffectiveCrossingModel(n)
    window = 0.25 * cfg.delta
    if tau_span is None:
        tau_span = (-window, window)
    exceeded = max(abs(tau_span[0]), abs(tau_span[1])) > window * (1.0 + 1e-9)
    if exceeded:
        warnings.warn(
            "tau span reaches beyond the quarter-delay validity window of "
            "the frozen-pair reduction", stacklevel=2)
    taus = np.linspace(tau_span[0], tau_span[1], n_samples)

    def gap(t):
        return coupling_envelope(1, t, cfg) - coupling_envelope(2, t, cfg)

    theta = np.empty(taus.size)
    theta[0] = 0.0
    for k in range(1, taus.size):
        theta[k] = theta[k - 1] + quad(gap, taus[k - 1], taus[k], **_QUAD_OPTS)[0]
    theta *= 8.0 * cfg.g_sigma * model.omega1
    c1 = complex(initial[0]) * np.exp(1j * theta)
    c2 = complex(initial[1]) * np.exp(-1j * theta)
    return EffectiveCrossingResult(model=model, tau=taus, c1=c1, c2=c2,
                                   window_exceeded=exceeded)
