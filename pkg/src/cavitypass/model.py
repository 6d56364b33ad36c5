"""Bare-state model of two atoms crossing a Gaussian cavity mode.

Atom 1 enters the cavity first and atom 2 follows after a fixed delay; both
cross the same mode profile at the same speed.  In the scaled time
tau = t / (2 sigma), with sigma the interaction time, the two couplings are

    eta_1(tau) = g exp(-(tau + delta)^2)
    eta_2(tau) = g exp(-(tau - delta)^2)

where delta is half the delay in scaled units.  The exchange interaction
conserves the total excitation number N (photons plus excited atoms), so the
Hamiltonian splits into blocks of dimension 1, 3 or 4.  Every Hamiltonian
built here is divided by g; the Schrodinger equation in tau then carries the
single dimensionless prefactor 2 g sigma (see dynamics.evolve), which is the
only way g, sigma and the delay enter the physics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "PhysicalParams",
    "PulseConfig",
    "ManifoldBasis",
    "SystemState",
    "coupling_envelope",
    "manifold_basis",
    "build_hamiltonian",
    "decompose_product_state",
]

_REL_TOL = 1e-12
ATOM_STATES = ("g", "e")


@dataclass(frozen=True)
class PhysicalParams:
    """Dimensional crossing parameters.

    g is the peak vacuum Rabi coupling, v the atomic velocity, x0 the mode
    waist and delta_t the launch delay between the atoms.  The interaction
    time is sigma = x0 / v; only the combinations g * sigma and
    delta_t / (2 sigma) reach the scaled dynamics.
    """

    g: float
    sigma: float
    v: float
    x0: float
    delta_t: float

    def __post_init__(self):
        if self.g <= 0 or self.sigma <= 0 or self.v <= 0 or self.x0 <= 0:
            raise ValueError("g, sigma, v and x0 must all be positive")
        if self.delta_t < 0:
            raise ValueError("delta_t must be non-negative")
        if abs(self.sigma - self.x0 / self.v) > _REL_TOL * self.sigma:
            raise ValueError("sigma must equal x0 / v")


@dataclass(frozen=True)
class PulseConfig:
    """Dimensionless pulse parameters: g_sigma = g * sigma, half-delay delta.

    An optional physical block records the dimensional origin of the two
    numbers; when present it must reproduce them to relative 1e-12.
    """

    g_sigma: float
    delta: float
    physical: PhysicalParams | None = None

    def __post_init__(self):
        if self.g_sigma <= 0:
            raise ValueError("g_sigma must be positive")
        if self.delta < 0:
            raise ValueError("delta must be non-negative")
        p = self.physical
        if p is not None:
            if abs(self.g_sigma - p.g * p.sigma) > _REL_TOL * self.g_sigma:
                raise ValueError("g_sigma inconsistent with the physical block")
            want = p.delta_t / (2.0 * p.sigma)
            if abs(self.delta - want) > _REL_TOL * max(self.delta, 1.0):
                raise ValueError("delta inconsistent with the physical block")

    @classmethod
    def from_physical(cls, g: float, v: float, x0: float, delta_t: float) -> "PulseConfig":
        sigma = x0 / v
        phys = PhysicalParams(g=g, sigma=sigma, v=v, x0=x0, delta_t=delta_t)
        return cls(g_sigma=g * sigma, delta=delta_t / (2.0 * sigma), physical=phys)


def coupling_envelope(atom_index: int, tau, cfg: PulseConfig):
    """Gaussian coupling of one atom, in units of the peak coupling g.

    Atom 1 is centred at tau = -delta (it arrives first), atom 2 at
    tau = +delta.  Accepts scalar or array tau.
    """
    t = np.asarray(tau, dtype=float)
    if atom_index == 1:
        out = np.exp(-((t + cfg.delta) ** 2))
    elif atom_index == 2:
        out = np.exp(-((t - cfg.delta) ** 2))
    else:
        raise ValueError("atom_index must be 1 or 2")
    return out if out.shape else float(out)


@dataclass(frozen=True)
class ManifoldBasis:
    """Ordered bare basis of the block with N total excitations.

    Labels are (photon_number, atom1, atom2) with atoms 'g' or 'e'.
    """

    N: int
    labels: tuple

    @property
    def dim(self) -> int:
        return len(self.labels)

    def index(self, label) -> int:
        return self.labels.index(label)


def manifold_basis(N: int) -> ManifoldBasis:
    """Bare basis of the N-excitation block, in the order used everywhere.

    N >= 2 keeps n = N - 2 background photons under the doubly excited pair:
    (|n,ee>, |n+1,ge>, |n+1,eg>, |n+2,gg>).  N = 1 has no doubly excited
    state: (|0,ge>, |0,eg>, |1,gg>).  N = 0 is the trivial vacuum.
    """
    if N < 0:
        raise ValueError("total excitation number must be >= 0")
    if N == 0:
        labels = ((0, "g", "g"),)
    elif N == 1:
        labels = ((0, "g", "e"), (0, "e", "g"), (1, "g", "g"))
    else:
        labels = (
            (N - 2, "e", "e"),
            (N - 1, "g", "e"),
            (N - 1, "e", "g"),
            (N, "g", "g"),
        )
    return ManifoldBasis(N=N, labels=labels)


def build_hamiltonian(N: int, tau: float, cfg: PulseConfig) -> np.ndarray:
    """Block Hamiltonian at scaled time tau, in units of g.

    Rotating-wave exchange couples states differing by one photon.  With
    n = N - 2 the four-state block reads

        |n,ee>   <-> |n+1,ge>   at eta_1 sqrt(n+1)
        |n,ee>   <-> |n+1,eg>   at eta_2 sqrt(n+1)
        |n+1,ge> <-> |n+2,gg>   at eta_2 sqrt(n+2)
        |n+1,eg> <-> |n+2,gg>   at eta_1 sqrt(n+2)

    and the N = 1 block couples both singly excited atoms to |1,gg>.
    """
    if N < 0:
        raise ValueError("total excitation number must be >= 0")
    e1 = coupling_envelope(1, tau, cfg)
    e2 = coupling_envelope(2, tau, cfg)
    if N == 0:
        return np.zeros((1, 1))
    if N == 1:
        return np.array([
            [0.0, 0.0, e2],
            [0.0, 0.0, e1],
            [e2, e1, 0.0],
        ])
    n = N - 2
    a = math.sqrt(n + 1.0)
    b = math.sqrt(n + 2.0)
    u, v, p, q = e1 * a, e2 * a, e2 * b, e1 * b
    return np.array([
        [0.0, u, v, 0.0],
        [u, 0.0, 0.0, p],
        [v, 0.0, 0.0, q],
        [0.0, p, q, 0.0],
    ])


@dataclass
class SystemState:
    """Sparse bare-state amplitudes keyed (atom1, atom2, photons).

    photons is a tuple with one entry per cavity, so the same container
    serves the single-cavity protocols and the two-cavity gate sequences.
    """

    amplitudes: dict

    @property
    def n_cavities(self) -> int:
        for key in self.amplitudes:
            return len(key[2])
        return 1

    def get(self, key) -> complex:
        return self.amplitudes.get(key, 0.0 + 0.0j)

    def items(self):
        return self.amplitudes.items()

    def copy(self) -> "SystemState":
        return SystemState(dict(self.amplitudes))

    def norm(self) -> float:
        return math.sqrt(sum(abs(a) ** 2 for a in self.amplitudes.values()))

    def overlap(self, other: "SystemState") -> complex:
        """<other|self> over the shared bare basis."""
        return sum(np.conj(other.get(k)) * a for k, a in self.amplitudes.items())

    def photon_leak(self) -> float:
        """Probability that at least one cavity keeps a photon."""
        return float(sum(
            abs(a) ** 2
            for (s1, s2, ph), a in self.amplitudes.items()
            if any(m > 0 for m in ph)
        ))

    def zero_photon_vector(self) -> np.ndarray:
        """Atomic amplitudes (gg, ge, eg, ee) on the all-cavities-empty branch."""
        empty = (0,) * self.n_cavities
        order = (("g", "g"), ("g", "e"), ("e", "g"), ("e", "e"))
        return np.array([self.get((s1, s2, empty)) for s1, s2 in order])

    def with_extra_cavity(self) -> "SystemState":
        """The same state with one more empty cavity appended."""
        return SystemState({
            (s1, s2, ph + (0,)): a for (s1, s2, ph), a in self.amplitudes.items()
        })


def decompose_product_state(atom1, atom2, cavity) -> SystemState:
    """Bare amplitudes of a product state atom1 x atom2 x cavity.

    Each atom is specified as (alpha, beta, theta), meaning
    alpha |g> + beta e^{i theta} |e> with real alpha, beta; the cavity is a
    list of Fock amplitudes starting at |0>.  Both factors must be normalised
    to 1e-9.
    """

    def _atom(spec, which):
        alpha, beta, theta = spec
        if abs(alpha * alpha + beta * beta - 1.0) > 1e-9:
            raise ValueError(f"atom {which} amplitudes are not normalised")
        return {"g": complex(alpha), "e": beta * np.exp(1j * theta)}

    a1 = _atom(atom1, 1)
    a2 = _atom(atom2, 2)
    cav = np.asarray(cavity, dtype=complex)
    if abs(float(np.sum(np.abs(cav) ** 2)) - 1.0) > 1e-9:
        raise ValueError("cavity amplitudes are not normalised")
    amps = {}
    for s1, c1 in a1.items():
        for s2, c2 in a2.items():
            for k, ck in enumerate(cav):
                amp = c1 * c2 * ck
                if amp != 0:
                    amps[(s1, s2, (k,))] = amp
    return SystemState(amps)
