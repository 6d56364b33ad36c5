"""Closed-form eigensystem of the crossing blocks.

The four-state blocks (n >= 0 background photons) have eigenvalues in two
symmetric pairs +-E_minus, +-E_plus.  Writing c = cosh(4 tau delta),
s = sinh(4 tau delta), K = (n+1)(n+2) and G = exp(-2 (tau^2 + delta^2)),

    X = sqrt(c^2 + 4 K),   Y = (3 + 2 n) c + X,
    E_plus  = sqrt(G Y),   E_minus = 2 sqrt(K G / Y) |s|.

This arrangement keeps every hyperbolic factor multiplied by the Gaussian
that tames it, so energies and eigenvector coefficients stay finite and
accurate arbitrarily far into the pulse tails, where the textbook radical
form overflows.  The eigenvector coefficients come from rows of (H - E) in
combinations whose numerators are sign-definite, so no 0/0 limits appear
away from the genuine degeneracies.

Two degeneracies are guarded.  The inner pair touches zero at tau = 0 (for
any delta > 0), where the pair basis is not unique: adiabatic_states raises
DegeneratePointError there and degeneracy_states provides the one-sided
limits.  For delta = 0 the two couplings are equal at every tau and the
inner pair is zero everywhere, so the same error covers the whole axis.

The three-state block (n = -1) has a dark state at zero energy and a bright
pair at +-sqrt(eta_1^2 + eta_2^2); it never crosses and is handled on a
dedicated path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import PulseConfig, coupling_envelope

__all__ = [
    "DegeneratePointError",
    "DegeneracyData",
    "AdiabaticFrame",
    "pair_magnitudes",
    "characteristic_poly",
    "adiabatic_energies",
    "adiabatic_states",
    "degeneracy_states",
    "boundary_states",
    "crossing_frame",
]


class DegeneratePointError(ValueError):
    """Raised where a degenerate eigenpair has no unique instantaneous basis."""


def _envelopes(tau, cfg):
    return coupling_envelope(1, tau, cfg), coupling_envelope(2, tau, cfg)


def pair_magnitudes(n: int, tau: float, delta: float):
    """Magnitudes (E_minus, E_plus) of the symmetric eigenvalue pairs.

    Low-level form taking delta directly; it sits inside quadrature loops.
    For n = -1 the "minus" slot is the dark state at zero energy.
    """
    if n == -1:
        e1 = math.exp(-((tau + delta) ** 2))
        e2 = math.exp(-((tau - delta) ** 2))
        return 0.0, math.sqrt(e1 * e1 + e2 * e2)
    K = (n + 1.0) * (n + 2.0)
    L = 4.0 * abs(tau) * delta
    if L > 60.0:
        # cosh saturates: c ~ e^L / 2, X ~ c, Y ~ (4 + 2n) c, and the
        # Gaussian envelope collapses both pairs onto single-pulse bumps
        #   E_plus  -> sqrt(n+2) exp(-(|tau| - delta)^2)
        #   E_minus -> sqrt(n+1) exp(-(|tau| - delta)^2)
        # with relative error O(e^{-2L}); c^2 would overflow past L ~ 350.
        bump = math.exp(-((abs(tau) - delta) ** 2))
        return math.sqrt(n + 1.0) * bump, math.sqrt(n + 2.0) * bump
    G = math.exp(-2.0 * (tau * tau + delta * delta))
    c = math.cosh(L)
    s = math.sinh(L)
    X = math.sqrt(c * c + 4.0 * K)
    Y = (3.0 + 2.0 * n) * c + X
    Ep = math.sqrt(G * Y)
    Em = 2.0 * math.sqrt(K * G / Y) * abs(s)
    return Em, Ep


def characteristic_poly(n: int, tau: float, cfg: PulseConfig) -> np.ndarray:
    """Coefficients of det(E - H), highest power first (np.polyval order).

    n >= 0 gives the quartic E^4 - (3+2n) S E^2 + K D^2 with
    S = eta_1^2 + eta_2^2 and D = eta_1^2 - eta_2^2; n = -1 the cubic
    E^3 - S E; n = -2 the trivial linear block.
    """
    if n < -2:
        raise ValueError("n must be >= -2")
    if n == -2:
        return np.array([1.0, 0.0])
    e1, e2 = _envelopes(tau, cfg)
    S = e1 * e1 + e2 * e2
    if n == -1:
        return np.array([1.0, 0.0, -S, 0.0])
    K = (n + 1.0) * (n + 2.0)
    D = e1 * e1 - e2 * e2
    return np.array([1.0, 0.0, -(3.0 + 2.0 * n) * S, 0.0, K * D * D])


def adiabatic_energies(n: int, tau: float, cfg: PulseConfig) -> np.ndarray:
    """Instantaneous eigenvalues, units of g.

    n >= 0: (-E_minus, +E_minus, -E_plus, +E_plus), so branches 1, 2 are the
    inner pair that touches at tau = 0 and 3, 4 the outer pair.
    n = -1: (0, -E_plus, +E_plus), dark state first.
    """
    if n < -1:
        raise ValueError("n must be >= -1")
    Em, Ep = pair_magnitudes(n, tau, cfg.delta)
    if n == -1:
        return np.array([0.0, -Ep, Ep])
    return np.array([-Em, Em, -Ep, Ep])


def adiabatic_states(n: int, tau: float, cfg: PulseConfig) -> np.ndarray:
    """Instantaneous eigenstates as columns, ordered like adiabatic_energies.

    The inner-pair coefficients carry a sign(tau) factor: each state is
    smooth on either side of the crossing and swaps identity across it,
    which is exactly the structure crossing_frame repairs.  Raises
    DegeneratePointError at tau = 0 and for delta = 0 (see module docstring).
    """
    if n < -1:
        raise ValueError("n must be >= -1")
    e1, e2 = _envelopes(tau, cfg)
    if n == -1:
        S = e1 * e1 + e2 * e2
        r = math.sqrt(S)
        dark = np.array([e1, -e2, 0.0]) / r
        bm = np.array([e2, e1, -r]) / (r * math.sqrt(2.0))
        bp = np.array([e2, e1, r]) / (r * math.sqrt(2.0))
        return np.column_stack([dark, bm, bp])
    if cfg.delta == 0.0:
        raise DegeneratePointError(
            "inner pair is degenerate for every tau at delta = 0")
    if tau == 0.0:
        raise DegeneratePointError(
            "inner pair touches at tau = 0; use degeneracy_states for the limits")
    K = (n + 1.0) * (n + 2.0)
    S = e1 * e1 + e2 * e2
    P = e1 * e2
    F = math.sqrt(S * S + 16.0 * K * P * P)
    Am = -0.5 * math.sqrt(1.0 + S / F)
    Ap = 2.0 * P * math.sqrt(K) / math.sqrt(F * (F + S))
    Dm, Dp = Ap, -Am
    _, Ep = pair_magnitudes(n, tau, cfg.delta)
    a = math.sqrt(n + 1.0)
    b = math.sqrt(n + 2.0)
    u, v, p, q = e1 * a, e2 * a, e2 * b, e1 * b
    sgn = 1.0 if tau > 0 else -1.0
    Bm = sgn * (q * Am - v * Dm) / Ep
    Cm = sgn * (p * Am - u * Dm) / Ep
    Bp = -(u * Ap + p * Dp) / Ep
    Cp = (v * Ap + q * Dp) / Ep
    psi1 = np.array([Am, Bm, -Cm, Dm])
    psi2 = np.array([Am, -Bm, Cm, Dm])
    psi3 = np.array([Ap, Bp, -Cp, Dp])
    psi4 = np.array([Ap, -Bp, Cp, Dp])
    return np.column_stack([psi1, psi2, psi3, psi4])


@dataclass(frozen=True)
class DegeneracyData:
    """One-sided limits of the adiabatic basis at the tau = 0 touching point."""

    n: int
    side: str
    alpha: float
    beta: float
    states: np.ndarray


def degeneracy_states(n: int, side: str) -> DegeneracyData:
    """Limiting adiabatic states just before or after the crossing.

    Columns are the tau -> 0 limits of branches 1..4 from the requested
    side ('0-' or '0+').  The outer pair is continuous through the point;
    the inner columns trade places between the two sides, with
    alpha = sqrt((n+1)/(6+4n)) and beta = sqrt((n+2)/(6+4n)).
    """
    if n < 0:
        raise ValueError("the four-state crossing needs n >= 0")
    if side not in ("0-", "0+"):
        raise ValueError("side must be '0-' or '0+'")
    alpha = math.sqrt((n + 1.0) / (6.0 + 4.0 * n))
    beta = math.sqrt((n + 2.0) / (6.0 + 4.0 * n))
    psi1 = np.array([-beta, 0.5, -0.5, alpha])
    psi2 = np.array([-beta, -0.5, 0.5, alpha])
    psi3 = np.array([alpha, -0.5, -0.5, beta])
    psi4 = np.array([alpha, 0.5, 0.5, beta])
    if side == "0-":
        cols = (psi1, psi2, psi3, psi4)
    else:
        cols = (psi2, psi1, psi3, psi4)
    return DegeneracyData(n=n, side=side, alpha=alpha, beta=beta,
                          states=np.column_stack(cols))


def boundary_states(n: int, side: str) -> np.ndarray:
    """Asymptotic adiabatic states far outside the pulses, as columns.

    side is '-inf' or '+inf'.  Each limit is an equal-weight pair of bare
    states: before the pulses only atom 1 couples appreciably, after them
    only atom 2, which is what makes one crossing exchange the atoms.
    """
    if side not in ("-inf", "+inf"):
        raise ValueError("side must be '-inf' or '+inf'")
    r = 1.0 / math.sqrt(2.0)
    if n == -1:
        if side == "-inf":
            cols = (np.array([1.0, 0.0, 0.0]),
                    np.array([0.0, r, -r]),
                    np.array([0.0, r, r]))
        else:
            cols = (np.array([0.0, -1.0, 0.0]),
                    np.array([r, 0.0, -r]),
                    np.array([r, 0.0, r]))
        return np.column_stack(cols)
    if n < -1:
        raise ValueError("n must be >= -1")
    if side == "-inf":
        cols = (np.array([-r, r, 0.0, 0.0]),
                np.array([-r, -r, 0.0, 0.0]),
                np.array([0.0, 0.0, -r, r]),
                np.array([0.0, 0.0, r, r]))
    else:
        cols = (np.array([-r, 0.0, r, 0.0]),
                np.array([-r, 0.0, -r, 0.0]),
                np.array([0.0, -r, 0.0, r]),
                np.array([0.0, r, 0.0, r]))
    return np.column_stack(cols)


@dataclass(frozen=True)
class AdiabaticFrame:
    """Snapshot of the instantaneous frame at one tau.

    ordering_mode is 'raw' (energies sorted pairwise, inner states jump at
    tau = 0) or 'crossing' (branches follow the states smoothly through the
    touching point, so the first inner energy is +sign(tau) E_minus).
    """

    tau: float
    energies: np.ndarray
    states: np.ndarray
    ordering_mode: str


def crossing_frame(n: int, tau: float, cfg: PulseConfig,
                   ordering: str = "crossing") -> AdiabaticFrame:
    """Instantaneous frame with branches relabelled through the crossing.

    In the raw ordering branch 1 is always the lower inner state, which
    makes the state vectors jump at tau = 0.  The crossing ordering follows
    each state smoothly: for tau > 0 the inner columns swap and the signed
    inner energies are E'1 = +sign(tau) E_minus = -E'2.  The outer branches
    are shared by both orderings.  At tau = 0 the crossing frame returns the
    one-sided limits (continuous by construction); the raw frame has no
    value there and raises.
    """
    if ordering not in ("raw", "crossing"):
        raise ValueError("ordering must be 'raw' or 'crossing'")
    if n == -1:
        # no crossing in the three-state block; both orderings coincide
        E = adiabatic_energies(n, tau, cfg)
        M = adiabatic_states(n, tau, cfg)
        return AdiabaticFrame(tau=tau, energies=E, states=M, ordering_mode=ordering)
    if tau == 0.0:
        if ordering == "raw":
            raise DegeneratePointError(
                "raw inner branches are not defined at tau = 0")
        data = degeneracy_states(n, "0-")
        _, Ep = pair_magnitudes(n, 0.0, cfg.delta)
        E = np.array([0.0, 0.0, -Ep, Ep])
        return AdiabaticFrame(tau=0.0, energies=E, states=data.states,
                              ordering_mode="crossing")
    E = adiabatic_energies(n, tau, cfg)
    M = adiabatic_states(n, tau, cfg)
    if ordering == "raw":
        return AdiabaticFrame(tau=tau, energies=E, states=M, ordering_mode="raw")
    if tau > 0:
        M = M[:, [1, 0, 2, 3]]
    sgn = 1.0 if tau > 0 else -1.0
    E = np.array([sgn * E[1], -sgn * E[1], E[2], E[3]])
    return AdiabaticFrame(tau=tau, energies=E, states=M, ordering_mode="crossing")
