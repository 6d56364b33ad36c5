"""Mixing angle of one cavity pass and coupling-strength solving.

The pass rotates each excitation block by an angle proportional to the area
under the upper adiabatic branch,

    phi_n = 2 g sigma * I_n(delta),   I_n = integral of E'_4(tau) dtau,

with E'_4 in units of g.  I_n depends only on (n, delta), so phi splits into
a pulse-strength factor and a geometry factor.  The closed-form asymptotics
cover the separated-pulse, overlapped-pulse, and large-photon-number
regimes; outside their domains they are still evaluated but flagged.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

from scipy.integrate import quad

from .model import PulseConfig
from .spectrum import pair_magnitudes

__all__ = [
    "DEFAULT_MIN_GSIGMA",
    "AngleSolution",
    "unit_integral",
    "mixing_angle",
    "angle_asymptotic",
    "solve_gsigma_for_angle",
]

# Floor on g sigma when solving for a target angle.  At 30 the residual
# nonadiabatic leak of a full pass sits near 8e-4; it grows roughly as
# 1/(g sigma)^2, so weaker pulses trade angle multiplicity for fidelity.
DEFAULT_MIN_GSIGMA = 30.0

_QUAD_OPTS = dict(epsabs=1e-13, epsrel=1e-13, limit=400)


@lru_cache(maxsize=512)
def unit_integral(n: int, delta: float) -> float:
    """Area under the upper branch energy at unit coupling.

    Grows monotonically with delta from its overlapped value at delta = 0
    to the separated-pulse plateau 2 sqrt((n+2) pi); for n = -1 the plateau
    is 2 sqrt(pi).
    """
    if n < -1:
        raise ValueError("n must be >= -1")
    span = delta + 7.0

    def upper(t):
        return pair_magnitudes(n, t, delta)[1]

    pts = sorted({x for x in (-delta, 0.0, delta) if -span < x < span})
    return quad(upper, -span, span, points=pts or None, **_QUAD_OPTS)[0]


def mixing_angle(n: int, cfg: PulseConfig) -> float:
    """Angle accumulated by block n in one pass."""
    return 2.0 * cfg.g_sigma * unit_integral(n, cfg.delta)


def angle_asymptotic(n: int, cfg: PulseConfig, regime: str) -> float:
    """Closed-form mixing angle in one of three limiting regimes.

    "separated" (delta >> 1):  phi = 4 g sigma sqrt((n+2) pi)
    "overlapped" (delta << 1): phi = 2 g sigma e^{-delta^2}
                                     * sqrt((6+4n) pi / (1 - gamma_n delta^2))
                               with gamma_n = 2((3+2n)^2 + 1)/(3+2n)^2
    "large_n" (n >> 1):        phi = 4 g sigma sqrt(n pi)

    Evaluating outside the regime's domain of validity raises a warning but
    still returns the formula's value.
    """
    gs = cfg.g_sigma
    delta = cfg.delta
    if regime == "separated":
        if delta < 2.0:
            warnings.warn("separated-pulse form assumes delta >~ 2",
                          stacklevel=2)
        return 4.0 * gs * math.sqrt((n + 2.0) * math.pi)
    if regime == "overlapped":
        if delta > 0.3:
            warnings.warn("overlapped-pulse form assumes delta <~ 0.3",
                          stacklevel=2)
        m = 3.0 + 2.0 * n
        gamma = 2.0 * (m * m + 1.0) / (m * m)
        denom = 1.0 - gamma * delta * delta
        if denom <= 0.0:
            raise ValueError("overlapped form breaks down: "
                             f"gamma_n delta^2 = {gamma * delta * delta:.3f} >= 1")
        return 2.0 * gs * math.exp(-delta * delta) * math.sqrt(
            (6.0 + 4.0 * n) * math.pi / denom)
    if regime == "large_n":
        if n < 50:
            warnings.warn("large-n form assumes n >~ 50", stacklevel=2)
        return 4.0 * gs * math.sqrt(n * math.pi)
    raise ValueError("regime must be 'separated', 'overlapped' or 'large_n'")


@dataclass(frozen=True)
class AngleSolution:
    """Coupling strength realizing a target angle modulo full turns."""

    g_sigma: float
    multiplicity: int
    phi_total: float


def solve_gsigma_for_angle(target_phi: float, n: int, delta: float,
                           min_gsigma: float = DEFAULT_MIN_GSIGMA) -> AngleSolution:
    """Smallest g sigma >= min_gsigma with phi_n = target_phi mod 2 pi.

    The angle is linear in g sigma, so the solutions form the ladder
    (target + 2 pi k) / (2 I_n); the returned multiplicity is the k picked.
    """
    if target_phi <= 0.0:
        raise ValueError("target_phi must be positive")
    I = unit_integral(n, delta)
    k = 0
    while True:
        phi_total = target_phi + 2.0 * math.pi * k
        gs = phi_total / (2.0 * I)
        if gs >= min_gsigma:
            return AngleSolution(g_sigma=gs, multiplicity=k, phi_total=phi_total)
        k += 1
