"""
Shooting cross-check for the bound-state energies

Integrates the first-order system

    psi1' = -W(x) psi1 + E psi2
    psi2' =  W(x) psi2 - E psi1,        W(x) = m + g|x|

inward from +-x_max to the origin with fixed-step RK4, starting on the
decaying direction and renormalizing the state every step. Integrating toward
the origin makes the decaying branch the dominant one, so the discarded
growing solution cannot take over. Energies are the zeros of the 2x2 matching
determinant at x = 0. The shooting path never evaluates a Hermite function;
only substitution_residual does, to check the system against the closed form.
"""

import math
import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from numba import njit

from dirac1d.config import OracleSettings, SeriesConfig, SpectralSettings, default_settings
from dirac1d.errors import Overflow, ScanFailure
from dirac1d.specfun import hermite_fn
from dirac1d.spectral import (
    NU_SCAN_LIMIT, EigenvalueRecord, Method, PhysicalParams, eigenvalues, energy_from_nu,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class OracleResult:
    """Energy found by shooting; converged implies |mismatch| <= mismatch_tol"""

    index: int
    energy: float
    mismatch: float
    converged: bool
    method: Method = Method.SHOOTING

    def nu(self, g: float) -> float:
        return self.energy * self.energy / (2.0 * g)


@njit(cache=True)
def _rhs(x, psi1, psi2, energy, m, g):
    w = m + g * abs(x)
    return -w * psi1 + energy * psi2, w * psi2 - energy * psi1


@njit(cache=True)
def _integrate_inward(x_start, n_steps, psi1, psi2, energy, m, g):
    # Fixed-step RK4 from x_start to 0, state renormalized to unit length each step
    h = -x_start / n_steps
    x = x_start
    for _ in range(n_steps):
        k1a, k1b = _rhs(x, psi1, psi2, energy, m, g)
        k2a, k2b = _rhs(x + 0.5 * h, psi1 + 0.5 * h * k1a, psi2 + 0.5 * h * k1b, energy, m, g)
        k3a, k3b = _rhs(x + 0.5 * h, psi1 + 0.5 * h * k2a, psi2 + 0.5 * h * k2b, energy, m, g)
        k4a, k4b = _rhs(x + h, psi1 + h * k3a, psi2 + h * k3b, energy, m, g)
        psi1 += h * (k1a + 2.0 * k2a + 2.0 * k3a + k4a) / 6.0
        psi2 += h * (k1b + 2.0 * k2b + 2.0 * k3b + k4b) / 6.0
        x += h

        length = math.sqrt(psi1 * psi1 + psi2 * psi2)
        if not (length > 0.0 and math.isfinite(length)):
            return psi1, psi2, False
        psi1 /= length
        psi2 /= length
    return psi1, psi2, True


def _oracle_settings(settings: Optional[OracleSettings]) -> OracleSettings:
    return settings if settings is not None else default_settings().oracle


def dirac_rhs(x: float, psi1: float, psi2: float, energy: float,
              params: PhysicalParams) -> Tuple[float, float]:
    """(psi1', psi2') of the Dirac system at x"""

    if energy == 0.0:
        raise ValueError("dirac_rhs needs E != 0")
    dpsi1, dpsi2 = _rhs(float(x), float(psi1), float(psi2), float(energy), params.m, params.g)
    return float(dpsi1), float(dpsi2)


def default_x_max(energy: float, params: PhysicalParams, window: Optional[float] = None) -> float:
    """(|E| + window sqrt(g))/g, window envelope widths past the turning point"""

    if window is None:
        window = default_settings().oracle.window
    return (abs(energy) + window * params.sqrt_g) / params.g


def shoot_mismatch(energy: float, params: PhysicalParams,
                   x_max: Optional[float] = None, h: Optional[float] = None,
                   settings: Optional[OracleSettings] = None) -> float:
    """
    Normalized matching determinant psi1^L psi2^R - psi1^R psi2^L at x = 0

    Raises:
        Overflow: renormalization of either half-line state failed
    """

    settings = _oracle_settings(settings)
    if energy == 0.0 or not math.isfinite(energy):
        raise ValueError(f"Shooting needs a finite nonzero energy, got {energy}")

    x_max = default_x_max(energy, params, settings.window) if x_max is None else x_max
    h = settings.step / params.sqrt_g if h is None else h
    if not h > 0:
        raise ValueError(f"Step must be positive, got {h}")

    x_turn = (abs(energy) + 10.0 * params.sqrt_g - params.m) / params.g
    if not x_max > x_turn:
        raise ValueError(f"x_max={x_max:g} must lie beyond {x_turn:g}")

    n_steps = int(math.ceil(x_max / h))

    # Decaying direction of the frozen-W system at the boundary
    w = params.m + params.g * x_max
    kappa = math.sqrt(w * w - energy * energy)

    r1, r2, right_ok = _integrate_inward(x_max, n_steps, 1.0, (w - kappa) / energy,
                                         energy, params.m, params.g)
    l1, l2, left_ok = _integrate_inward(-x_max, n_steps, 1.0, (w + kappa) / energy,
                                        energy, params.m, params.g)
    if not (right_ok and left_ok):
        raise Overflow(f"State renormalization failed at E={energy:.9g}")

    norms = math.hypot(l1, l2) * math.hypot(r1, r2)
    return float((l1 * r2 - r1 * l2) / norms)


def _bisect(lo: float, hi: float, d_lo: float, params: PhysicalParams,
            tol: float, settings: OracleSettings) -> Tuple[float, float, float]:
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        d_mid = shoot_mismatch(mid, params, settings=settings)
        if d_mid == 0.0:
            return mid, mid, d_mid
        if (d_mid > 0) == (d_lo > 0):
            lo, d_lo = mid, d_mid
        else:
            hi = mid
    return lo, hi, d_lo


def shoot_eigenvalues(params: PhysicalParams, count: int,
                      settings: Optional[OracleSettings] = None) -> List[OracleResult]:
    """
    The count lowest positive energies from sign changes of the mismatch

    Scans E > 0 in steps of scan_step * sqrt(g) and bisects every sign change
    to bisect_tol * sqrt(g).
    """

    settings = _oracle_settings(settings)
    if count < 1:
        raise ValueError(f"count must be at least 1, got {count}")

    step = settings.scan_step * params.sqrt_g
    tol = settings.bisect_tol * params.sqrt_g
    e_limit = energy_from_nu(NU_SCAN_LIMIT, params.g)
    mismatch_tol = settings.mismatch_tol

    results = []
    e_prev = step
    d_prev = shoot_mismatch(e_prev, params, settings=settings)

    while len(results) < count:
        e_next = e_prev + step
        if e_next > e_limit:
            raise ScanFailure(f"Only {len(results)} of {count} energies below E={e_limit:g}")
        d_next = shoot_mismatch(e_next, params, settings=settings)

        if (d_prev > 0) != (d_next > 0) or d_next == 0.0:
            lo, hi, _ = _bisect(e_prev, e_next, d_prev, params, tol, settings)
            energy = 0.5 * (lo + hi)
            mismatch = shoot_mismatch(energy, params, settings=settings)
            results.append(OracleResult(
                index=len(results),
                energy=energy,
                mismatch=mismatch,
                converged=(hi - lo) <= tol and abs(mismatch) <= mismatch_tol,
            ))
            logger.debug(f"Shooting level {len(results) - 1}: E={energy:.9g}, D={mismatch:.2e}")

        e_prev, d_prev = e_next, d_next

    logger.info(f"alpha={params.alpha:g}: {len(results)} shooting levels, E_0={results[0].energy:.9g}")
    return results


def substitution_residual(nu: float, params: PhysicalParams, xs: Sequence[float],
                          cfg: Optional[SeriesConfig] = None) -> float:
    """
    Largest relative ODE residual of the x >= 0 Hermite solution

    Substitutes psi1 = H_nu(xi) e^{-xi^2/2}, psi2 = (E/sqrt(g)) H_{nu-1}(xi) e^{-xi^2/2}
    with E = sqrt(2 nu g) into dirac_rhs and compares against the analytic
    derivatives (H_nu' = 2 nu H_{nu-1}). A small value confirms that the
    first-order system and the closed-form solution describe the same problem.
    """

    energy = energy_from_nu(nu, params.g)
    k = energy / params.sqrt_g

    worst = 0.0
    for x in xs:
        if x < 0:
            raise ValueError(f"substitution_residual samples x >= 0 only, got {x}")
        xi = params.alpha + params.sqrt_g * x
        gauss = math.exp(-xi * xi / 2.0)
        h0 = hermite_fn(nu, xi, cfg)
        h1 = hermite_fn(nu - 1.0, xi, cfg)
        h2 = hermite_fn(nu - 2.0, xi, cfg)

        psi1 = h0 * gauss
        psi2 = k * h1 * gauss
        dpsi1 = params.sqrt_g * (2.0 * nu * h1 - xi * h0) * gauss
        dpsi2 = k * params.sqrt_g * (2.0 * (nu - 1.0) * h2 - xi * h1) * gauss

        rhs1, rhs2 = dirac_rhs(x, psi1, psi2, energy, params)
        scale = max(abs(dpsi1), abs(dpsi2), abs(psi1), abs(psi2))
        worst = max(worst, abs(rhs1 - dpsi1) / scale, abs(rhs2 - dpsi2) / scale)
    return worst


def compare_with_spectral(params: PhysicalParams, count: int,
                          settings: Optional[OracleSettings] = None,
                          spectral_settings: Optional[SpectralSettings] = None,
                          cfg: Optional[SeriesConfig] = None,
                          ) -> List[Tuple[EigenvalueRecord, OracleResult, float]]:
    """Pair spectral-condition levels with shooting levels and their relative energy difference"""

    records = eigenvalues(params, count, spectral_settings, cfg)
    shots = shoot_eigenvalues(params, count, settings)

    pairs = []
    for record, shot in zip(records, shots):
        diff = abs(shot.energy - record.e_plus) / record.e_plus
        pairs.append((record, shot, diff))
    return pairs
