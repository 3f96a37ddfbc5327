"""
Bound-state spinor assembly

For x >= 0, with xi = (m + g x)/sqrt(g):
    psi1 = C H_nu(xi) e^{-xi^2/2}
    psi2 = C (E/sqrt(g)) H_{nu-1}(xi) e^{-xi^2/2}
For x <= 0, with xi' = (m - g x)/sqrt(g):
    psi1 = C' (E/sqrt(g)) H_{nu-1}(xi') e^{-xi'^2/2}
    psi2 = C' H_nu(xi') e^{-xi'^2/2}

C is anchored to 1, C' is fixed by continuity of psi2 at the origin (psi1 when
H_nu(alpha) = 0), then both are rescaled to unit L2 norm with C > 0. Only the
decaying branch is kept on each half-line.
"""

import math
import logging
from dataclasses import dataclass, replace
from typing import List, Optional, Tuple

import numpy as np
from scipy import integrate

from dirac1d.config import SeriesConfig, WavefunctionSettings, default_settings
from dirac1d.errors import DegenerateMatch, NotAnEigenvalue, TailTruncation
from dirac1d.specfun import hermite_envelope
from dirac1d.spectral import EigenvalueRecord, PhysicalParams

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class WavefunctionProfile:
    """
    Two-component profile sampled on a symmetric grid

    x runs from -x_max to x_max with the origin stored twice: x[origin] is the
    0- sample and x[origin + 1] the 0+ sample.
    """

    nu: float
    e_sign: int
    c_right: float
    c_left: float
    x: np.ndarray
    psi1: np.ndarray
    psi2: np.ndarray
    norm: float
    continuity_defect: float
    params: PhysicalParams

    @property
    def origin(self) -> int:
        return len(self.x) // 2 - 1

    @property
    def energy(self) -> float:
        return self.e_sign * math.sqrt(2.0 * self.nu * self.params.g)

    @property
    def x_max(self) -> float:
        return float(self.x[-1])

    @property
    def mirror_sign(self) -> int:
        """Sign of C'/C; at m = 0, (psi1, psi2)(x) = s (psi2, psi1)(-x)"""
        return 1 if self.c_left / self.c_right > 0 else -1

    def left(self) -> slice:
        return slice(0, self.origin + 1)

    def right(self) -> slice:
        return slice(self.origin + 1, len(self.x))

    def rows(self) -> List[Tuple[float, float, float]]:
        return list(zip(self.x.tolist(), self.psi1.tolist(), self.psi2.tolist()))


def _wavefunction_settings(settings: Optional[WavefunctionSettings]) -> WavefunctionSettings:
    return settings if settings is not None else default_settings().wavefunction


def default_x_max(nu: float, params: PhysicalParams, tail_factor: Optional[float] = None) -> float:
    """
    Half-width of the sampling grid

    xi_max = max(alpha, sqrt(2 nu + 1)) + tail_factor, i.e. tail_factor
    envelope widths past the origin value or the classical turning point,
    whichever is further out.
    """

    if tail_factor is None:
        tail_factor = default_settings().wavefunction.tail_factor
    xi_max = max(params.alpha, math.sqrt(2.0 * nu + 1.0)) + tail_factor
    return (xi_max * params.sqrt_g - params.m) / params.g


def _half_line_integral(profile: WavefunctionProfile, side: slice) -> float:
    density = profile.psi1[side] ** 2 + profile.psi2[side] ** 2
    return float(integrate.simpson(density, x=profile.x[side]))


def _raw_norm(x: np.ndarray, psi1: np.ndarray, psi2: np.ndarray, origin: int) -> float:
    density = psi1 ** 2 + psi2 ** 2
    left = integrate.simpson(density[:origin + 1], x=x[:origin + 1])
    right = integrate.simpson(density[origin + 1:], x=x[origin + 1:])
    return float(left + right)


def _peak(psi1: np.ndarray, psi2: np.ndarray) -> float:
    return float(max(np.max(np.abs(psi1)), np.max(np.abs(psi2))))


def _defect(psi1: np.ndarray, psi2: np.ndarray, origin: int) -> float:
    jump = max(abs(psi1[origin + 1] - psi1[origin]), abs(psi2[origin + 1] - psi2[origin]))
    return float(jump / _peak(psi1, psi2))


def continuity_defect(profile: WavefunctionProfile) -> float:
    """Largest component jump at x = 0, relative to the profile peak"""
    return _defect(profile.psi1, profile.psi2, profile.origin)


def norm(profile: WavefunctionProfile, tail_tol: Optional[float] = None) -> float:
    """
    Integral of psi1^2 + psi2^2 by composite Simpson quadrature per half-line

    Raises:
        TailTruncation: |psi| at either grid edge exceeds tail_tol of the peak
    """

    if tail_tol is None:
        tail_tol = default_settings().wavefunction.tail_tol

    peak = _peak(profile.psi1, profile.psi2)
    edge = max(abs(profile.psi1[0]), abs(profile.psi2[0]),
               abs(profile.psi1[-1]), abs(profile.psi2[-1]))
    if edge > tail_tol * peak:
        raise TailTruncation(
            f"Envelope at |x|={profile.x_max:.4g} is {edge / peak:.2e} of peak "
            f"(limit {tail_tol:.0e}); widen the grid"
        )

    return _half_line_integral(profile, profile.left()) + _half_line_integral(profile, profile.right())


def assemble_at(nu: float, params: PhysicalParams, e_sign: int = 1,
                x_max: Optional[float] = None, n_points: Optional[int] = None,
                settings: Optional[WavefunctionSettings] = None,
                cfg: Optional[SeriesConfig] = None) -> WavefunctionProfile:
    """
    Matched and normalized profile at an arbitrary nu

    Does not check that nu is an eigenvalue; continuity_defect of the result
    measures how far it is from one.

    Raises:
        DegenerateMatch: H_nu(alpha) and H_{nu-1}(alpha) both vanish
        TailTruncation: grid too narrow for the envelope
    """

    settings = _wavefunction_settings(settings)
    n_points = settings.n_points if n_points is None else n_points

    if e_sign not in (1, -1):
        raise ValueError(f"e_sign must be +1 or -1, got {e_sign}")
    if n_points < 3 or n_points % 2 == 0:
        raise ValueError(f"n_points must be odd and at least 3, got {n_points}")
    if not nu > 0:
        raise ValueError(f"nu must be positive, got {nu}")

    if x_max is None:
        x_max = default_x_max(nu, params, settings.tail_factor)
    if not x_max > 0:
        raise ValueError(f"x_max must be positive, got {x_max}")

    # xi = xi' = alpha + sqrt(g)|x| on both half-lines
    x_half = np.linspace(0.0, x_max, (n_points + 1) // 2)
    xi = params.alpha + params.sqrt_g * x_half
    upper = hermite_envelope(nu, xi, cfg)
    lower = hermite_envelope(nu - 1.0, xi, cfg)

    # E / sqrt(g)
    k = e_sign * math.sqrt(2.0 * nu)

    if upper[0] != 0.0:
        c_left = k * lower[0] / upper[0]
    elif lower[0] != 0.0:
        c_left = upper[0] / (k * lower[0])
    else:
        raise DegenerateMatch(
            f"H_nu and H_nu-1 both vanish at alpha={params.alpha:g}, nu={nu:.9g}"
        )
    c_right = 1.0

    x = np.concatenate((-x_half[::-1], x_half))
    psi1 = np.concatenate((c_left * k * lower[::-1], c_right * upper))
    psi2 = np.concatenate((c_left * upper[::-1], c_right * k * lower))
    origin = len(x_half) - 1

    scale = 1.0 / math.sqrt(_raw_norm(x, psi1, psi2, origin))
    c_right *= scale
    c_left *= scale
    psi1 *= scale
    psi2 *= scale

    draft = WavefunctionProfile(
        nu=nu, e_sign=e_sign, c_right=c_right, c_left=c_left,
        x=x, psi1=psi1, psi2=psi2, norm=float('nan'),
        continuity_defect=_defect(psi1, psi2, origin), params=params,
    )
    profile = replace(draft, norm=norm(draft, settings.tail_tol))

    logger.debug(
        f"Profile nu={nu:.9g}: x_max={x_max:.4g}, norm={profile.norm:.9f}, "
        f"defect={profile.continuity_defect:.2e}"
    )
    return profile


def assemble(record: EigenvalueRecord, params: PhysicalParams, e_sign: int = 1,
             x_max: Optional[float] = None, n_points: Optional[int] = None,
             settings: Optional[WavefunctionSettings] = None,
             cfg: Optional[SeriesConfig] = None,
             residual_tol: Optional[float] = None) -> WavefunctionProfile:
    """
    Normalized bound state for a computed level

    Raises:
        NotAnEigenvalue: record.relative_residual above spectral.residual_tol
    """

    if residual_tol is None:
        residual_tol = default_settings().spectral.residual_tol
    if record.relative_residual > residual_tol:
        raise NotAnEigenvalue(
            f"Level {record.index} at nu={record.nu:.9g} has relative residual "
            f"{record.relative_residual:.2e} > {residual_tol:.0e}"
        )

    profile = assemble_at(record.nu, params, e_sign, x_max, n_points, settings, cfg)
    logger.info(
        f"Level {record.index}: norm={profile.norm:.9f}, "
        f"continuity defect={profile.continuity_defect:.2e}"
    )
    return profile
