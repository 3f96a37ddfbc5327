"""
Quantization condition and eigenvalue search

Bound states of the 1+1 dimensional Dirac equation with Lorentz scalar
potential V(x) = g|x| exist where

    f(nu; alpha) = H_nu(alpha)^2 - 2 nu H_{nu-1}(alpha)^2 = 0,   alpha = m/sqrt(g)

with energies E = +-sqrt(2 nu g). Roots are bracketed by a sign scan in nu
(or, for alpha = 0, by the integer intervals (n, n+1), each of which holds a
sign change) and refined with Brent's method.

Uniqueness of the root inside each bracket is only established for alpha = 0;
for alpha != 0 completeness rests on the scan resolution.
"""

import math
import logging
from dataclasses import dataclass, field, asdict
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np
from scipy import optimize

from dirac1d.config import SeriesConfig, SpectralSettings, default_settings
from dirac1d.errors import MaxIterations, ResidualTooLarge, ScanFailure
from dirac1d.specfun import hermite_at_zero, hermite_fn

logger = logging.getLogger(__name__)

# Beyond this the scan window stops doubling
NU_SCAN_LIMIT = 1024.0


class Method(str, Enum):
    SPECTRAL = 'spectral-condition'
    SHOOTING = 'shooting-oracle'


@dataclass(frozen=True)
class PhysicalParams:
    """Fermion mass m >= 0 and coupling g > 0; alpha = m/sqrt(g) is derived"""

    m: float
    g: float
    alpha: float = field(init=False)

    def __post_init__(self):
        if not (math.isfinite(self.g) and self.g > 0):
            raise ValueError(f"Coupling g must be positive, got {self.g}")
        if not (math.isfinite(self.m) and self.m >= 0):
            raise ValueError(f"Mass m must be non-negative, got {self.m}")
        object.__setattr__(self, 'alpha', self.m / math.sqrt(self.g))

    @classmethod
    def from_alpha(cls, alpha: float, g: float = 1.0) -> 'PhysicalParams':
        return cls(m=alpha * math.sqrt(g), g=g)

    @property
    def sqrt_g(self) -> float:
        return math.sqrt(self.g)


@dataclass(frozen=True)
class Bracket:
    """nu interval with a strict sign change of the spectral function"""

    nu_lo: float
    nu_hi: float
    f_lo: float
    f_hi: float

    def __post_init__(self):
        if not self.nu_lo < self.nu_hi:
            raise ValueError(f"Bracket needs nu_lo < nu_hi, got ({self.nu_lo}, {self.nu_hi})")
        if self.f_lo == 0.0 or self.f_hi == 0.0:
            raise ValueError("Bracket endpoint values must be nonzero")
        if (self.f_lo > 0) == (self.f_hi > 0):
            raise ValueError(
                f"No sign change on ({self.nu_lo}, {self.nu_hi}): "
                f"f_lo={self.f_lo:.3e}, f_hi={self.f_hi:.3e}"
            )

    @property
    def width(self) -> float:
        return self.nu_hi - self.nu_lo


@dataclass(frozen=True)
class EigenvalueRecord:
    """
    One bound-state level

    residual is |f(nu)|; relative_residual divides it by
    H_nu^2 + 2 nu H_{nu-1}^2, which is what tolerances are checked against
    since |f| grows like H_nu(alpha)^2 with nu.
    """

    index: int
    nu: float
    e_plus: float
    e_minus: float
    residual: float
    relative_residual: float
    method: Method = Method.SPECTRAL

    def __post_init__(self):
        if self.index < 0:
            raise ValueError(f"Level index must be non-negative, got {self.index}")
        if not self.nu > 0:
            raise ValueError(f"Eigenvalue nu must be positive, got {self.nu}")
        if self.e_plus != -self.e_minus:
            raise ValueError("e_minus must mirror e_plus")

    def to_dict(self) -> dict:
        record = asdict(self)
        record['method'] = self.method.value
        return record


@dataclass(frozen=True)
class IntegerLevelCheck:
    """An integer candidate level nu = n+1 tested against the integer-level condition"""

    n: int
    nu: float
    e_plus: float
    r_plus: float
    r_minus: float
    satisfied: bool
    nearest_nu: float
    distance: float


def _spectral_settings(settings: Optional[SpectralSettings]) -> SpectralSettings:
    return settings if settings is not None else default_settings().spectral


def energy_from_nu(nu: float, g: float) -> float:
    """Positive energy sqrt(2 nu g)"""
    return math.sqrt(2.0 * nu * g)


def nu_from_energy(energy: float, g: float) -> float:
    return energy * energy / (2.0 * g)


def _hermite_pair(nu: float, alpha: float, cfg: Optional[SeriesConfig]) -> Tuple[float, float]:
    return hermite_fn(nu, alpha, cfg), hermite_fn(nu - 1.0, alpha, cfg)


def spectral_fn(nu: float, alpha: float, cfg: Optional[SeriesConfig] = None) -> float:
    """f(nu; alpha) = H_nu(alpha)^2 - 2 nu H_{nu-1}(alpha)^2"""

    h, h_lower = _hermite_pair(nu, alpha, cfg)
    return h * h - 2.0 * nu * h_lower * h_lower


def massless_spectral_fn(nu: float) -> float:
    """f(nu; 0) through the closed form of H_nu(0)"""

    h = hermite_at_zero(nu)
    h_lower = hermite_at_zero(nu - 1.0)
    return h * h - 2.0 * nu * h_lower * h_lower


def _sample(nu: float, alpha: float, cfg: Optional[SeriesConfig]) -> float:
    value = spectral_fn(nu, alpha, cfg)
    if not math.isfinite(value):
        raise ScanFailure(f"f({nu:.6g}; alpha={alpha:g}) evaluated to {value}")
    return value


def _scan(alpha: float, nu_max: float, step: float, nudge: float,
          cfg: Optional[SeriesConfig]) -> List[Bracket]:
    n_steps = int(math.ceil(nu_max / step - 1e-9))
    nodes = [min(k * step, nu_max) for k in range(n_steps + 1)]

    # f(0; alpha) = H_0^2 = 1
    samples = [(0.0, 1.0)]
    for nu in nodes[1:]:
        value = _sample(nu, alpha, cfg)
        if value == 0.0:
            shifted = nu + step * nudge
            logger.debug(f"Scan node nu={nu:.6g} is an exact root, nudged to {shifted:.6g}")
            nu, value = shifted, _sample(shifted, alpha, cfg)
        samples.append((nu, value))

    brackets = []
    for (nu_lo, f_lo), (nu_hi, f_hi) in zip(samples, samples[1:]):
        if (f_lo > 0) != (f_hi > 0) and nu_lo < nu_hi:
            brackets.append(Bracket(nu_lo, nu_hi, f_lo, f_hi))
    return brackets


def _touching(brackets: List[Bracket]) -> bool:
    return any(a.nu_hi == b.nu_lo for a, b in zip(brackets, brackets[1:]))


def massless_brackets(n_count: int) -> List[Bracket]:
    """
    Brackets (n, n+1) for n = 0..n_count-1 at alpha = 0

    f(n; 0) > 0 at even n and < 0 at odd n, so each unit interval holds a root.

    Raises:
        ScanFailure: the sign pattern does not hold numerically
    """

    brackets = []
    f_lo = massless_spectral_fn(0.0)
    for n in range(n_count):
        f_hi = massless_spectral_fn(float(n + 1))
        if not (math.isfinite(f_hi) and (f_lo > 0) != (f_hi > 0)):
            raise ScanFailure(
                f"Massless sign pattern broken on ({n}, {n + 1}): "
                f"f={f_lo:.3e}, {f_hi:.3e}"
            )
        brackets.append(Bracket(float(n), float(n + 1), f_lo, f_hi))
        f_lo = f_hi
    return brackets


def bracket_roots(alpha: float, nu_max: float, step: Optional[float] = None,
                  strategy: str = 'scan',
                  settings: Optional[SpectralSettings] = None,
                  cfg: Optional[SeriesConfig] = None) -> List[Bracket]:
    """
    Sign-change brackets of f(nu; alpha) on (0, nu_max], sorted by nu

    Args:
        alpha: dimensionless mass m/sqrt(g)
        nu_max: upper end of the scan
        step: scan increment, 0 < step <= 0.5 (default from settings)
        strategy: 'scan' always samples; 'auto' enumerates integer intervals at alpha = 0

    Raises:
        ScanFailure: a sample evaluated non-finite
    """

    settings = _spectral_settings(settings)
    step = settings.scan_step if step is None else step

    if not nu_max > 0:
        raise ValueError(f"nu_max must be positive, got {nu_max}")
    if not 0 < step <= 0.5:
        raise ValueError(f"step must lie in (0, 0.5], got {step}")
    if strategy not in ('scan', 'auto'):
        raise ValueError(f"Unknown bracketing strategy: {strategy}")

    if strategy == 'auto' and alpha == 0.0:
        return massless_brackets(int(math.floor(nu_max)))

    brackets = _scan(alpha, nu_max, step, settings.nudge_factor, cfg)
    while _touching(brackets) and step > settings.min_step:
        step = max(step / 2.0, settings.min_step)
        logger.debug(f"Adjacent brackets touch at alpha={alpha:g}, rescanning with step {step:g}")
        brackets = _scan(alpha, nu_max, step, settings.nudge_factor, cfg)

    logger.debug(f"alpha={alpha:g}: {len(brackets)} brackets below nu={nu_max:g}")
    return brackets


def refine_root(bracket: Bracket, alpha: float, tol: Optional[float] = None,
                max_iterations: Optional[int] = None,
                cfg: Optional[SeriesConfig] = None,
                settings: Optional[SpectralSettings] = None) -> float:
    """
    Root of f(nu; alpha) inside bracket by Brent's method

    tol and max_iterations default to settings.refine_tol and
    settings.max_iterations.

    Raises:
        MaxIterations: tolerance not met within max_iterations
    """

    settings = _spectral_settings(settings)
    tol = settings.refine_tol if tol is None else tol
    max_iterations = settings.max_iterations if max_iterations is None else max_iterations

    if not tol > 0:
        raise ValueError(f"Refinement tolerance must be positive, got {tol}")

    root, result = optimize.brentq(
        spectral_fn, bracket.nu_lo, bracket.nu_hi,
        args=(alpha, cfg),
        xtol=tol, maxiter=max_iterations,
        full_output=True, disp=False,
    )

    if not result.converged:
        raise MaxIterations(
            f"Brent refinement on ({bracket.nu_lo:g}, {bracket.nu_hi:g}) stopped after "
            f"{result.iterations} iterations: {result.flag}"
        )

    # Endpoint values are nonzero, so the root is interior
    root = min(max(root, np.nextafter(bracket.nu_lo, np.inf)), np.nextafter(bracket.nu_hi, -np.inf))
    return float(root)


def make_record(index: int, nu: float, params: PhysicalParams,
                cfg: Optional[SeriesConfig] = None,
                method: Method = Method.SPECTRAL) -> EigenvalueRecord:
    h, h_lower = _hermite_pair(nu, params.alpha, cfg)
    f = h * h - 2.0 * nu * h_lower * h_lower
    energy = energy_from_nu(nu, params.g)
    return EigenvalueRecord(
        index=index,
        nu=nu,
        e_plus=energy,
        e_minus=-energy,
        residual=abs(f),
        relative_residual=abs(f) / (h * h + 2.0 * nu * h_lower * h_lower),
        method=method,
    )


def eigenvalues(params: PhysicalParams, count: int,
                settings: Optional[SpectralSettings] = None,
                cfg: Optional[SeriesConfig] = None,
                strategy: str = 'auto') -> List[EigenvalueRecord]:
    """
    The count lowest levels nu_0 < nu_1 < ... of the quantization condition

    The scan window starts just above the expected position of the count-th
    level and doubles until enough roots are bracketed.

    Raises:
        ScanFailure: fewer than count roots below NU_SCAN_LIMIT
        ResidualTooLarge: a refined root misses settings.residual_tol
    """

    settings = _spectral_settings(settings)
    if count < 1:
        raise ValueError(f"count must be at least 1, got {count}")

    alpha = params.alpha
    nu_max = max(4.0, alpha * alpha + count + 2.0)

    while True:
        brackets = bracket_roots(alpha, nu_max, strategy=strategy, settings=settings, cfg=cfg)
        if len(brackets) >= count:
            break
        if nu_max >= NU_SCAN_LIMIT:
            raise ScanFailure(
                f"Only {len(brackets)} of {count} roots found below nu={nu_max:g} at alpha={alpha:g}"
            )
        nu_max *= 2.0
        logger.debug(f"Extending scan window to nu_max={nu_max:g}")

    records = []
    for index, bracket in enumerate(brackets[:count]):
        nu = refine_root(bracket, alpha, cfg=cfg, settings=settings)
        record = make_record(index, nu, params, cfg)
        if record.relative_residual > settings.residual_tol:
            raise ResidualTooLarge(
                f"Level {index} at nu={nu:.9g} has relative residual "
                f"{record.relative_residual:.2e} > {settings.residual_tol:.0e} "
                f"(refine_tol={settings.refine_tol:g})"
            )
        records.append(record)

    logger.info(f"alpha={alpha:g}: {len(records)} levels, nu_0={records[0].nu:.9g}")
    return records


def br_condition_residual(n: int, alpha: float,
                          cfg: Optional[SeriesConfig] = None) -> Tuple[float, float]:
    """
    Residuals of H_{n+1}(alpha) = +-sqrt(2(n+1)) H_n(alpha)

    Their product is f(n+1; alpha).
    """

    if n < 0:
        raise ValueError(f"n must be non-negative, got {n}")

    h_upper = hermite_fn(float(n + 1), alpha, cfg)
    scaled = math.sqrt(2.0 * (n + 1)) * hermite_fn(float(n), alpha, cfg)
    return h_upper - scaled, h_upper + scaled


def integer_levels(params: PhysicalParams, n_count: int,
                   settings: Optional[SpectralSettings] = None,
                   cfg: Optional[SeriesConfig] = None) -> List[IntegerLevelCheck]:
    """
    Check the integer levels E = +-sqrt(2(n+1)g), n = 0..n_count-1, against
    the integer-level condition and locate the nearest true level
    """

    roots = [r.nu for r in eigenvalues(params, n_count, settings, cfg)]

    checks = []
    for n in range(n_count):
        r_plus, r_minus = br_condition_residual(n, params.alpha, cfg)
        scale = max(abs(r_plus + r_minus) / 2.0, abs(r_minus - r_plus) / 2.0, 1.0)
        nu = float(n + 1)
        nearest = min(roots, key=lambda root: abs(root - nu))
        checks.append(IntegerLevelCheck(
            n=n,
            nu=nu,
            e_plus=energy_from_nu(nu, params.g),
            r_plus=r_plus,
            r_minus=r_minus,
            satisfied=min(abs(r_plus), abs(r_minus)) <= 1e-8 * scale,
            nearest_nu=nearest,
            distance=abs(nearest - nu),
        ))
    return checks
