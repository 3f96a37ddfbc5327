"""
Special functions on the real axis

Kummer's confluent hypergeometric series, the reciprocal gamma function and
Hermite functions H_nu(z) of arbitrary real order:

    H_nu(z) = 2^nu sqrt(pi) [ Phi(-nu/2, 1/2; z^2) / Gamma((1-nu)/2)
                              - 2 z Phi((1-nu)/2, 3/2; z^2) / Gamma(-nu/2) ]

For z > 0 the two series cancel against each other and lose roughly e^{z^2}
relative accuracy, so above SeriesConfig.series_window non-integer orders are
evaluated through the parabolic cylinder function instead:

    H_nu(z) e^{-z^2/2} = 2^{nu/2} D_nu(sqrt(2) z)

Non-negative integer orders always use the series, which terminates and is
the Hermite polynomial. For z < 0 the even and odd parts add with the same
sign and H_nu grows like e^{z^2}; the series covers the whole negative axis.

Relative accuracy is 1e-10 for |z| <= 6 and nu <= 35. Just below the window
edge at the top of the order range (nu near 40, z near 3) the positive-z
series degrades to a few 1e-9.
"""

import math
import logging
from typing import Optional, Union

import numpy as np
from scipy import special

from dirac1d.config import SeriesConfig, default_settings
from dirac1d.errors import InvalidPole, NoConvergence, OutOfWindow

logger = logging.getLogger(__name__)

SQRT_PI = math.sqrt(math.pi)
SQRT_2 = math.sqrt(2.0)

# Order of a Hermite function. Any finite real; integrality is not required.
HermiteOrder = float

ArrayLike = Union[float, np.ndarray]


def _is_nonpositive_integer(x: float) -> bool:
    return x <= 0.0 and float(x).is_integer()


def _is_nonnegative_integer(x: float) -> bool:
    return x >= 0.0 and float(x).is_integer()


def _series_config(cfg: Optional[SeriesConfig]) -> SeriesConfig:
    return cfg if cfg is not None else default_settings().series


def _order(nu: HermiteOrder) -> float:
    nu = float(nu)
    if not math.isfinite(nu):
        raise ValueError(f"Hermite order must be finite, got {nu}")
    return nu


class NeumaierSum:
    """Running compensated sum (Neumaier's improvement of Kahan summation)"""

    __slots__ = ('_sum', '_compensation')

    def __init__(self, value: float = 0.0):
        self._sum = float(value)
        self._compensation = 0.0

    def add(self, term: float):
        total = self._sum + term
        # Recover the low-order bits lost by the larger operand
        if abs(self._sum) >= abs(term):
            self._compensation += (self._sum - total) + term
        else:
            self._compensation += (term - total) + self._sum
        self._sum = total

    @property
    def value(self) -> float:
        return self._sum + self._compensation


def kummer_phi(a: float, b: float, z: float, cfg: Optional[SeriesConfig] = None) -> float:
    """
    Confluent hypergeometric function Phi(a, b; z) by direct summation

    Terms (a)_k/(b)_k z^k/k! are accumulated with NeumaierSum. The series stops
    once two consecutive terms fall below rel_tol * |partial sum|; when a is
    zero or a negative integer it is a polynomial and is summed to its last
    nonzero term.

    Raises:
        InvalidPole: b is zero or a negative integer
        NoConvergence: max_terms reached before the stopping rule fired
    """

    cfg = _series_config(cfg)
    a, b, z = float(a), float(b), float(z)

    if _is_nonpositive_integer(b):
        raise InvalidPole(f"Kummer series parameter b={b:g} is a pole")

    acc = NeumaierSum(1.0)
    term = 1.0

    if _is_nonpositive_integer(a):
        degree = int(-a)
        if degree > cfg.max_terms:
            raise NoConvergence(
                f"Phi({a:g}, {b:g}; z) is a degree {degree} polynomial, "
                f"above max_terms={cfg.max_terms}"
            )
        for k in range(degree):
            term *= (a + k) / (b + k) * z / (k + 1)
            acc.add(term)
        return acc.value

    small_terms = 0
    for k in range(cfg.max_terms):
        term *= (a + k) / (b + k) * z / (k + 1)
        acc.add(term)

        if abs(term) < cfg.rel_tol * abs(acc.value):
            small_terms += 1
            if small_terms == 2:
                return acc.value
        else:
            small_terms = 0

    raise NoConvergence(
        f"Phi({a:g}, {b:g}; {z:g}) not converged after {cfg.max_terms} terms "
        f"(last term {term:.3e}, partial sum {acc.value:.3e})"
    )


def reciprocal_gamma(x: float) -> float:
    """1/Gamma(x); exactly 0.0 at zero and the negative integers"""

    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"reciprocal_gamma needs a finite argument, got {x}")
    if _is_nonpositive_integer(x):
        return 0.0
    return float(special.rgamma(x))


def _hermite_series(nu: float, z: float, cfg: SeriesConfig) -> float:
    z2 = z * z
    even = reciprocal_gamma((1.0 - nu) / 2.0)
    odd = reciprocal_gamma(-nu / 2.0)

    total = 0.0
    if even != 0.0:
        total += even * kummer_phi(-nu / 2.0, 0.5, z2, cfg)
    # Gamma(-1/2)/Gamma(1/2) = -2
    if odd != 0.0 and z != 0.0:
        total -= 2.0 * odd * z * kummer_phi((1.0 - nu) / 2.0, 1.5, z2, cfg)

    return math.pow(2.0, nu) * SQRT_PI * total


def _uses_series(nu: float, z: float, cfg: SeriesConfig) -> bool:
    return z <= cfg.series_window or _is_nonnegative_integer(nu)


def hermite_fn(nu: HermiteOrder, z: float, cfg: Optional[SeriesConfig] = None) -> float:
    """
    Hermite function H_nu(z) for real order nu and real z

    Raises:
        OutOfWindow: |z| > cfg.z_max
        NoConvergence: propagated from kummer_phi
    """

    cfg = _series_config(cfg)
    nu = _order(nu)
    z = float(z)

    if abs(z) > cfg.z_max:
        raise OutOfWindow(f"|z|={abs(z):g} exceeds z_max={cfg.z_max:g}")

    if _uses_series(nu, z, cfg):
        return _hermite_series(nu, z, cfg)

    d_nu, _ = special.pbdv(nu, SQRT_2 * z)
    return float(math.pow(2.0, nu / 2.0) * math.exp(z * z / 2.0) * d_nu)


def hermite_fn_deriv(nu: HermiteOrder, z: float, cfg: Optional[SeriesConfig] = None) -> float:
    """dH_nu/dz = 2 nu H_{nu-1}(z)"""

    nu = _order(nu)
    if nu == 0.0:
        return 0.0
    return 2.0 * nu * hermite_fn(nu - 1.0, z, cfg)


def hermite_asymptotic(nu: HermiteOrder, z: float) -> float:
    """Leading large-z behaviour (2z)^nu, positive real z only"""

    nu = _order(nu)
    if not z > 0:
        raise ValueError(f"hermite_asymptotic needs z > 0, got {z}")
    return math.pow(2.0 * z, nu)


def hermite_at_zero(nu: HermiteOrder) -> float:
    """H_nu(0) = 2^nu sqrt(pi) / Gamma((1-nu)/2)"""

    nu = _order(nu)
    return math.pow(2.0, nu) * SQRT_PI * reciprocal_gamma((1.0 - nu) / 2.0)


def hermite_polynomial(n: int, z: ArrayLike) -> ArrayLike:
    """Physicists' Hermite polynomial H_n by the three-term recurrence"""

    if n < 0:
        raise ValueError(f"Polynomial degree must be non-negative, got {n}")

    h_prev = np.ones_like(np.asarray(z, dtype=float))
    if n == 0:
        return h_prev if np.ndim(z) else float(h_prev)

    h = 2.0 * np.asarray(z, dtype=float)
    for k in range(1, n):
        h_prev, h = h, 2.0 * np.asarray(z, dtype=float) * h - 2.0 * k * h_prev

    return h if np.ndim(z) else float(h)


def hermite_envelope(nu: HermiteOrder, z: ArrayLike, cfg: Optional[SeriesConfig] = None) -> ArrayLike:
    """
    H_nu(z) e^{-z^2/2}, elementwise over z

    Above the series window the parabolic cylinder form is used directly, so
    there is no e^{z^2/2} factor to overflow and no upper limit on z. Negative
    z goes through the series and is limited to z >= -cfg.z_max.

    Raises:
        OutOfWindow: some z < -cfg.z_max
    """

    cfg = _series_config(cfg)
    nu = _order(nu)

    z_arr = np.atleast_1d(np.asarray(z, dtype=float))
    if z_arr.size and z_arr.min() < -cfg.z_max:
        raise OutOfWindow(f"z={z_arr.min():g} below -z_max={-cfg.z_max:g}")
    out = np.empty_like(z_arr)

    inside = np.array([_uses_series(nu, zi, cfg) for zi in z_arr], dtype=bool)
    for i in np.flatnonzero(inside):
        zi = z_arr[i]
        out[i] = _hermite_series(nu, zi, cfg) * math.exp(-zi * zi / 2.0)

    if not inside.all():
        d_nu, _ = special.pbdv(nu, SQRT_2 * z_arr[~inside])
        out[~inside] = math.pow(2.0, nu / 2.0) * d_nu

    if np.ndim(z) == 0:
        return float(out[0])
    return out
