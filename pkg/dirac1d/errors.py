"""
Exception hierarchy for dirac1d

Numerical failures raise a Dirac1DError subclass; broken invariants on the
value types raise ValueError instead.
"""


class Dirac1DError(Exception):
    """Base class for every numerical failure reported by dirac1d"""


class ConfigError(Dirac1DError):
    """Settings file or environment override is unusable"""


# specfun

class InvalidPole(Dirac1DError):
    """Kummer series denominator parameter is zero or a negative integer"""


class NoConvergence(Dirac1DError):
    """Series hit max_terms before the stopping rule fired"""


class OutOfWindow(Dirac1DError):
    """Argument outside the documented evaluation window"""


# spectral

class ScanFailure(Dirac1DError):
    """Spectral function evaluated non-finite during a sign scan"""


class MaxIterations(Dirac1DError):
    """Root refinement did not meet its tolerance"""


class ResidualTooLarge(Dirac1DError):
    """Refined root leaves a relative residual above spectral.residual_tol"""


# wavefunction

class NotAnEigenvalue(Dirac1DError):
    """Record residual is above the acceptance tolerance"""


class DegenerateMatch(Dirac1DError):
    """Both matching denominators vanish at the origin"""


class TailTruncation(Dirac1DError):
    """Profile envelope has not decayed at the grid edge"""


# oracle

class Overflow(Dirac1DError):
    """State renormalization failed during shooting"""
