"""Special functions and tail quadrature backing the analytic outage formulas.

Everything in this module is a pure function of its arguments.  The gamma
family delegates to the cephes routines in :mod:`scipy.special`, whose
relative error (~1e-14) sits well below the 1e-12 budget the outage
integrals need.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate, special

__all__ = [
    "QuadratureSpec",
    "DEFAULT_QUADRATURE",
    "QuadratureConvergenceError",
    "ln_gamma",
    "reg_gamma_p",
    "reg_gamma_q",
    "digamma",
    "meijer_special_cdf",
    "integrate_semi_infinite",
]


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances for the adaptive quadrature of semi-infinite tail integrals.

    The defaults are deliberately tighter than any Monte Carlo resolution used
    for validation, so quadrature error never dominates a comparison.
    """

    abs_tol: float = 1e-10
    rel_tol: float = 1e-8
    max_subdivisions: int = 200

    def __post_init__(self) -> None:
        if not (self.abs_tol > 0.0 and self.rel_tol > 0.0):
            raise ValueError("quadrature tolerances must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be at least 1")


DEFAULT_QUADRATURE = QuadratureSpec()

# Integrand-to-peak ratio below which the exponential tail is truncated.
_TAIL_EPS = 1e-16


class QuadratureConvergenceError(RuntimeError):
    """Quadrature failed to meet tolerance; ``estimate`` holds the best value."""

    def __init__(self, message: str, estimate: float):
        super().__init__(message)
        self.estimate = estimate


def ln_gamma(x: float) -> float:
    """Natural logarithm of the Gamma function for x > 0."""
    if not x > 0.0:
        raise ValueError(f"ln_gamma requires x > 0, got {x!r}")
    return float(special.gammaln(x))


def _check_gamma_args(a: float, x: float) -> None:
    if not a > 0.0:
        raise ValueError(f"shape parameter must be positive, got {a!r}")
    if x < 0.0:
        raise ValueError(f"argument must be non-negative, got {x!r}")


def reg_gamma_q(a: float, x: float) -> float:
    """Regularized upper incomplete gamma function Q(a, x) = Gamma(a, x)/Gamma(a)."""
    _check_gamma_args(a, x)
    return float(special.gammaincc(a, x))


def reg_gamma_p(a: float, x: float) -> float:
    """Regularized lower incomplete gamma function P(a, x) = 1 - Q(a, x)."""
    _check_gamma_args(a, x)
    return float(special.gammainc(a, x))


def digamma(x: float) -> float:
    """Digamma function psi(x) for x > 0."""
    if not x > 0.0:
        raise ValueError(f"digamma requires x > 0, got {x!r}")
    return float(special.psi(x))


def meijer_special_cdf(
    t: float, m_r: int, spec: QuadratureSpec = DEFAULT_QUADRATURE
) -> float:
    """CDF of the loop-channel power seen through a matched unit combiner.

    The random variable is ``X = Z * U`` with ``Z ~ Beta(1, m_r - 1)`` (the
    squared cosine between two independent isotropic ``m_r``-dimensional
    directions) and ``U ~ Gamma(m_r, 1)`` (the squared norm of the
    unit-variance loop vector).  For ``m_r == 1`` the Beta factor degenerates
    to the constant 1 and ``F(t) = 1 - exp(-t)``; otherwise the CDF is
    evaluated from the tail integral

        F(t) = 1 - (1/Gamma(m_r)) * int_t^inf (1 - t/u)^(m_r-1) u^(m_r-1) e^-u du.
    """
    if t < 0.0:
        raise ValueError(f"negative argument {t!r}")
    if m_r < 1:
        raise ValueError(f"m_r must be a positive integer, got {m_r!r}")
    if m_r == 1:
        return -float(np.expm1(-t))
    if t == 0.0:
        return 0.0

    def integrand(u: float) -> float:
        return (1.0 - t / u) ** (m_r - 1) * u ** (m_r - 1) * np.exp(-u)

    tail = integrate_semi_infinite(integrand, t, spec)
    return float(np.clip(1.0 - tail / special.gamma(m_r), 0.0, 1.0))


def _tail_cutoff(f: Callable[[float], float], lower: float) -> float | None:
    """Find an upper limit beyond which the integrand is negligible.

    Assumes the integrand carries an exponentially decaying envelope, which
    holds for every integral in the outage analysis.  Returns ``None`` when
    the integrand is zero everywhere it was probed.
    """
    probes = lower + np.concatenate(
        [np.linspace(0.0, 1.0, 9), 2.0 ** np.arange(1, 24)]
    )
    values = np.array([abs(f(x)) for x in probes])
    peak = values.max()
    if peak == 0.0:
        return None
    i_peak = int(values.argmax())
    for i in range(i_peak + 1, len(probes)):
        if values[i] <= _TAIL_EPS * peak:
            return float(probes[i] * 1.5)
    return float(probes[-1])


def _scale_ladder(lower: float, upper: float) -> list[float]:
    """Forced subdivision points covering every decade of the interval.

    Several outage integrands vary on a boundary layer of width ``~lower``
    at the left endpoint of an interval many orders of magnitude wider; a
    plain adaptive pass can step straight over such a layer without its
    error estimate noticing.  Seeding panel boundaries at geometrically
    spaced offsets from the endpoint makes the layer visible at every scale.
    """
    span = upper - lower
    anchor = max(lower, span * 1e-14, 1e-300)
    ladder = np.geomspace(anchor * 1e-2, span, num=32)
    pts = lower + ladder
    return [float(p) for p in pts if lower < p < upper]


def integrate_semi_infinite(
    f: Callable[[float], float],
    lower: float,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
) -> float:
    """Integrate ``f`` over ``[lower, inf)`` for exponentially decaying integrands.

    The infinite interval is truncated where the envelope falls below
    ``1e-16`` of the integrand's peak, then handed to adaptive Gauss-Kronrod
    quadrature with forced panel boundaries on a geometric scale ladder.
    Raises :class:`QuadratureConvergenceError` (carrying the best available
    estimate) if the tolerance cannot be met within
    ``spec.max_subdivisions`` subdivisions.
    """
    upper = _tail_cutoff(f, lower)
    if upper is None:
        return 0.0
    ladder = _scale_ladder(lower, upper)
    if spec.max_subdivisions < 2 * len(ladder):
        ladder = ladder[:: max(1, len(ladder) // max(spec.max_subdivisions // 2, 1))]
        if spec.max_subdivisions < 2 * len(ladder):
            ladder = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        out = integrate.quad(
            f,
            lower,
            upper,
            epsabs=spec.abs_tol,
            epsrel=spec.rel_tol,
            limit=spec.max_subdivisions,
            points=ladder or None,
            full_output=1,
        )
    result, abserr = float(out[0]), float(out[1])
    if len(out) > 3 and abserr > max(spec.abs_tol, spec.rel_tol * abs(result)):
        raise QuadratureConvergenceError(
            f"quadrature on [{lower}, {upper}] did not converge: {out[3]}",
            estimate=result,
        )
    return result
