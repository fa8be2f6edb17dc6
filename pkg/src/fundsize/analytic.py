"""Closed-form results for the constant-coefficient limit of the size process.

With constant drift ``mu`` and diffusion ``D`` the number density
``n(omega, t)`` of funds per unit log size solves a linear
advection-diffusion equation with a source (entry), a sink (exit hazard
``lam``), and admits explicit solutions:

* :func:`total_funds` -- the fund count ``N(t) = (nu/lam) (1 - exp(-lam t))``,
* :func:`density_no_entry_exit` -- pure diffusion of a single cohort,
* :func:`density_point_entry` -- steady entry at a single log size,
* :func:`density_lognormal_entry` -- steady entry with normal log-size spread,
* :func:`steady_state_density` -- the ``t -> inf`` two-sided exponential,
* :func:`tail_exponent` -- the power-law exponent of the steady upper tail,
* :func:`relaxation_time` -- how long the transient takes to die out at a
  given distance from the entry size.

Everything here is a pure function of value inputs, safe to evaluate in
parallel over grids.

Numerical notes.  The transient solutions subtract products of huge
exponentials with saturated error functions.  Each product is therefore
evaluated through ``erfcx`` (the scaled complementary error function) so
that every exponent in the code is the *combined* exponent, which is
provably non-positive: writing ``a' = gamma mu^2 / (2 D^2)``, each term
carries ``exp(G - a' u - y^2/(2u))`` with
``G - a' u - y^2/(2u) <= (lam/(2D)) (v - u) <= 0``.  No overflow is
possible for any admissible input.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special

from .model import DiffusionConstants

__all__ = [
    "DensityCurve",
    "density_lognormal_entry",
    "density_no_entry_exit",
    "density_point_entry",
    "erf",
    "gamma_param",
    "relaxation_time",
    "steady_state_density",
    "tail_exponent",
    "total_funds",
]

# Entry spreads below this are numerically indistinguishable from a point
# source; the smeared kernel would divide by ~0 there.
_POINT_ENTRY_EPS = 1e-8


@dataclass
class DensityCurve:
    """A density sampled on an ordered grid of log sizes.

    ``t`` is the evaluation time in months when the curve is a snapshot of
    the transient solution; ``None`` for time-free curves (steady states,
    kernel density estimates).  ``widths`` carries bin widths when the curve
    came from a histogram, so that total mass is exact rather than a
    trapezoid estimate.
    """

    omegas: np.ndarray
    values: np.ndarray
    t: float | None = None
    widths: np.ndarray | None = field(default=None)

    def mass(self) -> float:
        if self.widths is not None:
            return float(np.sum(self.values * self.widths))
        return float(np.trapezoid(self.values, self.omegas))


def erf(x):
    """Error function, odd, within 1e-12 of the true value everywhere."""
    out = special.erf(np.asarray(x, dtype=float))
    return float(out) if out.ndim == 0 else out


def gamma_param(c: DiffusionConstants) -> float:
    """Dimensionless tail-shape parameter ``1/4 + lam D / mu^2`` (> 1/4).

    This is the combination that makes the steady-state log slope equal
    :func:`tail_exponent` exactly and reproduces the relaxation-time
    prefactor; see the decisions ledger for the provenance.
    """
    _require(c, need_mu=True)
    return 0.25 + c.lam * c.D / c.mu**2


def total_funds(t, nu: float, lam: float):
    """Expected fund count after ``t`` months of entry at rate ``nu``.

    ``(nu/lam)(1 - exp(-lam t))`` for ``t >= 0`` and 0 for ``t < 0``;
    the ``lam == 0`` limit is ``nu * t``.
    """
    if nu < 0 or lam < 0:
        raise ValueError("rates must be non-negative")
    t = np.asarray(t, dtype=float)
    if lam == 0.0:
        out = nu * np.maximum(t, 0.0)
    else:
        out = np.where(t > 0.0, -(nu / lam) * np.expm1(-lam * np.maximum(t, 0.0)), 0.0)
    return float(out) if out.ndim == 0 else out


def density_no_entry_exit(omega, t: float, c: DiffusionConstants):
    """Probability density of a cohort diffusing freely for ``t`` months.

    Normal in log size with mean ``mu t`` and variance ``2 D t``.
    """
    if t <= 0.0:
        raise ValueError("t must be positive")
    if c.D <= 0.0:
        raise ValueError("D must be positive")
    omega = np.asarray(omega, dtype=float)
    var = 2.0 * c.D * t
    out = np.exp(-((omega - c.mu * t) ** 2) / (2.0 * var)) / np.sqrt(2.0 * np.pi * var)
    return float(out) if out.ndim == 0 else out


def _transient_bracket(x: np.ndarray, t: float, c: DiffusionConstants, v: float):
    """Shared erfcx evaluation of the transient solution.

    ``x`` is the log distance from the entry center and ``v`` the entry
    log-size variance (``v = 0`` is point entry).  Returns the density.
    """
    gamma = gamma_param(c)
    mu, D, lam, nu = c.mu, c.D, c.lam, c.nu
    ap = gamma * mu**2 / (2.0 * D**2)
    m = mu / (2.0 * D)
    kap = math.sqrt(2.0 * ap)  # = sqrt(gamma) |mu| / D
    y = x + m * v
    ay = np.abs(y)
    u1 = 2.0 * D * t + v
    G = m * y + lam * v / (2.0 * D)

    sq1 = math.sqrt(ap * u1)
    h1 = ay / math.sqrt(2.0 * u1)
    A1, B1 = sq1 + h1, sq1 - h1
    E1 = G - ap * u1 - y * y / (2.0 * u1)
    term_a1 = special.erfcx(A1) * np.exp(E1)

    if v == 0.0:
        # one-sided: the u = v endpoint collapses to erf(+-inf)
        lower = B1 < -6.0
        diff_b = np.where(
            lower,
            special.erfcx(np.where(lower, -B1, 1.0)) * np.exp(E1),
            np.exp(G - kap * ay) * (1.0 + special.erf(B1)),
        )
        bracket = diff_b - term_a1
    else:
        u2 = v
        sq2 = math.sqrt(ap * u2)
        h2 = ay / math.sqrt(2.0 * u2)
        A2, B2 = sq2 + h2, sq2 - h2
        E2 = G - ap * u2 - y * y / (2.0 * u2)
        term_a2 = special.erfcx(A2) * np.exp(E2)
        # erf(B1) - erf(B2) >= 0 since B(u) is increasing in u; switch to
        # complementary forms once both arguments saturate.
        upper = B2 > 6.0
        lower = B1 < -6.0
        safe_b1 = np.where(upper | lower, 0.0, B1)
        safe_b2 = np.where(upper | lower, 0.0, B2)
        diff_b = np.exp(G - kap * ay) * (special.erf(safe_b1) - special.erf(safe_b2))
        diff_b = np.where(
            upper,
            special.erfcx(np.abs(B2)) * np.exp(E2) - special.erfcx(np.abs(B1)) * np.exp(E1),
            diff_b,
        )
        diff_b = np.where(
            lower,
            special.erfcx(np.abs(B1)) * np.exp(E1) - special.erfcx(np.abs(B2)) * np.exp(E2),
            diff_b,
        )
        bracket = (term_a2 - term_a1) + diff_b

    out = nu / (4.0 * math.sqrt(gamma) * abs(mu)) * bracket
    return np.maximum(out, 0.0)  # clip roundoff-scale negatives


def density_point_entry(omega, t: float, c: DiffusionConstants):
    """Number density after ``t`` months of steady entry at ``omega0``.

    The superposition of cohorts entered over ``(0, t]``, each thinned by
    the exit hazard and diffused; tends to :func:`steady_state_density`
    as ``t`` grows and vanishes at both log-size infinities.
    """
    _require(c, need_mu=True, t=t)
    omega = np.asarray(omega, dtype=float)
    out = _transient_bracket(omega - c.omega0, t, c, 0.0)
    return float(out) if out.ndim == 0 else out


def density_lognormal_entry(omega, t: float, c: DiffusionConstants,
                            sigma_omega: float, convention: str = "literal"):
    """Number density with entry log sizes spread around ``omega0``.

    ``sigma_omega`` is the entry spread parameter; its variance follows the
    model convention (``literal``: ``sigma_omega**2 / 2``).  Converges to
    :func:`density_point_entry` as the spread goes to zero.
    """
    _require(c, need_mu=True, t=t)
    if sigma_omega < 0.0:
        raise ValueError("sigma_omega must be non-negative")
    if convention == "literal":
        v = sigma_omega**2 / 2.0
    elif convention == "standard":
        v = sigma_omega**2
    else:
        raise ValueError("convention must be 'literal' or 'standard'")
    omega = np.asarray(omega, dtype=float)
    if sigma_omega < _POINT_ENTRY_EPS:
        out = _transient_bracket(omega - c.omega0, t, c, 0.0)
    else:
        out = _transient_bracket(omega - c.omega0, t, c, v)
    return float(out) if out.ndim == 0 else out


def steady_state_density(omega, c: DiffusionConstants):
    """Stationary number density: a two-sided exponential in ``omega``.

    ``nu / (2 mu sqrt(gamma)) * exp[(mu/D)((omega-omega0)/2
    - sqrt(gamma)|omega-omega0|)]``; integrates to ``nu / lam``.
    """
    _require(c, need_mu=True)
    if c.lam <= 0.0:
        raise ValueError("a steady state requires a positive exit rate")
    gamma = gamma_param(c)
    omega = np.asarray(omega, dtype=float)
    x = omega - c.omega0
    out = (
        c.nu
        / (2.0 * abs(c.mu) * math.sqrt(gamma))
        * np.exp((c.mu / c.D) * x / 2.0 - math.sqrt(gamma) * (abs(c.mu) / c.D) * np.abs(x))
    )
    return float(out) if out.ndim == 0 else out


def tail_exponent(c: DiffusionConstants) -> float:
    """Power-law exponent of the stationary size CDF's upper tail.

    ``(-mu + sqrt(mu^2 + 4 D lam)) / (2 D)``; equals
    ``(mu/D)(sqrt(gamma) - 1/2)`` identically for ``mu > 0``.
    """
    if c.D <= 0.0:
        raise ValueError("D must be positive")
    if c.lam <= 0.0:
        raise ValueError("tail exponent requires a positive exit rate")
    return (-c.mu + math.sqrt(c.mu**2 + 4.0 * c.D * c.lam)) / (2.0 * c.D)


def relaxation_time(omega, c: DiffusionConstants):
    """Months until the transient density is roughly stationary at ``omega``.

    The bound grows quadratically with the log distance from the entry
    size: far tails equilibrate much later than the body.
    """
    _require(c, need_mu=True)
    gamma = gamma_param(c)
    x = np.abs(np.asarray(omega, dtype=float) - c.omega0)
    pref = 9.0 * c.D / (4.0 * gamma * c.mu**2)
    out = pref * (1.0 + np.sqrt(1.0 + (2.0 / 9.0) * (math.sqrt(gamma) * abs(c.mu) / c.D) * x)) ** 2
    return float(out) if out.ndim == 0 else out


def _require(c: DiffusionConstants, need_mu: bool = False, t: float | None = None):
    if c.D <= 0.0:
        raise ValueError("D must be positive")
    if c.lam < 0.0:
        raise ValueError("exit rate must be non-negative")
    if need_mu and c.mu == 0.0:
        raise ValueError("mu must be non-zero for this solution")
    if t is not None and t <= 0.0:
        raise ValueError("t must be positive")
