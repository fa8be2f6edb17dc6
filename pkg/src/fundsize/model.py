"""Parameter space and elementary randomness of the fund-size process.

The industry is modeled by three independent mechanisms, all with monthly
rates:

* entry: a Poisson stream of ``nu`` new funds per month, each with log size
  drawn from a normal distribution centered at ``omega0``,
* exit: every live fund dies with size-independent hazard ``lam`` per month,
* growth: log size follows a random walk whose drift ``mu_s(s)`` and
  volatility ``sigma_s(s)`` are each a power law of size plus a constant.

Sizes ``s`` are in millions of USD and ``omega = log(s)``, so ``omega0 = 0``
means a one-million-dollar entrant.  Annual-to-monthly conversion is the
caller's job (divide rates by 12); everything in this package is monthly.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, fields

import numpy as np

__all__ = [
    "ModelParams",
    "DiffusionConstants",
    "ENTRY_VARIANCE_CONVENTIONS",
    "entry_sigma",
    "entry_size_draw",
    "mu_of_size",
    "sigma_of_size",
    "validate_params",
]

# The entry-size density is written with normalization 1/sqrt(pi*s^2) and
# exponent -(w - w0)^2 / s^2, i.e. a normal with variance s^2/2, while the
# surrounding text calls s^2 "the variance".  Both readings are supported:
#   "literal"  -> draws have variance sigma_omega^2 / 2
#   "standard" -> draws have variance sigma_omega^2
ENTRY_VARIANCE_CONVENTIONS = ("literal", "standard")

# JSON field name for the exit rate ("lambda" is reserved in Python).
_JSON_KEYS = {
    "nu": "nu",
    "lam": "lambda",
    "mu0": "mu0",
    "alpha": "alpha",
    "mu_inf": "mu_inf",
    "sigma0": "sigma0",
    "beta": "beta",
    "sigma_inf": "sigma_inf",
    "omega0": "omega0",
    "sigma_omega": "sigma_omega",
    "t0": "t0",
}


@dataclass(frozen=True)
class ModelParams:
    """All rates and coefficient-curve parameters, in monthly units.

    Attributes:
        nu: entry rate, funds per month.
        lam: exit hazard per fund per month.
        mu0, alpha, mu_inf: drift curve ``mu_s(s) = mu0 * s**-alpha + mu_inf``
            (per month).
        sigma0, beta, sigma_inf: volatility curve
            ``sigma_s(s) = sigma0 * s**-beta + sigma_inf`` (per sqrt month).
        omega0: mean log size of entering funds (log millions USD).
        sigma_omega: entry spread parameter; see
            :data:`ENTRY_VARIANCE_CONVENTIONS` for how it maps to a variance.
        t0: month at which entry begins.
    """

    nu: float
    lam: float
    mu0: float
    alpha: float
    mu_inf: float
    sigma0: float
    beta: float
    sigma_inf: float
    omega0: float
    sigma_omega: float
    t0: float = 0.0

    def to_dict(self) -> dict:
        """Flat JSON-ready dict using the external field names."""
        return {_JSON_KEYS[f.name]: float(getattr(self, f.name)) for f in fields(self)}

    def to_json(self, **kwargs) -> str:
        kwargs.setdefault("sort_keys", True)
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, data: dict) -> "ModelParams":
        """Build from a flat dict; unknown keys are an error.

        ``t0`` may be omitted (defaults to 0); every other field is required.
        """
        inverse = {v: k for k, v in _JSON_KEYS.items()}
        unknown = sorted(set(data) - set(inverse))
        if unknown:
            raise ValueError(f"unknown parameter keys: {unknown}")
        kwargs = {inverse[k]: float(v) for k, v in data.items()}
        missing = sorted(
            _JSON_KEYS[name]
            for name in inverse.values()
            if name not in kwargs and name != "t0"
        )
        if missing:
            raise ValueError(f"missing parameter keys: {missing}")
        return cls(**kwargs)

    @classmethod
    def from_json(cls, text: str) -> "ModelParams":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class DiffusionConstants:
    """Constant-coefficient reduction used by the closed-form solutions.

    ``D`` is the log-size diffusion coefficient; when derived from
    :class:`ModelParams` it equals ``sigma_inf**2 / 2`` exactly and
    ``mu`` equals ``mu_inf``.
    """

    mu: float
    D: float
    lam: float
    nu: float
    omega0: float

    @classmethod
    def from_params(cls, p: ModelParams) -> "DiffusionConstants":
        return cls(mu=p.mu_inf, D=p.sigma_inf**2 / 2.0, lam=p.lam, nu=p.nu, omega0=p.omega0)


def mu_of_size(s, p: ModelParams):
    """Drift per month at size ``s`` (millions USD): ``mu0*s**-alpha + mu_inf``.

    Accepts scalars or arrays; non-positive sizes are rejected.
    """
    s = np.asarray(s, dtype=float)
    if np.any(s <= 0.0):
        raise ValueError("size must be positive")
    out = p.mu0 * s ** (-p.alpha) + p.mu_inf
    return float(out) if out.ndim == 0 else out


def sigma_of_size(s, p: ModelParams):
    """Volatility per sqrt month at size ``s``: ``sigma0*s**-beta + sigma_inf``."""
    s = np.asarray(s, dtype=float)
    if np.any(s <= 0.0):
        raise ValueError("size must be positive")
    out = p.sigma0 * s ** (-p.beta) + p.sigma_inf
    return float(out) if out.ndim == 0 else out


def entry_sigma(p: ModelParams, convention: str = "literal") -> float:
    """Standard deviation of the entry log-size draw under ``convention``."""
    if convention not in ENTRY_VARIANCE_CONVENTIONS:
        raise ValueError(f"convention must be one of {ENTRY_VARIANCE_CONVENTIONS}")
    if convention == "literal":
        return p.sigma_omega / math.sqrt(2.0)
    return p.sigma_omega


def entry_size_draw(rng: np.random.Generator, p: ModelParams, size=None,
                    convention: str = "literal"):
    """Draw entering-fund log sizes centered at ``omega0``.

    ``sigma_omega == 0`` returns ``omega0`` exactly.  ``size=None`` gives a
    scalar; otherwise an array of that shape.
    """
    sd = entry_sigma(p, convention)
    if sd == 0.0:
        if size is None:
            return p.omega0
        return np.full(size, p.omega0, dtype=float)
    draw = p.omega0 + sd * rng.standard_normal(size)
    return float(draw) if size is None else draw


def validate_params(p: ModelParams) -> list[str]:
    """Return a human-readable diagnostic per violated invariant (empty = ok)."""
    problems = []
    if not p.sigma_inf > 0.0:
        problems.append("asymptotic volatility must be positive (sigma_inf > 0)")
    if p.nu < 0.0:
        problems.append("entry rate must be non-negative (nu >= 0)")
    if p.lam < 0.0:
        problems.append("exit rate must be non-negative (lambda >= 0)")
    if p.sigma0 < 0.0:
        problems.append("diffusion amplitude must be non-negative (sigma0 >= 0)")
    if p.alpha < 0.0:
        problems.append("drift exponent must be non-negative (alpha >= 0)")
    if p.beta < 0.0:
        problems.append("diffusion exponent must be non-negative (beta >= 0)")
    if p.sigma_omega < 0.0:
        problems.append("entry spread must be non-negative (sigma_omega >= 0)")
    for f in fields(p):
        if not math.isfinite(getattr(p, f.name)):
            problems.append(f"parameter {f.name} must be finite")
    return problems
