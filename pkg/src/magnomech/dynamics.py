"""Drift and diffusion matrices of the linearized fluctuations, and stability.

Quadrature basis order: (dX1, dX2, dY1, dY2, dx, dp) — cavity amplitude and
phase, magnon amplitude and phase, mechanical position and momentum. Vacuum
variance is 1/2 in this convention.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EigenSolveError, ParameterError
from .model import SystemParams
from .steady_state import WorkingPoint

GAIN_NOISE_MODES = ("vacuum", "reversed")


@dataclass(frozen=True)
class QuadratureDrift:
    """6x6 real drift matrix of the quadrature fluctuations."""

    a: np.ndarray

    def __post_init__(self) -> None:
        if self.a.shape != (6, 6):
            raise ParameterError("drift matrix must be 6x6")


@dataclass(frozen=True)
class DiffusionMatrix:
    """6x6 diagonal diffusion matrix (position row exactly zero)."""

    d: np.ndarray

    def __post_init__(self) -> None:
        if self.d.shape != (6, 6):
            raise ParameterError("diffusion matrix must be 6x6")


@dataclass(frozen=True)
class StabilityReport:
    eigenvalues: np.ndarray
    max_lyapunov: float
    stable: bool


def quadrature_drift(delta_a: float, delta_m_eff: float, kappa_a: float,
                     kappa_m: float, gamma_b: float, omega_b: float,
                     g_ma: float, g_eff: float) -> QuadratureDrift:
    """Drift matrix of the linearized dynamics in the quadrature basis."""
    for val in (delta_a, delta_m_eff, kappa_a, kappa_m, gamma_b, omega_b,
                g_ma, g_eff):
        if not np.isfinite(val):
            raise ParameterError("quadrature_drift: non-finite input")
    a = np.zeros((6, 6))
    a[0, 0] = a[1, 1] = kappa_a
    a[0, 1] = delta_a
    a[1, 0] = -delta_a
    a[0, 3] = g_ma
    a[1, 2] = -g_ma
    a[2, 1] = g_ma
    a[3, 0] = -g_ma
    a[2, 2] = a[3, 3] = -kappa_m
    a[2, 3] = delta_m_eff
    a[3, 2] = -delta_m_eff
    a[2, 4] = -g_eff
    a[4, 5] = omega_b
    a[5, 3] = g_eff
    a[5, 4] = -omega_b
    a[5, 5] = -gamma_b
    return QuadratureDrift(a=a)


def drift_from_params(params: SystemParams, wp: WorkingPoint) -> QuadratureDrift:
    return quadrature_drift(params.delta_a, wp.delta_m_eff, params.kappa_a,
                            params.kappa_m, params.gamma_b, params.omega_b,
                            params.g_ma, wp.G)


# Map (dX1,dX2,dY1,dY2,dx,dp) -> (da,da+,dm,dm+,dx,dp): da=(dX1+i dX2)/sqrt2.
_MODE_BLOCK = np.array([[1.0, 1.0j], [1.0, -1.0j]]) / np.sqrt(2.0)
_QUAD_TO_MODE = np.zeros((6, 6), dtype=complex)
_QUAD_TO_MODE[0:2, 0:2] = _MODE_BLOCK
_QUAD_TO_MODE[2:4, 2:4] = _MODE_BLOCK
_QUAD_TO_MODE[4:6, 4:6] = np.eye(2)
_MODE_TO_QUAD = np.linalg.inv(_QUAD_TO_MODE)


def complex_drift(delta_a: float, delta_m_eff: float, kappa_a: float,
                  kappa_m: float, gamma_b: float, omega_b: float,
                  g_ma: float, g_eff: float) -> np.ndarray:
    """Drift in the (da, da+, dm, dm+, dx, dp) basis.

    Built as a similarity transform of the quadrature drift, so both share
    one spectrum by construction.
    """
    a = quadrature_drift(delta_a, delta_m_eff, kappa_a, kappa_m, gamma_b,
                         omega_b, g_ma, g_eff).a
    return _QUAD_TO_MODE @ a @ _MODE_TO_QUAD


def diffusion_matrix(kappa_a: float, kappa_m: float, gamma_b: float,
                     n_a: float, n_m: float, n_b: float,
                     gain_noise: str = "vacuum") -> DiffusionMatrix:
    """Diagonal diffusion matrix for the three input noise channels.

    The cavity channel uses |kappa_a|*(2*n_a+1) by default ("vacuum"): a gain
    medium injects noise at least at the vacuum-fluctuation rate, keeping the
    diffusion positive semidefinite. ``gain_noise="reversed"`` instead treats
    a gain cavity as a time-reversed loss channel with cavity entries
    -kappa_a*(2*n_a+1); for kappa_a > 0 those entries are negative, and the
    resulting covariance matrices can violate the uncertainty bound. The
    reversed mode exists only to reproduce published curves computed that way.
    """
    if gain_noise not in GAIN_NOISE_MODES:
        raise ParameterError(f"gain_noise must be one of {GAIN_NOISE_MODES}")
    if min(n_a, n_m, n_b) < 0.0:
        raise ParameterError("occupations must be non-negative")
    cavity = abs(kappa_a) if gain_noise == "vacuum" else -kappa_a
    d = np.diag([cavity * (2.0 * n_a + 1.0),
                 cavity * (2.0 * n_a + 1.0),
                 kappa_m * (2.0 * n_m + 1.0),
                 kappa_m * (2.0 * n_m + 1.0),
                 0.0,
                 gamma_b * (2.0 * n_b + 1.0)])
    return DiffusionMatrix(d=d)


def diffusion_from_params(params: SystemParams,
                          gain_noise: str = "vacuum") -> DiffusionMatrix:
    n_a, n_m, n_b = params.occupations()
    return diffusion_matrix(params.kappa_a, params.kappa_m, params.gamma_b,
                            n_a, n_m, n_b, gain_noise=gain_noise)


def stability(drift: QuadratureDrift, tol_abs: float = 0.0) -> StabilityReport:
    """Eigenvalues, maximal Lyapunov exponent and the stability verdict.

    Stable iff the largest eigenvalue real part is below -tol_abs.
    """
    try:
        eigenvalues = np.linalg.eigvals(drift.a)
    except np.linalg.LinAlgError as exc:
        raise EigenSolveError(f"eigenvalue computation failed: {exc}") from exc
    if not np.all(np.isfinite(eigenvalues)):
        raise EigenSolveError("eigenvalue computation returned non-finite values")
    max_lyapunov = float(eigenvalues.real.max())
    return StabilityReport(eigenvalues=eigenvalues,
                           max_lyapunov=max_lyapunov,
                           stable=max_lyapunov < -tol_abs)
