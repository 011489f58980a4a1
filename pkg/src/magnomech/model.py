"""Physical parameter record, unit conventions and two-mode phase classification.

All rates and frequencies held by :class:`SystemParams` are angular (rad/s).
Helpers accepting cyclic frequencies (Hz) multiply by 2*pi on entry.

Sign convention: ``kappa_a > 0`` is a gain (active) cavity, ``kappa_a < 0``
a lossy one; the magnon and mechanical rates are always positive losses.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass, replace, fields

from scipy.constants import hbar, k as k_B

from .errors import ParameterError

TWO_PI = 2.0 * math.pi

#: Electron gyromagnetic ratio, 2*pi * 28 GHz/T.
GYROMAGNETIC_RATIO = TWO_PI * 28e9

#: Default relative tolerance for the exceptional-point classification.
EP_REL_TOL = 1e-9

_ANGULAR_FIELDS = (
    "omega_a", "omega_m", "omega_b", "delta_a", "delta_m", "delta_m_eff",
    "kappa_a", "kappa_m", "gamma_b", "g_ma", "g_mb", "G_eff", "epsilon_d",
)


class PTRegime(enum.Enum):
    """Phase of the two-mode photon-magnon subsystem."""

    UNBROKEN = "Unbroken"
    EXCEPTIONAL_POINT = "ExceptionalPoint"
    BROKEN = "Broken"


@dataclass(frozen=True)
class PTPhase:
    """Classification result with the raw margin 2*g_ma - (kappa_a + kappa_m)."""

    regime: PTRegime
    margin: float

    @property
    def tag(self) -> str:
        return self.regime.value


def thermal_occupation(omega: float, temperature: float) -> float:
    """Bose-Einstein mean occupation 1/(exp(hbar*omega/kB*T) - 1).

    ``omega`` is angular (rad/s), ``temperature`` in kelvin. Returns 0 at T=0.
    """
    if not (math.isfinite(omega) and math.isfinite(temperature)):
        raise ParameterError("thermal_occupation: non-finite input")
    if omega <= 0.0:
        raise ParameterError("thermal_occupation: omega must be positive")
    if temperature < 0.0:
        raise ParameterError("thermal_occupation: negative temperature")
    if temperature == 0.0:
        return 0.0
    x = hbar * omega / (k_B * temperature)
    return 1.0 / math.expm1(x)


def sphere_volume(diameter: float) -> float:
    """Volume of a sphere of the given diameter."""
    return math.pi / 6.0 * diameter**3


def rabi_frequency(b0: float, sphere_diameter: float, spin_density: float) -> float:
    """Drive amplitude (rad/s) of a magnetically driven sphere of spins.

    epsilon = (sqrt(5)/4) * gamma_g * sqrt(rho * V) * B0, with V the sphere
    volume and gamma_g the electron gyromagnetic ratio.
    """
    for name, val in (("b0", b0), ("sphere_diameter", sphere_diameter),
                      ("spin_density", spin_density)):
        if not (math.isfinite(val) and val > 0.0):
            raise ParameterError(f"rabi_frequency: {name} must be finite and > 0")
    n_total = spin_density * sphere_volume(sphere_diameter)
    return math.sqrt(5.0) / 4.0 * GYROMAGNETIC_RATIO * math.sqrt(n_total) * b0


def pt_classify(g_ma: float, kappa_a: float, kappa_m: float,
                rel_tol: float = EP_REL_TOL) -> PTPhase:
    """Classify the photon-magnon pair by comparing 2*g_ma with kappa_a + kappa_m.

    Within ``rel_tol * (kappa_a + kappa_m)`` of the balance point the result
    is the exceptional point; beyond it the phase is unbroken (2*g_ma larger)
    or broken (smaller).
    """
    if kappa_m <= 0.0:
        raise ParameterError("pt_classify: kappa_m must be positive")
    total = kappa_a + kappa_m
    margin = 2.0 * g_ma - total
    if abs(margin) <= rel_tol * abs(total):
        regime = PTRegime.EXCEPTIONAL_POINT
    elif margin > 0.0:
        regime = PTRegime.UNBROKEN
    else:
        regime = PTRegime.BROKEN
    return PTPhase(regime=regime, margin=margin)


def two_mode_eigenfrequencies(delta: float, kappa_a: float, kappa_m: float,
                              g_ma: float) -> tuple[complex, complex]:
    """Complex eigenfrequencies of the coupled photon-magnon pair.

    omega_pm = -delta - i*(kappa_m - kappa_a)/2 +/- sqrt(g_ma^2 - (kappa_a+kappa_m)^2/4)
    with the square root taken in the complex plane.
    """
    for val in (delta, kappa_a, kappa_m, g_ma):
        if not math.isfinite(val):
            raise ParameterError("two_mode_eigenfrequencies: non-finite input")
    base = -delta - 0.5j * (kappa_m - kappa_a)
    root = cmath.sqrt(complex(g_ma**2 - 0.25 * (kappa_a + kappa_m) ** 2))
    return base + root, base - root


@dataclass(frozen=True)
class SystemParams:
    """All physical rates and detunings of the three-mode system, in rad/s.

    ``delta_m_eff=None`` marks self-consistent mode (the effective magnon
    detuning is computed from the steady state; ``delta_m`` must then be set).
    ``G_eff=None`` marks derive-from-drive mode (the effective magnomechanical
    coupling comes from ``epsilon_d`` and ``g_mb``). Exactly one of ``G_eff``
    and ``epsilon_d`` must be supplied.
    """

    omega_a: float
    omega_m: float
    omega_b: float
    delta_a: float
    kappa_a: float
    kappa_m: float
    gamma_b: float
    g_ma: float
    g_mb: float
    temperature: float
    delta_m_eff: float | None = None
    delta_m: float | None = None
    G_eff: float | None = None
    epsilon_d: float | None = None

    def __post_init__(self) -> None:
        for f in fields(self):
            val = getattr(self, f.name)
            if val is not None and not math.isfinite(val):
                raise ParameterError(f"SystemParams.{f.name} is not finite")
        if self.kappa_m <= 0.0:
            raise ParameterError("kappa_m must be positive")
        if self.gamma_b <= 0.0:
            raise ParameterError("gamma_b must be positive")
        if self.omega_b <= 0.0:
            raise ParameterError("omega_b must be positive")
        if self.g_ma < 0.0 or self.g_mb < 0.0:
            raise ParameterError("coupling rates must be non-negative")
        if self.temperature < 0.0:
            raise ParameterError("temperature must be non-negative")
        has_g = self.G_eff is not None
        has_drive = self.epsilon_d is not None and self.g_mb > 0.0
        if has_g == has_drive:
            raise ParameterError(
                "exactly one of G_eff or (epsilon_d with g_mb > 0) must be given")
        if self.G_eff is not None and self.G_eff < 0.0:
            raise ParameterError("G_eff must be non-negative")
        if self.epsilon_d is not None and self.epsilon_d < 0.0:
            raise ParameterError("epsilon_d must be non-negative")
        if self.delta_m_eff is None and self.delta_m is None:
            raise ParameterError(
                "delta_m is required when delta_m_eff is self-consistent")

    @classmethod
    def from_cyclic(cls, **kwargs) -> "SystemParams":
        """Build from cyclic frequencies (Hz); temperature stays in kelvin."""
        converted = {}
        for key, val in kwargs.items():
            if key in _ANGULAR_FIELDS and val is not None:
                converted[key] = TWO_PI * val
            else:
                converted[key] = val
        return cls(**converted)

    def replace(self, **changes) -> "SystemParams":
        return replace(self, **changes)

    @property
    def self_consistent(self) -> bool:
        return self.delta_m_eff is None

    @property
    def derive_from_drive(self) -> bool:
        return self.G_eff is None

    def pt_phase(self, rel_tol: float = EP_REL_TOL) -> PTPhase:
        return pt_classify(self.g_ma, self.kappa_a, self.kappa_m, rel_tol)

    def occupations(self) -> tuple[float, float, float]:
        """Thermal occupations (n_a, n_m, n_b) at the bath temperature."""
        return (thermal_occupation(self.omega_a, self.temperature),
                thermal_occupation(self.omega_m, self.temperature),
                thermal_occupation(self.omega_b, self.temperature))
