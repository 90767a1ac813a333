"""Closed-form reference results for the three worked models.

Nothing here touches the integrator; these are the independent side of
every oracle-vs-numerics comparison.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .floquet import fold_quasienergies
from .models import SchwingerRabiParams, TwoToneParams

DEFAULT_K_MAX = 10


def _wrap(angle: float) -> float:
    """Into ``(-pi, pi]``."""
    a = math.remainder(angle, 2 * math.pi)
    return math.pi if a == -math.pi else a


def resonances_reference(omega0: float, theta: float, k_max: int = DEFAULT_K_MAX) -> dict[int, float]:
    """Resonance frequencies from the reference closed form, taken verbatim.

    ``k = 1``: ``w0 / (2 cos theta)`` (omitted for ``cos theta <= 0``);
    ``k >= 2``: ``[sqrt(cos^2 + 4(k^2 - 1)) - cos] w0 / (2(k^2 - 1))``.
    The ``k >= 2`` branch does not satisfy ``Omega = k omega``; see
    :func:`resonances`.
    """
    c = math.cos(theta)
    out = {}
    if c > 0:
        out[1] = omega0 / (2 * c)
    for k in range(2, k_max + 1):
        q = k * k - 1
        out[k] = (math.sqrt(c * c + 4 * q) - c) * omega0 / (2 * q)
    return out


def resonances(omega0: float, theta: float, k_max: int = DEFAULT_K_MAX) -> dict[int, float]:
    """Drive frequencies with ``Omega(omega) = k omega``, where the two quasienergies coincide mod omega.

    Solves ``(k^2 - 1) w^2 + 2 w0 cos(theta) w - w0^2 = 0`` for ``w > 0``.
    """
    c = math.cos(theta)
    out = {}
    if c > 0:
        out[1] = omega0 / (2 * c)
    for k in range(2, k_max + 1):
        q = k * k - 1
        out[k] = (math.sqrt(c * c + q) - c) * omega0 / q
    return out


@dataclass(frozen=True)
class Example1Closed:
    params: SchwingerRabiParams
    Omega: float
    quasienergies: tuple[float, float]  # +-Omega/2 in the rotating frame
    quasienergies_monodromy: tuple[float, float]  # +-Omega/2 + omega/2, folded: eigenphases of U(T, 0)
    coupling: float
    min_gap: float
    exact_criterion: float
    max_population: float
    resonances: dict[int, float] = field(default_factory=dict)
    resonances_reference: dict[int, float] = field(default_factory=dict)

    def amplitude(self) -> float:
        """``omega sin(theta) / Omega`` (0 when ``sin theta = 0``)."""
        p = self.params
        s = math.sin(p.theta)
        return 0.0 if s == 0 else p.omega * s / self.Omega

    def overlap(self, t):
        """``|d_0(t)|`` for a start in the ground state at ``t = 0``."""
        a = self.amplitude()
        x = a * np.sin(self.Omega * np.asarray(t, dtype=float) / 2)
        return np.sqrt(np.clip(1 - x * x, 0.0, 1.0))

    @property
    def min_overlap(self) -> float:
        return math.sqrt(max(0.0, 1 - self.max_population))

    def berry_phase_ground(self) -> float:
        """Geometric phase of the ground level over one period, wrapped to ``(-pi, pi]``.

        In a single-valued gauge ``<E_0|dE_0/dt> = i omega cos^2(theta/2)``,
        so ``i * T * that = -2 pi cos^2(theta/2) = -pi (1 + cos theta)``.
        """
        return _wrap(-math.pi * (1 + math.cos(self.params.theta)))


def example1(p: SchwingerRabiParams, k_max: int = DEFAULT_K_MAX) -> Example1Closed:
    Om = p.rabi
    s = math.sin(p.theta)
    amp2 = 0.0 if s == 0 else (p.omega * s / Om) ** 2
    mono = fold_quasienergies([-Om / 2 + p.omega / 2, Om / 2 + p.omega / 2], p.omega)
    return Example1Closed(
        params=p,
        Omega=Om,
        quasienergies=(-Om / 2, Om / 2),
        quasienergies_monodromy=tuple(sorted(float(x) for x in mono)),
        coupling=p.omega * s / 2,
        min_gap=p.omega0,
        exact_criterion=amp2 / 2,
        max_population=amp2,
        resonances=resonances(p.omega0, p.theta, k_max),
        resonances_reference=resonances_reference(p.omega0, p.theta, k_max),
    )


@dataclass(frozen=True)
class Example2Closed:
    params: SchwingerRabiParams
    Omega: float
    period: float
    quasienergies: tuple[float, float]  # eigenphases of Ubar(Tbar) = U^dag(Tbar), folded into width Omega
    quasienergies_reference: tuple[float, float]  # +-omega/2 reduced modulo Omega/2
    coupling: float
    min_gap: float
    exact_criterion: float

    def overlap(self, t):
        p = self.params
        x = math.sin(p.theta) * np.sin(p.omega * np.asarray(t, dtype=float) / 2)
        return np.sqrt(np.clip(1 - x * x, 0.0, 1.0))

    @property
    def max_population(self) -> float:
        return math.sin(self.params.theta) ** 2

    @property
    def min_overlap(self) -> float:
        return abs(math.cos(self.params.theta))


def example2(p: SchwingerRabiParams) -> Example2Closed:
    Om = p.rabi
    w = p.omega
    if Om > 0:
        period = 2 * np.pi / Om
        q = fold_quasienergies([w / 2 + Om / 2, -w / 2 + Om / 2], Om)
        q_pub = fold_quasienergies([w / 2, -w / 2], Om / 2)
    else:
        # theta = 0, omega = omega0: Hbar is constant, -H
        period = 2 * np.pi / w
        q = q_pub = np.array([-p.omega0 / 2, p.omega0 / 2])
    return Example2Closed(
        params=p,
        Omega=Om,
        period=float(period),
        quasienergies=tuple(sorted(float(x) for x in q)),
        quasienergies_reference=tuple(sorted(float(x) for x in q_pub)),
        coupling=w * math.sin(p.theta) / 2,
        min_gap=p.omega0,
        exact_criterion=math.sin(p.theta) ** 2 / 2,
    )


def example2_ratios(theta, omega, omega0: float = 1.0, degeneracy_tol: float = 1e-12) -> dict[str, np.ndarray]:
    """Vectorised condition ratios for the dual model.

    Uses the identities: couplings and gap equal those of the base model
    (``omega sin(theta)/2`` and ``omega0``), system frequency ``Omega`` and
    quasienergy splitting ``omega`` (mod ``Omega``).
    """
    theta, omega = np.broadcast_arrays(np.asarray(theta, float), np.asarray(omega, float))
    Om = np.sqrt(np.maximum(omega0**2 + omega**2 - 2 * omega * omega0 * np.cos(theta), 0.0))
    coupling = omega * np.sin(theta) / 2
    with np.errstate(divide="ignore", invalid="ignore"):
        gap = np.abs(np.sin(np.pi * omega / Om))
        rhs = Om / (np.pi * np.sqrt(2)) * gap
        floquet = np.where(coupling == 0, 0.0, coupling / rhs)
        arc = np.where(coupling == 0, 0.0, 2 * np.pi / Om * coupling)
        delta = np.where(coupling == 0, 0.0, np.sin(arc / 2) ** 2 / gap**2)
    degenerate = (coupling > 0) & ~(gap >= degeneracy_tol)
    floquet = np.where(degenerate, np.inf, floquet)
    delta = np.where(degenerate, np.inf, delta)
    return {
        "exact": np.sin(theta) ** 2 / 2,
        "traditional": coupling / omega0,
        "frequency": Om / omega0,
        "floquet": floquet,
        "delta": delta,
        "gap_factor": np.where(np.isfinite(gap), gap, 0.0),
        "domain_violation": arc > np.pi / 2,
        "degenerate": degenerate,
    }


@dataclass(frozen=True)
class Example3Closed:
    params: TwoToneParams
    detuning: float
    OmegaPrime: float
    OmegaR: float
    quasienergies_rwa: tuple[float, float]
    trust_region: dict

    def rwa_probability(self, t):
        """Excited-state population ``(V/Omega')^2 sin^2(Omega' t / 2)``."""
        V = self.params.V
        return (V / self.OmegaPrime) ** 2 * np.sin(self.OmegaPrime * np.asarray(t, dtype=float) / 2) ** 2

    def gap_reference(self, t):
        """Instantaneous gap with the reference ``sin^2`` form."""
        p = self.params
        return np.sqrt(p.omega0**2 + 4 * p.V**2 * np.sin(p.omega * np.asarray(t, dtype=float)) ** 2)

    def gap_direct(self, t):
        """Gap of the truncated model by direct 2x2 diagonalisation (``cos^2``)."""
        p = self.params
        return np.sqrt(p.omega0**2 + 4 * p.V**2 * np.cos(p.omega * np.asarray(t, dtype=float)) ** 2)


def example3(p: TwoToneParams) -> Example3Closed:
    dw = p.omega - p.omega0
    op = math.hypot(dw, p.V)
    orr = math.sqrt(p.omega0**2 + 4 * p.V**2)
    return Example3Closed(
        params=p,
        detuning=dw,
        OmegaPrime=op,
        OmegaR=orr,
        quasienergies_rwa=(-(p.omega + orr) / 2, (p.omega + orr) / 2),
        trust_region={
            "near_resonance": abs(dw) <= 10 * p.V,
            "weak_drive": p.V <= 0.1 * p.omega0,
            "V_over_omega0": p.V / p.omega0,
        },
    )
