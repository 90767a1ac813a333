"""Adiabaticity criteria and the rigorous overlap bounds.

Ratios are "left side over right side" of each ``A << B`` criterion; a
criterion is declared satisfied when its ratio is at most ``delta_T``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, NamedTuple

import numpy as np

from .errors import DegenerateQuasienergies, DegenerateSpectrum, FloquetQAError, InvalidParameter
from .floquet import FloquetDecomposition, decompose, gap_factor
from .models import PeriodicHamiltonian
from .propagator import IntegratorConfig, monodromy
from .spectrum import DEFAULT_PROFILE_POINTS, CouplingProfile, coupling_profile

DOMAIN_ARC = math.pi / 2


@dataclass(frozen=True)
class Threshold:
    delta_T: float = 0.05

    def __post_init__(self):
        if not 0 < self.delta_T < 1:
            raise InvalidParameter("delta_T must lie in (0, 1)", delta_T=self.delta_T)


class FloquetCheck(NamedTuple):
    ratio: float
    delta: float
    gap_factor: float
    arc: float  # sqrt(N-1) T max_coupling
    domain_violation: bool


def _require_gap(profile: CouplingProfile):
    if not profile.min_gap > 0:
        raise DegenerateSpectrum("minimum gap is zero", min_gap=profile.min_gap)


def traditional_condition(profile: CouplingProfile) -> float:
    """``max |<E_m|dE_n>| / min |E_m - E_n|``."""
    _require_gap(profile)
    return profile.max_coupling / profile.min_gap


def frequency_condition(omega: float, profile: CouplingProfile) -> float:
    """``omega / min |E_m - E_n|`` with ``omega`` the system's angular frequency."""
    _require_gap(profile)
    return omega / profile.min_gap


def floquet_condition(profile: CouplingProfile, decomp: FloquetDecomposition, N: int) -> FloquetCheck:
    """Floquet ratio and the bound parameter ``delta``.

    ``ratio = max_coupling / [omega / (pi sqrt(2(N-1))) * g]`` and
    ``delta = sin^2(sqrt(N-1) T max_coupling / 2) / g^2`` with ``g`` the
    quasienergy gap factor.  The derivation needs
    ``sqrt(N-1) T max_coupling <= pi/2``; outside that the values are
    still returned but flagged.
    """
    if N < 2:
        raise InvalidParameter("Floquet condition needs N >= 2", N=N)
    T = decomp.period
    c = profile.max_coupling
    arc = math.sqrt(N - 1) * T * c
    if c == 0:
        # static eigenbasis: no transitions regardless of quasienergy spacing
        try:
            g = gap_factor(decomp, T)
        except DegenerateQuasienergies:
            g = 0.0
        return FloquetCheck(0.0, 0.0, g, 0.0, False)
    g = gap_factor(decomp, T)
    rhs = decomp.omega / (math.pi * math.sqrt(2 * (N - 1))) * g
    delta = math.sin(arc / 2) ** 2 / g**2
    return FloquetCheck(c / rhs, delta, g, arc, arc > DOMAIN_ARC)


def overlap_lower_bound(delta: float) -> float:
    """``sqrt(1 - 4 delta)`` for ``delta < 1/4``, else 0 (no information)."""
    if delta < 0:
        raise InvalidParameter("delta must be >= 0", delta=delta)
    return math.sqrt(1 - 4 * delta) if delta < 0.25 else 0.0


def finite_time_bound(max_coupling: float, N: int, tau: float) -> float:
    """Upper bound ``2 sin^2(sqrt(N-1) tau max_coupling / 2)`` on ``1 - |d_m(t0 + tau)|``."""
    return 2 * math.sin(math.sqrt(N - 1) * tau * max_coupling / 2) ** 2


def finite_time_condition(profile: CouplingProfile, N: int, tau: float) -> float:
    """``tau sqrt(N-1) max_coupling / sqrt 2``."""
    if not tau > 0:
        raise InvalidParameter("tau must be positive", tau=tau)
    return tau * math.sqrt(N - 1) * profile.max_coupling / math.sqrt(2)


def finite_time_domain_ok(max_coupling: float, N: int, tau: float) -> bool:
    return math.sqrt(N - 1) * tau * max_coupling <= DOMAIN_ARC


@dataclass
class ConditionReport:
    params: dict
    N: int
    period: float
    omega: float
    quasienergies: list[float]
    max_coupling: float
    min_gap: float
    traditional_ratio: float
    frequency_ratio: float
    floquet_ratio: float
    delta: float
    gap_factor: float
    domain_violation: bool
    bound_overlap: float
    threshold: Threshold
    min_overlap: float | None = None
    extra: dict[str, Any] = field(default_factory=dict)

    @property
    def verdicts(self) -> dict[str, bool]:
        dt = self.threshold.delta_T
        out = {
            "traditional": self.traditional_ratio <= dt,
            "frequency": self.frequency_ratio <= dt,
            "floquet": self.floquet_ratio <= dt and not self.domain_violation,
        }
        if self.min_overlap is not None:
            out["exact"] = 1 - self.min_overlap <= dt
        return out

    def finite_time_ratio(self, tau: float) -> float:
        return tau * math.sqrt(self.N - 1) * self.max_coupling / math.sqrt(2)

    def to_json(self) -> dict:
        out = {
            "params": self.params,
            "quasienergies": [float(x) for x in self.quasienergies],
            "max_coupling": self.max_coupling,
            "min_gap": self.min_gap,
            "delta": self.delta,
            "ratios": {
                "traditional": self.traditional_ratio,
                "frequency": self.frequency_ratio,
                "floquet": self.floquet_ratio,
            },
            "verdicts": self.verdicts,
            "bound_overlap": self.bound_overlap,
            "gap_factor": self.gap_factor,
            "domain_violation": self.domain_violation,
            "delta_T": self.threshold.delta_T,
            "period": self.period,
        }
        if self.min_overlap is not None:
            out["min_overlap"] = self.min_overlap
        out.update(self.extra)
        return out


def analyze(
    H: PeriodicHamiltonian,
    t0: float = 0.0,
    cfg: IntegratorConfig | None = None,
    thr: Threshold | None = None,
    profile_points: int = DEFAULT_PROFILE_POINTS,
    evolve_periods: int = 0,
    level: int = 0,
) -> ConditionReport:
    """Run monodromy -> Floquet decomposition -> coupling profile -> all criteria.

    With ``evolve_periods > 0`` the state started in level ``level`` is also
    evolved and its minimum overlap recorded (enables the ``exact`` verdict).
    Sub-errors are re-raised with a ``stage`` entry in their context.
    """
    cfg = cfg or IntegratorConfig()
    thr = thr or Threshold()
    N = H.dimension
    stage = "monodromy"
    try:
        decomp = decompose(monodromy(H, t0, cfg), H.omega)
        stage = "spectrum"
        profile = coupling_profile(H, t0, profile_points)
        stage = "floquet"
        fc = floquet_condition(profile, decomp, N)
        min_overlap = None
        if evolve_periods > 0:
            stage = "evolution"
            from .evolution import overlap_series

            series = overlap_series(H, level, t0, t0 + evolve_periods * H.period, cfg)
            min_overlap = float(series.overlaps.min())
    except FloquetQAError as exc:
        exc.context.setdefault("stage", stage)
        exc.context.setdefault("model", H.label)
        raise
    bound = 0.0 if fc.domain_violation else overlap_lower_bound(fc.delta)
    return ConditionReport(
        params=H.to_config(),
        N=N,
        period=H.period,
        omega=H.omega,
        quasienergies=list(decomp.quasienergies),
        max_coupling=profile.max_coupling,
        min_gap=profile.min_gap,
        traditional_ratio=traditional_condition(profile),
        frequency_ratio=frequency_condition(H.omega, profile),
        floquet_ratio=fc.ratio,
        delta=fc.delta,
        gap_factor=fc.gap_factor,
        domain_violation=fc.domain_violation,
        bound_overlap=bound,
        threshold=thr,
        min_overlap=min_overlap,
    )


def delta_or_inf(profile: CouplingProfile, decomp: FloquetDecomposition, N: int) -> float:
    """``delta`` with resonances mapped to ``inf`` and the domain guard enforced."""
    try:
        fc = floquet_condition(profile, decomp, N)
    except DegenerateQuasienergies:
        return math.inf
    return math.inf if fc.domain_violation else fc.delta
