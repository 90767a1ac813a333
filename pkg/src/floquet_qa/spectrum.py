"""Instantaneous eigensystems, non-adiabatic couplings and phases.

Couplings use the identity ``<E_m|dE_n/dt> = <E_m|dH/dt|E_n> / (E_n - E_m)``
for ``m != n``, which is independent of eigenvector phases.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.integrate import simpson

from .errors import DegenerateSpectrum, NumericalFailure
from .models import PeriodicHamiltonian

DEGENERACY_RTOL = 1e-10
DEFAULT_PROFILE_POINTS = 2048
FD_RELATIVE_STEP = 1e-6


@dataclass(frozen=True)
class InstantaneousSpectrum:
    t: float
    energies: np.ndarray  # ascending
    states: np.ndarray  # column n is |E_n(t)>


@dataclass(frozen=True)
class CouplingProfile:
    grid: np.ndarray
    coupling_values: np.ndarray
    gap_values: np.ndarray
    max_coupling: float
    min_gap: float
    resolution: float
    degenerate: bool = False

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["t", "coupling", "gap"])
            for row in zip(self.grid, self.coupling_values, self.gap_values):
                w.writerow([format(float(x), ".17g") for x in row])


def fix_gauge(states: np.ndarray) -> np.ndarray:
    """Make the largest-modulus component of every column real and positive.

    Near-ties resolve to the lowest index, so equal-modulus components
    (e.g. ``(1, -1)/sqrt 2``) give a reproducible choice.
    """
    mod = np.abs(states)
    peak = mod.max(axis=-2, keepdims=True)
    idx = np.argmax(mod >= peak * (1 - 1e-10), axis=-2)
    pivot = np.take_along_axis(states, idx[..., None, :], axis=-2)
    phase = np.conj(pivot) / np.abs(pivot)
    return states * phase


def eigensystems(H: PeriodicHamiltonian, ts) -> tuple[np.ndarray, np.ndarray]:
    """Batched: energies ``(M, N)`` ascending and gauge-fixed states ``(M, N, N)``."""
    hs = H.evaluate(np.asarray(ts, dtype=float).reshape(-1))
    try:
        energies, states = np.linalg.eigh(hs)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"eigensolver failed: {exc}") from exc
    return energies, fix_gauge(states)


def eigensystem(H: PeriodicHamiltonian, t: float) -> InstantaneousSpectrum:
    energies, states = eigensystems(H, [t])
    return InstantaneousSpectrum(t=float(t), energies=energies[0], states=states[0])


def hamiltonian_derivative(H: PeriodicHamiltonian, ts, method: str = "auto") -> np.ndarray:
    ts = np.asarray(ts, dtype=float).reshape(-1)
    if method == "analytic" or (method == "auto" and H.has_derivative):
        return H.derivative(ts)
    if method not in ("auto", "fd"):
        raise ValueError(f"unknown derivative method {method!r}")
    h = H.period * FD_RELATIVE_STEP
    return (H.evaluate(ts + h) - H.evaluate(ts - h)) / (2 * h)


def coupling_matrix(energies: np.ndarray, states: np.ndarray, dH: np.ndarray) -> np.ndarray:
    """``|<E_m|dE_n/dt>|`` for all ``m != n`` (diagonal set to zero). Batched."""
    num = np.abs(np.conj(np.swapaxes(states, -1, -2)) @ dH @ states)
    diff = np.abs(energies[..., None, :] - energies[..., :, None])
    n = energies.shape[-1]
    off = ~np.eye(n, dtype=bool)
    out = np.zeros_like(num)
    with np.errstate(divide="ignore", invalid="ignore"):
        out[..., off] = num[..., off] / diff[..., off]
    return out


def _min_gaps(energies: np.ndarray) -> np.ndarray:
    if energies.shape[-1] < 2:
        return np.full(energies.shape[:-1], np.inf)
    return np.min(np.diff(energies, axis=-1), axis=-1)


def _degeneracy_tol(energies: np.ndarray) -> np.ndarray:
    return DEGENERACY_RTOL * np.max(np.abs(energies), axis=-1)


def couplings_on_grid(H: PeriodicHamiltonian, ts, method: str = "auto") -> tuple[np.ndarray, np.ndarray]:
    """Per-time maximum coupling and minimum gap. Raises on degeneracy."""
    ts = np.asarray(ts, dtype=float).reshape(-1)
    energies, states = eigensystems(H, ts)
    gaps = _min_gaps(energies)
    bad = gaps <= _degeneracy_tol(energies)
    if np.any(bad):
        k = int(np.argmax(bad))
        raise DegenerateSpectrum("instantaneous spectrum is degenerate", t=float(ts[k]), gap=float(gaps[k]))
    dH = hamiltonian_derivative(H, ts, method)
    cm = coupling_matrix(energies, states, dH)
    return cm.reshape(ts.size, -1).max(axis=1), gaps


def coupling(H: PeriodicHamiltonian, t: float, method: str = "auto") -> float:
    """``max_{m != n} |<E_m(t)|dE_n/dt(t)>|``."""
    c, _ = couplings_on_grid(H, [t], method)
    return float(c[0])


def coupling_profile(
    H: PeriodicHamiltonian,
    t0: float = 0.0,
    M: int = DEFAULT_PROFILE_POINTS,
    span: float | None = None,
    method: str = "auto",
) -> CouplingProfile:
    """Coupling and gap on ``M`` uniform samples of ``[t0, t0 + span)``.

    ``span`` defaults to one period; the grid is endpoint-free because the
    profile is periodic.  For a shorter span the endpoint is included.
    """
    if M < 64:
        raise ValueError("coupling_profile needs M >= 64")
    if span is None:
        grid = t0 + H.period * np.arange(M) / M
        resolution = H.period / M
    else:
        grid = np.linspace(t0, t0 + span, M)
        resolution = span / (M - 1)
    values, gaps = couplings_on_grid(H, grid, method)
    return CouplingProfile(
        grid=grid,
        coupling_values=values,
        gap_values=gaps,
        max_coupling=float(values.max()),
        min_gap=float(gaps.min()),
        resolution=float(resolution),
    )


def phases(H: PeriodicHamiltonian, n: int, t0: float, t1: float, cfg=None, points: int | None = None):
    """Dynamical and geometric phase of level ``n`` over ``[t0, t1]``.

    ``theta_n = -int E_n ds`` by Simpson's rule.  ``gamma_n = i int <E_n|dE_n>``
    is accumulated as ``-sum arg <E_n(s_k)|E_n(s_{k+1})>``, the discrete form
    of the connection integral, which is insensitive to how the gauge is
    chosen between the endpoints; the endpoints carry the deterministic gauge.
    On a closed loop this is the Berry phase.
    """
    from .propagator import IntegratorConfig

    cfg = cfg or IntegratorConfig()
    if points is None:
        points = max(65, int(np.ceil(cfg.steps_per_period * (t1 - t0) / H.period)) + 1)
    grid = np.linspace(t0, t1, points)
    energies, states = eigensystems(H, grid)
    gaps = _min_gaps(energies)
    if np.any(gaps <= _degeneracy_tol(energies)):
        k = int(np.argmax(gaps <= _degeneracy_tol(energies)))
        raise DegenerateSpectrum("gap collapse along path", t=float(grid[k]))
    dynamical = -float(simpson(energies[:, n], x=grid))
    vecs = states[:, :, n]
    links = np.einsum("ki,ki->k", np.conj(vecs[:-1]), vecs[1:])
    geometric = -float(np.sum(np.angle(links)))
    return dynamical, geometric
