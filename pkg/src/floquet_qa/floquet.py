"""Quasienergies and Floquet modes from the monodromy operator."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import schur

from .errors import DegenerateQuasienergies, InvalidParameter, NumericalFailure
from .models import PeriodicHamiltonian
from .propagator import IntegratorConfig, UnitaryPropagator, propagate_path

UNIT_MODULUS_TOL = 1e-8
GAP_DEGENERACY_TOL = 1e-12
NORM_TOL = 1e-10


@dataclass(frozen=True)
class FloquetDecomposition:
    quasienergies: np.ndarray  # ascending, in (-omega/2, omega/2]
    modes_t0: np.ndarray  # column i is |phi_i(t0)>
    t0: float
    omega: float

    @property
    def period(self) -> float:
        return 2 * np.pi / self.omega

    @property
    def dimension(self) -> int:
        return self.quasienergies.size


@dataclass(frozen=True)
class FloquetExpansion:
    amplitudes: np.ndarray
    weights: np.ndarray

    @property
    def pair_sum(self) -> float:
        return pair_weight_sum(self.weights)


def fold_quasienergies(eps, omega: float) -> np.ndarray:
    """Map into ``(-omega/2, omega/2]``; values at the lower edge go to ``+omega/2``."""
    eps = np.asarray(eps, dtype=float)
    folded = np.mod(eps + omega / 2, omega) - omega / 2
    edge = folded <= -omega / 2 + 1e-12 * omega
    return np.where(edge, folded + omega, folded)


def decompose(mono: UnitaryPropagator, omega: float) -> FloquetDecomposition:
    """Diagonalise the monodromy; ``exp(-i eps_i T)`` are its eigenvalues.

    A complex Schur form of a normal matrix is diagonal, so the Schur
    vectors give an orthonormal eigenbasis even for degenerate eigenvalues.
    """
    if not omega > 0:
        raise InvalidParameter("omega must be positive", omega=omega)
    T = 2 * np.pi / omega
    tri, z = schur(np.asarray(mono.matrix, dtype=complex), output="complex")
    lam = np.diag(tri)
    off = np.max(np.abs(np.triu(tri, 1))) if tri.shape[0] > 1 else 0.0
    modulus_err = float(np.max(np.abs(np.abs(lam) - 1)))
    if modulus_err > UNIT_MODULUS_TOL or off > UNIT_MODULUS_TOL:
        raise NumericalFailure("monodromy is not unitary", modulus_error=modulus_err, schur_offdiag=float(off))
    eps = fold_quasienergies(-np.angle(lam) / T, omega)
    order = np.argsort(eps, kind="stable")
    return FloquetDecomposition(quasienergies=eps[order], modes_t0=z[:, order], t0=float(mono.t_start), omega=float(omega))


def modes_at_times(
    decomp: FloquetDecomposition, H: PeriodicHamiltonian, cfg: IntegratorConfig | None, times
) -> np.ndarray:
    """``|phi_i(t)> = exp(+i eps_i (t - t0)) U(t, t0) |phi_i(t0)>`` for sorted ``times``; shape ``(M, N, N)``."""
    times = np.asarray(times, dtype=float).reshape(-1)
    u = propagate_path(H, decomp.t0, times, cfg)
    phase = np.exp(1j * np.outer(times - decomp.t0, decomp.quasienergies))
    return (u @ decomp.modes_t0) * phase[:, None, :]


def mode_at(decomp: FloquetDecomposition, H: PeriodicHamiltonian, cfg: IntegratorConfig | None, t: float) -> np.ndarray:
    if t < decomp.t0:
        raise InvalidParameter("mode_at requires t >= t0", t=t, t0=decomp.t0)
    if t == decomp.t0:
        return decomp.modes_t0.copy()
    return modes_at_times(decomp, H, cfg, [t])[0]


def expand_state(
    decomp: FloquetDecomposition, state, H: PeriodicHamiltonian, cfg: IntegratorConfig | None, t: float
) -> FloquetExpansion:
    """Amplitudes ``a_i(t) = <phi_i(t)|state>`` and weights ``|a_i|^2``."""
    state = np.asarray(state, dtype=complex).reshape(-1)
    norm = np.linalg.norm(state)
    if abs(norm - 1) > NORM_TOL:
        raise InvalidParameter("state must be normalised", norm=float(norm))
    modes = mode_at(decomp, H, cfg, t)
    amps = modes.conj().T @ state
    weights = np.abs(amps) ** 2
    return FloquetExpansion(amplitudes=amps, weights=weights / weights.sum())


def pair_weight_sum(weights) -> float:
    """``sum_{i<j} c_i c_j``."""
    c = np.asarray(weights, dtype=float)
    return float((c.sum() ** 2 - np.sum(c * c)) / 2)


def gap_factor(decomp: FloquetDecomposition, T: float | None = None, tol: float = GAP_DEGENERACY_TOL) -> float:
    """``min_{i != j} |sin((eps_i - eps_j) T / 2)|``; invariant under refolding."""
    if decomp.dimension < 2:
        raise InvalidParameter("gap factor needs at least two quasienergies")
    T = decomp.period if T is None else T
    eps = decomp.quasienergies
    i, j = np.triu_indices(eps.size, 1)
    value = float(np.min(np.abs(np.sin((eps[i] - eps[j]) * T / 2))))
    if value < tol:
        raise DegenerateQuasienergies("quasienergies are degenerate (Floquet resonance)", gap_factor=value)
    return value


def period_fidelity(decomp: FloquetDecomposition, weights) -> float:
    """``1 - 4 sum_{j<i} c_i c_j sin^2((eps_i - eps_j) T / 2)``: fidelity after one period."""
    c = np.asarray(weights, dtype=float)
    eps = decomp.quasienergies
    i, j = np.triu_indices(eps.size, 1)
    s2 = np.sin((eps[i] - eps[j]) * decomp.period / 2) ** 2
    return float(1 - 4 * np.sum(c[i] * c[j] * s2))
