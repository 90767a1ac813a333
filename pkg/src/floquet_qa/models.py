"""Time-periodic Hamiltonians.

Every model is a :class:`PeriodicHamiltonian`: a vectorised evaluator
``ts -> (len(ts), N, N)`` plus, where available, an analytic time derivative.
Units are hbar = 1, so the period carries units of 1/energy.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Mapping, Sequence

import numpy as np

from .errors import InvalidParameter

logger = logging.getLogger(__name__)

HERMITIAN_TOL = 1e-12

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)

MatrixFn = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class PeriodicHamiltonian:
    """Hermitian, ``period``-periodic matrix function of time.

    ``evaluate`` and ``derivative`` accept a scalar time (returning an
    ``N x N`` matrix) or a 1-D array of times (returning ``(M, N, N)``).
    """

    dimension: int
    period: float
    evaluator: MatrixFn = field(repr=False)
    derivative_fn: MatrixFn | None = field(default=None, repr=False)
    label: str = "generic"
    params: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if int(self.dimension) < 1:
            raise InvalidParameter("dimension must be a positive integer", dimension=self.dimension)
        if not (math.isfinite(self.period) and self.period > 0):
            raise InvalidParameter("period must be positive and finite", period=self.period)

    @property
    def omega(self) -> float:
        return 2 * np.pi / self.period

    @property
    def has_derivative(self) -> bool:
        return self.derivative_fn is not None

    def evaluate(self, t):
        return _call(self.evaluator, t)

    def derivative(self, t):
        if self.derivative_fn is None:
            raise InvalidParameter(f"model {self.label!r} has no analytic derivative")
        return _call(self.derivative_fn, t)

    def to_config(self) -> dict:
        return {"model": self.params.get("model", self.label), "params": dict(self.params.get("params", {}))}


def _call(fn: MatrixFn, t):
    ts = np.asarray(t, dtype=float)
    if ts.ndim == 0:
        return fn(ts.reshape(1))[0]
    return fn(ts.reshape(-1))


def _require(cond: bool, message: str, **context):
    if not cond:
        raise InvalidParameter(message, **context)


def _finite_positive(name: str, value: float):
    _require(math.isfinite(value) and value > 0, f"{name} must be finite and > 0", **{name: value})


# ---------------------------------------------------------------------------
# Example 1: Schwinger-Rabi


@dataclass(frozen=True)
class SchwingerRabiParams:
    omega0: float
    theta: float
    omega: float

    def __post_init__(self):
        _finite_positive("omega0", self.omega0)
        _finite_positive("omega", self.omega)
        _require(0 <= self.theta < np.pi, "theta must lie in [0, pi)", theta=self.theta)

    @property
    def rabi(self) -> float:
        """Generalised Rabi frequency sqrt(w0^2 + w^2 - 2 w w0 cos theta)."""
        w0, w, th = self.omega0, self.omega, self.theta
        return math.sqrt(max(w0 * w0 + w * w - 2 * w * w0 * math.cos(th), 0.0))


def build_schwinger_rabi(p: SchwingerRabiParams) -> PeriodicHamiltonian:
    half = p.omega0 / 2
    diag = half * math.cos(p.theta)
    off = half * math.sin(p.theta)
    w = p.omega

    def evaluate(ts):
        out = np.empty((ts.size, 2, 2), dtype=complex)
        phase = np.exp(-1j * w * ts)
        out[:, 0, 0] = diag
        out[:, 1, 1] = -diag
        out[:, 0, 1] = off * phase
        out[:, 1, 0] = off * phase.conj()
        return out

    def derivative(ts):
        out = np.zeros((ts.size, 2, 2), dtype=complex)
        phase = np.exp(-1j * w * ts)
        out[:, 0, 1] = -1j * w * off * phase
        out[:, 1, 0] = 1j * w * off * phase.conj()
        return out

    return PeriodicHamiltonian(
        dimension=2,
        period=2 * np.pi / w,
        evaluator=evaluate,
        derivative_fn=derivative,
        label="schwinger_rabi",
        params={"model": "schwinger_rabi", "params": {"omega0": p.omega0, "theta": p.theta, "omega": w}},
    )


# ---------------------------------------------------------------------------
# Example 2: dual Hamiltonian  Hbar(t) = -U(t)^dag H(t) U(t)


def _unitary_power(eigvals: np.ndarray, eigvecs: np.ndarray, k: int) -> np.ndarray:
    return (eigvecs * eigvals**k) @ eigvecs.conj().T


def build_dual(base: PeriodicHamiltonian, cfg=None, period: float | None = None) -> PeriodicHamiltonian:
    """Dual of ``base``: ``-U^dag(t) H(t) U(t)`` with ``U(t) = U(t, 0)`` of ``base``.

    ``U(t)`` is obtained numerically.  Since ``base`` is periodic,
    ``U(s + kT) = U(s) M^k`` with ``M`` its monodromy, so any time costs
    at most one period of integration.  The dual period is the closed form
    ``2 pi / Omega`` for a Schwinger-Rabi base; other bases must pass it.
    """
    # local import: propagator depends on this module
    from scipy.linalg import schur

    from .propagator import IntegratorConfig, monodromy, propagate_path

    cfg = cfg or IntegratorConfig()
    if base.derivative_fn is None:
        raise InvalidParameter("dual construction needs an analytic derivative of the base model")

    base_params = dict(base.params.get("params", {}))
    if period is None:
        if base.label != "schwinger_rabi":
            raise InvalidParameter("dual period is only known in closed form for a Schwinger-Rabi base")
        sr = SchwingerRabiParams(**base_params)
        rabi = sr.rabi
        # Omega = 0 only at theta = 0, omega = omega0, where H is constant and so is Hbar
        period = 2 * np.pi / rabi if rabi > 0 else base.period
    _finite_positive("period", period)

    T = base.period
    mono = monodromy(base, 0.0, cfg).matrix
    schur_t, schur_z = schur(mono, output="complex")
    lam = np.diag(schur_t)
    lam = lam / np.abs(lam)

    def u_at(ts: np.ndarray) -> np.ndarray:
        k = np.floor(ts / T).astype(int)
        s = ts - k * T
        order = np.argsort(s, kind="stable")
        uniq, inverse = np.unique(s[order], return_inverse=True)
        u_s = propagate_path(base, 0.0, uniq, cfg)
        out = np.empty((ts.size, base.dimension, base.dimension), dtype=complex)
        out[order] = u_s[inverse]
        for kk in np.unique(k):
            if kk == 0:
                continue
            sel = k == kk
            out[sel] = out[sel] @ _unitary_power(lam, schur_z, int(kk))
        return out

    def evaluate(ts):
        u = u_at(ts)
        return -np.conj(np.swapaxes(u, 1, 2)) @ base.evaluate(ts) @ u

    def derivative(ts):
        # d/dt (U^dag H U) = U^dag dH/dt U, the commutator terms cancel
        u = u_at(ts)
        return -np.conj(np.swapaxes(u, 1, 2)) @ base.derivative(ts) @ u

    return PeriodicHamiltonian(
        dimension=base.dimension,
        period=float(period),
        evaluator=evaluate,
        derivative_fn=derivative,
        label="dual",
        params={"model": "dual", "params": base_params, "base": base.label},
    )


# ---------------------------------------------------------------------------
# Example 3: two-tone drive


@dataclass(frozen=True)
class TwoToneParams:
    omega0: float
    V: float
    Vprime: float
    omega: float
    N_tone: int

    def __post_init__(self):
        _finite_positive("omega0", self.omega0)
        _finite_positive("V", self.V)
        _finite_positive("omega", self.omega)
        _require(math.isfinite(self.Vprime) and self.Vprime >= 0, "Vprime must be >= 0", Vprime=self.Vprime)
        _require(
            int(self.N_tone) == self.N_tone and self.N_tone >= 1, "N_tone must be a positive integer", N_tone=self.N_tone
        )
        if self.Vprime > 0.1 * self.V or self.V > 0.1 * self.omega0:
            logger.warning(
                "two-tone parameters outside V' << V << omega0 (V'=%g, V=%g, omega0=%g)",
                self.Vprime,
                self.V,
                self.omega0,
            )


def build_two_tone(p: TwoToneParams, truncated: bool = False) -> PeriodicHamiltonian:
    """``-w0/2 sz - [V cos wt + V' cos(wt/N)] sx``.

    ``truncated=True`` drops the ``V'`` tone, leaving period ``2 pi / w``.
    """
    w, n = p.omega, int(p.N_tone)
    vp = 0.0 if truncated else p.Vprime
    period = 2 * np.pi / w if truncated else 2 * np.pi * n / w
    h0 = -0.5 * p.omega0 * SIGMA_Z

    def evaluate(ts):
        drive = p.V * np.cos(w * ts) + vp * np.cos(w * ts / n)
        return h0[None] - drive[:, None, None] * SIGMA_X[None]

    def derivative(ts):
        ddrive = -p.V * w * np.sin(w * ts) - vp * (w / n) * np.sin(w * ts / n)
        return -ddrive[:, None, None] * SIGMA_X[None]

    params = {"omega0": p.omega0, "V": p.V, "Vprime": p.Vprime, "omega": w, "N_tone": n}
    if truncated:
        params["truncated"] = True
    return PeriodicHamiltonian(
        dimension=2,
        period=period,
        evaluator=evaluate,
        derivative_fn=derivative,
        label="two_tone",
        params={"model": "two_tone", "params": params},
    )


# ---------------------------------------------------------------------------
# Generic real-Fourier model


def _as_matrix(m, n: int, what: str) -> np.ndarray:
    if isinstance(m, Mapping):
        arr = np.asarray(m.get("re", 0.0), dtype=float) + 1j * np.asarray(m.get("im", 0.0), dtype=float)
    else:
        arr = np.asarray(m, dtype=complex)
    if arr.shape != (n, n):
        raise InvalidParameter(f"{what} must be {n}x{n}", shape=arr.shape)
    return arr


def _check_hermitian(m: np.ndarray, what: str):
    err = np.max(np.abs(m - m.conj().T)) if m.size else 0.0
    if err > HERMITIAN_TOL * max(1.0, np.max(np.abs(m))):
        raise InvalidParameter(f"{what} is not Hermitian", defect=float(err))


def build_generic(N: int, T: float, fourier_coeffs: Sequence) -> PeriodicHamiltonian:
    """``H(t) = sum_k A_k cos(k w t) + B_k sin(k w t)`` with ``w = 2 pi / T``.

    ``fourier_coeffs`` holds ``(k, A_k, B_k)`` triples; matrices may be
    arrays or ``{"re": ..., "im": ...}`` mappings.  ``B_k`` may be ``None``.
    """
    _require(int(N) == N and N >= 1, "N must be a positive integer", N=N)
    _finite_positive("T", T)
    N = int(N)
    ks, As, Bs = [], [], []
    for entry in fourier_coeffs:
        k, A, B = (tuple(entry) + (None,))[:3]
        _require(int(k) == k and k >= 0, "harmonic index must be a non-negative integer", k=k)
        A = _as_matrix(A, N, f"A_{k}") if A is not None else np.zeros((N, N), complex)
        B = _as_matrix(B, N, f"B_{k}") if B is not None else np.zeros((N, N), complex)
        _check_hermitian(A, f"A_{k}")
        _check_hermitian(B, f"B_{k}")
        ks.append(int(k))
        As.append(A)
        Bs.append(B)
    _require(len(ks) > 0, "at least one Fourier coefficient is required")
    w = 2 * np.pi / T
    k_arr = np.array(ks, dtype=float)
    A_arr = np.array(As)
    B_arr = np.array(Bs)

    def evaluate(ts):
        arg = w * np.outer(ts, k_arr)
        return np.einsum("mk,kij->mij", np.cos(arg), A_arr) + np.einsum("mk,kij->mij", np.sin(arg), B_arr)

    def derivative(ts):
        arg = w * np.outer(ts, k_arr)
        kw = w * k_arr
        return np.einsum("mk,kij->mij", -np.sin(arg) * kw, A_arr) + np.einsum("mk,kij->mij", np.cos(arg) * kw, B_arr)

    coeffs = [
        {"k": k, "A": {"re": A.real.tolist(), "im": A.imag.tolist()}, "B": {"re": B.real.tolist(), "im": B.imag.tolist()}}
        for k, A, B in zip(ks, As, Bs)
    ]
    return PeriodicHamiltonian(
        dimension=N,
        period=float(T),
        evaluator=evaluate,
        derivative_fn=derivative,
        label="generic",
        params={"model": "generic", "params": {"N": N, "T": float(T), "coeffs": coeffs}},
    )


def random_generic(
    rng: np.random.Generator, N: int, T: float, static_scale: float = 1.0, drive_scale: float = 0.1, harmonics: int = 2
) -> PeriodicHamiltonian:
    """Random Fourier model: Hermitian static part plus ``harmonics`` drive terms."""

    def herm(scale):
        m = rng.normal(size=(N, N)) + 1j * rng.normal(size=(N, N))
        return scale * (m + m.conj().T) / 2

    coeffs = [(0, herm(static_scale), None)]
    for k in range(1, harmonics + 1):
        coeffs.append((k, herm(drive_scale), herm(drive_scale)))
    return build_generic(N, T, coeffs)


# ---------------------------------------------------------------------------
# Config files

MODEL_IDS = ("schwinger_rabi", "dual", "two_tone", "generic")


def normalize_model_id(name: str) -> str:
    key = name.strip().lower().replace("-", "_")
    if key not in MODEL_IDS:
        raise InvalidParameter(f"unknown model {name!r}; expected one of {', '.join(MODEL_IDS)}")
    return key


def model_from_config(config: Mapping[str, Any], cfg=None) -> PeriodicHamiltonian:
    """Build a model from ``{"model": ..., "params": {...}}``."""
    try:
        kind = normalize_model_id(config["model"])
        params = dict(config.get("params", {}))
    except (KeyError, TypeError, AttributeError) as exc:
        raise InvalidParameter(f"malformed model config: {exc}") from exc
    try:
        if kind == "schwinger_rabi":
            return build_schwinger_rabi(SchwingerRabiParams(**params))
        if kind == "dual":
            return build_dual(build_schwinger_rabi(SchwingerRabiParams(**params)), cfg)
        if kind == "two_tone":
            truncated = bool(params.pop("truncated", False))
            return build_two_tone(TwoToneParams(**params), truncated=truncated)
        coeffs = [(c["k"], c.get("A"), c.get("B")) for c in params.get("coeffs", [])]
        return build_generic(params["N"], params["T"], coeffs)
    except TypeError as exc:
        raise InvalidParameter(f"bad parameters for {kind}: {exc}") from exc
    except KeyError as exc:
        raise InvalidParameter(f"missing parameter for {kind}: {exc}") from exc


def load_model(path: str | Path, cfg=None) -> PeriodicHamiltonian:
    with open(path) as fh:
        return model_from_config(json.load(fh), cfg)
