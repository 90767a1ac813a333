"""Fixed-step unitary integration of the Schroedinger equation.

Each step is the exact exponential ``exp(-i G)`` of a Hermitian generator
``G`` (closed form for 2x2, eigendecomposition otherwise), so unitarity is
only limited by round-off.  Two generators are available:

``magnus4``
    fourth-order Magnus with two-point Gauss nodes,
    ``G = h/2 (H1 + H2) + i sqrt(3)/12 h^2 [H1, H2]``.
``midpoint_exponential``
    second-order ``G = h H(t + h/2)``.

Steps between requested output times are tree-reduced in batches and the
segment products prefix-scanned, so Python overhead does not grow with the
step count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameter, PropagationFailure
from .models import PeriodicHamiltonian

SCHEMES = ("magnus4", "midpoint_exponential")
_GAUSS_OFFSET = math.sqrt(3) / 6
_CHUNK = 1 << 15


@dataclass(frozen=True)
class IntegratorConfig:
    steps_per_period: int = 4096
    scheme: str = "magnus4"
    unitarity_tol: float = 1e-10

    def __post_init__(self):
        if int(self.steps_per_period) != self.steps_per_period or self.steps_per_period < 16:
            raise InvalidParameter("steps_per_period must be an integer >= 16", steps=self.steps_per_period)
        if self.scheme not in SCHEMES:
            raise InvalidParameter(f"scheme must be one of {SCHEMES}", scheme=self.scheme)
        if not self.unitarity_tol > 0:
            raise InvalidParameter("unitarity_tol must be positive", unitarity_tol=self.unitarity_tol)


@dataclass(frozen=True)
class UnitaryPropagator:
    matrix: np.ndarray
    t_start: float
    t_end: float
    steps_used: int
    unitarity_defect: float


def unitarity_defect(u: np.ndarray) -> float:
    """Max-norm of ``U^dag U - I`` (over a stack if ``u`` is 3-D)."""
    u = np.asarray(u)
    eye = np.eye(u.shape[-1])
    return float(np.max(np.abs(np.conj(np.swapaxes(u, -1, -2)) @ u - eye)))


def _dagger(u: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(u, -1, -2))


def _expm_herm(g: np.ndarray) -> np.ndarray:
    """``exp(-i G)`` for a stack of Hermitian ``G``."""
    if g.shape[-1] == 2:
        return _expm_herm_2x2(g)
    w, v = np.linalg.eigh(g)
    u = (v * np.exp(-1j * w)[:, None, :]) @ _dagger(v)
    # one Newton-Schulz step pulls eigh round-off back onto the unitary group
    return 1.5 * u - 0.5 * u @ (_dagger(u) @ u)


def _expm_herm_2x2(g: np.ndarray) -> np.ndarray:
    # G = a0 I + a.sigma  ->  exp(-iG) = exp(-i a0) [cos|a| I - i sin|a|/|a| a.sigma]
    a0 = 0.5 * (g[:, 0, 0].real + g[:, 1, 1].real)
    az = 0.5 * (g[:, 0, 0].real - g[:, 1, 1].real)
    off = g[:, 0, 1]  # ax - i ay
    r = np.sqrt(az * az + np.abs(off) ** 2)
    c = np.cos(r)
    s = np.sinc(r / np.pi)  # sin(r)/r
    ph = np.exp(-1j * a0)
    out = np.empty(g.shape, dtype=complex)
    out[:, 0, 0] = ph * (c - 1j * s * az)
    out[:, 1, 1] = ph * (c + 1j * s * az)
    out[:, 0, 1] = ph * (-1j * s * off)
    out[:, 1, 0] = ph * (-1j * s * np.conj(off))
    return out


def _step_unitaries(H: PeriodicHamiltonian, starts: np.ndarray, widths: np.ndarray, scheme: str) -> np.ndarray:
    if scheme == "magnus4":
        h1 = H.evaluate(starts + widths * (0.5 - _GAUSS_OFFSET))
        h2 = H.evaluate(starts + widths * (0.5 + _GAUSS_OFFSET))
        w = widths[:, None, None]
        gen = 0.5 * w * (h1 + h2) + 1j * (math.sqrt(3) / 12) * w**2 * (h1 @ h2 - h2 @ h1)
    else:
        gen = widths[:, None, None] * H.evaluate(starts + 0.5 * widths)
    # symmetrise away round-off before eigh
    gen = 0.5 * (gen + _dagger(gen))
    return _expm_herm(gen)


def _prefix_products(steps: np.ndarray) -> np.ndarray:
    """``P[k] = S[k] @ S[k-1] @ ... @ S[0]`` by a Hillis-Steele scan."""
    p = steps.copy()
    n = p.shape[0]
    d = 1
    while d < n:
        p[d:] = p[d:] @ p[:-d]
        d *= 2
    return p


def _segment_products(steps: np.ndarray, counts: np.ndarray) -> np.ndarray:
    """Ordered product of each consecutive run of ``counts[k]`` steps (identity for 0)."""
    nseg = counts.size
    N = steps.shape[-1]
    length = int(counts.max()) if nseg else 0
    width = 1
    while width < max(length, 1):
        width *= 2
    block = np.broadcast_to(np.eye(N, dtype=complex), (nseg, width, N, N)).copy()
    first = np.concatenate([[0], np.cumsum(counts)[:-1]])
    rows = np.repeat(np.arange(nseg), counts)
    cols = np.arange(steps.shape[0]) - first[rows]
    block[rows, cols] = steps
    while block.shape[1] > 1:
        block = block[:, 1::2] @ block[:, 0::2]
    return block[:, 0]


def _n_steps(span: float, period: float, steps_per_period: int) -> int:
    if span <= 0:
        return 0
    return max(1, math.ceil(steps_per_period * span / period - 1e-9))


def propagate_path(
    H: PeriodicHamiltonian, t0: float, times, cfg: IntegratorConfig | None = None, check: bool = True
) -> np.ndarray:
    """``U(t_k, t0)`` for every ``t_k`` in the non-decreasing array ``times``.

    Consecutive requested times are split into uniform sub-steps no longer
    than ``period / steps_per_period``.
    """
    cfg = cfg or IntegratorConfig()
    times = np.asarray(times, dtype=float).reshape(-1)
    if times.size and (times[0] < t0 or np.any(np.diff(times) < 0)):
        raise InvalidParameter("times must be non-decreasing and >= t0", t0=t0)
    N = H.dimension
    out = np.empty((times.size, N, N), dtype=complex)
    if times.size == 0:
        return out

    edges = np.concatenate([[t0], times])
    spans = np.diff(edges)
    counts = np.where(spans > 0, np.maximum(1, np.ceil(cfg.steps_per_period * spans / H.period - 1e-9)), 0)
    counts = counts.astype(np.int64)

    carry = np.eye(N, dtype=complex)
    seg = 0
    while seg < times.size:
        # group whole segments into chunks of roughly _CHUNK steps
        # (padded block size nseg * max count is bounded too)
        stop = seg + 1
        total = longest = int(counts[seg])
        while stop < times.size:
            nxt = int(counts[stop])
            longest_next = max(longest, nxt)
            if total + nxt > _CHUNK or (stop - seg + 1) * longest_next > 2 * _CHUNK:
                break
            total += nxt
            longest = longest_next
            stop += 1
        c = counts[seg:stop]
        idx = np.repeat(np.arange(seg, stop), c)
        first = np.concatenate([[0], np.cumsum(c)[:-1]])
        local = np.arange(int(c.sum())) - first[idx - seg]
        widths = np.divide(spans[idx], c[idx - seg])
        starts = edges[idx] + local * widths
        if c.max() > _CHUNK:
            # one very long segment: reduce it in sub-chunks
            prod = carry
            for a in range(0, int(c[0]), _CHUNK):
                b = min(a + _CHUNK, int(c[0]))
                st = _step_unitaries(H, starts[a:b], widths[a:b], cfg.scheme)
                prod = _segment_products(st, np.array([b - a]))[0] @ prod
            out[seg] = prod
        else:
            st = _step_unitaries(H, starts, widths, cfg.scheme) if starts.size else np.empty((0, N, N), complex)
            segs = _segment_products(st, c)
            out[seg:stop] = _prefix_products(segs) @ carry
        carry = out[stop - 1]
        seg = stop
    if check:
        defect = unitarity_defect(out)
        if defect > cfg.unitarity_tol:
            raise PropagationFailure("propagator lost unitarity", defect=defect, tol=cfg.unitarity_tol)
    return out


def propagate(
    H: PeriodicHamiltonian, t0: float, t1: float, cfg: IntegratorConfig | None = None
) -> UnitaryPropagator:
    """``U(t1, t0)``."""
    cfg = cfg or IntegratorConfig()
    if not t1 >= t0:
        raise InvalidParameter("propagate requires t1 >= t0", t0=t0, t1=t1)
    n = _n_steps(t1 - t0, H.period, cfg.steps_per_period)
    u = propagate_path(H, t0, [t1], cfg, check=False)[0]
    defect = unitarity_defect(u)
    if defect > cfg.unitarity_tol:
        raise PropagationFailure("propagator lost unitarity", defect=defect, t0=t0, t1=t1)
    return UnitaryPropagator(matrix=u, t_start=float(t0), t_end=float(t1), steps_used=n, unitarity_defect=defect)


def monodromy(H: PeriodicHamiltonian, t0: float = 0.0, cfg: IntegratorConfig | None = None) -> UnitaryPropagator:
    """One-period propagator ``U(t0 + T, t0)``."""
    return propagate(H, t0, t0 + H.period, cfg)
