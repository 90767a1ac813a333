"""Direct evolution from an instantaneous eigenstate and its overlaps."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .models import PeriodicHamiltonian
from .propagator import IntegratorConfig, propagate_path
from .spectrum import eigensystems

DEFAULT_SAMPLES_PER_PERIOD = 512


@dataclass(frozen=True)
class OverlapSeries:
    times: np.ndarray
    level: int
    populations: np.ndarray  # (M, N): |<E_n(t)|Psi(t)>|^2

    @property
    def overlaps(self) -> np.ndarray:
        """``|d_m(t)|`` for the starting level."""
        return np.sqrt(self.populations[:, self.level])

    def to_csv(self, path: str | Path, oracle=None) -> None:
        """Columns ``t, overlap`` plus ``overlap_oracle`` if a callable is given."""
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            header = ["t", "overlap"] + ([] if oracle is None else ["overlap_oracle"])
            w.writerow(header)
            ref = None if oracle is None else np.asarray(oracle(self.times))
            for k, (t, d) in enumerate(zip(self.times, self.overlaps)):
                row = [t, d] + ([] if ref is None else [ref[k]])
                w.writerow([format(float(x), ".17g") for x in row])


def overlap_series(
    H: PeriodicHamiltonian,
    level: int,
    t0: float,
    t1: float,
    cfg: IntegratorConfig | None = None,
    samples_per_period: int = DEFAULT_SAMPLES_PER_PERIOD,
    times=None,
) -> OverlapSeries:
    """Evolve ``|E_level(t0)>`` and record populations of all instantaneous levels."""
    cfg = cfg or IntegratorConfig()
    if times is None:
        n = max(2, int(np.ceil(samples_per_period * (t1 - t0) / H.period)) + 1)
        times = np.linspace(t0, t1, n)
    times = np.asarray(times, dtype=float)
    _, states = eigensystems(H, np.concatenate([[t0], times]))
    psi0 = states[0, :, level]
    u = propagate_path(H, t0, times, cfg)
    psi = u @ psi0
    amps = np.einsum("mij,mi->mj", np.conj(states[1:]), psi)
    return OverlapSeries(times=times, level=level, populations=np.abs(amps) ** 2)
