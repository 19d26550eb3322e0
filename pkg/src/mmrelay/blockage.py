"""M|M|inf blockage queue: closed-form LoS/non-LoS statistics and an event simulator.

Obstacles arrive as a Poisson(lambda) stream and each stays for an
independent sojourn (Exponential(nu) by default).  The direct link is
non-LoS while at least one obstacle is present.  A virtual slot starts at
every 0 -> 1 transition of the obstacle count and is split into its non-LoS
part ``X`` (the busy period) and the LoS part ``Y`` that follows.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import kernels
from .scenario import ObstacleProcess

_MAX_CHUNK = 1 << 22

SojournSampler = Callable[[np.random.Generator, int, ObstacleProcess], np.ndarray]


def exponential_sojourns(rng: np.random.Generator, size: int, proc: ObstacleProcess) -> np.ndarray:
    return rng.standard_exponential(size) / proc.nu_per_s


@dataclass(frozen=True)
class BlockageStats:
    mean_nonlos_s: float
    mean_los_s: float

    def __post_init__(self):
        if not (self.mean_nonlos_s > 0 and self.mean_los_s > 0):
            raise ValueError("mean non-LoS and LoS durations must be > 0")

    @property
    def mean_slot_s(self) -> float:
        return self.mean_nonlos_s + self.mean_los_s

    @property
    def blockage_fraction(self) -> float:
        return self.mean_nonlos_s / self.mean_slot_s

    @classmethod
    def from_fraction(cls, fraction: float, mean_slot_s: float) -> "BlockageStats":
        """Stats with a prescribed blockage fraction and mean slot length."""
        if not 0 < fraction < 1:
            raise ValueError(f"blockage fraction {fraction} outside (0, 1)")
        return cls(fraction * mean_slot_s, (1 - fraction) * mean_slot_s)


def expected_nonlos(proc: ObstacleProcess) -> float:
    """Mean busy period of the obstacle queue, ``(exp(lambda/nu) - 1) / lambda``."""
    return math.expm1(proc.lambda_per_s / proc.nu_per_s) / proc.lambda_per_s


def expected_los(proc: ObstacleProcess) -> float:
    return 1.0 / proc.lambda_per_s


def blockage_stats(proc: ObstacleProcess) -> BlockageStats:
    return BlockageStats(expected_nonlos(proc), expected_los(proc))


def nu_for_fraction(fraction: float, lambda_per_s: float) -> float:
    """Departure rate that yields ``E[X]/E[T] == fraction`` at arrival rate ``lambda_per_s``.

    The fraction map is ``1 - exp(-lambda/nu)``, so it inverts in closed form
    and every fraction in (0, 1) is realizable.
    """
    if not 0 < fraction < 1:
        raise ValueError(f"blockage fraction {fraction} is not realizable; it must lie in (0, 1)")
    return -lambda_per_s / math.log1p(-fraction)


@dataclass(frozen=True)
class PeriodSamples:
    """Simulated slots.

    ``opener_sojourn_s`` is the sojourn of the obstacle that opened each
    slot and ``obstacle_time_s`` the summed sojourns of all obstacles seen
    in it (for the time-averaged obstacle count).
    """

    nonlos_s: np.ndarray
    los_s: np.ndarray
    seed: int | tuple
    n_slots: int
    opener_sojourn_s: np.ndarray
    obstacle_time_s: np.ndarray

    @property
    def slot_s(self) -> np.ndarray:
        return self.nonlos_s + self.los_s

    def busy_fraction(self) -> float:
        """Long-run fraction of time with at least one obstacle (ratio of means)."""
        return float(self.nonlos_s.sum() / self.slot_s.sum())

    def mean_of_ratios(self) -> float:
        """Slot-averaged ``X_i / T_i``; differs from :meth:`busy_fraction` in general."""
        return float(np.mean(self.nonlos_s / self.slot_s))

    def mean_occupancy(self) -> float:
        """Time-averaged number of obstacles present."""
        return float(self.obstacle_time_s.sum() / self.slot_s.sum())


def _rngs(seed) -> tuple[np.random.Generator, np.random.Generator]:
    entropy = list(seed) if isinstance(seed, (tuple, list)) else seed
    arrivals, sojourns = np.random.SeedSequence(entropy).spawn(2)
    return np.random.Generator(np.random.Philox(arrivals)), np.random.Generator(np.random.Philox(sojourns))


def simulate_periods(
    proc: ObstacleProcess,
    n_slots: int,
    seed: int | Sequence[int] = 0,
    *,
    sampler: SojournSampler = exponential_sojourns,
    backend: str | None = None,
) -> PeriodSamples:
    """Run the obstacle queue until ``n_slots`` complete (X, Y) pairs exist.

    The run starts empty at a LoS instant, so the first slot opens at the
    first obstacle arrival.  Random numbers come from two Philox streams
    (arrival gaps and sojourns) spawned from ``seed``; results are
    identical for identical ``(seed, proc, n_slots)`` and across backends.

    Parameters
    ----------
    backend : {"cython", "python"}, optional
        Force a kernel; by default the compiled one is used when available.
    """
    if n_slots < 1:
        raise ValueError("n_slots must be >= 1")
    kernel = _select_kernel(backend)
    gap_rng, soj_rng = _rngs(seed)

    x = np.empty(n_slots)
    y = np.empty(n_slots)
    load = np.empty(n_slots)
    first = np.empty(n_slots)

    per_slot = math.exp(min(proc.lambda_per_s / proc.nu_per_s, 50.0))
    gaps = np.empty(0)
    sojourns = np.empty(0)
    done = 0
    while done < n_slots:
        chunk = min(int((n_slots - done) * per_slot * 1.25) + 256, _MAX_CHUNK)
        gaps = np.concatenate([gaps, gap_rng.standard_exponential(chunk) / proc.lambda_per_s])
        sojourns = np.concatenate([sojourns, np.asarray(sampler(soj_rng, chunk, proc), dtype=float)])
        finished, k = kernel(gaps, sojourns, n_slots - done, x, y, load, first, done)
        done += finished
        gaps = np.ascontiguousarray(gaps[k:])
        sojourns = np.ascontiguousarray(sojourns[k:])

    return PeriodSamples(
        nonlos_s=x, los_s=y, seed=seed if isinstance(seed, int) else tuple(seed), n_slots=n_slots,
        opener_sojourn_s=first, obstacle_time_s=load,
    )


def _select_kernel(backend: str | None):
    if backend is None:
        return kernels.busy_periods
    if backend == "python":
        return kernels.busy_periods_py
    if backend == "cython":
        if kernels.busy_periods_ext is None:
            raise RuntimeError("compiled kernel is not built")
        return kernels.busy_periods_ext
    raise ValueError(f"unknown backend {backend!r}")


def write_periods_csv(samples: PeriodSamples, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["slot_index", "x_seconds", "y_seconds"])
        for i, (xi, yi) in enumerate(zip(samples.nonlos_s.tolist(), samples.los_s.tolist())):
            writer.writerow([i, f"{xi:.9g}", f"{yi:.9g}"])
