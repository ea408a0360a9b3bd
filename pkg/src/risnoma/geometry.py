"""Poisson point-process machinery for the BS deployment.

The typical user sits at the origin and is served by its nearest BS; every
other BS in the simulation disc interferes.  The RIS-to-user offset is
collapsed to zero, so BS-RIS and BS-user distances coincide.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .params import SystemParams


@dataclass(frozen=True)
class NetworkRealization:
    """One network draw as seen from the typical user."""

    d_serving: float
    d_interferers: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.d_interferers, dtype=float)
        object.__setattr__(self, "d_interferers", d)
        if not self.d_serving > 0:
            raise ValueError("serving distance must be > 0")
        if d.size and not np.all(d > self.d_serving):
            raise ValueError("every interferer must be farther than the serving BS")


def trial_rng(seed: int, index: int) -> np.random.Generator:
    """Independent stream for trial/block ``index`` under master ``seed``."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy=seed, spawn_key=(index,))))


def sample_hppp_distances(lam: float, window_radius: float, rng: np.random.Generator) -> np.ndarray:
    """Sorted distances to the origin of an HPPP of density ``lam`` in a disc."""
    count = rng.poisson(lam * math.pi * window_radius**2)
    r = window_radius * np.sqrt(rng.random(count))
    return np.sort(r)


def nearest_distance_pdf(x: float, n: int, lam: float) -> float:
    """Density of the distance to the n-th nearest point of a planar HPPP."""
    if not x > 0:
        raise ValueError(f"nearest_distance_pdf needs x > 0, got {x}")
    if n < 1 or int(n) != n:
        raise ValueError(f"n must be a positive integer, got {n}")
    pl = math.pi * lam
    log_val = (
        math.log(2.0)
        + n * math.log(pl)
        - math.lgamma(n)
        + (2 * n - 1) * math.log(x)
        - pl * x * x
    )
    return math.exp(log_val)


def sample_network(params: SystemParams, rng: np.random.Generator) -> NetworkRealization:
    """Draw BSs in the simulation disc; the nearest one serves.

    Empty draws are discarded and redrawn.
    """
    while True:
        r = sample_hppp_distances(params.lambda_b, params.window_radius, rng)
        if r.size:
            return NetworkRealization(float(r[0]), r[1:])


@dataclass
class NetworkBatch:
    """Many realizations packed into flat arrays.

    ``distances`` holds every BS distance, grouped by trial; ``trial`` maps
    each entry to its trial and ``serving`` flags the nearest BS of each
    trial.  ``d_serving`` is indexed by trial.
    """

    distances: np.ndarray
    trial: np.ndarray
    serving: np.ndarray
    d_serving: np.ndarray

    @property
    def trials(self) -> int:
        return self.d_serving.size


def sample_network_batch(
    lam: float,
    window_radius: float,
    trials: int,
    rng: np.random.Generator,
    inner_radius: float = 0.0,
    require_nonempty: bool = True,
) -> NetworkBatch:
    """Vectorised HPPP draws in the annulus ``inner_radius < r < window_radius``.

    With ``require_nonempty`` trials without points are redrawn until every
    trial has one; otherwise empty trials get ``d_serving = inf``.
    """
    area = math.pi * (window_radius**2 - inner_radius**2)
    counts = rng.poisson(lam * area, size=trials)
    if require_nonempty:
        empty = np.flatnonzero(counts == 0)
        while empty.size:
            counts[empty] = rng.poisson(lam * area, size=empty.size)
            empty = empty[counts[empty] == 0]
    total = int(counts.sum())
    u = rng.random(total)
    r = np.sqrt(inner_radius**2 + u * (window_radius**2 - inner_radius**2))
    trial = np.repeat(np.arange(trials), counts)
    d_serving = np.full(trials, np.inf)
    occupied = counts > 0
    if total:
        starts = np.concatenate(([0], np.cumsum(counts)[:-1]))[occupied]
        d_serving[occupied] = np.minimum.reduceat(r, starts)
    serving = r == d_serving[trial]
    return NetworkBatch(r, trial, serving, d_serving)
