"""Monte Carlo coverage estimates for the typical (RIS-aided) and connected users.

Trials are processed in fixed-size blocks.  Block ``b`` draws from its own
stream derived from ``(seed, b)``, with geometry and fading on separate
child streams, so results do not depend on how blocks are scheduled and
the geometry is shared between runs that differ only in fading settings.
"""

from __future__ import annotations

import csv
import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .channel import (
    GammaFit,
    RisChannelSpec,
    fit_for_analysis,
    sample_smallscale_approx,
    sample_smallscale_exact,
)
from .geometry import NetworkRealization, sample_network_batch
from .params import SystemParams

BLOCK_TRIALS = 20_000
MIN_TRIALS = 10_000


class FadingMode(enum.Enum):
    """Fading law of the RIS-aided part of the typical user's interference.

    ``MODEL_FAITHFUL`` draws Gamma(a, b) gains, the law the interference
    analysis assumes.  ``PHYSICAL`` draws the coherent sum ``(A beta S_K)^2``.
    """

    MODEL_FAITHFUL = "model-faithful"
    PHYSICAL = "physical"

    @classmethod
    def parse(cls, value) -> "FadingMode":
        if isinstance(value, cls):
            return value
        return cls(str(value).replace("_", "-"))


@dataclass(frozen=True)
class CoverageEstimate:
    probability: float
    ci_halfwidth_95: float
    trials: int

    @classmethod
    def from_hits(cls, hits: int, trials: int) -> "CoverageEstimate":
        p = hits / trials
        return cls(p, 1.96 * math.sqrt(p * (1.0 - p) / trials), trials)


def channel_spec(params: SystemParams) -> RisChannelSpec:
    return RisChannelSpec(params.n, params.beta, params.A)


def default_fit(params: SystemParams) -> GammaFit:
    return fit_for_analysis(channel_spec(params), "moment")


def _ris_gains(params, mode, fit, rng, size):
    if mode is FadingMode.MODEL_FAITHFUL:
        return rng.gamma(fit.shape_a, fit.scale_b, size=size)
    return sample_smallscale_approx(channel_spec(params), rng, size=size)


def interference_typical(
    real: NetworkRealization,
    params: SystemParams,
    mode: FadingMode,
    rng: np.random.Generator,
    fit: GammaFit | None = None,
    size: int | None = None,
):
    """Interference power (W) at the typical user for a fixed realization.

    Every interferer contributes ``rho_i`` of its power over the RIS-aided
    channel and ``1 - rho_i`` over a Rayleigh direct channel.  With ``size``
    an array of independent fading draws is returned.
    """
    mode = FadingMode.parse(mode)
    fit = fit or default_fit(params)
    d = real.d_interferers
    shape = (1 if size is None else size, d.size)
    if d.size == 0:
        out = np.zeros(shape[0])
        return 0.0 if size is None else out
    path = params.C_t * d ** (-params.alpha_t)
    gain = np.zeros(shape)
    if params.rho_i > 0:
        gain += params.rho_i * _ris_gains(params, mode, fit, rng, shape)
    if params.rho_i < 1:
        gain += (1.0 - params.rho_i) * rng.exponential(size=shape)
    out = params.p_t * (gain * path).sum(axis=1)
    return float(out[0]) if size is None else out


def sinr_sic(gain_t, interf, params: SystemParams):
    """SINR for decoding the connected user's message at the typical user.

    ``gain_t`` is the composite gain ``|f_BU|^2 C_t d^-alpha_t``.
    """
    p = params.p_t
    return params.a_c * p * gain_t / (params.a_t * p * gain_t + interf + params.noise)


def sinr_typical_post_sic(gain_t, interf, params: SystemParams):
    return params.a_t * params.p_t * gain_t / (interf + params.noise)


def sinr_connected(gain_c, interf_c, params: SystemParams):
    """SINR of the connected user; ``gain_c = |h_c|^2 C_c r_c^-alpha_c``."""
    p = params.p_t
    return params.a_c * p * gain_c / (params.a_t * p * gain_c + interf_c + params.noise)


# ---------------------------------------------------------------------------
# Block simulation
# ---------------------------------------------------------------------------


def _block_streams(seed: int, block: int) -> tuple[np.random.Generator, np.random.Generator]:
    geo, fade = np.random.SeedSequence(entropy=seed, spawn_key=(block,)).spawn(2)
    return np.random.default_rng(geo), np.random.default_rng(fade)


def _blocks(trials: int) -> list[tuple[int, int]]:
    n_full, rest = divmod(trials, BLOCK_TRIALS)
    sizes = [BLOCK_TRIALS] * n_full + ([rest] if rest else [])
    return list(enumerate(sizes))


def _typical_block(params, mode, fit, exact_channel, seed, block, size):
    rng_geo, rng_fade = _block_streams(seed, block)
    batch = sample_network_batch(params.lambda_b, params.window_radius, size, rng_geo)
    spec = channel_spec(params)
    sampler = sample_smallscale_exact if exact_channel else sample_smallscale_approx
    small = sampler(spec, rng_fade, size=size)
    gain = small * params.C_t * batch.d_serving ** (-params.alpha_t)

    keep = ~batch.serving
    r, owner = batch.distances[keep], batch.trial[keep]
    path = params.C_t * r ** (-params.alpha_t)
    fading = np.zeros(r.size)
    if params.rho_i > 0:
        fading += params.rho_i * _ris_gains(params, mode, fit, rng_fade, r.size)
    if params.rho_i < 1:
        fading += (1.0 - params.rho_i) * rng_fade.exponential(size=r.size)
    interf_per_watt = np.bincount(owner, weights=fading * path, minlength=size)
    return gain, interf_per_watt


def _connected_block(params, seed, block, size):
    rng_geo, rng_fade = _block_streams(seed, block)
    batch = sample_network_batch(
        params.lambda_b, params.window_radius, size, rng_geo, inner_radius=params.r_c, require_nonempty=False
    )
    gain = rng_fade.exponential(size=size) * params.C_c * params.r_c ** (-params.alpha_c)
    path = params.C_c * batch.distances ** (-params.alpha_c)
    fading = rng_fade.exponential(size=batch.distances.size)
    interf_per_watt = np.bincount(batch.trial, weights=fading * path, minlength=size)
    return gain, interf_per_watt


def _run_blocks(fn, trials: int, workers: int):
    blocks = _blocks(trials)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(lambda b: fn(*b), blocks))
    return [fn(*b) for b in blocks]


def _check_trials(trials: int) -> None:
    if trials < MIN_TRIALS:
        raise ValueError(f"need at least {MIN_TRIALS} trials, got {trials}")


def estimate_coverage_typical_sweep(
    params: SystemParams,
    p_t_dbm_values: Iterable[float],
    trials: int,
    mode: FadingMode = FadingMode.MODEL_FAITHFUL,
    seed: int = 0,
    fit: GammaFit | None = None,
    exact_channel: bool = False,
    workers: int = 1,
) -> list[CoverageEstimate]:
    """Typical-user coverage at several transmit powers from one set of draws.

    The event is ``gamma_SIC > gamma_sic_th`` and ``gamma_t > gamma_t_th``.
    The user's own gain follows the approx law unless ``exact_channel``.
    """
    _check_trials(trials)
    mode = FadingMode.parse(mode)
    fit = fit or default_fit(params)
    powers = [params.with_(p_t_dbm=float(p)) for p in p_t_dbm_values]
    hits = np.zeros(len(powers), dtype=np.int64)

    def run(block, size):
        gain, interf = _typical_block(params, mode, fit, exact_channel, seed, block, size)
        out = np.empty(len(powers), dtype=np.int64)
        for i, p in enumerate(powers):
            ok = (sinr_sic(gain, p.p_t * interf, p) > p.gamma_sic_th) & (
                sinr_typical_post_sic(gain, p.p_t * interf, p) > p.gamma_t_th
            )
            out[i] = np.count_nonzero(ok)
        return out

    for h in _run_blocks(run, trials, workers):
        hits += h
    return [CoverageEstimate.from_hits(int(h), trials) for h in hits]


def estimate_coverage_typical(
    params: SystemParams,
    trials: int,
    mode: FadingMode = FadingMode.MODEL_FAITHFUL,
    seed: int = 0,
    fit: GammaFit | None = None,
    exact_channel: bool = False,
    workers: int = 1,
) -> CoverageEstimate:
    return estimate_coverage_typical_sweep(
        params, [params.p_t_dbm], trials, mode, seed, fit, exact_channel, workers
    )[0]


def estimate_coverage_connected_sweep(
    params: SystemParams,
    p_t_dbm_values: Iterable[float],
    trials: int,
    seed: int = 0,
    workers: int = 1,
) -> list[CoverageEstimate]:
    """Connected-user coverage ``P(gamma_c > gamma_c_th)`` at several powers.

    The connected user is ``r_c`` from its BS; interferers form an HPPP
    outside the disc of radius ``r_c`` around the user.
    """
    _check_trials(trials)
    powers = [params.with_(p_t_dbm=float(p)) for p in p_t_dbm_values]
    hits = np.zeros(len(powers), dtype=np.int64)

    def run(block, size):
        gain, interf = _connected_block(params, seed, block, size)
        return np.array(
            [np.count_nonzero(sinr_connected(gain, p.p_t * interf, p) > p.gamma_c_th) for p in powers],
            dtype=np.int64,
        )

    for h in _run_blocks(run, trials, workers):
        hits += h
    return [CoverageEstimate.from_hits(int(h), trials) for h in hits]


def estimate_coverage_connected(params: SystemParams, trials: int, seed: int = 0, workers: int = 1) -> CoverageEstimate:
    return estimate_coverage_connected_sweep(params, [params.p_t_dbm], trials, seed, workers)[0]


def write_estimates_csv(path, param_swept: str, values: Sequence, estimates: Sequence[CoverageEstimate]) -> None:
    """Write rows ``param_swept,value,p_hat,ci95,trials``."""
    with open(Path(path), "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["param_swept", "value", "p_hat", "ci95", "trials"])
        for v, est in zip(values, estimates):
            writer.writerow([param_swept, repr(v), repr(est.probability), repr(est.ci_halfwidth_95), est.trials])
