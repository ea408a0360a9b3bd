"""RIS-aided small-scale channel law.

The typical user sees a direct Rayleigh amplitude plus ``n`` reflected
Rayleigh amplitudes combined coherently through the RIS.  Two power-domain
laws are provided:

* exact: ``(A*beta*sum(c_i) + c_BU)**2`` with the direct amplitude unweighted;
* approx: ``(A*beta*S_K)**2`` with ``S_K`` the sum of ``K = n + 1`` amplitudes,
  the law all of the coverage analysis is built on.

All Rayleigh amplitudes have density ``2x exp(-x^2)`` (unit mean power).
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .specfn import (
    InverseLaplaceConfig,
    SpecialFunctionError,
    inverse_laplace,
    laplace_of_SK,
    regularized_lower_gamma,
)

# Rayleigh amplitude moments E[c^k] for the density 2x exp(-x^2)
RAYLEIGH_MOMENTS = {
    1: math.sqrt(math.pi) / 2.0,
    2: 1.0,
    3: 0.75 * math.sqrt(math.pi),
    4: 2.0,
}
_RAYLEIGH_SCALE = 1.0 / math.sqrt(2.0)  # numpy parametrisation of 2x exp(-x^2)

# beyond this many summed amplitudes the tabulated exact law is not produced
EXACT_MAX_K = 8


@dataclass(frozen=True)
class RisChannelSpec:
    """RIS size ``n``, per-element power coefficient ``beta`` and RU gain ``A``.

    ``n = 0`` is accepted and means a bare Rayleigh direct link.
    """

    n: int
    beta: float = 1.0
    A: float = 1.0

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 0:
            raise ValueError(f"n must be a non-negative integer, got {self.n}")
        if not 0.0 <= self.beta <= 1.0:
            raise ValueError(f"beta must lie in [0, 1], got {self.beta}")
        if not self.A > 0:
            raise ValueError(f"A must be > 0, got {self.A}")

    @property
    def K(self) -> int:
        return int(self.n) + 1

    @property
    def amplitude_weight(self) -> float:
        return self.A * self.beta


@dataclass(frozen=True)
class GammaFit:
    """Gamma law with shape ``shape_a`` and scale ``scale_b``."""

    shape_a: float
    scale_b: float

    def __post_init__(self):
        if not (self.shape_a > 0 and self.scale_b > 0):
            raise ValueError(f"Gamma fit needs positive shape and scale, got {self}")

    @property
    def mean(self) -> float:
        return self.shape_a * self.scale_b

    @property
    def is_integer_shape(self) -> bool:
        return abs(self.shape_a - round(self.shape_a)) <= 1e-9

    def with_integer_shape(self) -> "GammaFit":
        """Round the shape to the nearest integer (at least 1), keeping the mean."""
        a = max(1, int(round(self.shape_a)))
        return GammaFit(float(a), self.mean / a)


# ---------------------------------------------------------------------------
# Samplers
# ---------------------------------------------------------------------------


def rayleigh_amplitudes(rng: np.random.Generator, size) -> np.ndarray:
    """Unit-power Rayleigh amplitudes, density ``2x exp(-x^2)``."""
    return rng.rayleigh(_RAYLEIGH_SCALE, size=size)


def sample_smallscale_exact(spec: RisChannelSpec, rng: np.random.Generator, size=None):
    """Draw ``|f_BU|^2 = (A beta sum_i c_BR,i + c_BU)^2`` (coherent combining)."""
    shape = () if size is None else (size if isinstance(size, tuple) else (size,))
    direct = rayleigh_amplitudes(rng, shape)
    if spec.n:
        reflected = rayleigh_amplitudes(rng, shape + (spec.n,)).sum(axis=-1)
        direct = direct + spec.amplitude_weight * reflected
    out = direct**2
    return float(out) if size is None else out


def sample_smallscale_approx(spec: RisChannelSpec, rng: np.random.Generator, size=None):
    """Draw ``(A beta S_K)^2`` with ``S_K`` a sum of ``K = n + 1`` amplitudes."""
    shape = () if size is None else (size if isinstance(size, tuple) else (size,))
    s_k = rayleigh_amplitudes(rng, shape + (spec.K,)).sum(axis=-1)
    out = (spec.amplitude_weight * s_k) ** 2
    return float(out) if size is None else out


# ---------------------------------------------------------------------------
# Exact law via numerical Laplace inversion
# ---------------------------------------------------------------------------


def _cfg_for(t: float, cfg: InverseLaplaceConfig) -> InverseLaplaceConfig:
    # the Bromwich-line series needs a number of terms growing linearly in t
    if cfg.method != "euler":
        return cfg
    need = 16 + int(math.ceil(1.5 * t))
    need += need % 2
    if need <= cfg.method_order:
        return cfg
    return InverseLaplaceConfig(cfg.method, need, cfg.target_abs_tol)


def exact_pdf_SK(x: float, K: int, cfg: InverseLaplaceConfig | None = None) -> float:
    """Density of ``S_K`` at ``x > 0`` by inverting ``(Psi(1, 1/2; s^2/4)/2)^K``."""
    if not x > 0:
        raise SpecialFunctionError(f"exact_pdf_SK needs x > 0, got {x}")
    cfg = cfg or InverseLaplaceConfig()
    val = inverse_laplace(lambda s: laplace_of_SK(s, K), x, _cfg_for(x, cfg))
    return max(val, 0.0)


def exact_cdf_SK(x: float, K: int, cfg: InverseLaplaceConfig | None = None) -> float:
    """CDF of ``S_K`` at ``x`` (inverts the transform divided by ``s``)."""
    if x <= 0:
        return 0.0
    cfg = cfg or InverseLaplaceConfig()
    val = inverse_laplace(lambda s: laplace_of_SK(s, K) / s, x, _cfg_for(x, cfg))
    return min(max(val, 0.0), 1.0)


def exact_pdf_power(x: float, Lambda: float, K: int, cfg: InverseLaplaceConfig | None = None) -> float:
    """Density of ``Lambda * S_K^2`` at ``x``.

    Only the positive square-root branch contributes because ``S_K >= 0``.
    """
    if not x > 0 or not Lambda > 0:
        raise SpecialFunctionError(f"exact_pdf_power needs x > 0 and Lambda > 0, got x={x}, Lambda={Lambda}")
    root = math.sqrt(x / Lambda)
    return exact_pdf_SK(root, K, cfg) / (2.0 * Lambda * root)


def exact_cdf_power(x: float, Lambda: float, K: int, cfg: InverseLaplaceConfig | None = None) -> float:
    if not Lambda > 0:
        raise SpecialFunctionError(f"Lambda must be > 0, got {Lambda}")
    if x <= 0:
        return 0.0
    return exact_cdf_SK(math.sqrt(x / Lambda), K, cfg)


@dataclass
class DistributionTable:
    """PDF and CDF tabulated on an increasing grid."""

    grid: np.ndarray
    pdf: np.ndarray
    cdf: np.ndarray

    def __post_init__(self):
        self.grid = np.asarray(self.grid, dtype=float)
        self.pdf = np.asarray(self.pdf, dtype=float)
        self.cdf = np.asarray(self.cdf, dtype=float)
        if not (self.grid.shape == self.pdf.shape == self.cdf.shape) or self.grid.ndim != 1:
            raise ValueError("grid, pdf and cdf must be 1-D arrays of equal length")

    def check(self) -> None:
        """Raise ``ValueError`` unless the table is a proper distribution."""
        if np.any(self.grid < 0) or np.any(np.diff(self.grid) <= 0):
            raise ValueError("grid must be non-negative and strictly increasing")
        if np.any(self.pdf < 0):
            raise ValueError("pdf must be non-negative")
        if np.any(np.diff(self.cdf) < 0) or self.cdf[0] < 0 or self.cdf[-1] > 1:
            raise ValueError("cdf must be nondecreasing within [0, 1]")
        if not 0.99 <= self.cdf[-1] <= 1.0:
            raise ValueError(f"cdf ends at {self.cdf[-1]:.4f}; grid does not cover the mass")
        mass = np.trapezoid(self.pdf, self.grid)
        if abs(mass - 1.0) > 0.01:
            raise ValueError(f"pdf integrates to {mass:.4f}")

    def to_csv(self, path=None) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["x", "pdf", "cdf"])
        for row in zip(self.grid, self.pdf, self.cdf):
            writer.writerow([repr(float(v)) for v in row])
        text = buf.getvalue()
        if path is not None:
            Path(path).write_text(text, newline="")
        return text

    @classmethod
    def from_csv(cls, path) -> "DistributionTable":
        return cls.parse_csv(Path(path).read_text())

    @classmethod
    def parse_csv(cls, text: str) -> "DistributionTable":
        rows = list(csv.reader(io.StringIO(text)))
        if rows[0] != ["x", "pdf", "cdf"]:
            raise ValueError(f"unexpected header {rows[0]}")
        data = np.array([[float(v) for v in r] for r in rows[1:]])
        return cls(data[:, 0], data[:, 1], data[:, 2])


def exact_power_table(grid, Lambda: float, K: int, cfg: InverseLaplaceConfig | None = None) -> DistributionTable:
    """Tabulate the exact law of ``Lambda * S_K^2`` (grid points must be > 0,
    except that a leading 0 is allowed and gets pdf/cdf 0 for K >= 1)."""
    grid = np.asarray(grid, dtype=float)
    pdf = np.zeros_like(grid)
    cdf = np.zeros_like(grid)
    for i, x in enumerate(grid):
        if x > 0:
            pdf[i] = exact_pdf_power(x, Lambda, K, cfg)
            cdf[i] = exact_cdf_power(x, Lambda, K, cfg)
        elif K == 1:
            pdf[i] = 1.0 / Lambda  # exponential law, finite at the origin
    return DistributionTable(grid, pdf, cdf)


# ---------------------------------------------------------------------------
# Gamma surrogate
# ---------------------------------------------------------------------------


def sum_amplitude_moments(K: int) -> tuple[float, float]:
    """``(E[S_K^2], E[S_K^4])`` for a sum of K unit Rayleigh amplitudes."""
    m1, m2, m3, m4 = (RAYLEIGH_MOMENTS[i] for i in (1, 2, 3, 4))
    k = K
    second = k * m2 + k * (k - 1) * m1**2
    fourth = (
        k * m4
        + 4 * k * (k - 1) * m3 * m1
        + 3 * k * (k - 1) * m2**2
        + 6 * k * (k - 1) * (k - 2) * m2 * m1**2
        + k * (k - 1) * (k - 2) * (k - 3) * m1**4
    )
    return second, fourth


def fit_gamma(spec: RisChannelSpec, mode: str = "moment") -> GammaFit:
    """Gamma surrogate for the small-scale power gain.

    ``mode="paper"``: shape ``n`` and scale ``n (A beta)^2``.
    ``mode="moment"``: first two moments of the approx law matched exactly.
    """
    w2 = spec.amplitude_weight**2
    if mode == "paper":
        if spec.n < 1:
            raise ValueError("paper-mode fit needs n >= 1")
        if w2 == 0:
            raise ValueError("paper-mode fit is degenerate for beta = 0")
        return GammaFit(float(spec.n), spec.n * w2)
    if mode == "moment":
        if w2 == 0:
            raise ValueError("moment fit is degenerate for beta = 0")
        second, fourth = sum_amplitude_moments(spec.K)
        var = fourth - second**2
        return GammaFit(second**2 / var, w2 * var / second)
    raise ValueError(f"unknown fit mode {mode!r}")


def fit_for_analysis(spec: RisChannelSpec, mode: str = "moment") -> GammaFit:
    """Fit used by the coverage analysis: integer shape, as the CDF bound needs."""
    return fit_gamma(spec, mode).with_integer_shape()


def gamma_pdf(x, fit: GammaFit):
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("gamma_pdf needs x >= 0")
    a, b = fit.shape_a, fit.scale_b
    with np.errstate(divide="ignore"):
        logp = (a - 1.0) * np.log(x) - x / b - math.lgamma(a) - a * math.log(b)
    out = np.exp(logp)
    if a == 1.0:
        out = np.where(x == 0, 1.0 / b, out)
    return out[()] if out.ndim == 0 else out


def gamma_cdf(x, fit: GammaFit):
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("gamma_cdf needs x >= 0")
    out = regularized_lower_gamma(fit.shape_a, x / fit.scale_b)
    return out[()] if np.ndim(out) == 0 else out


def alzer_eta(fit: GammaFit) -> float:
    """``(1/b) (a!)^(-1/a)`` for an integer shape ``a``."""
    if not fit.is_integer_shape:
        raise ValueError(f"CDF bound needs an integer Gamma shape, got {fit.shape_a}")
    a = int(round(fit.shape_a))
    return math.exp(-math.lgamma(a + 1) / a) / fit.scale_b


def alzer_cdf_bound(x, fit: GammaFit):
    """Closed-form CDF bound ``(1 - exp(-eta x))^a`` for integer shape ``a``.

    For ``a > 1`` it lies below the exact Gamma CDF; for ``a = 1`` it is exact.
    """
    eta = alzer_eta(fit)
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("alzer_cdf_bound needs x >= 0")
    out = (-np.expm1(-eta * x)) ** int(round(fit.shape_a))
    return out[()] if out.ndim == 0 else out

