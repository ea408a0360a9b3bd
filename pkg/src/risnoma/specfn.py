"""Special functions and numerical Laplace inversion.

Everything here is a pure function of its arguments.  The Gauss
hypergeometric function and the Tricomi/parabolic-cylinder special cases
are evaluated by hand (series, linear transformations and continued
fractions); the error-function family and the incomplete gamma function
delegate to :mod:`scipy.special`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable

import mpmath
import numpy as np
from scipy import special

__all__ = [
    "SpecialFunctionError",
    "InverseLaplaceError",
    "InverseLaplaceConfig",
    "gauss2f1",
    "erfc",
    "erfcx",
    "tricomi_psi_1_half",
    "parabolic_d_minus2",
    "lower_incomplete_gamma",
    "regularized_lower_gamma",
    "laplace_of_SK",
    "inverse_laplace",
]

SQRT_PI = math.sqrt(math.pi)


class SpecialFunctionError(ArithmeticError):
    """Raised on a domain violation or when an accuracy target is not met."""


class InverseLaplaceError(SpecialFunctionError):
    """Numerical Laplace inversion failed its convergence check."""


# ---------------------------------------------------------------------------
# Gauss hypergeometric function 2F1(a, b; c; z) for real z <= 0
# ---------------------------------------------------------------------------

_SERIES_TOL = 1e-17
_MAX_TERMS = 5_000_000


def _is_nonpositive_int(x: float) -> bool:
    return x <= 0 and x == math.floor(x)


def _rgamma(x: float) -> float:
    """1/Gamma(x), zero at the poles."""
    if _is_nonpositive_int(x):
        return 0.0
    return 1.0 / math.gamma(x)


def _series_2f1(a: float, b: float, c: float, z: float) -> float:
    """Plain power series; caller guarantees |z| is comfortably below 1."""
    total = 1.0
    term = 1.0
    for k in range(1, 100_000):
        term *= (a + k - 1) * (b + k - 1) / ((c + k - 1) * k) * z
        total += term
        if term == 0.0:
            return total
        if abs(term) <= _SERIES_TOL * abs(total) and k > 2:
            return total
    raise SpecialFunctionError(f"2F1 series did not converge for z={z}")


def _long_series_2f1(a: float, b: float, c: float, w: float) -> float:
    """Power series in 0 <= w < 1 summed in vectorised blocks.

    Used only for the degenerate case (b - a integer) when w is close to 1,
    where the 1/z connection formula is singular.
    """
    total = 0.0
    log_term = 0.0
    sign = 1.0
    start = 0
    block = 65_536
    while start < _MAX_TERMS:
        k = np.arange(start, start + block, dtype=float)
        ratio = (a + k) * (b + k) / ((c + k) * (k + 1.0)) * w
        if np.any(ratio == 0.0):
            stop = int(np.argmax(ratio == 0.0))
            ratio = ratio[: stop + 1]
        with np.errstate(divide="ignore"):
            log_ratio = np.log(np.abs(ratio))
        signs = np.sign(ratio)
        logs = log_term + np.concatenate(([0.0], np.cumsum(log_ratio)[:-1]))
        sgn = sign * np.concatenate(([1.0], np.cumprod(signs)[:-1]))
        terms = sgn * np.exp(logs)
        total += float(terms.sum())
        if ratio[-1] == 0.0:
            return total
        log_term = float(logs[-1] + log_ratio[-1])
        sign = float(sgn[-1] * signs[-1])
        last = math.exp(log_term)
        # geometric tail bound once the ratio has settled below one
        if abs(ratio[-1]) < 1.0:
            tail = last / (1.0 - abs(ratio[-1]))
            if tail <= 1e-16 * abs(total):
                return total
        start += block
    raise SpecialFunctionError(
        f"2F1({a}, {b}; {c}; .) series in w={w} needs more than {_MAX_TERMS} terms"
    )


def _inverse_z_2f1(a: float, b: float, c: float, z: float) -> float:
    """Connection formula to 1/z for z < -1 when b - a is not an integer."""
    mz = -z
    zi = 1.0 / z
    t1 = (
        math.gamma(c)
        * math.gamma(b - a)
        * _rgamma(b)
        * _rgamma(c - a)
        * mz ** (-a)
    )
    t2 = (
        math.gamma(c)
        * math.gamma(a - b)
        * _rgamma(a)
        * _rgamma(c - b)
        * mz ** (-b)
    )
    out = 0.0
    if t1 != 0.0:
        out += t1 * _series_2f1(a, a - c + 1.0, a - b + 1.0, zi)
    if t2 != 0.0:
        out += t2 * _series_2f1(b, b - c + 1.0, b - a + 1.0, zi)
    return out


def gauss2f1(a: float, b: float, c: float, z: float) -> float:
    """Gauss hypergeometric function 2F1(a, b; c; z) for real ``z <= 0``.

    Small arguments use the defining series.  For ``z < -1/2`` the Pfaff
    transformation maps the argument to ``w = z/(z-1)`` in ``[1/3, 1)``; once
    ``w`` is close to one (``z < -9``) the 1/z connection formula takes
    over, with a long Pfaff series as fallback when ``b - a`` is an integer.
    """
    a, b, c, z = float(a), float(b), float(c), float(z)
    if _is_nonpositive_int(c):
        raise SpecialFunctionError(f"2F1 undefined for c={c} (non-positive integer)")
    if z > 0 or math.isnan(z):
        raise SpecialFunctionError(f"gauss2f1 supports z <= 0 only, got {z}")
    if z == 0.0 or a == 0.0 or b == 0.0:
        return 1.0
    # terminating series: a polynomial, exact by direct summation
    for p in (a, b):
        if _is_nonpositive_int(p) and -p <= 200:
            return _series_2f1(a, b, c, z)
    if z >= -0.5:
        return _series_2f1(a, b, c, z)
    w = z / (z - 1.0)
    pref = (1.0 - z) ** (-a)
    if z >= -9.0:
        return pref * _series_2f1(a, c - b, c, w)
    m = b - a
    if abs(m - round(m)) > 1e-3:
        return _inverse_z_2f1(a, b, c, z)
    return pref * _long_series_2f1(a, c - b, c, w)


# ---------------------------------------------------------------------------
# Error-function family, Tricomi Psi(1, 1/2; z), parabolic cylinder D_{-2}
# ---------------------------------------------------------------------------


def erfc(x):
    """Complementary error function (scipy backend, real or complex)."""
    return special.erfc(x)


def erfcx(x):
    """Scaled complementary error function ``exp(x**2) * erfc(x)``."""
    return special.erfcx(x)


_CF_SWITCH = 5.0
_CF_DEPTH = 80


def _psi_ratio(x):
    """Return ``r/(x + r)`` where ``2 r/(x + r) = Psi(1, 1/2; x**2)``.

    ``r`` is the tail of Laplace's continued fraction for erfc,
    ``sqrt(pi) x e^{x^2} erfc(x) = x/(x + r)``, with
    ``r = (1/2)/(x + 1/(x + (3/2)/(x + 2/(x + ...))))``.  Writing the
    quantity this way removes the catastrophic cancellation of
    ``1 - sqrt(pi) x erfcx(x)`` for large ``x``.
    """
    tail = x * 0.0
    for j in range(_CF_DEPTH, 0, -1):
        tail = (j / 2.0) / (x + tail)
    return tail / (x + tail)


def _half_psi(x):
    """``0.5 * Psi(1, 1/2; x**2)`` for Re(x) >= 0; works on arrays and complex."""
    x = np.asarray(x)
    big = np.abs(x) >= _CF_SWITCH
    if not np.any(big):
        return 1.0 - SQRT_PI * x * special.erfcx(x)
    if np.all(big):
        return _psi_ratio(x)
    out = np.empty(x.shape, dtype=np.result_type(x, float))
    out[big] = _psi_ratio(x[big])
    small = ~big
    out[small] = 1.0 - SQRT_PI * x[small] * special.erfcx(x[small])
    return out


def tricomi_psi_1_half(z: float) -> float:
    """Tricomi's confluent hypergeometric function Psi(1, 1/2; z), z >= 0.

    Closed form ``2 - 2 e^z sqrt(pi z) erfc(sqrt z)``; for large ``z`` the
    continued-fraction form is used so the result keeps full relative
    accuracy where it decays like ``1/z``.
    """
    z = float(z)
    if z < 0 or math.isnan(z):
        raise SpecialFunctionError(f"tricomi_psi_1_half needs z >= 0, got {z}")
    if math.isinf(z):
        return 0.0
    return float(2.0 * _half_psi(math.sqrt(z)))


def parabolic_d_minus2(x: float) -> float:
    """Parabolic cylinder function D_{-2}(x) for real x.

    Uses ``D_{-2}(x) = e^{-x^2/4} (1 - x sqrt(pi/2) erfcx(x/sqrt 2))``, which
    for ``x >= 0`` is ``(1/2) e^{-x^2/4} Psi(1, 1/2; x^2/2)``.
    """
    x = float(x)
    if x >= 0:
        return float(math.exp(-x * x / 4.0) * _half_psi(x / math.sqrt(2.0)))
    # no cancellation on the negative axis
    u = x / math.sqrt(2.0)
    return math.exp(-x * x / 4.0) * (1.0 - SQRT_PI * u * float(special.erfcx(u)))


def lower_incomplete_gamma(s: float, x: float) -> float:
    """Lower incomplete gamma function gamma(s, x) = int_0^x t^{s-1} e^{-t} dt."""
    if not (s > 0) or not (x >= 0):
        raise SpecialFunctionError(f"lower_incomplete_gamma needs s > 0, x >= 0; got s={s}, x={x}")
    if x == 0:
        return 0.0
    return float(special.gammainc(s, x) * special.gamma(s))


def regularized_lower_gamma(s, x):
    """P(s, x) = gamma(s, x)/Gamma(s); vectorised, no overflow for large s."""
    return special.gammainc(s, x)


# ---------------------------------------------------------------------------
# Laplace transform of a sum of K unit Rayleigh amplitudes
# ---------------------------------------------------------------------------


def _laplace_rayleigh_mp(s):
    x = s / 2
    return 1 - mpmath.sqrt(mpmath.pi) * x * mpmath.exp(x * x) * mpmath.erfc(x)


def laplace_of_SK(s, K: int):
    """Laplace transform of the density of ``S_K``, a sum of K i.i.d.
    Rayleigh amplitudes with density ``2x exp(-x^2)``.

    ``E[exp(-s c)] = e^{s^2/8} D_{-2}(s/sqrt 2) = (1/2) Psi(1, 1/2; s^2/4)``;
    the exponentials are cancelled analytically before the K-th power is
    taken.  Accepts floats, numpy arrays (real or complex, Re(s) >= 0) and
    mpmath numbers; the latter are evaluated in the ambient mpmath precision.
    """
    if K < 1 or int(K) != K:
        raise SpecialFunctionError(f"K must be a positive integer, got {K}")
    K = int(K)
    if isinstance(s, (mpmath.mpf, mpmath.mpc)):
        return _laplace_rayleigh_mp(s) ** K
    val = _half_psi(np.asarray(s) / 2.0) ** K
    if np.ndim(val) == 0:
        val = val[()]
        return float(val) if np.isrealobj(val) else complex(val)
    return val


# ---------------------------------------------------------------------------
# Numerical inverse Laplace transform
# ---------------------------------------------------------------------------

_METHODS = ("euler", "talbot", "stehfest")


@dataclass(frozen=True)
class InverseLaplaceConfig:
    """Settings for :func:`inverse_laplace`.

    ``method`` selects the scheme:

    * ``"euler"``: Fourier series on the Bromwich line with Euler
      (binomial) averaging.  Only needs the transform in the right
      half-plane, so it suits transforms of light-tailed densities.
    * ``"talbot"``: fixed-Talbot deformed contour.  Very accurate when the
      transform decays in the left half-plane; unusable otherwise.
    * ``"stehfest"``: Gaver-Stehfest abscissa summation on the real axis,
      carried out in multiprecision arithmetic.  Full accuracy requires a
      transform that accepts mpmath numbers.

    ``method_order`` is the number of series terms, contour nodes or
    Stehfest weights; convergence is checked against ``method_order - 2``.
    """

    method: str = "euler"
    method_order: int = 32
    target_abs_tol: float = 1e-7

    def __post_init__(self):
        if self.method not in _METHODS:
            raise ValueError(f"method must be one of {_METHODS}, got {self.method!r}")
        if self.method_order < 4 or self.method_order % 2:
            raise ValueError("method_order must be an even integer >= 4")
        if not self.target_abs_tol > 0:
            raise ValueError("target_abs_tol must be > 0")


_EULER_A = 25.0  # discretisation error ~ exp(-A)
_EULER_M = 11


@lru_cache(maxsize=None)
def _euler_weights(m: int) -> np.ndarray:
    return np.array([math.comb(m, j) for j in range(m + 1)], dtype=float) / 2.0**m


def _euler(transform, t: float, order: int) -> float:
    n = order + _EULER_M
    k = np.arange(n + 1)
    s = (_EULER_A + 2j * math.pi * k) / (2.0 * t)
    values = np.real(np.asarray(transform(s), dtype=complex))
    terms = values * np.where(k % 2 == 0, 1.0, -1.0)
    terms[0] *= 0.5
    partial = np.cumsum(terms) * (math.exp(_EULER_A / 2.0) / t)
    return float(np.dot(_euler_weights(_EULER_M), partial[order:]))


def _talbot(transform, t: float, order: int) -> float:
    M = order
    r = 2.0 * M / (5.0 * t)
    theta = np.arange(1, M) * math.pi / M
    cot = 1.0 / np.tan(theta)
    s = r * theta * (cot + 1j)
    sigma = theta + (theta * cot - 1.0) * cot
    values = np.asarray(transform(s), dtype=complex)
    head = 0.5 * math.exp(r * t) * complex(np.asarray(transform(np.array([r + 0j])))[0]).real
    body = np.real(np.exp(t * s) * values * (1.0 + 1j * sigma)).sum()
    return float(r / M * (head + body))


@lru_cache(maxsize=None)
def _stehfest_weights(N: int) -> tuple:
    half = N // 2
    out = []
    for k in range(1, N + 1):
        acc = Fraction(0)
        for j in range((k + 1) // 2, min(k, half) + 1):
            acc += Fraction(
                j**half * math.factorial(2 * j),
                math.factorial(half - j)
                * math.factorial(j)
                * math.factorial(j - 1)
                * math.factorial(k - j)
                * math.factorial(2 * j - k),
            )
        out.append((-1) ** (k + half) * acc)
    return tuple(out)


def _stehfest(transform, t: float, order: int) -> float:
    weights = _stehfest_weights(order)
    with mpmath.workdps(int(2.2 * order) + 15):
        ln2_t = mpmath.log(2) / t
        acc = mpmath.mpf(0)
        for k, v in enumerate(weights, start=1):
            acc += mpmath.mpf(v.numerator) / v.denominator * transform(k * ln2_t)
        return float(mpmath.re(acc * ln2_t))


_SCHEMES: dict[str, Callable] = {"euler": _euler, "talbot": _talbot, "stehfest": _stehfest}


def inverse_laplace(transform: Callable, t: float, cfg: InverseLaplaceConfig | None = None) -> float:
    """Numerically invert a Laplace transform at ``t > 0``.

    ``transform`` must accept complex numpy arrays for the ``euler`` and
    ``talbot`` schemes and scalar (ideally mpmath) arguments for
    ``stehfest``.  Raises :class:`InverseLaplaceError` when the result at
    ``method_order`` and ``method_order - 2`` differ by more than
    ``target_abs_tol``.
    """
    cfg = cfg or InverseLaplaceConfig()
    if not t > 0:
        raise SpecialFunctionError(f"inverse_laplace needs t > 0, got {t}")
    scheme = _SCHEMES[cfg.method]
    hi = scheme(transform, float(t), cfg.method_order)
    lo = scheme(transform, float(t), cfg.method_order - 2)
    if not math.isfinite(hi) or abs(hi - lo) > cfg.target_abs_tol:
        raise InverseLaplaceError(
            f"{cfg.method} inversion at t={t} not converged: "
            f"order {cfg.method_order} -> {hi!r}, order {cfg.method_order - 2} -> {lo!r}"
        )
    return hi
