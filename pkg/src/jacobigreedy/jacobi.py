"""Jacobi polynomials P_n^{(alpha,beta)}: stable evaluation, rescalings, asymptotics.

Conventions: P_n(1) = binom(n+alpha, n); the orthonormal family is
p_n = d_n * P_n with ||p_n||_{L2(mu)} = 1 for the measure
d mu(x) = (1-x)^alpha (1+x)^beta dx on (-1, 1).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Iterator, Mapping

import numpy as np


class DomainError(ValueError):
    """Argument outside the mathematical domain of an operation."""


@dataclass(frozen=True)
class JacobiParams:
    """Weight exponents (alpha, beta), both > -1."""

    alpha: float
    beta: float

    def __post_init__(self):
        a, b = float(self.alpha), float(self.beta)
        if not (a > -1.0 and b > -1.0):
            raise DomainError(f"need alpha > -1 and beta > -1, got ({a}, {b})")
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "beta", b)

    @property
    def gamma(self) -> float:
        return max(self.alpha, self.beta)

    @property
    def half_range_ok(self) -> bool:
        """True when min(alpha, beta) > -1/2 (the range where the basis theory applies)."""
        return min(self.alpha, self.beta) > -0.5

    def swapped(self) -> "JacobiParams":
        return JacobiParams(self.beta, self.alpha)


@dataclass(frozen=True)
class NormalizationMode:
    """How basis elements are scaled: orthonormal p_n, sqrt(n)*P_n, or Lp-normalized.

    The sqrt-scaled family takes the constant function 1 as its 0-term.
    """

    tag: str  # "orthonormal" | "sqrt-scaled" | "lp"
    p: float | None = None

    _TAGS = ("orthonormal", "sqrt-scaled", "lp")

    def __post_init__(self):
        if self.tag not in self._TAGS:
            raise ValueError(f"unknown normalization tag {self.tag!r}")
        if self.tag == "lp":
            if self.p is None or not (1.0 <= self.p < math.inf):
                raise ValueError("lp normalization needs 1 <= p < inf")
        elif self.p is not None:
            raise ValueError(f"{self.tag!r} mode takes no p")

    @classmethod
    def orthonormal(cls) -> "NormalizationMode":
        return cls("orthonormal")

    @classmethod
    def sqrt_scaled(cls) -> "NormalizationMode":
        return cls("sqrt-scaled")

    @classmethod
    def lp_normalized(cls, p: float) -> "NormalizationMode":
        return cls("lp", float(p))


def _check_x(x):
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) > 1.0 + 1e-12):
        raise DomainError("x outside [-1, 1]")
    return x


def jacobi_iter(params: JacobiParams, x: np.ndarray, nmax: int) -> Iterator[tuple[int, np.ndarray]]:
    """Yield (n, P_n(x)) for n = 0..nmax by the forward three-term recurrence.

    The yielded arrays are freshly allocated each step, so callers may keep them.
    """
    a, b = params.alpha, params.beta
    x = np.asarray(x, dtype=float)
    p_prev = np.ones_like(x)
    yield 0, p_prev
    if nmax == 0:
        return
    p_cur = 0.5 * (a + b + 2.0) * x + 0.5 * (a - b)
    yield 1, p_cur
    for n in range(2, nmax + 1):
        s = 2.0 * n + a + b
        c1 = 2.0 * n * (n + a + b) * (s - 2.0)
        c2 = (s - 1.0) * (a * a - b * b)
        c3 = (s - 1.0) * s * (s - 2.0)
        c4 = 2.0 * (n + a - 1.0) * (n + b - 1.0) * s
        p_next = ((c3 * x + c2) * p_cur - c4 * p_prev) / c1
        yield n, p_next
        p_prev, p_cur = p_cur, p_next


def eval_P(params: JacobiParams, n: int, x) -> float | np.ndarray:
    """P_n^{(alpha,beta)}(x), normalized so P_n(1) = binom(n+alpha, n)."""
    if n < 0:
        raise DomainError("n must be >= 0")
    xv = _check_x(x)
    scalar = xv.ndim == 0
    xv = np.atleast_1d(xv)
    out = None
    for k, pk in jacobi_iter(params, xv, n):
        if k == n:
            out = pk
    if not np.all(np.isfinite(out)):
        raise OverflowError(f"P_{n} overflowed in the recurrence")
    return float(out[0]) if scalar else out


def eval_P_many(params: JacobiParams, degrees, x) -> np.ndarray:
    """Stack P_n(x) for the requested degrees: shape (len(degrees), len(x)).

    One pass of the recurrence up to max(degrees); degrees may repeat and
    need not be sorted.
    """
    degrees = list(degrees)
    xv = np.atleast_1d(_check_x(x))
    want: dict[int, list[int]] = {}
    for i, d in enumerate(degrees):
        if d < 0:
            raise DomainError("degrees must be >= 0")
        want.setdefault(int(d), []).append(i)
    out = np.empty((len(degrees), xv.size), dtype=float)
    for n, pn in jacobi_iter(params, xv, max(want)):
        for i in want.get(n, ()):
            out[i] = pn
    if not np.all(np.isfinite(out)):
        raise OverflowError("Jacobi recurrence overflowed")
    return out


def jacobi_combination(params: JacobiParams, coeffs: Mapping[int, float], x) -> np.ndarray:
    """Sum_{n} coeffs[n] * P_n(x), accumulated in one recurrence pass."""
    xv = np.atleast_1d(_check_x(x))
    if not coeffs:
        return np.zeros_like(xv)
    acc = np.zeros_like(xv)
    for n, pn in jacobi_iter(params, xv, max(coeffs)):
        c = coeffs.get(n)
        if c:
            acc += c * pn
    return acc


def log_binom(a: float, n: int) -> float:
    """log of the generalized binomial binom(n+a, n) = Gamma(n+a+1)/(Gamma(a+1) n!)."""
    return math.lgamma(n + a + 1.0) - math.lgamma(a + 1.0) - math.lgamma(n + 1.0)


def value_at_one(params: JacobiParams, n: int) -> float:
    """binom(n+alpha, n), the pinned value P_n(1)."""
    return math.exp(log_binom(params.alpha, n))


def orthonormal_const(params: JacobiParams, n: int) -> float:
    """d_n with p_n = d_n P_n orthonormal in L2(mu); d_n ~ sqrt(n) for large n.

    Evaluated through log-gamma so large n does not overflow.
    """
    if n < 0:
        raise DomainError("n must be >= 0")
    a, b = params.alpha, params.beta
    if n == 0:
        # (a+b+1)*Gamma(a+b+1) collapses to Gamma(a+b+2), valid for all a+b > -2
        log_d2 = (
            math.lgamma(a + b + 2.0)
            - (a + b + 1.0) * math.log(2.0)
            - math.lgamma(a + 1.0)
            - math.lgamma(b + 1.0)
        )
    else:
        log_d2 = (
            math.log(2.0 * n + a + b + 1.0)
            + math.lgamma(n + 1.0)
            + math.lgamma(n + a + b + 1.0)
            - (a + b + 1.0) * math.log(2.0)
            - math.lgamma(n + a + 1.0)
            - math.lgamma(n + b + 1.0)
        )
    return math.exp(0.5 * log_d2)


def basis_scale(
    params: JacobiParams,
    mode: NormalizationMode,
    n: int,
    lp_norm_of_orthonormal: Callable[[int], float] | None = None,
) -> float:
    """Multiplier s_n such that the basis element is s_n * P_n.

    For "lp" mode a backend callable n -> ||p_n||_{Lp(mu)} must be supplied
    (see greedy.basis_scales, which wires in the quadrature module).
    """
    if mode.tag == "orthonormal":
        return orthonormal_const(params, n)
    if mode.tag == "sqrt-scaled":
        return math.sqrt(n) if n >= 1 else 1.0
    if lp_norm_of_orthonormal is None:
        raise ValueError("lp normalization requires an Lp-norm backend")
    return orthonormal_const(params, n) / lp_norm_of_orthonormal(n)


def eval_basis(
    params: JacobiParams,
    mode: NormalizationMode,
    n: int,
    x,
    lp_norm_of_orthonormal: Callable[[int], float] | None = None,
) -> float | np.ndarray:
    """Basis element in the requested normalization, evaluated at x."""
    return basis_scale(params, mode, n, lp_norm_of_orthonormal) * eval_P(params, n, x)


def eval_derivative(params: JacobiParams, n: int, x) -> float | np.ndarray:
    """(P_n^{(alpha,beta)})'(x) = (1+alpha+beta+n)/2 * P_{n-1}^{(alpha+1,beta+1)}(x)."""
    if n < 1:
        raise DomainError("n must be >= 1")
    shifted = JacobiParams(params.alpha + 1.0, params.beta + 1.0)
    return 0.5 * (1.0 + params.alpha + params.beta + n) * eval_P(shifted, n - 1, x)


@dataclass(frozen=True)
class DarbouxTerms:
    """First asymptotic term of n^{1/2} P_n(cos theta) away from the endpoints."""

    k_theta: float
    phi_theta: float
    main_term: float
    error_bound_scale: float


def darboux_amplitude(params: JacobiParams, theta) -> np.ndarray | float:
    """k(theta) = pi^{-1/2} sin(theta/2)^{-alpha-1/2} cos(theta/2)^{-beta-1/2}."""
    th = np.asarray(theta, dtype=float)
    k = (
        math.pi ** -0.5
        * np.sin(th / 2.0) ** (-params.alpha - 0.5)
        * np.cos(th / 2.0) ** (-params.beta - 0.5)
    )
    return float(k) if k.ndim == 0 else k


def darboux_phase(params: JacobiParams, theta) -> np.ndarray | float:
    """phi(theta) = (alpha+beta+1) theta/2 - (2 alpha+1) pi/4."""
    th = np.asarray(theta, dtype=float)
    phi = (params.alpha + params.beta + 1.0) * th / 2.0 - (2.0 * params.alpha + 1.0) * math.pi / 4.0
    return float(phi) if phi.ndim == 0 else phi


def darboux_terms(params: JacobiParams, n: int, theta: float, delta: float = 1.0) -> DarbouxTerms:
    """Amplitude, phase, main term and error scale of the oscillatory asymptotic.

    Valid (with uniformly bounded error / error_bound_scale) for
    delta/n <= theta <= pi - delta/n; outside that window a warning is issued.
    """
    if n < 1:
        raise DomainError("n must be >= 1")
    if not (0.0 < theta < math.pi):
        raise DomainError("theta must lie in (0, pi)")
    if not (delta / n <= theta <= math.pi - delta / n):
        warnings.warn(
            f"theta={theta:.3g} outside the validity window [{delta / n:.3g}, "
            f"{math.pi - delta / n:.3g}]; error bound may not apply",
            stacklevel=2,
        )
    k = darboux_amplitude(params, theta)
    phi = darboux_phase(params, theta)
    main = k * math.cos(n * theta + phi)
    return DarbouxTerms(
        k_theta=k,
        phi_theta=phi,
        main_term=main,
        error_bound_scale=k / (n * math.sin(theta)),
    )


def near_one_window(params: JacobiParams, n: int, d: float = 0.5) -> tuple[float, float]:
    """The interval [1 - d/n^2, 1] where P_n(x) stays comparable to n^alpha."""
    if n < 1:
        raise DomainError("n must be >= 1")
    if d <= 0:
        raise DomainError("d must be > 0")
    return (1.0 - d / n**2, 1.0)


def near_one_ratio_range(
    params: JacobiParams, n: int, d: float = 0.5, grid_points: int = 33
) -> tuple[float, float]:
    """(min, max) of P_n(x)/n^alpha over an even grid in the near-one window."""
    lo, hi = near_one_window(params, n, d)
    xs = np.linspace(lo, hi, grid_points)
    vals = eval_P(params, n, xs) / float(n) ** params.alpha
    return float(vals.min()), float(vals.max())


def largest_root(params: JacobiParams, n: int, bisection_steps: int = 80) -> float:
    """Largest root z_n of P_n, found by scanning in theta and bisecting eval_P.

    1 - z_n ~ n^{-2}; the first sign change of P_n(cos theta) sits near
    theta ~ j_{alpha,1}/n, well inside the scanned window.
    """
    if n < 1:
        raise DomainError("n must be >= 1")
    hi_theta = min(math.pi / 2.0, 12.0 / n)
    ts = np.linspace(hi_theta / 400.0, hi_theta, 400)
    vals = eval_P(params, n, np.cos(ts))
    sign_change = np.nonzero(np.sign(vals[:-1]) != np.sign(vals[1:]))[0]
    if sign_change.size == 0:
        raise RuntimeError(f"no sign change of P_{n} found in the scan window")
    i = sign_change[0]
    lo, hi = ts[i], ts[i + 1]
    flo = vals[i]
    for _ in range(bisection_steps):
        mid = 0.5 * (lo + hi)
        fmid = eval_P(params, n, math.cos(mid))
        if (flo > 0) == (fmid > 0):
            lo, flo = mid, fmid
        else:
            hi = mid
    return math.cos(0.5 * (lo + hi))
