"""Thresholding greedy machinery for finitely supported Jacobi expansions.

Greedy ordering (largest |coefficient| first, ties broken by the natural
degree order), the m-term greedy operator, quasi-greedy and constant-
coefficient sign ratios, and democracy-function estimates over witness
families of index sets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

import numpy as np

from .jacobi import (
    JacobiParams,
    NormalizationMode,
    basis_scale,
    eval_P_many,
    jacobi_combination,
    jacobi_iter,
    orthonormal_const,
)
from .quadrature import MeshConfig, gauss_jacobi_rule, lp_norm, lp_norms_of_rows


@lru_cache(maxsize=4096)
def _orthonormal_lp_norm(alpha: float, beta: float, p: float, n: int) -> float:
    """||p_n||_{Lp(mu)}, cached; backend for the Lp-normalized mode."""
    params = JacobiParams(alpha, beta)
    dn = orthonormal_const(params, n)
    mesh = MeshConfig().scaled_for_degree(n)
    return lp_norm(lambda x: dn * _single_P(params, n, x), params, p, mesh=mesh, tol=1e-10)


def _single_P(params: JacobiParams, n: int, x):
    out = None
    for k, pk in jacobi_iter(params, np.atleast_1d(np.asarray(x, dtype=float)), n):
        if k == n:
            out = pk
    return out


def basis_scales(params: JacobiParams, mode: NormalizationMode, degrees: Sequence[int]) -> np.ndarray:
    """Multipliers s_n (basis element = s_n * P_n) for each requested degree."""
    if mode.tag == "lp":
        backend = lambda n: _orthonormal_lp_norm(params.alpha, params.beta, mode.p, n)
    else:
        backend = None
    return np.array([basis_scale(params, mode, n, backend) for n in degrees])


class JacobiFamily:
    """A finite family of basis elements with one-pass batch evaluation.

    Used by the quadrature module's family norms: .values(x) returns the
    matrix of element values, rows in the order of `degrees`.
    """

    def __init__(self, params: JacobiParams, mode: NormalizationMode, degrees: Sequence[int]):
        self.params = params
        self.mode = mode
        self.degrees = tuple(int(d) for d in degrees)
        self.scales = basis_scales(params, mode, self.degrees)

    def __len__(self) -> int:
        return len(self.degrees)

    def values(self, x) -> np.ndarray:
        rows = eval_P_many(self.params, self.degrees, x)
        return self.scales[:, None] * rows


@dataclass(frozen=True)
class Expansion:
    """Finitely supported coefficient family over basis indices."""

    params: JacobiParams
    mode: NormalizationMode
    coeffs: Mapping[int, float]

    def __post_init__(self):
        clean = {int(j): float(c) for j, c in self.coeffs.items() if c != 0.0}
        if any(j < 0 for j in clean):
            raise ValueError("basis indices must be >= 0")
        object.__setattr__(self, "coeffs", clean)

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(sorted(self.coeffs))

    def scaled_coeffs(self) -> dict[int, float]:
        """Coefficients against the raw P_n, i.e. coeff_j * s_j."""
        degrees = self.support
        scales = basis_scales(self.params, self.mode, degrees)
        return {j: self.coeffs[j] * s for j, s in zip(degrees, scales)}

    def evaluate(self, x) -> np.ndarray:
        return jacobi_combination(self.params, self.scaled_coeffs(), x)


@dataclass(frozen=True)
class GreedyOrdering:
    """Support permutation: decreasing |coefficient|, ties by increasing degree."""

    order: tuple[int, ...]


@dataclass(frozen=True)
class DemocracyReport:
    N: int
    phi_u_estimate: float
    phi_l_estimate: float
    witness_sets: dict = field(default_factory=dict)


def greedy_ordering(e: Expansion) -> GreedyOrdering:
    """The unique greedy ordering of the support (exact-equality tie break)."""
    order = sorted(e.coeffs, key=lambda j: (-abs(e.coeffs[j]), j))
    return GreedyOrdering(order=tuple(order))


def greedy_approx(e: Expansion, m: int) -> Expansion:
    """Keep the first min(m, |support|) coefficients in greedy order."""
    if m < 0:
        raise ValueError("m must be >= 0")
    keep = greedy_ordering(e).order[:m]
    return Expansion(e.params, e.mode, {j: e.coeffs[j] for j in keep})


def expansion_lp_norm(
    e: Expansion,
    p: float,
    mesh: MeshConfig | None = None,
    tol: float = 1e-8,
) -> float:
    """Lp(mu) norm of the expansion; exact Gauss-Jacobi fast path at p = 2."""
    if not e.coeffs:
        return 0.0
    maxdeg = max(e.coeffs)
    scaled = e.scaled_coeffs()
    if p == 2.0:
        rule = gauss_jacobi_rule(e.params, maxdeg + 1)
        vals = jacobi_combination(e.params, scaled, rule.nodes)
        return float(math.sqrt(np.dot(rule.weights, vals * vals)))
    mesh = (mesh or MeshConfig()).scaled_for_degree(maxdeg)
    return lp_norm(
        lambda x: jacobi_combination(e.params, scaled, x), e.params, p, mesh=mesh, tol=tol
    )


def _partial_sum_rows(e: Expansion, order: Sequence[int]):
    """rows_fn(x) giving the greedy partial sums G_1..G_M as rows."""
    scaled = e.scaled_coeffs()
    degrees = list(order)

    def rows_fn(x):
        terms = eval_P_many(e.params, degrees, x)
        terms *= np.array([scaled[j] for j in degrees])[:, None]
        return np.cumsum(terms, axis=0)

    return rows_fn


def quasi_greedy_ratio(
    e: Expansion,
    p: float,
    mesh: MeshConfig | None = None,
    tol: float = 1e-8,
) -> float:
    """max_m ||G_m(e)||_p / ||e||_p over m = 1..|support| (brute force over m)."""
    if not e.coeffs:
        raise ValueError("expansion must be nonzero")
    order = greedy_ordering(e).order
    maxdeg = max(e.coeffs)
    if p == 2.0:
        rule = gauss_jacobi_rule(e.params, maxdeg + 1)
        rows = _partial_sum_rows(e, order)(rule.nodes)
        norms = np.sqrt(rows**2 @ rule.weights)
    else:
        m = (mesh or MeshConfig()).scaled_for_degree(maxdeg)
        norms = lp_norms_of_rows(_partial_sum_rows(e, order), e.params, p, mesh=m, tol=tol)
    return float(np.max(norms) / norms[-1])


def sign_ratio(
    params: JacobiParams,
    mode: NormalizationMode,
    A: Iterable[int],
    signs: Mapping[int, float] | Sequence[float],
    p: float,
    mesh: MeshConfig | None = None,
    tol: float = 1e-8,
) -> float:
    """|| sum_{j in A} eps_j x_j ||_p / || sum_{j in A} x_j ||_p."""
    A = sorted(set(int(j) for j in A))
    if not A:
        raise ValueError("A must be nonempty")
    if isinstance(signs, Mapping):
        eps = {j: float(signs[j]) for j in A}
    else:
        eps = {j: float(s) for j, s in zip(A, signs)}
    if any(s not in (-1.0, 1.0) for s in eps.values()):
        raise ValueError("signs must be +1 or -1")
    num = Expansion(params, mode, eps)
    den = Expansion(params, mode, {j: 1.0 for j in A})
    return expansion_lp_norm(num, p, mesh, tol) / expansion_lp_norm(den, p, mesh, tol)


def default_search_family(N: int, seed: int = 0, random_sets: int = 3) -> dict[str, tuple[int, ...]]:
    """Candidate size-N index sets: contiguous block, staggered block {N+2n},
    a lacunary set when it fits in double range, and seeded random sets."""
    fam: dict[str, tuple[int, ...]] = {
        "contiguous": tuple(range(N)),
        "staggered": tuple(N + 2 * n for n in range(N)),
    }
    if N <= 14:
        fam["lacunary"] = tuple(2**k for k in range(N))
    rng = np.random.default_rng(np.random.SeedSequence((seed, N)))
    for r in range(random_sets):
        picked = rng.choice(8 * N, size=N, replace=False)
        fam[f"random{r}"] = tuple(sorted(int(j) for j in picked))
    return fam


def democracy_scan(
    params: JacobiParams,
    mode: NormalizationMode,
    N: int,
    p: float,
    search: Mapping[str, Sequence[int]] | None = None,
    mesh: MeshConfig | None = None,
    tol: float = 1e-8,
    seed: int = 0,
) -> DemocracyReport:
    """Extrema of || sum_{j in A} x_j ||_p over a witness family of size-N sets.

    The max is a lower bound for the upper democracy function and the min an
    upper bound for the lower one; the true sup/inf over all sets is
    combinatorially out of reach.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    fam = {k: tuple(v) for k, v in (search or default_search_family(N, seed)).items()}
    norms = {
        name: expansion_lp_norm(Expansion(params, mode, {j: 1.0 for j in A}), p, mesh, tol)
        for name, A in fam.items()
    }
    upper = max(norms, key=norms.get)
    lower = min(norms, key=norms.get)
    return DemocracyReport(
        N=N,
        phi_u_estimate=norms[upper],
        phi_l_estimate=norms[lower],
        witness_sets={"upper": fam[upper], "lower": fam[lower], "norms": norms},
    )
