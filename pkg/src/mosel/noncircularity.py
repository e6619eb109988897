"""Degree-of-noncircularity estimation for complex Gaussian vectors.

A complex random vector is circular when E[x x^T] vanishes. The degree of
noncircularity is the number of nonzero singular values (circularity
coefficients) of the coherence matrix C^{-1/2} P C^{-T/2}, where C is the
covariance and P the pseudo-covariance. This module estimates both moments
from data, extracts the coefficient spectrum, turns it into a nested
evidence ladder over candidate degrees k = 1..N, and hands the ladder to
the generic selection criteria.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .criteria import Criterion, CriterionScores, Convention, ModelEvidence, select_order
from .dataio import ComplexDataset
from .errors import (
    DimensionMismatch,
    InvalidSecondOrder,
    NearSingular,
    SingularCovariance,
    TooFewSamples,
)
from .numerics import hermitian_inv_sqrt, singular_values

# Relative tolerances shared with the numerics kernels.
_STRUCTURE_RTOL = 1e-10
_PSD_RTOL = 1e-10
# Coefficients are clamped below 1 by this margin so ln(1 - lambda^2) stays finite.
_COEFF_CEILING = 1.0 - 1e-12


@dataclass(frozen=True)
class SecondOrderStats:
    """Sample mean, covariance, and pseudo-covariance of a complex dataset."""

    c_hat: np.ndarray
    p_hat: np.ndarray
    mu: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.c_hat, dtype=complex)
        p = np.asarray(self.p_hat, dtype=complex)
        mu = np.asarray(self.mu, dtype=complex).reshape(-1)
        n = mu.shape[0]
        if c.shape != (n, n) or p.shape != (n, n):
            raise DimensionMismatch(
                f"need ({n}, {n}) moment matrices for a mean of length {n}, "
                f"got {c.shape} and {p.shape}"
            )
        c_scale = max(1.0, float(np.linalg.norm(c)))
        if float(np.linalg.norm(c - c.conj().T)) > _STRUCTURE_RTOL * c_scale:
            raise InvalidSecondOrder("covariance estimate is not Hermitian")
        p_scale = max(1.0, float(np.linalg.norm(p)))
        if float(np.linalg.norm(p - p.T)) > _STRUCTURE_RTOL * p_scale:
            raise InvalidSecondOrder("pseudo-covariance estimate is not symmetric")
        w = np.linalg.eigvalsh(0.5 * (c + c.conj().T))
        if w.size and float(w[0]) < -_PSD_RTOL * max(1.0, float(w[-1])):
            raise InvalidSecondOrder(
                f"covariance estimate has a negative eigenvalue ({float(w[0]):.3e})"
            )
        object.__setattr__(self, "c_hat", 0.5 * (c + c.conj().T))
        object.__setattr__(self, "p_hat", 0.5 * (p + p.T))
        object.__setattr__(self, "mu", mu)

    @property
    def n_dim(self) -> int:
        return self.mu.shape[0]


@dataclass(frozen=True)
class CircularitySpectrum:
    """Circularity coefficients, sorted descending, each in [0, 1)."""

    coefficients: np.ndarray

    def __post_init__(self):
        lam = np.asarray(self.coefficients, dtype=float).reshape(-1)
        if lam.size < 1:
            raise ValueError("spectrum must hold at least one coefficient")
        if np.any(lam < 0.0) or np.any(lam > 1.0):
            raise ValueError(f"coefficients must lie in [0, 1], got {lam}")
        if np.any(np.diff(lam) > 0.0):
            raise ValueError(f"coefficients must be sorted descending, got {lam}")
        object.__setattr__(self, "coefficients", lam)

    @property
    def n_dim(self) -> int:
        return self.coefficients.shape[0]


@dataclass(frozen=True)
class DegreeEstimate:
    """Full audit trail of one degree estimation.

    per_criterion maps each requested criterion to its scores and selected
    degree; evidence holds the (l_k, d_k) ladder the scores were built from;
    spectrum and stats are the upstream artifacts.
    """

    per_criterion: dict[Criterion, CriterionScores]
    spectrum: CircularitySpectrum
    evidence: list[tuple[float, int]]
    stats: SecondOrderStats


def sample_stats(x: ComplexDataset) -> SecondOrderStats:
    """Mean-subtracted second-order moments with divisor M (not M − 1)."""
    if x.n_samples < 2:
        raise TooFewSamples(
            f"need at least 2 samples for second-order statistics, got {x.n_samples}"
        )
    samples = x.samples
    m = x.n_samples
    mu = samples.mean(axis=0)
    centered = samples - mu
    c = centered.T @ centered.conj() / m
    p = centered.T @ centered / m
    return SecondOrderStats(
        c_hat=0.5 * (c + c.conj().T), p_hat=0.5 * (p + p.T), mu=mu
    )


def circularity_spectrum(stats: SecondOrderStats) -> CircularitySpectrum:
    """Singular values of the coherence matrix C^{-1/2} P C^{-T/2}.

    The covariance must be strictly positive definite, which takes more
    samples than dimensions; a singular estimate is reported as such with a
    hint rather than producing garbage coefficients.
    """
    try:
        b = hermitian_inv_sqrt(stats.c_hat)
    except NearSingular as exc:
        raise SingularCovariance(
            "covariance estimate is singular or near-singular; the coherence "
            "matrix is undefined (typically the record is too short, need "
            "n_samples > n_dim)"
        ) from exc
    coherence = b @ stats.p_hat @ b.T
    lam = singular_values(coherence)
    lam = np.clip(lam, 0.0, _COEFF_CEILING)
    return CircularitySpectrum(coefficients=lam)


def degree_param_count(k: int, n_dim: int) -> int:
    """Extra real parameters a degree-k noncircular model spends over the
    circular null: k(2N − k + 1)."""
    return k * (2 * n_dim - k + 1)


def evidence_ladder(
    spectrum: CircularitySpectrum, m: int
) -> list[tuple[float, int]]:
    """Per-degree evidence (l_k, d_k) for k = 1..N.

    l_k = −m · Σ_{i<=k} ln(1 − coefficient_i²), accumulated as a running sum
    of logs so large ladders cannot underflow a product; d_k = k(2N − k + 1).
    l_k is non-decreasing in k and ≥ 0.
    """
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    n = spectrum.n_dim
    ladder: list[tuple[float, int]] = []
    running = 0.0
    for k in range(1, n + 1):
        lam = float(spectrum.coefficients[k - 1])
        running += -m * math.log1p(-(lam * lam))
        ladder.append((running, degree_param_count(k, n)))
    return ladder


def estimate_degree(
    x: ComplexDataset,
    criteria: tuple[Criterion, ...] = (
        Criterion.BEEF,
        Criterion.MDL,
        Criterion.AIC,
        Criterion.AICC,
    ),
    include_null: bool = False,
) -> DegreeEstimate:
    """Estimate the degree of noncircularity of a dataset under each
    requested criterion.

    Composes sample_stats, circularity_spectrum, and evidence_ladder, then
    runs the generic argmax selection per criterion on the doubled
    convention. All intermediate artifacts are returned for audit.
    """
    stats = sample_stats(x)
    spectrum = circularity_spectrum(stats)
    ladder = evidence_ladder(spectrum, x.n_samples)
    evidences = [
        ModelEvidence(
            llr=l_k, dim=d_k, n_samples=x.n_samples, convention=Convention.DOUBLED
        )
        for l_k, d_k in ladder
    ]
    per_criterion = {
        criterion: select_order(evidences, criterion, include_null=include_null)
        for criterion in criteria
    }
    return DegreeEstimate(
        per_criterion=per_criterion,
        spectrum=spectrum,
        evidence=ladder,
        stats=stats,
    )
