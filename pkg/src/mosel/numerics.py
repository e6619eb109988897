"""Shared numerical kernels: seeded streams, Hermitian matrix functions,
quadratic forms, and improper complex Gaussian sampling.

All matrix functions are eigendecomposition-based rather than Cholesky-based
so that positive semidefinite (singular) second-order structure, which shows
up whenever a circularity coefficient sits at 1, is handled without special
cases.
"""

from __future__ import annotations

import numpy as np

from .dataio import ComplexDataset
from .errors import (
    DimensionMismatch,
    InvalidSecondOrder,
    NearSingular,
    NotHermitian,
)

# Relative spectral floor below which a Hermitian matrix is treated as singular.
_SINGULAR_RTOL = 1e-12
# Relative Frobenius tolerance for symmetry/Hermitian structure checks.
_STRUCTURE_RTOL = 1e-10
# Relative tolerance on how negative an eigenvalue may be before a matrix is
# rejected as an invalid covariance (anything above this is clipped to 0).
_PSD_RTOL = 1e-10


def stream(master_seed: int, *key: int) -> np.random.Generator:
    """Independent generator for the sub-task identified by `key`.

    Streams with distinct keys are statistically independent, and a given
    (master_seed, key) pair always yields the same stream regardless of how
    many other streams were created before it. That property makes Monte
    Carlo runs reproducible under any parallel schedule.
    """
    seq = np.random.SeedSequence(master_seed, spawn_key=tuple(int(k) for k in key))
    return np.random.default_rng(seq)


def _require_square(a: np.ndarray, name: str) -> np.ndarray:
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"{name} must be square, got shape {a.shape}")
    return a


def _check_hermitian(a: np.ndarray, name: str) -> None:
    scale = max(1.0, float(np.linalg.norm(a)))
    if float(np.linalg.norm(a - a.conj().T)) > _STRUCTURE_RTOL * scale:
        raise NotHermitian(f"{name} is not Hermitian within tolerance")


def _check_symmetric(a: np.ndarray, name: str) -> None:
    scale = max(1.0, float(np.linalg.norm(a)))
    if float(np.linalg.norm(a - a.T)) > _STRUCTURE_RTOL * scale:
        raise NotHermitian(f"{name} is not symmetric within tolerance")


def hermitian_spectrum(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and eigenvectors of a Hermitian matrix.

    Raises NotHermitian if the input fails the structure check.
    """
    a = _require_square(a, "matrix")
    _check_hermitian(a, "matrix")
    w, v = np.linalg.eigh(a)
    return w, v


def hermitian_inv_sqrt(a: np.ndarray) -> np.ndarray:
    """Inverse principal square root of a Hermitian positive definite matrix.

    Raises NearSingular (carrying the offending eigenvalue) when the smallest
    eigenvalue falls at or below the relative spectral floor, since the
    whitening transform is meaningless there.
    """
    w, v = hermitian_spectrum(a)
    w_max = float(w[-1])
    w_min = float(w[0])
    if w_max <= 0.0 or w_min <= _SINGULAR_RTOL * w_max:
        raise NearSingular(
            "matrix is singular or near-singular, cannot form inverse square root",
            smallest_eigenvalue=w_min,
        )
    b = (v * (1.0 / np.sqrt(w))) @ v.conj().T
    # Re-impose exact Hermitian structure lost to floating-point round-off.
    return 0.5 * (b + b.conj().T)


def singular_values(a: np.ndarray) -> np.ndarray:
    """Singular values of `a` in descending order."""
    return np.linalg.svd(np.asarray(a), compute_uv=False)


def quadratic_form(a: np.ndarray, x: np.ndarray) -> float:
    """Real quadratic form x^H a x for Hermitian `a` and vector `x`."""
    a = _require_square(a, "matrix")
    x = np.asarray(x).reshape(-1)
    if a.shape[0] != x.shape[0]:
        raise DimensionMismatch(
            f"matrix of size {a.shape[0]} against vector of size {x.shape[0]}"
        )
    _check_hermitian(a, "matrix")
    a = 0.5 * (a + a.conj().T)
    return float(np.real(x.conj() @ (a @ x)))


def composite_real_covariance(c: np.ndarray, p: np.ndarray) -> np.ndarray:
    """Real covariance of the stacked (real parts, imaginary parts) vector
    for a zero-mean complex vector with covariance `c` and pseudo-covariance
    `p`.

    `c` must be Hermitian and `p` symmetric (within tolerance); the result is
    the 2N x 2N symmetric block matrix
    [[ (Re c + Re p)/2, (Im p - Im c)/2 ],
     [ (Im p + Im c)/2, (Re c - Re p)/2 ]].
    """
    c = _require_square(c, "covariance")
    p = _require_square(p, "pseudo-covariance")
    if c.shape != p.shape:
        raise DimensionMismatch(
            f"covariance {c.shape} and pseudo-covariance {p.shape} differ"
        )
    _check_hermitian(c, "covariance")
    _check_symmetric(p, "pseudo-covariance")

    c = np.asarray(c, dtype=complex)
    p = np.asarray(p, dtype=complex)
    kuu = 0.5 * (c.real + p.real)
    kvv = 0.5 * (c.real - p.real)
    kuv = 0.5 * (p.imag - c.imag)
    top = np.hstack([kuu, kuv])
    bottom = np.hstack([kuv.T, kvv])
    k = np.vstack([top, bottom])
    return 0.5 * (k + k.T)


def sample_complex_gaussian(
    c: np.ndarray,
    p: np.ndarray,
    n_samples: int,
    rng: np.random.Generator,
) -> ComplexDataset:
    """Draw zero-mean complex Gaussian samples with covariance `c` and
    pseudo-covariance `p`.

    The pair (c, p) must describe a valid second-order structure: the
    composite real covariance must be positive semidefinite. Semidefinite
    (rank-deficient) structure is allowed; eigenvalues that are negative by
    no more than round-off are clipped to zero, anything more negative
    raises InvalidSecondOrder.
    """
    if n_samples < 1:
        raise ValueError(f"n_samples must be >= 1, got {n_samples}")
    k = composite_real_covariance(c, p)
    w, v = np.linalg.eigh(k)
    w_max = float(w[-1]) if w.size else 0.0
    floor = -_PSD_RTOL * max(1.0, w_max)
    if float(w[0]) < floor:
        raise InvalidSecondOrder(
            "covariance/pseudo-covariance pair is not jointly positive "
            f"semidefinite (eigenvalue {float(w[0]):.3e})"
        )
    w = np.clip(w, 0.0, None)
    n_dim = c.shape[0]
    z = rng.standard_normal((n_samples, 2 * n_dim))
    y = z @ (v * np.sqrt(w)).T
    samples = y[:, :n_dim] + 1j * y[:, n_dim:]
    return ComplexDataset(samples)
