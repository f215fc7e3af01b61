"""Dense matrix primitives used by the fitting and reconstruction code.

Thin wrappers around LAPACK-backed numpy/scipy routines that add the
normalization and failure semantics the rest of the package relies on:
phase-fixed eigenvectors, condition-checked solves, and the directional
(Frechet) derivative of the matrix exponential.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np
import scipy.linalg

from .errors import NumericalError, SingularMatrixError

# Singular values below PINV_RTOL * sigma_max are treated as zero.
PINV_RTOL = 1e-12
# Solves are refused above this condition estimate: operators fitted to
# oscillatory data have eigenvalues near 1, so (A - I) can degenerate and
# must fail loudly instead of being regularized silently.
COND_MAX = 1e12
# Per-pair eigen residual bound, relative to ||A||_F.
EIG_RESIDUAL_RTOL = 1e-9


class EigDecomposition(NamedTuple):
    """Eigenvalues and unit-norm, phase-normalized eigenvector columns."""

    values: np.ndarray
    vectors: np.ndarray


def pinv(m: np.ndarray, rtol: float = PINV_RTOL) -> np.ndarray:
    """Moore-Penrose pseudoinverse via SVD.

    Singular values below ``rtol`` times the largest one are treated as
    exactly zero, so rank-deficient inputs are handled gracefully.
    """
    m = np.asarray(m, dtype=float)
    if m.size == 0:
        raise ValueError("pinv requires a nonempty matrix")
    if not rtol > 0:
        raise ValueError("rtol must be positive")
    try:
        return np.linalg.pinv(m, rcond=rtol)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"SVD did not converge in pinv: {exc}") from exc


def phase_normalize(vectors: np.ndarray) -> np.ndarray:
    """Scale columns to unit norm and rotate each so its largest-modulus
    entry is real and positive.

    Without a fixed phase convention, eigenvectors from repeated runs can
    differ by arbitrary complex factors and cannot be averaged meaningfully.
    """
    v = np.array(vectors, dtype=complex)
    norms = np.linalg.norm(v, axis=0)
    if np.any(norms == 0):
        raise ValueError("cannot phase-normalize a zero column")
    v /= norms
    for c in range(v.shape[1]):
        k = int(np.argmax(np.abs(v[:, c])))
        pivot = v[k, c]
        v[:, c] *= np.conj(pivot) / abs(pivot)
        v[k, c] = abs(pivot)
    return v


def eig(a: np.ndarray, residual_rtol: float = EIG_RESIDUAL_RTOL) -> EigDecomposition:
    """Eigendecomposition with unit-norm, phase-normalized eigenvectors.

    Raises :class:`NumericalError` when the QR iteration fails or when any
    eigenpair residual ``||A v - lambda v||`` exceeds ``residual_rtol * ||A||_F``.
    """
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("eig requires a square matrix")
    try:
        values, vectors = np.linalg.eig(a)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigenvalue iteration did not converge: {exc}") from exc
    vectors = phase_normalize(vectors)
    scale = max(float(np.linalg.norm(a, "fro")), np.finfo(float).tiny)
    residuals = np.linalg.norm(a @ vectors - vectors * values, axis=0)
    if np.any(residuals > residual_rtol * scale):
        raise NumericalError(
            f"eigenpair residual {residuals.max():.3e} exceeds "
            f"{residual_rtol:.1e} * ||A||_F"
        )
    return EigDecomposition(values=values, vectors=vectors)


def expm(a: np.ndarray) -> np.ndarray:
    """Matrix exponential (scaling-and-squaring with Pade approximants)."""
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("expm requires a square matrix")
    result = scipy.linalg.expm(a)
    if not np.all(np.isfinite(result)):
        raise NumericalError("matrix exponential overflowed; input norm too large")
    return result


def expm_frechet(a: np.ndarray, e: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Matrix exponential together with its directional derivative along e.

    Uses the block-augmented identity: the exponential of ``[[A, E], [0, A]]``
    has ``expm(A)`` on the diagonal and the Frechet derivative ``L(A, E)`` in
    the upper-right block, so one expm call yields both to expm's accuracy.
    """
    a = np.asarray(a, dtype=float)
    e = np.asarray(e, dtype=float)
    if a.shape != e.shape or a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("expm_frechet requires square matrices of the same shape")
    d = a.shape[0]
    block = np.zeros((2 * d, 2 * d))
    block[:d, :d] = a
    block[:d, d:] = e
    block[d:, d:] = a
    p = expm(block)
    return p[:d, :d], p[:d, d:]


def solve(a: np.ndarray, b: np.ndarray, cond_max: float = COND_MAX) -> np.ndarray:
    """Solve A X = B, refusing matrices with condition estimate above cond_max."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("solve requires a square matrix")
    if b.shape[0] != a.shape[0]:
        raise ValueError("right-hand side has incompatible leading dimension")
    try:
        cond = float(np.linalg.cond(a))
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"condition estimate failed: {exc}") from exc
    if not np.isfinite(cond) or cond > cond_max:
        raise SingularMatrixError(
            f"matrix is singular or ill-conditioned (cond ~ {cond:.3e})", cond=cond
        )
    try:
        return np.linalg.solve(a, b)
    except np.linalg.LinAlgError as exc:
        raise SingularMatrixError(f"linear solve failed: {exc}", cond=cond) from exc


def matpow(m: np.ndarray, j: int) -> np.ndarray:
    """j-th matrix power by iterated multiplication; j = 0 gives the identity."""
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("matpow requires a square matrix")
    if j < 0 or j != int(j):
        raise ValueError("exponent must be a nonnegative integer")
    dtype = complex if np.iscomplexobj(m) else float
    m = m.astype(dtype)
    out = np.eye(m.shape[0], dtype=dtype)
    for _ in range(int(j)):
        out = out @ m
    return out
