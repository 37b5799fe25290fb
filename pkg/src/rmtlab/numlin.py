"""Dense numerical linear algebra used by the experiments.

Thin, contract-checked wrappers over LAPACK (through numpy/scipy): spectra,
singular values, Hermitian embeddings, resolvent traces, log-determinants.
Matrices are plain 2-D complex128 arrays; ``as_matrix`` is the validating
coercion every entry point runs first.
"""

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

__all__ = [
    "ComplexDenseMatrix",
    "SpectrumSample",
    "NumericalFailure",
    "as_matrix",
    "eigenvalues",
    "singular_values",
    "smallest_singular_value",
    "operator_norm",
    "hermitize",
    "stieltjes_transform",
    "log_abs_det",
    "EIG_DIM_LIMIT",
    "DIRECT_SVD_DIM_LIMIT",
]

# Alias documenting the matrix convention; all ops accept and return these.
ComplexDenseMatrix = np.ndarray

# Full nonsymmetric eigensolves are refused above this dimension.
EIG_DIM_LIMIT = 4096
# smallest_singular_value switches from full SVD to inverse iteration here.
DIRECT_SVD_DIM_LIMIT = 512


class NumericalFailure(RuntimeError):
    """An iterative or direct decomposition failed to produce a result."""


def as_matrix(a, square=False):
    """Coerce to a finite 2-D complex128 array, validating shape."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got ndim={m.ndim}")
    if square and m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix contains non-finite entries")
    return m


@dataclass
class SpectrumSample:
    """A sampled point process in the plane.

    eigenvalues : complex ndarray of length source_dim
    source_dim : dimension of the matrix the points came from
    metadata : free-form dict (seed, ensemble description, scale, ...)
    """

    eigenvalues: np.ndarray
    source_dim: int
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.eigenvalues = np.asarray(self.eigenvalues, dtype=np.complex128)
        if self.eigenvalues.ndim != 1:
            raise ValueError("eigenvalues must be a 1-D array")
        if len(self.eigenvalues) != self.source_dim:
            raise ValueError(
                f"{len(self.eigenvalues)} eigenvalues for source_dim="
                f"{self.source_dim}"
            )


def eigenvalues(a):
    """All eigenvalues of a square matrix (unordered).

    Refuses dimensions above EIG_DIM_LIMIT; wraps LAPACK convergence
    failures in NumericalFailure.
    """
    m = as_matrix(a, square=True)
    d = m.shape[0]
    if d > EIG_DIM_LIMIT:
        raise ValueError(
            f"dimension {d} exceeds the eigensolve limit {EIG_DIM_LIMIT}"
        )
    try:
        return np.linalg.eigvals(m)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"eigenvalue solve failed: {exc}") from exc


def singular_values(a):
    """Singular values in ascending order (rectangular input allowed)."""
    m = as_matrix(a)
    try:
        sv = np.linalg.svd(m, compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"SVD failed: {exc}") from exc
    return sv[::-1].copy()


def smallest_singular_value(a, tol=1e-10, max_iter=200):
    """Least singular value of a square matrix.

    Uses a full SVD up to DIRECT_SVD_DIM_LIMIT; above that, inverse
    iteration on (A^* A)^{-1} through one LU factorization, falling back to
    the full SVD if the iteration stagnates or the factorization breaks.
    """
    m = as_matrix(a, square=True)
    d = m.shape[0]
    if d <= DIRECT_SVD_DIM_LIMIT:
        return float(singular_values(m)[0])
    try:
        lu, piv = scipy.linalg.lu_factor(m)
        if np.any(np.diag(lu) == 0):
            raise NumericalFailure("singular LU factor")
        x = np.full(d, 1.0 / math.sqrt(d), dtype=np.complex128)
        nu_prev = np.inf
        for _ in range(max_iter):
            # w = (A^* A)^{-1} x, via A^H u = x then A w = u
            u = scipy.linalg.lu_solve((lu, piv), x, trans=2)
            w = scipy.linalg.lu_solve((lu, piv), u, trans=0)
            nu = np.linalg.norm(w)
            if nu == 0:
                raise NumericalFailure("inverse iteration collapsed")
            x = w / nu
            if abs(nu - nu_prev) <= tol * nu:
                return float(1.0 / math.sqrt(nu))
            nu_prev = nu
        raise NumericalFailure("inverse iteration did not converge")
    except (NumericalFailure, scipy.linalg.LinAlgError, ValueError):
        return float(singular_values(m)[0])


def operator_norm(a, rel_tol=1e-10, max_iter=5000):
    """Largest singular value by power iteration on A^* A.

    Falls back to a direct SVD if the iteration does not reach the
    requested relative tolerance.
    """
    m = as_matrix(a)
    rows, cols = m.shape
    # deterministic start with a ramp so it is not orthogonal to the
    # leading singular vector in symmetric cases
    x = 1.0 + np.arange(cols) / max(cols, 1)
    x = x.astype(np.complex128)
    x /= np.linalg.norm(x)
    nu_prev = -1.0
    for _ in range(max_iter):
        y = m @ x
        nu = np.linalg.norm(y)
        if nu == 0:
            return 0.0
        x = m.conj().T @ y
        nx = np.linalg.norm(x)
        if nx == 0:
            return 0.0
        x /= nx
        if abs(nu - nu_prev) <= rel_tol * nu:
            return float(nu)
        nu_prev = nu
    return float(singular_values(m)[-1])


def hermitize(b):
    """Hermitian doubling [[0, B], [B^*, 0]] of a (possibly rectangular) B.

    Its spectrum is {+s, -s} over the singular values s of B, padded with
    zeros when B is rectangular.
    """
    m = as_matrix(b)
    rows, cols = m.shape
    top = np.hstack([np.zeros((rows, rows), dtype=np.complex128), m])
    bot = np.hstack([m.conj().T, np.zeros((cols, cols), dtype=np.complex128)])
    return np.vstack([top, bot])


def _check_hermitian(m, tol=1e-10):
    scale = max(1.0, float(np.max(np.abs(m))))
    dev = float(np.max(np.abs(m - m.conj().T)))
    if dev > tol * scale:
        raise ValueError(
            f"matrix is not Hermitian (deviation {dev:.3e} at scale {scale:.3e})"
        )


def stieltjes_transform(w, zeta, normalization, spectrum=None):
    """Normalized resolvent trace sum(1 / (lambda_j - zeta)) / normalization.

    w must be Hermitian and zeta must lie in the open upper half plane.
    Pass ``spectrum`` (the precomputed real eigenvalues of w) to reuse one
    eigendecomposition across many zeta.
    """
    zeta = complex(zeta)
    if not zeta.imag > 0:
        raise ValueError("zeta must have positive imaginary part")
    if normalization <= 0:
        raise ValueError("normalization must be positive")
    if spectrum is None:
        m = as_matrix(w, square=True)
        _check_hermitian(m)
        spectrum = np.linalg.eigvalsh(m)
    spectrum = np.asarray(spectrum, dtype=np.float64)
    return complex(np.sum(1.0 / (spectrum - zeta)) / normalization)


def log_abs_det(a, floor=1e-300):
    """log |det A| through singular values; -inf when A is numerically
    singular (smallest singular value below ``floor``).

    Accepts stacked input with shape (..., d, d) and returns the matching
    stack of values.
    """
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim < 2 or m.shape[-1] != m.shape[-2]:
        raise ValueError("expected square matrix (or stack of them)")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix contains non-finite entries")
    try:
        sv = np.linalg.svd(m, compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"SVD failed: {exc}") from exc
    with np.errstate(divide="ignore"):
        logs = np.where(sv < floor, -np.inf, np.log(np.maximum(sv, floor)))
    out = np.sum(logs, axis=-1)
    if out.ndim == 0:
        return float(out)
    return out
