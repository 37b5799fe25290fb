"""Block linearization of matrix products.

A product of M factors of size n is encoded in an Mn x Mn matrix carrying
the factors on its cyclic superdiagonal blocks.  Its M-th power is block
diagonal with the cyclic products, its spectrum consists of all M-th roots
of the product's eigenvalues, and its Hermitian doubling drives the
log-determinant and least-singular-value experiments.
"""

import math

import numpy as np

from .numlin import SpectrumSample, as_matrix, eigenvalues, hermitize

__all__ = [
    "LinearizationScale",
    "build_linearization",
    "mth_root_process",
    "power_block_check",
    "hermitized_linearization",
    "ROOT_EIG_DIM_LIMIT",
]

# Scale modes: "raw" places the factors as sampled, "normalized" scales each
# block by n^{-1/2} to match the per-factor product normalization.
LinearizationScale = str
SCALES = ("raw", "normalized")

# Above this linearization dimension the root process is assembled from the
# product spectrum and explicit M-th roots instead of one big eigensolve.
ROOT_EIG_DIM_LIMIT = 1024


def _check_factors(factors):
    mats = [as_matrix(f, square=True) for f in factors]
    if not mats:
        raise ValueError("need at least one factor")
    n = mats[0].shape[0]
    if any(m.shape[0] != n for m in mats):
        raise ValueError("all factors must share one dimension")
    return mats, n


def _block_scale(scale, n):
    if scale not in SCALES:
        raise ValueError(f"unknown scale {scale!r}")
    return 1.0 / math.sqrt(n) if scale == "normalized" else 1.0


def build_linearization(factors, z=0.0, scale="normalized"):
    """Assemble Y(z) = Y - z I with factor i in block row i, column i+1 mod M.

    For M = 1 this is just (scaled) X - z I.  The determinant identity
    |det Y(z)| = |det(z^M I - P)| with P the scaled product holds exactly.
    """
    mats, n = _check_factors(factors)
    m_factors = len(mats)
    c = _block_scale(scale, n)
    dim = m_factors * n
    y = np.zeros((dim, dim), dtype=np.complex128)
    for i, x in enumerate(mats):
        j = (i + 1) % m_factors
        y[i * n:(i + 1) * n, j * n:(j + 1) * n] += c * x
    y[np.diag_indices(dim)] -= complex(z)
    return y


def mth_root_process(factors, scale="normalized", metadata=None):
    """Spectrum of the linearization: all M-th roots of product eigenvalues.

    Dimension at most ROOT_EIG_DIM_LIMIT is handled by one eigensolve of
    the linearization itself; larger cases take the product's eigenvalues
    and attach the M explicit roots of each.
    """
    mats, n = _check_factors(factors)
    m_factors = len(mats)
    dim = m_factors * n
    meta = dict(metadata or {})
    meta.setdefault("scale", scale)
    meta.setdefault("m_factors", m_factors)
    if dim <= ROOT_EIG_DIM_LIMIT:
        meta["method"] = "linearization-eig"
        iotas = eigenvalues(build_linearization(mats, 0.0, scale))
        return SpectrumSample(iotas, dim, meta)
    meta["method"] = "product-roots"
    c = _block_scale(scale, n)
    product = (c * mats[0]).copy()
    for x in mats[1:]:
        product = product @ (c * x)
    mu = eigenvalues(product)
    radii = np.abs(mu) ** (1.0 / m_factors)
    angles = np.angle(mu) / m_factors
    offsets = 2.0 * np.pi * np.arange(m_factors) / m_factors
    iotas = (radii[:, None]
             * np.exp(1j * (angles[:, None] + offsets[None, :]))).ravel()
    return SpectrumSample(iotas, dim, meta)


def power_block_check(factors, scale="raw"):
    """Max abs deviation of Y^M from its block-diagonal cyclic products.

    Block (i, i) of Y^M must equal X^(i) X^(i+1) ... X^(i-1) (indices mod
    M, scaled); off-diagonal blocks must vanish.  Returns the largest
    entrywise error, which is rounding-level when the layout is right.
    """
    mats, n = _check_factors(factors)
    m_factors = len(mats)
    c = _block_scale(scale, n)
    y = build_linearization(mats, 0.0, scale)
    p = np.linalg.matrix_power(y, m_factors)
    worst = 0.0
    for i in range(m_factors):
        expect = np.eye(n, dtype=np.complex128)
        for k in range(m_factors):
            expect = expect @ (c * mats[(i + k) % m_factors])
        for j in range(m_factors):
            block = p[i * n:(i + 1) * n, j * n:(j + 1) * n]
            target = expect if j == i else 0.0
            worst = max(worst, float(np.max(np.abs(block - target))))
    return worst


def hermitized_linearization(factors, z=0.0, scale="normalized"):
    """Hermitian doubling W(z) = [[0, Y(z)], [Y(z)^*, 0]], size 2Mn."""
    return hermitize(build_linearization(factors, z, scale))
