"""Samplers for the matrix ensembles under study.

Entry laws ("atoms"), iid factor matrices, Haar unitaries, truncated
unitaries, and normalized products of independent factors.  Every sampler
draws from a SeedStream so that a replica is reproducible bit for bit from
(master_seed, stream_index).

Matrices are plain 2-D complex128 numpy arrays throughout.
"""

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "AtomDistribution",
    "ProductSpec",
    "TruncatedUnitarySpec",
    "SeedStream",
    "atom",
    "sample_atom",
    "sample_iid_matrix",
    "sample_haar_unitary",
    "sample_truncated_product",
    "sample_product",
    "ATOM_KINDS",
    "NORMALIZATIONS",
]

ATOM_KINDS = (
    "complex-gaussian",
    "real-gaussian",
    "rademacher",
    "four-moment-real",
    "four-moment-complex",
    "zero",
)

NORMALIZATIONS = ("raw", "per-factor")

# Weights of the symmetric three-point law matching a centered Gaussian of
# the same variance up to the fourth moment.
_W3 = (1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0)


def _three_point_values(variance):
    s = math.sqrt(3.0 * variance)
    return (-s, 0.0, s)


@dataclass(frozen=True)
class AtomDistribution:
    """A scalar entry law, identified by kind.

    For discrete kinds ``support`` holds (value, probability) pairs; the
    continuous Gaussian kinds leave it empty.  Complex-valued discrete laws
    store complex values (the four-moment-complex law is the product of two
    independent real three-point laws, nine atoms in total).

    Parameters
    ----------
    kind : str
        One of ATOM_KINDS.
    support : tuple of (value, probability)
        Populated automatically by the ``atom`` factory for discrete kinds.
    """

    kind: str
    support: tuple = ()

    def __post_init__(self):
        if self.kind not in ATOM_KINDS:
            raise ValueError(f"unknown atom kind {self.kind!r}")
        if self.support:
            total = sum(p for _, p in self.support)
            if abs(total - 1.0) > 1e-12:
                raise ValueError("support probabilities must sum to 1")
            if any(p < 0 for _, p in self.support):
                raise ValueError("support probabilities must be nonnegative")

    @property
    def is_complex(self):
        return self.kind in ("complex-gaussian", "four-moment-complex")

    @property
    def is_discrete(self):
        return bool(self.support)

    def mixed_moment(self, a, b):
        """Exact E[(Re xi)^a (Im xi)^b] for nonnegative integers a, b."""
        if a < 0 or b < 0:
            raise ValueError("moment orders must be nonnegative")
        if self.kind == "complex-gaussian":
            return _gauss_moment(a, 0.5) * _gauss_moment(b, 0.5)
        if self.kind == "real-gaussian":
            return _gauss_moment(a, 1.0) if b == 0 else 0.0
        if self.kind == "four-moment-real":
            return _three_point_moment(a, 1.0) if b == 0 else 0.0
        if self.kind == "four-moment-complex":
            return _three_point_moment(a, 0.5) * _three_point_moment(b, 0.5)
        # remaining discrete kinds: average over the stored support
        total = 0.0
        for v, p in self.support:
            v = complex(v)
            total += p * (v.real ** a) * (v.imag ** b)
        return total


def _gauss_moment(k, variance):
    # central moments of N(0, variance)
    if k % 2 == 1:
        return 0.0
    return variance ** (k // 2) * math.prod(range(1, k, 2)) if k else 1.0


def _three_point_moment(k, variance):
    # E X^k for the symmetric three-point law of the given variance:
    # support {0, +-sqrt(3 variance)} with the outer weights 1/6 each,
    # so even moments are (3 variance)^{k/2} / 3, exact in floats
    if k % 2 == 1:
        return 0.0
    return (3.0 * variance) ** (k // 2) / 3.0 if k else 1.0


def atom(kind):
    """Build the AtomDistribution for a named kind."""
    if kind in ("complex-gaussian", "real-gaussian"):
        return AtomDistribution(kind)
    if kind == "rademacher":
        return AtomDistribution(kind, ((-1.0, 0.5), (1.0, 0.5)))
    if kind == "zero":
        return AtomDistribution(kind, ((0.0, 1.0),))
    if kind == "four-moment-real":
        vals = _three_point_values(1.0)
        return AtomDistribution(kind, tuple(zip(vals, _W3)))
    if kind == "four-moment-complex":
        # product of independent real and imaginary three-point parts,
        # each of variance 1/2
        vals = _three_point_values(0.5)
        support = tuple(
            (complex(vr, vi), pr * pi)
            for vr, pr in zip(vals, _W3)
            for vi, pi in zip(vals, _W3)
        )
        return AtomDistribution(kind, support)
    raise ValueError(f"unknown atom kind {kind!r}")


@dataclass
class SeedStream:
    """Deterministic RNG stream addressed by (master_seed, stream_index).

    Streams with distinct indices under the same master seed are
    statistically independent.  The underlying Generator is created lazily
    and owned by this object.
    """

    master_seed: int
    stream_index: int = 0
    _gen: np.random.Generator = field(
        default=None, repr=False, compare=False
    )

    def __post_init__(self):
        if not (0 <= int(self.master_seed) < 2 ** 63):
            raise ValueError("master_seed must be a nonnegative 63-bit integer")
        if int(self.stream_index) < 0:
            raise ValueError("stream_index must be nonnegative")
        self.master_seed = int(self.master_seed)
        self.stream_index = int(self.stream_index)

    @property
    def gen(self):
        if self._gen is None:
            seq = np.random.SeedSequence(
                entropy=self.master_seed, spawn_key=(self.stream_index,)
            )
            self._gen = np.random.default_rng(seq)
        return self._gen


@dataclass(frozen=True)
class ProductSpec:
    """Description of a product of iid-entry factors.

    Parameters
    ----------
    n : int
        Factor dimension.
    m_factors : int
        Number of independent factors in the product.
    atoms : tuple of AtomDistribution
        Entry law per factor; a single AtomDistribution is broadcast.
    normalization : str
        "raw" leaves entries at unit variance, "per-factor" scales each
        factor by n^{-1/2} so the product carries n^{-M/2} overall.
    """

    n: int
    m_factors: int
    atoms: tuple
    normalization: str = "per-factor"

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be positive")
        if self.m_factors < 1:
            raise ValueError("m_factors must be positive")
        if self.normalization not in NORMALIZATIONS:
            raise ValueError(f"unknown normalization {self.normalization!r}")
        atoms = self.atoms
        if isinstance(atoms, AtomDistribution):
            atoms = (atoms,) * self.m_factors
        atoms = tuple(atoms)
        if len(atoms) == 1 and self.m_factors > 1:
            atoms = atoms * self.m_factors
        if len(atoms) != self.m_factors:
            raise ValueError("need one atom law per factor")
        object.__setattr__(self, "atoms", atoms)


@dataclass(frozen=True)
class TruncatedUnitarySpec:
    """Product of m_factors independent n x n truncations of Haar unitaries.

    Each factor is the top-left n x n corner of a Haar unitary of dimension
    n + kappa where kappa = floor(tau * n) >= 1.
    """

    n: int
    m_factors: int
    tau: float

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be positive")
        if self.m_factors < 1:
            raise ValueError("m_factors must be positive")
        if not (0 < self.tau):
            raise ValueError("tau must be positive")
        if self.kappa < 1:
            raise ValueError("tau too small: floor(tau * n) must be >= 1")

    @property
    def kappa(self):
        return int(math.floor(self.tau * self.n))

    @property
    def host_dim(self):
        return self.n + self.kappa


def sample_atom(dist, stream, size=None):
    """Draw from an atom law.  Returns a scalar when size is None."""
    gen = stream.gen
    if dist.kind == "complex-gaussian":
        re = gen.standard_normal(size)
        im = gen.standard_normal(size)
        return (re + 1j * im) * math.sqrt(0.5)
    if dist.kind == "real-gaussian":
        return gen.standard_normal(size)
    values = np.asarray([v for v, _ in dist.support])
    probs = np.asarray([p for _, p in dist.support])
    idx = gen.choice(len(values), size=size, p=probs)
    return values[idx]


def sample_iid_matrix(n, dist, stream):
    """n x n matrix of iid draws from the atom law, as complex128."""
    entries = sample_atom(dist, stream, size=(n, n))
    return np.ascontiguousarray(entries, dtype=np.complex128)


def sample_haar_unitary(k_dim, stream):
    """Haar-distributed k_dim x k_dim unitary.

    QR of a complex Ginibre matrix with the phases of R's diagonal folded
    back into Q, which makes the factorization unique and the law Haar.
    """
    gen = stream.gen
    g = (gen.standard_normal((k_dim, k_dim))
         + 1j * gen.standard_normal((k_dim, k_dim))) * math.sqrt(0.5)
    q, r = np.linalg.qr(g)
    d = np.diag(r).copy()
    # zero diagonal entries occur with probability zero; keep phase 1 there
    d[d == 0] = 1.0
    return q * (d / np.abs(d))


def sample_truncated_product(spec, stream):
    """Sample a TruncatedUnitarySpec product.

    Returns
    -------
    factors : list of ndarray
        The n x n truncations, in product order.
    product : ndarray
        factors[0] @ factors[1] @ ... @ factors[m-1].
    """
    n = spec.n
    factors = []
    for _ in range(spec.m_factors):
        u = sample_haar_unitary(spec.host_dim, stream)
        factors.append(np.ascontiguousarray(u[:n, :n]))
    product = factors[0].copy()
    for f in factors[1:]:
        product = product @ f
    return factors, product


def sample_product(spec, stream):
    """Sample a ProductSpec.

    Returns
    -------
    factors : list of ndarray
        Raw (unnormalized) factor matrices X^(1), ..., X^(M).
    product : ndarray
        Product of the factors under the requested normalization; for
        "per-factor" each factor is scaled by n^{-1/2} before multiplying.
    """
    n = spec.n
    factors = [
        sample_iid_matrix(n, dist, stream) for dist in spec.atoms
    ]
    scale = 1.0 / math.sqrt(n) if spec.normalization == "per-factor" else 1.0
    product = scale * factors[0]
    for f in factors[1:]:
        product = product @ (scale * f)
    return factors, product
