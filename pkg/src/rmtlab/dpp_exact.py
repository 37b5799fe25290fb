"""Exact finite-n determinantal formulas for product ensembles.

Moment constants, reproducing kernels, the single-index rotary moment sums
Phi_m, joint cumulants of linear eigenvalue statistics, their limiting
covariances, radial densities, and expected monomial statistics, for two
ensemble families:

* products of M iid complex matrices with unit-variance entries
  ("ginibre-product", entries scaled by n^{-1/2} per factor), and
* products of M truncations of Haar unitaries ("truncated-unitary",
  truncation offset kappa).

Every ratio of Gamma functions is evaluated in log space, so nothing here
overflows for n and moment orders up to 1e5.
"""

import cmath
import functools
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.special import gammaln, k0, logsumexp

from .testfuncs import LaurentPolynomial

__all__ = [
    "EnsembleKind",
    "MonomialPair",
    "MonomialTuple",
    "ginibre_product",
    "truncated_unitary",
    "ginibre_h",
    "trunc_h",
    "ginibre_kernel",
    "weight_closed_form",
    "phi_m",
    "phi_brute_force",
    "phi_asymptotic",
    "cumulant",
    "surjections",
    "limiting_covariance_ginibre",
    "limiting_covariance_trunc",
    "pair_covariance_exact",
    "expected_monomial",
    "circular_law_radial_cdf",
    "trunc_radial_cdf",
    "bulk_limit_kernel",
    "CUMULANT_ORDER_LIMIT",
]

GINIBRE = "ginibre-product"
TRUNCATED = "truncated-unitary"

# joint cumulants above this order would need >1e5 surjections
CUMULANT_ORDER_LIMIT = 6


@dataclass(frozen=True)
class EnsembleKind:
    """Which exactly solvable family, with its size parameters.

    kind is "ginibre-product" (needs n, m) or "truncated-unitary"
    (needs n, m, kappa, with kappa = floor(tau * n) >= 1).
    """

    kind: str
    n: int
    m: int
    kappa: int = None

    def __post_init__(self):
        if self.kind not in (GINIBRE, TRUNCATED):
            raise ValueError(f"unknown ensemble kind {self.kind!r}")
        if self.n < 1 or self.m < 1:
            raise ValueError("n and m must be >= 1")
        if self.kind == TRUNCATED:
            if self.kappa is None or self.kappa < 1:
                raise ValueError("truncated kind needs kappa >= 1")
        elif self.kappa is not None:
            raise ValueError("kappa only applies to the truncated kind")

    @property
    def tau(self):
        if self.kind != TRUNCATED:
            raise AttributeError("tau only applies to the truncated kind")
        return self.kappa / self.n


def ginibre_product(n, m):
    return EnsembleKind(GINIBRE, n, m)


def truncated_unitary(n, m, tau=None, kappa=None):
    """Truncated-unitary kind; give tau (kappa = floor(tau n)) or kappa."""
    if (tau is None) == (kappa is None):
        raise ValueError("give exactly one of tau and kappa")
    if kappa is None:
        kappa = int(math.floor(tau * n))
    return EnsembleKind(TRUNCATED, n, m, kappa)


@dataclass(frozen=True)
class MonomialPair:
    """Exponents of one monomial z^a conj(z)^b."""

    a: int
    b: int

    def __post_init__(self):
        if self.a < 0 or self.b < 0:
            raise ValueError("exponents must be nonnegative")


@dataclass(frozen=True)
class MonomialTuple:
    """An ordered tuple of monomials entering a cyclic moment sum.

    alphas[j], betas[j] are the exponents of slot j.  Derived quantities:
    gammas[j] = betas[j] - alphas[j], etas[j] their running sums, and
    s = sum(alphas).  The tuple is balanced iff sum(alphas) == sum(betas);
    unbalanced tuples integrate to zero by rotational invariance.
    """

    alphas: tuple
    betas: tuple

    def __post_init__(self):
        alphas = tuple(int(a) for a in self.alphas)
        betas = tuple(int(b) for b in self.betas)
        if len(alphas) != len(betas) or not alphas:
            raise ValueError("alphas and betas must be nonempty, equal length")
        if any(a < 0 for a in alphas) or any(b < 0 for b in betas):
            raise ValueError("exponents must be nonnegative")
        object.__setattr__(self, "alphas", alphas)
        object.__setattr__(self, "betas", betas)

    @property
    def m(self):
        return len(self.alphas)

    @property
    def gammas(self):
        return tuple(b - a for a, b in zip(self.alphas, self.betas))

    @property
    def etas(self):
        out, run = [], 0
        for g in self.gammas:
            run += g
            out.append(run)
        return tuple(out)

    @property
    def eta_max(self):
        return max(self.etas)

    @property
    def eta_min(self):
        return min(self.etas)

    @property
    def s(self):
        return sum(self.alphas)

    @property
    def balanced(self):
        return sum(self.alphas) == sum(self.betas)


def ginibre_h(iota, kind):
    """log of the moment constant pi n^{-M iota} Gamma(iota+1)^M."""
    if kind.kind != GINIBRE:
        raise ValueError("ginibre_h needs a ginibre-product kind")
    iota = np.asarray(iota)
    if np.any(iota < 0):
        raise ValueError("iota must be nonnegative")
    val = (math.log(math.pi)
           - kind.m * iota * math.log(kind.n)
           + kind.m * gammaln(iota + 1.0))
    return float(val) if val.ndim == 0 else val


def trunc_h(t, kind):
    """log of the moment constant pi [Gamma(t+1)/Gamma(t+kappa+1)]^M."""
    if kind.kind != TRUNCATED:
        raise ValueError("trunc_h needs a truncated-unitary kind")
    t = np.asarray(t)
    if np.any(t < 0):
        raise ValueError("t must be nonnegative")
    val = (math.log(math.pi)
           + kind.m * (gammaln(t + 1.0) - gammaln(t + kind.kappa + 1.0)))
    return float(val) if val.ndim == 0 else val


def _log_h_raw(iota, kind):
    # moment constants of the weight in the unnormalized variable: the
    # kind's h with the n-power removed (identical for truncated kinds)
    iota = np.asarray(iota, dtype=np.float64)
    if kind.kind == GINIBRE:
        return math.log(math.pi) + kind.m * gammaln(iota + 1.0)
    return trunc_h(iota, kind)


def ginibre_kernel(z, w, kind):
    """Finite-n reproducing kernel sum_{iota<n} (z conj(w))^iota / h_iota.

    Evaluated in the unnormalized variable, i.e. with the moment constants
    pi Gamma(iota+1)^M (truncated kinds use their own h, which carries no
    n-power to begin with).  Terms are accumulated through their log
    magnitudes so large n and large |z w| stay finite.
    """
    z = complex(z)
    w = complex(w)
    if not (cmath.isfinite(z) and cmath.isfinite(w)):
        raise ValueError("kernel arguments must be finite")
    p = z * w.conjugate()
    if p == 0:
        return 1.0 / math.pi
    iotas = np.arange(kind.n)
    logmag = iotas * math.log(abs(p)) - _log_h_raw(iotas, kind)
    peak = float(np.max(logmag))
    phases = np.exp(1j * iotas * cmath.phase(p))
    return complex(math.exp(peak) * np.sum(np.exp(logmag - peak) * phases))


def weight_closed_form(z, m_factors):
    """Closed-form radial weight for products of 1 or 2 factors.

    Normalized so that int |z|^{2 iota} w(z) d^2 z = pi Gamma(iota+1)^M
    exactly (the module's moment convention at unit scale):
    M=1 gives exp(-|z|^2); M=2 gives 2 K_0(2|z|), which diverges
    logarithmically at the origin.  Higher M has no elementary form.
    """
    if m_factors == 1:
        return float(math.exp(-abs(complex(z)) ** 2))
    if m_factors == 2:
        r = abs(complex(z))
        if r == 0:
            return math.inf
        return float(2.0 * k0(2.0 * r))
    raise ValueError(
        "closed-form weight is only available for 1 or 2 factors"
    )


def _phi_summand_logs(tup, kind):
    # log of the ell-summand, vectorized over the admissible ell range
    lo = -tup.eta_min
    hi = kind.n - 1 - tup.eta_max
    if lo > hi:
        return None
    ell = np.arange(lo, hi + 1, dtype=np.float64)
    total = np.zeros_like(ell)
    m_exp = float(kind.m)
    for alpha, eta in zip(tup.alphas, tup.etas):
        q = ell + eta
        if kind.kind == GINIBRE:
            total += m_exp * (gammaln(q + alpha + 1.0) - gammaln(q + 1.0))
            total -= m_exp * alpha * math.log(kind.n)
        else:
            kap = kind.kappa
            total += m_exp * (gammaln(q + kap + 1.0)
                              + gammaln(q + alpha + 1.0)
                              - gammaln(q + 1.0)
                              - gammaln(q + alpha + kap + 1.0))
    return total


def phi_m(tup, kind):
    """Exact cyclic moment sum Phi_m for a monomial tuple.

    Balance (sum alphas == sum betas) reduces the m-fold orthogonality sum
    to a single index ell in [-eta_min, n-1-eta_max]; unbalanced tuples or
    empty index ranges give exactly 0.
    """
    if not tup.balanced:
        return 0.0
    logs = _phi_summand_logs(tup, kind)
    if logs is None:
        return 0.0
    return float(np.exp(logsumexp(logs)))


def phi_brute_force(tup, kind):
    """Direct orthogonality-sum evaluation of Phi_m over q in [0, n-1]^m.

    Exponential in m; test oracle only.
    """
    import itertools

    m = tup.m
    n = kind.n

    def log_h(t):
        if kind.kind == GINIBRE:
            return float(ginibre_h(t, kind))
        return float(trunc_h(t, kind))

    total = 0.0
    for q in itertools.product(range(n), repeat=m):
        ok = all(
            tup.alphas[j] + q[j] == tup.betas[j] + q[j - 1]
            for j in range(m)
        )
        if not ok:
            continue
        log_term = sum(
            log_h(tup.alphas[j] + q[j]) - log_h(q[j]) for j in range(m)
        )
        total += math.exp(log_term)
    return total


def phi_asymptotic(tup, kind):
    """Large-n approximation of phi_m for ginibre-product kinds.

    n/(Ms+1) - (1+eta_max) + 1/2 + (1/s) sum_j (alpha_j eta_j +
    alpha_j(alpha_j+1)/2), accurate to O(1/n).  Requires a balanced tuple
    with s >= 1 (the correction divides by s).
    """
    if kind.kind != GINIBRE:
        raise ValueError("asymptotic form covers ginibre-product kinds only")
    if not tup.balanced:
        raise ValueError("asymptotic form needs a balanced tuple")
    s = tup.s
    if s < 1:
        raise ValueError("s must be >= 1 (the all-zero tuple is exactly n)")
    corr = sum(
        a * e + a * (a + 1) / 2.0 for a, e in zip(tup.alphas, tup.etas)
    )
    return (kind.n / (kind.m * s + 1.0)
            - (1.0 + tup.eta_max)
            + 0.5
            + corr / s)


def surjections(k, m):
    """Yield all surjections [0..k-1] -> [0..m-1] as assignment tuples.

    Recursive assignment with pruning: a branch dies as soon as the
    remaining elements cannot cover the still-untouched blocks.
    """
    if k < m or m < 1:
        return
    assignment = [0] * k

    def rec(i, used_mask, used_count):
        if k - i < m - used_count:
            return
        if i == k:
            yield tuple(assignment)
            return
        for j in range(m):
            assignment[i] = j
            newly = (used_mask >> j) & 1 == 0
            yield from rec(i + 1, used_mask | (1 << j),
                           used_count + (1 if newly else 0))

    yield from rec(0, 0, 0)


def _surjection_block_sizes(k, m):
    """Ordered block-size tuples (|sigma^-1(0)|, ...) over all surjections."""
    for assign in surjections(k, m):
        sizes = [0] * m
        for j in assign:
            sizes[j] += 1
        yield tuple(sizes)


def _canonical_rotation(alphas, betas):
    m = len(alphas)
    best = None
    for r in range(m):
        cand = (alphas[r:] + alphas[:r], betas[r:] + betas[:r])
        if best is None or cand < best:
            best = cand
    return best


@functools.lru_cache(maxsize=262144)
def _phi_cached(alphas, betas, kind):
    return phi_m(MonomialTuple(alphas, betas), kind)


def _phi_of_monomials(pairs, kind):
    alphas = tuple(a for a, _ in pairs)
    betas = tuple(b for _, b in pairs)
    if sum(alphas) != sum(betas):
        return 0.0
    ca, cb = _canonical_rotation(alphas, betas)
    return _phi_cached(ca, cb, kind)


def _phi_multilinear(polys, kind):
    """Phi_m extended multilinearly from monomials to polynomials."""
    import itertools

    term_lists = [list(p.terms.items()) for p in polys]
    total = 0.0 + 0.0j
    for combo in itertools.product(*term_lists):
        coeff = 1.0 + 0.0j
        for _, c in combo:
            coeff *= c
        if coeff == 0:
            continue
        pairs = tuple(ab for ab, _ in combo)
        total += coeff * _phi_of_monomials(pairs, kind)
    return total


def cumulant(k, poly, kind):
    """Exact k-th joint cumulant of the linear statistic sum_j f(lambda_j).

    Expands the log-generating function of the determinantal process into
    cyclic moment sums: C_k = sum_{m=1}^{k} ((-1)^{m+1}/m) sum over
    surjections sigma:[k]->>[m] of Phi_m(f^{|sigma^{-1}(1)|}, ...), each
    Phi extended multilinearly over the monomials of f.  Orders above
    CUMULANT_ORDER_LIMIT are refused (surjection counts explode).
    """
    k = int(k)
    if k < 1:
        raise ValueError("cumulant order must be >= 1")
    if k > CUMULANT_ORDER_LIMIT:
        raise ValueError(
            f"cumulant order {k} exceeds the supported limit "
            f"{CUMULANT_ORDER_LIMIT}"
        )
    if not isinstance(poly, LaurentPolynomial):
        poly = LaurentPolynomial(poly)
    powers = {1: poly}
    for p in range(2, k + 1):
        powers[p] = powers[p - 1] * poly
    total = 0.0 + 0.0j
    for m in range(1, k + 1):
        sign = (-1.0) ** (m + 1) / m
        sizes_seen = {}
        for sizes in _surjection_block_sizes(k, m):
            if sizes not in sizes_seen:
                sizes_seen[sizes] = _phi_multilinear(
                    [powers[p] for p in sizes], kind
                )
            total += sign * sizes_seen[sizes]
    if abs(total.imag) > 1e-8 * (1.0 + abs(total.real)):
        raise ArithmeticError(
            f"cumulant came out non-real ({total}); "
            "is the polynomial Hermitian-symmetric?"
        )
    return float(total.real)


def limiting_covariance_ginibre(p1, p2):
    """Limit covariance of monomial statistics for ginibre products.

    max(0, a1-b1) + b1 a2 / s on the balanced diagonal a1+a2 = b1+b2 = s,
    zero otherwise; the value does not depend on the factor count.
    """
    a1, b1, a2, b2 = p1.a, p1.b, p2.a, p2.b
    if a1 + a2 != b1 + b2:
        return 0.0
    s = a1 + a2
    if s == 0:
        return 0.0
    return max(0, a1 - b1) + b1 * a2 / s


def limiting_covariance_trunc(p1, p2, tau, m_factors):
    """Limit covariance of monomial statistics for truncated products.

    M tau a1 b2 int_0^1 x^{Ms-1}/(x+tau)^{Ms+1} dx
    + max(0, b1-a1) (1+tau)^{-Ms} on the balanced diagonal, else zero.
    """
    if not (0 < tau):
        raise ValueError("tau must be positive")
    a1, b1, a2, b2 = p1.a, p1.b, p2.a, p2.b
    if a1 + a2 != b1 + b2:
        return 0.0
    s = a1 + a2
    if s == 0:
        return 0.0
    ms = m_factors * s
    term2 = max(0, b1 - a1) * (1.0 + tau) ** (-ms)
    if a1 == 0 or b2 == 0:
        return term2
    integral, _ = quad(
        lambda x: x ** (ms - 1) / (x + tau) ** (ms + 1),
        0.0, 1.0, epsabs=0.0, epsrel=1e-10,
    )
    return m_factors * tau * a1 * b2 * integral + term2


def pair_covariance_exact(p1, p2, kind):
    """Exact finite-n covariance Phi_1(m1 m2) - Phi_2(m1, m2)."""
    merged = MonomialTuple((p1.a + p2.a,), (p1.b + p2.b,))
    split = MonomialTuple((p1.a, p2.a), (p1.b, p2.b))
    return phi_m(merged, kind) - phi_m(split, kind)


def expected_monomial(big_l, kind):
    """Mean of the normalized monomial statistic (1/n) sum |lambda|^{2L}.

    Returns (exact_n, limit): the exact finite-n average of moment-constant
    ratios and its n -> infinity limit (1/(ML+1) for ginibre products, an
    explicit tau-integral for truncated ones).
    """
    big_l = int(big_l)
    if big_l < 0:
        raise ValueError("L must be >= 0")
    if big_l == 0:
        return 1.0, 1.0
    n, m = kind.n, kind.m
    t = np.arange(n, dtype=np.float64)
    if kind.kind == GINIBRE:
        logs = (m * (gammaln(t + big_l + 1.0) - gammaln(t + 1.0))
                - m * big_l * math.log(n))
        exact = float(np.mean(np.exp(logs)))
        limit = 1.0 / (m * big_l + 1.0)
        return exact, limit
    kap = kind.kappa
    logs = m * (gammaln(t + kap + 1.0) + gammaln(t + big_l + 1.0)
                - gammaln(t + 1.0) - gammaln(t + big_l + kap + 1.0))
    exact = float(np.mean(np.exp(logs)))
    tau = kind.tau
    limit, _ = quad(
        lambda x: (x / (tau + x)) ** (big_l * m),
        0.0, 1.0, epsabs=0.0, epsrel=1e-10,
    )
    return exact, float(limit)


def circular_law_radial_cdf(r, m_factors):
    """Radial CDF r^{2/M} of the M-fold circular law on the unit disc.

    Arguments outside [0, 1] are clamped (with a warning).  Accepts
    scalars or arrays.
    """
    import warnings

    arr = np.asarray(r, dtype=np.float64)
    if np.any(arr < 0) or np.any(arr > 1):
        warnings.warn("radius outside [0, 1] clamped", RuntimeWarning)
        arr = np.clip(arr, 0.0, 1.0)
    out = arr ** (2.0 / m_factors)
    return float(out) if out.ndim == 0 else out


def trunc_radial_cdf(r, tau, m_factors):
    """Radial CDF tau r^{2/M} / (1 - r^{2/M}) of the truncated limit law.

    Exactly 1 at and beyond the edge radius (1/(1+tau))^{M/2}.  Accepts
    scalars or arrays.
    """
    import warnings

    if not (0 < tau):
        raise ValueError("tau must be positive")
    arr = np.asarray(r, dtype=np.float64)
    if np.any(arr < 0):
        warnings.warn("negative radius clamped to 0", RuntimeWarning)
        arr = np.maximum(arr, 0.0)
    edge = (1.0 + tau) ** (-m_factors / 2.0)
    u = np.minimum(arr, edge) ** (2.0 / m_factors)
    with np.errstate(divide="ignore", invalid="ignore"):
        val = tau * u / (1.0 - u)
    out = np.where(arr >= edge, 1.0, np.minimum(val, 1.0))
    return float(out) if out.ndim == 0 else out


def bulk_limit_kernel(xi1, xi2, m_factors):
    """Reference bulk-scaling limit of the rescaled kernel.

    (1/pi) (xi1 conj(xi2)/|xi1 xi2|)^{(1-M)/2}
         * exp(-(|xi1|^2 + |xi2|^2)/2 + xi1 conj(xi2)).

    The diagonal value is the constant 1/pi, and for M = 1 the magnitude
    coincides with the classical bulk kernel of a single matrix.  The
    half-integer phase power (even M) takes the principal branch; zero
    arguments are rejected because the phase is undefined there.
    """
    xi1 = complex(xi1)
    xi2 = complex(xi2)
    if xi1 == 0 or xi2 == 0:
        raise ValueError("bulk kernel needs nonzero arguments")
    p = xi1 * xi2.conjugate()
    phase = cmath.exp(1j * cmath.phase(p) * (1.0 - m_factors) / 2.0)
    gauss = cmath.exp(-(abs(xi1) ** 2 + abs(xi2) ** 2) / 2.0 + p)
    return (1.0 / math.pi) * phase * gauss
