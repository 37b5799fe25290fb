"""Linear eigenvalue statistics and their analytics.

Uncentered linear statistics, the H^{1/2} seminorm and gradient energy of
polynomial test functions, predicted limiting variances (checked through
two independent routes), unbiased empirical cumulants with Chebyshev error
bars, a log-determinant identity checker on quadrature grids, smoothed
correlation estimators for the root process, resolvent swap residuals,
and an anticoncentration probe for entry laws.
"""

import math
from dataclasses import dataclass

import numpy as np

from .dpp_exact import (
    MonomialPair,
    limiting_covariance_ginibre,
    limiting_covariance_trunc,
)
from .ensembles import sample_atom
from .linearize import build_linearization, mth_root_process
from .numlin import NumericalFailure, as_matrix, eigenvalues, log_abs_det
from .testfuncs import LaurentPolynomial, RadialBump, RadialWindow

__all__ = [
    "LaurentPolynomial",
    "RadialBump",
    "RadialWindow",
    "StatisticSample",
    "CorrelationEstimate",
    "linear_statistic",
    "h_half_norm_sq",
    "gradient_energy",
    "predicted_variance_ginibre",
    "predicted_variance_trunc",
    "empirical_cumulants",
    "girko_residual",
    "product_vs_root_statistic",
    "smoothed_correlation",
    "stieltjes_swap_residual",
    "anticoncentration_check",
    "MIN_REPLICAS_FOR_CUMULANTS",
    "MIN_GIRKO_GRID",
]

# Chebyshev 95% bars: P(|mean - mu| >= eps) <= var / (N eps^2) = 0.05
_CHEBYSHEV_DELTA = 0.05

MIN_REPLICAS_FOR_CUMULANTS = 8
MIN_GIRKO_GRID = 64


@dataclass
class StatisticSample:
    """Per-replica values of one linear statistic.

    values : 1-D float array, one entry per replica
    f_description : what test function produced them
    ensemble_description : what ensemble they came from
    """

    values: np.ndarray
    f_description: str = ""
    ensemble_description: str = ""

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.ndim != 1:
            raise ValueError("values must be a 1-D array")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("values must be finite")


@dataclass
class CorrelationEstimate:
    """A Monte Carlo estimate with a Chebyshev 95% half-width."""

    value: float
    halfwidth: float
    n_replicas: int
    flagged: bool = False


def _chebyshev_halfwidth(per_replica):
    per_replica = np.asarray(per_replica, dtype=np.float64)
    n = len(per_replica)
    if n < 2:
        return math.inf
    sd = float(np.std(per_replica, ddof=1))
    return sd / math.sqrt(_CHEBYSHEV_DELTA * n)


def linear_statistic(eigs, f):
    """Uncentered statistic sum_j f(lambda_j).

    ``eigs`` may be a SpectrumSample or a plain array of eigenvalues; ``f``
    anything with an ``evaluate`` method (LaurentPolynomial, RadialBump).
    Centering happens at the aggregation stage.
    """
    values = getattr(eigs, "eigenvalues", eigs)
    values = np.asarray(values, dtype=np.complex128)
    if not np.all(np.isfinite(values)):
        raise ValueError("eigenvalues must be finite")
    if len(values) == 0:
        return 0.0
    return float(np.sum(f.evaluate(values)))


def h_half_norm_sq(f, radius):
    """Squared H^{1/2} seminorm on the circle |z| = radius.

    sum_k |k| |fhat(k)|^2 with fhat(k) = sum_{a-b=k} c_{a,b} R^{a+b},
    assembled exactly from the coefficient map.  Radial polynomials give 0.
    """
    radius = float(radius)
    if radius <= 0:
        raise ValueError("radius must be positive")
    fhat = {}
    for (a, b), c in f.terms.items():
        k = a - b
        fhat[k] = fhat.get(k, 0.0) + c * radius ** (a + b)
    return float(sum(abs(k) * abs(v) ** 2 for k, v in fhat.items()))


def gradient_energy(f, radius):
    """(1/4 pi) int_{|z|<R} |grad f|^2, exactly from the coefficients.

    For real f, |grad f|^2 = 4 |df/dz|^2, and the monomial disc integral
    int z^p conj(z)^q = [p == q] pi R^{2p+2}/(p+1) reduces the energy to
    sum over pairs with a + b' = a' + b, a, a' >= 1 of
    c conj(c') a a' R^{2(a+b')} / (a+b').
    """
    radius = float(radius)
    if radius <= 0:
        raise ValueError("radius must be positive")
    items = [(ab, c) for ab, c in f.terms.items() if ab[0] >= 1]
    total = 0.0 + 0.0j
    for (a, b), c in items:
        for (a2, b2), c2 in items:
            if a + b2 != a2 + b:
                continue
            p = a + b2
            total += c * np.conj(c2) * a * a2 * radius ** (2 * p) / p
    if abs(total.imag) > 1e-10 * (1.0 + abs(total.real)):
        raise ArithmeticError("gradient energy came out non-real")
    return float(total.real)


def _covariance_route(f, pair_cov):
    items = list(f.terms.items())
    total = 0.0 + 0.0j
    for (a1, b1), c1 in items:
        for (a2, b2), c2 in items:
            cov = pair_cov(MonomialPair(a1, b1), MonomialPair(a2, b2))
            total += c1 * c2 * cov
    if abs(total.imag) > 1e-10 * (1.0 + abs(total.real)):
        raise ArithmeticError("covariance expansion came out non-real")
    return float(total.real)


def predicted_variance_ginibre(f):
    """Limiting variance of the centered statistic for ginibre products.

    gradient_energy(f, 1) + (1/2) h_half_norm_sq(f, 1); independent of the
    factor count.  Cross-checked against the bilinear expansion in
    limiting monomial covariances; disagreement beyond 1e-8 means a
    coefficient bug and raises.
    """
    analytic = gradient_energy(f, 1.0) + 0.5 * h_half_norm_sq(f, 1.0)
    bilinear = _covariance_route(f, limiting_covariance_ginibre)
    if abs(analytic - bilinear) > 1e-8 * (1.0 + abs(analytic)):
        raise ArithmeticError(
            f"variance routes disagree: {analytic} vs {bilinear}"
        )
    return analytic


def predicted_variance_trunc(f, tau, m_factors):
    """Limiting variance for truncated-unitary products.

    Gradient energy and half the H^{1/2} seminorm, both at the edge radius
    (1/(1+tau))^{M/2}, cross-checked against the monomial covariance route.
    tau outside (1/2, 1) is allowed but warned about (the reference regime
    assumes it).
    """
    import warnings

    if not (0 < tau):
        raise ValueError("tau must be positive")
    if not (0.5 < tau < 1.0):
        warnings.warn(
            "tau outside (1/2, 1); the limit theorem is stated inside",
            RuntimeWarning,
        )
    radius = (1.0 + tau) ** (-m_factors / 2.0)
    analytic = (gradient_energy(f, radius)
                + 0.5 * h_half_norm_sq(f, radius))
    bilinear = _covariance_route(
        f, lambda p1, p2: limiting_covariance_trunc(p1, p2, tau, m_factors)
    )
    if abs(analytic - bilinear) > 1e-8 * (1.0 + abs(analytic)):
        raise ArithmeticError(
            f"variance routes disagree: {analytic} vs {bilinear}"
        )
    return analytic


def _k_statistics(values, max_k):
    values = np.asarray(values, dtype=np.float64)
    n = len(values)
    mean = float(np.mean(values))
    out = [mean]
    if max_k == 1:
        return out
    d = values - mean
    m2 = float(np.mean(d ** 2))
    m3 = float(np.mean(d ** 3))
    m4 = float(np.mean(d ** 4))
    out.append(n / (n - 1.0) * m2)
    if max_k >= 3:
        out.append(n * n * m3 / ((n - 1.0) * (n - 2.0)))
    if max_k >= 4:
        out.append(
            n * n * ((n + 1.0) * m4 - 3.0 * (n - 1.0) * m2 * m2)
            / ((n - 1.0) * (n - 2.0) * (n - 3.0))
        )
    return out


def empirical_cumulants(sample, max_k):
    """Unbiased cumulant estimates (k-statistics) with Chebyshev bars.

    Returns a list of (value, halfwidth) for orders 1..max_k (max_k <= 4).
    Half-widths are delete-one jackknife standard errors inflated to the
    Chebyshev 95% level; at least 8 replicas are required.
    """
    if isinstance(sample, StatisticSample):
        values = sample.values
    else:
        values = np.asarray(sample, dtype=np.float64)
    max_k = int(max_k)
    if not (1 <= max_k <= 4):
        raise ValueError("max_k must be between 1 and 4")
    n = len(values)
    if n < MIN_REPLICAS_FOR_CUMULANTS:
        raise ValueError(
            f"need at least {MIN_REPLICAS_FOR_CUMULANTS} replicas, got {n}"
        )
    estimates = _k_statistics(values, max_k)
    # delete-one jackknife replicates of each k-statistic
    jack = np.empty((n, max_k))
    for i in range(n):
        loo = np.delete(values, i)
        jack[i, :] = _k_statistics(loo, max_k)
    out = []
    for j in range(max_k):
        theta = jack[:, j]
        var_jack = (n - 1.0) / n * float(np.sum((theta - theta.mean()) ** 2))
        halfwidth = math.sqrt(var_jack / _CHEBYSHEV_DELTA)
        out.append((float(estimates[j]), float(halfwidth)))
    return out


def girko_residual(factors, f, grid_resolution, scale="normalized",
                   pad_cells=2, chunk=8192):
    """Relative defect of the log-determinant identity on a midpoint grid.

    Compares sum_j f(iota_j) over the linearization spectrum with
    (1/4 pi) int Laplacian(f)(z) log |det W(z)| d^2 z, the integral taken
    by the midpoint rule on a square grid covering the support of f.  The
    integrable log singularities are left untreated, so the defect is
    dominated by quadrature error and shrinks as the grid refines.
    """
    grid_resolution = int(grid_resolution)
    if grid_resolution < MIN_GIRKO_GRID:
        raise ValueError(
            f"grid resolution below {MIN_GIRKO_GRID} is too coarse"
        )
    if not isinstance(f, RadialBump):
        raise TypeError("girko_residual needs a compactly supported bump")
    y0 = build_linearization(factors, 0.0, scale)
    dim = y0.shape[0]
    iotas = eigenvalues(y0)
    lhs = float(np.sum(f.evaluate(iotas)))

    half = f.r2 * (1.0 + pad_cells / grid_resolution)
    edges = np.linspace(-half, half, grid_resolution + 1)
    mids = 0.5 * (edges[:-1] + edges[1:])
    cell_area = (edges[1] - edges[0]) ** 2
    re, im = np.meshgrid(mids, mids, indexing="ij")
    zgrid = re + 1j * im
    lap = f.laplacian(zgrid)
    mask = lap != 0.0
    pts = zgrid[mask]
    weights = lap[mask]

    eye = np.eye(dim, dtype=np.complex128)
    logdet = np.empty(len(pts))
    for start in range(0, len(pts), chunk):
        block = pts[start:start + chunk]
        stack = y0[None, :, :] - block[:, None, None] * eye[None, :, :]
        logdet[start:start + chunk] = log_abs_det(stack)
    # W(z) doubles the log-determinant of Y(z)
    finite = np.isfinite(logdet)
    rhs = cell_area / (4.0 * math.pi) * float(
        np.sum(weights[finite] * 2.0 * logdet[finite])
    )
    return abs(lhs - rhs) / (1.0 + abs(lhs))


def product_vs_root_statistic(factors, f, scale="normalized"):
    """Absolute gap between sum f(mu_j) and sum (1/M) f(iota_j^M).

    The first sum runs over the product's eigenvalues, the second over the
    linearization's; the identity is exact, so the gap is eigensolver
    noise.
    """
    mats = [as_matrix(x, square=True) for x in factors]
    m_factors = len(mats)
    n = mats[0].shape[0]
    c = 1.0 / math.sqrt(n) if scale == "normalized" else 1.0
    product = (c * mats[0]).copy()
    for x in mats[1:]:
        product = product @ (c * x)
    mu = eigenvalues(product)
    lhs = float(np.sum(f.evaluate(mu)))
    roots = mth_root_process(mats, scale=scale)
    rhs = float(np.sum(f.evaluate(roots.eigenvalues ** m_factors))) / m_factors
    return abs(lhs - rhs)


def _bulk_center_check(sample, center):
    meta = sample.metadata or {}
    if meta.get("scale") != "raw":
        return
    m_factors = meta.get("m_factors")
    if not m_factors:
        return
    n = sample.source_dim // m_factors
    rho = abs(center) / math.sqrt(n)
    if not (0.0 < rho < 1.0):
        raise ValueError(
            f"center {center} lies at relative radius {rho:.3f}, "
            "outside the open bulk"
        )


def smoothed_correlation(samples, window, centers, k):
    """Smoothed k-point counting statistic of a root-process ensemble.

    k=1: mean over replicas of sum_i G(zeta_i - z1).
    k=2: mean over replicas of sum_{i != j} G(zeta_i - z1) G(zeta_j - z2).
    G is a radial window; the estimate carries a Chebyshev 95% half-width.
    If no eigenvalue ever lands in any window, the zero estimate is
    flagged.  k >= 3 is refused.
    """
    k = int(k)
    if k not in (1, 2):
        raise ValueError("only k = 1 and k = 2 are supported")
    if len(centers) != k:
        raise ValueError(f"need exactly {k} centers")
    if not samples:
        raise ValueError("need at least one replica sample")
    for c in centers:
        _bulk_center_check(samples[0], c)
    per_replica = []
    touched = 0
    for sample in samples:
        eigs = sample.eigenvalues
        g1 = window.evaluate(eigs - centers[0])
        if k == 1:
            per_replica.append(float(np.sum(g1)))
            touched += int(np.count_nonzero(g1))
        else:
            g2 = window.evaluate(eigs - centers[1])
            full = float(np.sum(g1)) * float(np.sum(g2))
            diag = float(np.sum(g1 * g2))
            per_replica.append(full - diag)
            touched += int(np.count_nonzero(g1) + np.count_nonzero(g2))
    value = float(np.mean(per_replica))
    halfwidth = _chebyshev_halfwidth(per_replica)
    if touched == 0:
        return CorrelationEstimate(0.0, 0.0, len(samples), flagged=True)
    return CorrelationEstimate(value, halfwidth, len(samples))


def _swap_resolvent_trace(w0, vpert, t, scale, eta, divisor):
    h = w0 if t == 0 else w0 + (t * scale) * vpert
    lam = np.linalg.eigvalsh(h)
    return complex(np.sum(1.0 / (lam - 1j * eta))) / divisor


def stieltjes_swap_residual(factors, z, t_values, entry, eta=1.0,
                            scale="normalized", fit_points=41,
                            fit_span=None, divisor=None, return_fit=False):
    """Fifth-order Taylor defect of the resolvent trace under an entry swap.

    One raw entry of one factor is shifted by t/sqrt(n) (an elementary
    Hermitian pair in the doubled matrix).  The first four Taylor
    coefficients of s_t = Tr (W_t(z) - i eta)^{-1} / divisor are fitted on
    a small |t| grid, and for each requested t the defect
    |s_t - s_0 - sum_{j<=4} n^{-j/2} c_j t^j| is returned.  A defect is
    genuinely fifth order, so halving t divides it by about 2^5.

    divisor defaults to the factor dimension n; fit_span defaults to
    max|t|/8.  Raises NumericalFailure if the resolvent is near-singular.
    """
    mats = [as_matrix(x, square=True) for x in factors]
    m_factors = len(mats)
    n = mats[0].shape[0]
    idx, row, col = entry
    if not (0 <= idx < m_factors):
        raise ValueError("factor index out of range")
    if not (0 <= row < n and 0 <= col < n):
        raise ValueError("entry position out of range")
    if eta <= 0:
        raise ValueError("eta must be positive")
    t_values = [float(t) for t in t_values]
    if divisor is None:
        divisor = float(n)

    y0 = build_linearization(mats, complex(z), scale)
    dim = y0.shape[0]
    w0 = np.zeros((2 * dim, 2 * dim), dtype=np.complex128)
    w0[:dim, dim:] = y0
    w0[dim:, :dim] = y0.conj().T

    # the perturbed Y entry sits at block row idx, block column (idx+1) mod M
    p = idx * n + row
    q = ((idx + 1) % m_factors) * n + col
    vpert = np.zeros_like(w0)
    vpert[p, dim + q] = 1.0
    vpert[dim + q, p] = 1.0

    lam0 = np.linalg.eigvalsh(w0)
    if float(np.min(np.abs(lam0 - 1j * eta))) < 1e-8:
        raise NumericalFailure("resolvent is near-singular; sample skipped")

    per_t_scale = 1.0 / math.sqrt(n)
    s0 = complex(np.sum(1.0 / (lam0 - 1j * eta))) / divisor

    t_max = max((abs(t) for t in t_values), default=0.0)
    if fit_span is None:
        fit_span = t_max / 8.0 if t_max > 0 else 1.0
    grid = np.linspace(-fit_span, fit_span, int(fit_points))
    grid = grid[grid != 0.0]
    rows = []
    rhs = []
    for t in grid:
        st = _swap_resolvent_trace(w0, vpert, t, per_t_scale, eta, divisor)
        rows.append([n ** (-j / 2.0) * t ** j for j in range(1, 5)])
        rhs.append(st - s0)
    coeffs, *_ = np.linalg.lstsq(
        np.asarray(rows, dtype=np.complex128),
        np.asarray(rhs, dtype=np.complex128),
        rcond=None,
    )

    residuals = []
    for t in t_values:
        st = _swap_resolvent_trace(w0, vpert, t, per_t_scale, eta, divisor)
        model = s0 + sum(
            coeffs[j - 1] * n ** (-j / 2.0) * t ** j for j in range(1, 5)
        )
        residuals.append(float(abs(st - model)))
    if return_fit:
        return residuals, coeffs
    return residuals


def anticoncentration_check(dist, v, shifts, replicas, c=0.5, stream=None,
                            chunk=65536):
    """Empirical small-ball probability sup_z P(|xi . v - z| < c).

    xi has iid entries from ``dist``; the sup runs over the given shifts.
    Returns (estimate, halfwidth) where the half-width is a Chebyshev 95%
    bound for a Bernoulli mean at the worst shift.
    """
    from .ensembles import SeedStream

    v = np.asarray(v, dtype=np.complex128).ravel()
    norm = float(np.linalg.norm(v))
    if abs(norm - 1.0) > 1e-12:
        raise ValueError("v must be a unit vector")
    replicas = int(replicas)
    if replicas < 1:
        raise ValueError("need at least one replica")
    if stream is None:
        stream = SeedStream(0, 0)
    shifts = [complex(s) for s in shifts]
    counts = np.zeros(len(shifts), dtype=np.int64)
    done = 0
    while done < replicas:
        batch = min(chunk, replicas - done)
        xi = sample_atom(dist, stream, size=(batch, len(v)))
        dots = np.asarray(xi, dtype=np.complex128) @ v
        for i, z in enumerate(shifts):
            counts[i] += int(np.count_nonzero(np.abs(dots - z) < c))
        done += batch
    fractions = counts / replicas
    worst = int(np.argmax(fractions))
    p = float(fractions[worst])
    var = max(p * (1.0 - p), 1.0 / (4.0 * replicas))
    halfwidth = math.sqrt(var / (_CHEBYSHEV_DELTA * replicas))
    return p, halfwidth
