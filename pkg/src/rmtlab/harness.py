"""Config-driven experiment runner.

Each experiment maps a Monte Carlo or exact computation to a pass/fail
record with per-replica rows.  Replicas are independent pure tasks keyed
by (master_seed, replica_index); results are reduced in index order, so
the worker count never changes any recorded value and reruns with the
same config produce identical CSV bytes.
"""

import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields, field

import numpy as np

from . import __version__
from .config import ConfigError, ExperimentConfig
from .ensembles import (
    ProductSpec,
    SeedStream,
    TruncatedUnitarySpec,
    atom,
    sample_iid_matrix,
    sample_product,
    sample_truncated_product,
)
from .linearize import build_linearization, mth_root_process
from .numlin import (
    NumericalFailure,
    eigenvalues,
    singular_values,
    smallest_singular_value,
)
from .dpp_exact import (
    MonomialTuple,
    circular_law_radial_cdf,
    cumulant,
    ginibre_product,
    phi_asymptotic,
    phi_m,
    trunc_radial_cdf,
    truncated_unitary,
)
from .spectra_stats import (
    empirical_cumulants,
    girko_residual,
    linear_statistic,
    predicted_variance_ginibre,
    predicted_variance_trunc,
    smoothed_correlation,
    stieltjes_swap_residual,
)
from .testfuncs import (
    LaurentPolynomial,
    RadialBump,
    RadialWindow,
    abs_power,
    im_power,
    re_power,
)

__all__ = [
    "ExperimentRecord",
    "FailureBudgetError",
    "VERSION_STRING",
    "parse_test_function",
    "run_circular_law",
    "run_clt",
    "run_least_sv",
    "run_cumulants",
    "run_universality",
    "run_sv_profile",
    "run_girko_and_swap",
    "run_experiment",
    "write_record",
]

VERSION_STRING = f"rmtlab-v{__version__}"

HISTOGRAM_BINS = 40

# disjoint seed-stream blocks so paired ensembles never share a stream
STREAM_BLOCK = 1_000_000


class FailureBudgetError(RuntimeError):
    """Raised when more replicas fail numerically than the budget allows."""


@dataclass
class ExperimentRecord:
    """One finished experiment: rows, summary metrics, verdict."""

    config: ExperimentConfig
    columns: tuple
    rows: list
    metrics: dict
    passed: bool
    runtime_seconds: float
    failures: list = field(default_factory=list)
    version: str = VERSION_STRING


def parse_test_function(text):
    """Build a test function from its config spec string.

    Forms: ``re:P`` / ``im:P`` / ``abs:P`` (Laurent monomial statistics),
    ``const:C``, and ``bump:R1,R2[,WIDTH]`` for the C^2 radial bump.
    """
    kind, _, arg = text.strip().partition(":")
    kind = kind.strip().lower()
    try:
        if kind == "re":
            return re_power(int(arg))
        if kind == "im":
            return im_power(int(arg))
        if kind == "abs":
            return abs_power(int(arg))
        if kind == "const":
            return LaurentPolynomial({(0, 0): float(arg)})
        if kind == "bump":
            parts = [float(p) for p in arg.split(",")]
            if len(parts) == 2:
                return RadialBump(parts[0], parts[1])
            if len(parts) == 3:
                return RadialBump(parts[0], parts[1], width=parts[2])
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"bad test function spec {text!r}: {exc}") from exc
    raise ConfigError(f"unknown test function spec {text!r}")


def _ensemble_description(cfg):
    if cfg.tau is not None:
        return f"truncated-unitary(tau={cfg.tau!r}, m={cfg.m})"
    return f"iid({cfg.atoms}, m={cfg.m})"


def _sample_factors(cfg, stream, n=None):
    """Raw factors and normalized product for the configured ensemble."""
    n = cfg.n if n is None else n
    if cfg.tau is not None:
        spec = TruncatedUnitarySpec(n=n, m_factors=cfg.m, tau=cfg.tau)
        return sample_truncated_product(spec, stream)
    spec = ProductSpec(n=n, m_factors=cfg.m, atoms=atom(cfg.atoms))
    return sample_product(spec, stream)


def _run_replicas(cfg, indices, task):
    """Run task(i) over indices in a pool; reduce in index order.

    NumericalFailure in a task is counted, not raised; once the failed
    fraction exceeds the budget the whole run aborts.
    """
    def safe(i):
        try:
            return i, task(i), None
        except NumericalFailure as exc:
            return i, None, str(exc)

    if cfg.workers <= 1:
        outcomes = [safe(i) for i in indices]
    else:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            outcomes = list(pool.map(safe, indices))
    results = [(i, r) for i, r, err in outcomes if err is None]
    failures = [(i, err) for i, r, err in outcomes if err is not None]
    if len(failures) > cfg.failure_budget * len(indices):
        raise FailureBudgetError(
            f"{len(failures)} of {len(indices)} replicas failed numerically"
            f" (budget {cfg.failure_budget:.1%})"
        )
    return results, failures


def _ks_distance(values, cdf):
    """Kolmogorov-Smirnov distance of a sample against a CDF callable."""
    r = np.sort(np.asarray(values, dtype=float))
    f = np.asarray(cdf(r), dtype=float)
    k = r.size
    steps = np.arange(1, k + 1, dtype=float) / k
    return float(max(np.max(steps - f), np.max(f - (steps - 1.0 / k))))


def _standard_error(values):
    values = np.asarray(values, dtype=float)
    if values.size < 2:
        return float("inf")
    return float(np.std(values, ddof=1) / math.sqrt(values.size))


# ----------------------------------------------------------------- runs


def run_circular_law(cfg):
    """Pooled radial law of the normalized product spectrum vs the CDF."""
    t0 = time.perf_counter()

    def task(i):
        _, product = _sample_factors(cfg, SeedStream(cfg.master_seed, i))
        return eigenvalues(product)

    results, failures = _run_replicas(cfg, range(cfg.replicas), task)
    rows = []
    radii = []
    for i, eigs in results:
        for lam in eigs:
            rows.append((i, float(lam.real), float(lam.imag)))
        radii.append(np.abs(eigs))
    pooled = np.concatenate(radii)
    if cfg.tau is not None:
        cdf = lambda r: trunc_radial_cdf(r, cfg.tau, cfg.m)
        edge = (1.0 + cfg.tau) ** (-cfg.m / 2.0)
        law = "truncated"
    else:
        cdf = lambda r: circular_law_radial_cdf(r, cfg.m)
        edge = 1.0
        law = "circular"
        # finite-n overshoot past the unit circle carries no CDF mass
        pooled = np.minimum(pooled, 1.0)
    ks = _ks_distance(pooled, cdf)
    counts, edges = np.histogram(pooled, bins=HISTOGRAM_BINS, range=(0.0, 1.0))
    metrics = {
        "ensemble": _ensemble_description(cfg),
        "scale_regime": "normalized",
        "law": law,
        "edge_radius": edge,
        "pooled_count": int(pooled.size),
        "ks_distance": ks,
        "ks_threshold": cfg.ks_threshold,
        "histogram_edges": [float(e) for e in edges],
        "histogram_counts": [int(c) for c in counts],
    }
    passed = ks < cfg.ks_threshold
    return ExperimentRecord(
        cfg, ("replica", "re", "im"), rows, metrics, passed,
        time.perf_counter() - t0, failures,
    )


def run_clt(cfg):
    """Linear eigenvalue statistics: variance vs prediction, k3/k4 vs 0."""
    t0 = time.perf_counter()
    f = parse_test_function(cfg.test_function)
    if cfg.replicas < 8:
        raise ConfigError("clt needs at least 8 replicas for the k-statistics")

    if isinstance(f, LaurentPolynomial):
        if cfg.tau is not None:
            predicted = predicted_variance_trunc(f, cfg.tau, cfg.m)
        else:
            predicted = predicted_variance_ginibre(f)
    else:
        predicted = None   # bump statistics carry no closed-form target

    def task(i):
        _, product = _sample_factors(cfg, SeedStream(cfg.master_seed, i))
        return linear_statistic(eigenvalues(product), f)

    results, failures = _run_replicas(cfg, range(cfg.replicas), task)
    rows = [(i, v) for i, v in results]
    values = np.array([v for _, v in results])
    cums = empirical_cumulants(values, 4)
    (mean, mean_hw), (k2, k2_hw), (k3, k3_hw), (k4, k4_hw) = cums

    if predicted is None:
        var_ok = None
    elif predicted <= cfg.zero_floor:
        var_ok = bool(abs(k2) <= cfg.zero_floor)
    else:
        var_ok = bool(abs(k2 - predicted) <= cfg.variance_window * predicted)
    normal_ok = bool(abs(k3) <= k3_hw and abs(k4) <= k4_hw)
    metrics = {
        "ensemble": _ensemble_description(cfg),
        "scale_regime": "normalized",
        "test_function": cfg.test_function,
        "mean": mean, "mean_halfwidth": mean_hw,
        "variance": k2, "variance_halfwidth": k2_hw,
        "k3": k3, "k3_halfwidth": k3_hw,
        "k4": k4, "k4_halfwidth": k4_hw,
        "predicted_variance": predicted,
        "variance_window": cfg.variance_window,
        "variance_ok": var_ok,
        "normality_ok": normal_ok,
    }
    passed = (var_ok is not False) and normal_ok
    return ExperimentRecord(
        cfg, ("replica", "value"), rows, metrics, passed,
        time.perf_counter() - t0, failures,
    )


def run_least_sv(cfg):
    """Smallest singular value of the shifted linearization, raw scale.

    The probe point is |z| = rho sqrt(n); rho = 0 is the out-of-regime
    single-matrix control, recorded but not gated.
    """
    t0 = time.perf_counter()
    grid = tuple(cfg.n_grid) or (64, 128, 256)
    gated = cfg.rho > 0.0
    rows = []
    all_failures = []
    per_n = []
    for g, n in enumerate(grid):
        z = cfg.rho * math.sqrt(n) * complex(
            math.cos(cfg.z_angle), math.sin(cfg.z_angle))
        zm = z ** cfg.m
        corollary_scale = abs(z) ** (cfg.m - 1) if abs(z) > 0 else 1.0

        def task(i, n=n, z=z, zm=zm, s=corollary_scale):
            stream = SeedStream(cfg.master_seed, g * STREAM_BLOCK + i)
            factors, _ = _sample_factors(cfg, stream, n=n)
            y = build_linearization(factors, z=z, scale="raw")
            sigma_lin = smallest_singular_value(y)
            prod = factors[0].copy()
            for x in factors[1:]:
                prod = prod @ x
            prod[np.diag_indices(n)] -= zm
            sigma_prod = smallest_singular_value(prod) / s
            return sigma_lin, sigma_prod

        results, failures = _run_replicas(cfg, range(cfg.replicas), task)
        all_failures.extend((f"n={n}", i, err) for i, err in failures)
        lin = np.array([r[0] for _, r in results])
        prod = np.array([r[1] for _, r in results])
        for (i, _), sl, sp in zip(results, lin, prod):
            rows.append((n, i, float(sl), float(sp)))
        threshold = n ** (-0.5 - cfg.big_a)
        ratio_med = float(np.median(prod / lin))
        bound = n ** cfg.corollary_exponent
        per_n.append({
            "n": n,
            "tail_threshold": threshold,
            "tail_fraction": float(np.mean(lin <= threshold)),
            "median_scaled": float(np.median(lin) * math.sqrt(n)),
            "median_ratio_prod_over_lin": ratio_med,
            "ratio_ok": bool(1.0 / bound <= ratio_med <= bound),
        })

    # decay exponent of the tail fraction, fitted where tails are nonempty
    ns = np.array([e["n"] for e in per_n], dtype=float)
    tails = np.array([e["tail_fraction"] for e in per_n])
    positive = tails > 0
    if int(np.sum(positive)) >= 2:
        slope = np.polyfit(np.log(ns[positive]), np.log(tails[positive]), 1)[0]
        exponent = float(slope)
    else:
        exponent = None
    tail_monotone = all(
        per_n[j + 1]["tail_fraction"] <= per_n[j]["tail_fraction"]
        for j in range(len(per_n) - 1)
    )
    band_ok = all(
        cfg.band_lo <= e["median_scaled"] <= cfg.band_hi for e in per_n
    )
    ratios_ok = all(e["ratio_ok"] for e in per_n)
    # diagnostic only: how much the ratio moves across the grid
    medians = [e["median_ratio_prod_over_lin"] for e in per_n]
    ratio_drift = max(medians) / min(medians) if min(medians) > 0 else None
    metrics = {
        "ensemble": _ensemble_description(cfg),
        "scale_regime": "raw",
        "rho": cfg.rho,
        "big_a": cfg.big_a,
        "n_grid": list(grid),
        "per_n": per_n,
        "tail_fraction_nonincreasing": tail_monotone,
        "median_band": [cfg.band_lo, cfg.band_hi],
        "median_band_ok": band_ok,
        "corollary_ratio_ok": ratios_ok,
        "ratio_drift": ratio_drift,
        "fitted_tail_exponent": exponent,
        "gated": gated,
    }
    passed = (tail_monotone and band_ok and ratios_ok) if gated else True
    return ExperimentRecord(
        cfg, ("n", "replica", "sigma_lin", "sigma_prod"), rows, metrics,
        passed, time.perf_counter() - t0, all_failures,
    )


def _balanced_probe_tuples(max_m=3, max_entry=2):
    """All balanced nonzero index tuples with m <= max_m, entries <= max_entry."""
    out = []
    rng = range(max_entry + 1)
    for m in range(1, max_m + 1):
        def tuples(depth):
            if depth == 0:
                yield ()
                return
            for head in rng:
                for rest in tuples(depth - 1):
                    yield (head,) + rest
        for alphas in tuples(m):
            for betas in tuples(m):
                if sum(alphas) == sum(betas) and sum(alphas) > 0:
                    out.append((alphas, betas))
    return out


def run_cumulants(cfg):
    """Exact cumulants over an n-grid: decay, limit match, asymptotics."""
    t0 = time.perf_counter()
    f = parse_test_function(cfg.test_function)
    if not isinstance(f, LaurentPolynomial):
        raise ConfigError("cumulant runs need a polynomial test function")
    terms = dict(f.terms)
    grid = tuple(cfg.n_grid) or (16, 32, 64, 128, 256)

    def kind_at(n):
        if cfg.tau is not None:
            return truncated_unitary(n, cfg.m, tau=cfg.tau)
        return ginibre_product(n, cfg.m)

    rows = []
    table = {2: [], 3: [], 4: []}
    for n in grid:
        kind = kind_at(n)
        for order in (2, 3, 4):
            value = cumulant(order, terms, kind)
            rows.append((n, order, value))
            table[order].append(value)

    def decay_ok(values):
        ok = True
        for prev, cur in zip(values, values[1:]):
            if abs(cur) <= cfg.zero_floor:
                continue
            if abs(prev) <= cfg.zero_floor:
                ok = False
                continue
            if abs(prev) / abs(cur) < cfg.decay_factor:
                ok = False
        return ok

    decay = {
        order: {
            "values": table[order],
            "ok": decay_ok(table[order]),
        }
        for order in (3, 4)
    }

    if cfg.tau is not None:
        limit = predicted_variance_trunc(f, cfg.tau, cfg.m)
    else:
        limit = predicted_variance_ginibre(f)
    c2_at_check = cumulant(2, terms, kind_at(cfg.c2_check_n))
    c2_gap = abs(c2_at_check - limit)
    c2_ok = c2_gap <= cfg.cov_tolerance / cfg.c2_check_n

    asym = None
    if cfg.tau is None:
        worst = 0.0
        probe_ns = (64, 256, 1024)
        for alphas, betas in _balanced_probe_tuples():
            tup = MonomialTuple(alphas, betas)
            for n in probe_ns:
                kind = ginibre_product(n, cfg.m)
                gap = abs(phi_m(tup, kind) - phi_asymptotic(tup, kind))
                worst = max(worst, n * gap)
        asym = {
            "probe_ns": list(probe_ns),
            "fitted_constant": worst,
            "max_constant": cfg.asym_const_max,
            "ok": worst <= cfg.asym_const_max,
        }

    metrics = {
        "ensemble": _ensemble_description(cfg),
        "test_function": cfg.test_function,
        "n_grid": list(grid),
        "zero_floor": cfg.zero_floor,
        "decay_factor": cfg.decay_factor,
        "decay": decay,
        "c2_check_n": cfg.c2_check_n,
        "c2_value": c2_at_check,
        "c2_limit": limit,
        "c2_gap": c2_gap,
        "c2_ok": c2_ok,
        "asymptotics": asym,
    }
    passed = (
        decay[3]["ok"] and decay[4]["ok"] and c2_ok
        and (asym is None or asym["ok"])
    )
    return ExperimentRecord(
        cfg, ("n", "order", "value"), rows, metrics, passed,
        time.perf_counter() - t0, [],
    )


def _local_law_target(bump, center, d, n, m_factors):
    """integral of f(n^d (z - center)) against the product density.

    Polar quadrature in the rescaled variable; the density
    |z|^(2/M - 2) / (M pi) vanishes outside the unit disc.
    """
    scale = float(n) ** (-d)
    nodes, weights = np.polynomial.legendre.leggauss(160)
    r1, r2 = bump.support
    radii = 0.5 * (r2 - r1) * (nodes + 1.0) + r1
    rw = 0.5 * (r2 - r1) * weights
    angles = np.linspace(0.0, 2.0 * np.pi, 512, endpoint=False)
    pts = center + scale * radii[:, None] * np.exp(1j * angles[None, :])
    mod = np.abs(pts)
    dens = np.zeros_like(mod)
    inside = mod < 1.0
    with np.errstate(divide="ignore"):
        dens[inside] = (
            mod[inside] ** (2.0 / m_factors - 2.0) / (m_factors * np.pi)
        )
    angular = dens.mean(axis=1) * 2.0 * np.pi
    g = bump.profile(radii)
    return float(scale ** 2 * np.sum(rw * g * radii * angular))


def run_universality(cfg):
    """Smoothed local statistics of two moment-matched iid ensembles."""
    t0 = time.perf_counter()
    if cfg.tau is not None:
        raise ConfigError("universality compares iid ensembles; unset tau")
    dist_a, dist_b = atom(cfg.atoms), atom(cfg.atoms_b)
    for a in range(5):
        for b in range(5 - a):
            gap = abs(dist_a.mixed_moment(a, b) - dist_b.mixed_moment(a, b))
            if gap > cfg.moment_match_tol:
                raise ConfigError(
                    f"atom moment mismatch at (a={a}, b={b}): {gap:.3e} "
                    f"exceeds {cfg.moment_match_tol:.1e}; refusing to run"
                )

    n, m = cfg.n, cfg.m
    window = RadialWindow(cfg.window_radius)
    centers = [
        r * math.sqrt(n) * complex(math.cos(th), math.sin(th))
        for r, th in zip(cfg.center_radii, cfg.center_angles)
    ]
    bump = RadialBump(0.25, 0.75)
    d = cfg.local_law_d
    w0 = cfg.rho * complex(math.cos(cfg.z_angle), math.sin(cfg.z_angle))
    if cfg.rho == 0.0:
        raise ConfigError("universality needs a nonzero bulk point rho")
    target = _local_law_target(bump, w0, d, n, m)
    tolerance = cfg.local_law_const * (m * n) ** (-1.0 + 2.0 * d) \
        * bump.laplacian_abs_integral()
    rescale = float(n) ** d

    def make_task(kind, offset):
        spec = ProductSpec(n=n, m_factors=m, atoms=atom(kind))

        def task(i):
            stream = SeedStream(cfg.master_seed, offset + i)
            factors, product = sample_product(spec, stream)
            roots = mth_root_process(factors, scale="raw")
            sums = [
                float(np.sum(window.evaluate(roots.eigenvalues - c)))
                for c in centers
            ]
            mu = eigenvalues(product)
            local = float(np.mean(bump.evaluate(rescale * (mu - w0))))
            return roots, sums, local
        return task

    results_a, fail_a = _run_replicas(
        cfg, range(cfg.replicas), make_task(cfg.atoms, 0))
    results_b, fail_b = _run_replicas(
        cfg, range(cfg.replicas), make_task(cfg.atoms_b, STREAM_BLOCK))
    failures = [("a", i, e) for i, e in fail_a]
    failures += [("b", i, e) for i, e in fail_b]

    rows = []
    for label, results in (("a", results_a), ("b", results_b)):
        for i, (_, sums, local) in results:
            for c_idx, s in enumerate(sums):
                rows.append((i, label, f"smoothed_center_{c_idx}", s))
            rows.append((i, label, "local_product", local))

    samples_a = [r for _, (r, _, _) in results_a]
    samples_b = [r for _, (r, _, _) in results_b]
    center_metrics = []
    centers_ok = True
    for c_idx, c in enumerate(centers):
        est_a = smoothed_correlation(samples_a, window, [c], k=1)
        est_b = smoothed_correlation(samples_b, window, [c], k=1)
        vals_a = np.array([s[c_idx] for _, (_, s, _) in results_a])
        vals_b = np.array([s[c_idx] for _, (_, s, _) in results_b])
        se = math.hypot(_standard_error(vals_a), _standard_error(vals_b))
        diff = est_a.value - est_b.value
        ok = abs(diff) <= 2.0 * se
        centers_ok = centers_ok and ok
        center_metrics.append({
            "center_re": c.real, "center_im": c.imag,
            "mean_a": est_a.value, "halfwidth_a": est_a.halfwidth,
            "mean_b": est_b.value, "halfwidth_b": est_b.halfwidth,
            "difference": diff, "combined_sigma": se,
            "ok": ok,
        })

    local_a = float(np.mean([v for _, (_, _, v) in results_a]))
    local_b = float(np.mean([v for _, (_, _, v) in results_b]))
    local_ok = (
        abs(local_a - target) <= tolerance
        and abs(local_b - target) <= tolerance
    )
    metrics = {
        "ensemble_a": cfg.atoms,
        "ensemble_b": cfg.atoms_b,
        "scale_regime": "raw roots / normalized product",
        "window_radius": cfg.window_radius,
        "centers": center_metrics,
        "centers_ok": centers_ok,
        "local_law": {
            "d": d,
            "center_re": w0.real, "center_im": w0.imag,
            "statistic_a": local_a, "statistic_b": local_b,
            "target": target, "tolerance": tolerance,
            "ok": local_ok,
        },
    }
    passed = centers_ok and local_ok
    return ExperimentRecord(
        cfg, ("replica", "ensemble", "statistic", "value"), rows, metrics,
        passed, time.perf_counter() - t0, failures,
    )


def run_sv_profile(cfg):
    """Intermediate singular values of one raw iid factor vs the bound."""
    t0 = time.perf_counter()
    if cfg.m != 1:
        raise ConfigError("sv-profile uses a single factor; set m = 1")
    if cfg.tau is not None:
        raise ConfigError("sv-profile uses an iid factor; unset tau")
    n = cfg.n
    dist = atom(cfg.atoms)
    exponents = tuple(cfg.profile_exponents)

    def task(i):
        x = sample_iid_matrix(n, dist, SeedStream(cfg.master_seed, i))
        return singular_values(x)

    results, failures = _run_replicas(cfg, range(cfg.replicas), task)
    rows = []
    per_exponent = {e: [] for e in exponents}
    for i, svs in results:
        for e in exponents:
            k = math.ceil(n ** (1.0 - e))
            sigma_k = float(svs[k - 1])          # ascending order
            bound = cfg.c0 * n ** (0.5 - e)
            ok = sigma_k >= bound
            rows.append((i, e, sigma_k, bound, int(ok)))
            per_exponent[e].append((sigma_k, bound, ok))

    exponent_metrics = []
    all_ok = True
    for e in exponents:
        entries = per_exponent[e]
        frac = float(np.mean([ok for _, _, ok in entries]))
        margin = float(min(s / b for s, b, _ in entries))
        all_ok = all_ok and frac == 1.0
        exponent_metrics.append({
            "exponent": e,
            "rank_index": math.ceil(n ** (1.0 - e)),
            "pass_fraction": frac,
            "min_margin": margin,
        })
    metrics = {
        "ensemble": _ensemble_description(cfg),
        "scale_regime": "raw",
        "c0": cfg.c0,
        "per_exponent": exponent_metrics,
    }
    return ExperimentRecord(
        cfg, ("replica", "exponent", "sigma_k", "bound", "ok"), rows,
        metrics, all_ok, time.perf_counter() - t0, failures,
    )


def run_girko_and_swap(cfg):
    """Log-determinant identity residual and the entry-swap Taylor defect."""
    t0 = time.perf_counter()
    f = parse_test_function(cfg.test_function)
    if not isinstance(f, RadialBump):
        raise ConfigError(
            "girko-swap needs test_function = bump:r1,r2 for the identity"
        )
    if cfg.n > 64:
        raise ConfigError("girko-swap is a small-n check; use n <= 64")
    girko_n = min(cfg.n, 16)
    z = cfg.rho * complex(math.cos(cfg.z_angle), math.sin(cfg.z_angle))
    if cfg.rho == 0.0:
        raise ConfigError("girko-swap needs a nonzero probe point rho")
    t_values = (0.0, cfg.t0 / 2.0, cfg.t0)

    def task(i):
        stream = SeedStream(cfg.master_seed, i)
        g_factors, _ = _sample_factors(cfg, stream, n=girko_n)
        residual = girko_residual(g_factors, f, cfg.grid_resolution)
        s_factors, _ = _sample_factors(
            cfg, SeedStream(cfg.master_seed, STREAM_BLOCK + i))
        rng = stream.gen
        entry = (
            int(rng.integers(0, cfg.m)),
            int(rng.integers(0, cfg.n)),
            int(rng.integers(0, cfg.n)),
        )
        swap = []
        for eta in cfg.etas:
            res = stieltjes_swap_residual(
                s_factors, z, t_values, entry, eta=eta)
            ratio = res[2] / res[1] if res[1] > 0 else float("inf")
            swap.append((eta, float(res[0]), float(res[1]),
                         float(res[2]), float(ratio)))
        return residual, swap

    results, failures = _run_replicas(cfg, range(cfg.replicas), task)
    rows = []
    girko_vals = []
    ratios = []
    zero_rows_ok = True
    for i, (residual, swap) in results:
        rows.append((i, 0.0, "girko_residual", residual))
        girko_vals.append(residual)
        for eta, r0, r_half, r_full, ratio in swap:
            rows.append((i, eta, "swap_residual_t0", r0))
            rows.append((i, eta, "swap_residual_half", r_half))
            rows.append((i, eta, "swap_residual_full", r_full))
            rows.append((i, eta, "swap_ratio", ratio))
            ratios.append(ratio)
            zero_rows_ok = zero_rows_ok and r0 == 0.0
    girko_max = float(max(girko_vals))
    ratio_min, ratio_max = float(min(ratios)), float(max(ratios))
    girko_ok = girko_max < cfg.girko_threshold
    swap_ok = (
        cfg.swap_ratio_lo <= ratio_min
        and ratio_max <= cfg.swap_ratio_hi
    )
    metrics = {
        "ensemble": _ensemble_description(cfg),
        "scale_regime": "normalized",
        "girko_n": girko_n,
        "grid_resolution": cfg.grid_resolution,
        "girko_max_residual": girko_max,
        "girko_threshold": cfg.girko_threshold,
        "girko_ok": girko_ok,
        "swap_n": cfg.n,
        "swap_t0": cfg.t0,
        "swap_etas": list(cfg.etas),
        "swap_ratio_min": ratio_min,
        "swap_ratio_max": ratio_max,
        "swap_ratio_band": [cfg.swap_ratio_lo, cfg.swap_ratio_hi],
        "swap_zero_residual_ok": zero_rows_ok,
        "swap_ok": swap_ok,
    }
    passed = girko_ok and swap_ok and zero_rows_ok
    return ExperimentRecord(
        cfg, ("replica", "eta", "metric", "value"), rows, metrics, passed,
        time.perf_counter() - t0, failures,
    )


RUNNERS = {
    "circular-law": run_circular_law,
    "clt": run_clt,
    "least-sv": run_least_sv,
    "cumulants": run_cumulants,
    "universality": run_universality,
    "sv-profile": run_sv_profile,
    "girko-swap": run_girko_and_swap,
}


def run_experiment(cfg):
    """Dispatch the configured experiment."""
    return RUNNERS[cfg.experiment](cfg)


def _cell(value):
    # plain-float repr is the shortest exact round-trip form
    if isinstance(value, float):
        return repr(float(value))
    return str(value)


def _config_dict(cfg):
    out = {}
    for f in fields(ExperimentConfig):
        v = getattr(cfg, f.name)
        out[f.name] = list(v) if isinstance(v, tuple) else v
    return out


def write_record(record):
    """Write replicas.csv and summary.json under <out>/<experiment>/.

    The CSV bytes are a pure function of the config; summary.json adds
    the wall-clock time on top of the deterministic content.
    """
    cfg = record.config
    out_dir = os.path.join(cfg.out, cfg.experiment)
    os.makedirs(out_dir, exist_ok=True)
    csv_path = os.path.join(out_dir, "replicas.csv")
    lines = [",".join(record.columns)]
    lines.extend(
        ",".join(_cell(v) for v in row) for row in record.rows
    )
    with open(csv_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    summary = {
        "config": _config_dict(cfg),
        "metrics": record.metrics,
        "pass": record.passed,
        "runtime_seconds": record.runtime_seconds,
        "version": record.version,
        "failures": [list(f) for f in record.failures],
    }
    json_path = os.path.join(out_dir, "summary.json")
    with open(json_path, "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2, allow_nan=False)
        fh.write("\n")
    return csv_path, json_path
