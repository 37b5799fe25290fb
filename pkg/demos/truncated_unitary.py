"""Products of truncated Haar unitaries.

Cutting the top-left n x n corner out of a Haar unitary of dimension
n + floor(tau n) gives a random contraction; products of M independent
truncations have eigenvalues confined to a disc of radius
(1 + tau)^(-M/2), strictly inside the unit circle.  This demo samples
such a product, compares the empirical radial CDF and low moments
against the exact formulas, and prints the limiting variance of a linear
statistic.

Run:  python3 demos/truncated_unitary.py
"""

import numpy as np

from rmtlab.dpp_exact import expected_monomial, trunc_radial_cdf, truncated_unitary
from rmtlab.ensembles import SeedStream, TruncatedUnitarySpec, sample_truncated_product
from rmtlab.spectra_stats import predicted_variance_trunc
from rmtlab.testfuncs import LaurentPolynomial


def main():
    n, m, tau, replicas, seed = 96, 2, 0.6, 12, 21
    spec = TruncatedUnitarySpec(n=n, m_factors=m, tau=tau)
    pooled = []
    moments = {1: [], 2: []}
    for i in range(replicas):
        _, product = sample_truncated_product(spec, SeedStream(seed, i))
        eigs = np.linalg.eigvals(product)
        pooled.append(np.abs(eigs))
        for big_l in moments:
            moments[big_l].append(np.mean(np.abs(eigs) ** (2 * big_l)))
    radii = np.sort(np.concatenate(pooled))

    edge = (1.0 + tau) ** (-m / 2.0)
    print(f"truncated unitary product, n={n}, M={m}, tau={tau}")
    print(f"  edge radius (1+tau)^(-M/2) = {edge:.4f}")
    print(f"  largest sampled |eigenvalue| = {radii[-1]:.4f}")

    cdf_vals = trunc_radial_cdf(radii, tau, m)
    ks = np.max(np.abs(cdf_vals - np.arange(1, len(radii) + 1) / len(radii)))
    print(f"  KS distance vs exact radial CDF: {ks:.4f}")

    kind = truncated_unitary(n, m, tau=tau)
    for big_l, vals in moments.items():
        exact_n, limit = expected_monomial(big_l, kind)
        mc = np.mean(vals)
        se = np.std(vals, ddof=1) / np.sqrt(replicas)
        print(f"  (1/n) sum |lambda|^{2 * big_l}: MC {mc:.5f} (SE {se:.5f}), "
              f"exact {exact_n:.5f}, limit {limit:.5f}")

    f = LaurentPolynomial({(1, 0): 0.5, (0, 1): 0.5})  # Re z
    print(f"  limiting variance of Re z statistic: "
          f"{predicted_variance_trunc(f, tau, m):.6f}")


if __name__ == "__main__":
    main()
