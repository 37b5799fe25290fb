"""Radial law for products of iid matrices.

Samples the normalized product of M iid matrices at a moderate size and
compares the empirical distribution of |eigenvalue| against the limiting
radial law r^(2/M) on the unit disc.  Doubling M flattens the density
toward the origin; the empirical quantiles track the closed form already
at n = 192.

Run:  python3 demos/radial_law.py
"""

import numpy as np

from rmtlab.dpp_exact import circular_law_radial_cdf
from rmtlab.ensembles import ProductSpec, SeedStream, atom, sample_product


def empirical_radii(n, m, replicas, seed):
    """Pool |eigenvalue| over replicas of the normalized M-fold product."""
    pooled = []
    for i in range(replicas):
        spec = ProductSpec(n=n, m_factors=m, atoms=atom("complex-gaussian"))
        _, product = sample_product(spec, SeedStream(seed, i))
        pooled.append(np.abs(np.linalg.eigvals(product)))
    return np.sort(np.concatenate(pooled))


def main():
    n, replicas, seed = 192, 8, 7
    quantiles = np.array([0.1, 0.25, 0.5, 0.75, 0.9])
    print(f"product radial law, n={n}, {replicas} replicas per M")
    print(f"{'M':>3} {'q':>6} {'empirical':>10} {'limit':>10} {'gap':>9}")
    for m in (1, 2, 3):
        radii = empirical_radii(n, m, replicas, seed)
        # limiting radial CDF is r^(2/M); invert at the probe quantiles
        for q in quantiles:
            emp = radii[int(q * (len(radii) - 1))]
            lim = q ** (m / 2.0)
            print(f"{m:>3} {q:>6.2f} {emp:>10.4f} {lim:>10.4f} {abs(emp - lim):>9.4f}")
        cdf_vals = circular_law_radial_cdf(radii.clip(max=1.0), m)
        ks = np.max(np.abs(cdf_vals - (np.arange(1, len(radii) + 1) / len(radii))))
        print(f"    pooled KS distance vs r^(2/{m}): {ks:.4f}")


if __name__ == "__main__":
    main()
