"""Tour of the block linearization of a matrix product.

A product of M factors embeds in an Mn x Mn block matrix Y whose M-th
power is block-diagonal with the (cyclically rotated) product in each
block.  Three consequences, each checked numerically below:

  1. the Hermitian doubling [[0, Y(z)], [Y(z)^*, 0]] has spectrum equal
     to plus/minus the singular values of Y(z),
  2. the eigenvalues of Y are exactly the M-th roots of the product's
     eigenvalues, so the spectrum is invariant under rotation by
     exp(2 pi i / M),
  3. smallest singular values of Y(z) and of (P - z^M)/z^(M-1) move
     together, which is why the linearization controls the product.

Run:  python3 demos/linearization_tour.py
"""

import numpy as np

from rmtlab.ensembles import ProductSpec, SeedStream, atom, sample_product
from rmtlab.linearize import (
    build_linearization,
    hermitized_linearization,
    mth_root_process,
)
from rmtlab.numlin import singular_values, smallest_singular_value


def main():
    n, m = 12, 3
    spec = ProductSpec(n=n, m_factors=m, atoms=atom("complex-gaussian"))
    factors, product = sample_product(spec, SeedStream(99, 0))
    z = 0.3 + 0.2j

    # 1. Hermitian doubling: spectrum is {+s} U {-s} for singular values s
    w = hermitized_linearization(factors, z)
    herm_eigs = np.sort(np.linalg.eigvalsh(w))
    svals = singular_values(build_linearization(factors, z))
    mirrored = np.sort(np.concatenate([svals, -svals]))
    print(f"hermitized linearization, M={m}, n={n}, size {2 * m * n}")
    print(f"  max |eig - (+/- singular value)| = {np.max(np.abs(herm_eigs - mirrored)):.3e}")

    # 2. M-th root structure of the linearization spectrum
    roots = mth_root_process(factors).eigenvalues
    prod_eigs = np.sort_complex(np.linalg.eigvals(product))
    powered = np.sort_complex(roots**m)
    # each product eigenvalue appears M times among the powered roots
    repeated = np.sort_complex(np.repeat(prod_eigs, m))
    print(f"  max |root^{m} - product eigenvalue| = {np.max(np.abs(powered - repeated)):.3e}")
    rotated = np.sort_complex(roots * np.exp(2j * np.pi / m))
    print(f"  rotation by exp(2 pi i/{m}) permutes the spectrum: "
          f"max multiset gap = {np.max(np.abs(np.sort_complex(roots) - rotated)):.3e}")

    # 3. linearized vs product-side small singular value at a bulk point
    sig_lin = smallest_singular_value(build_linearization(factors, z))
    zm = z**m
    sig_prod = smallest_singular_value(product - zm * np.eye(n)) / abs(z) ** (m - 1)
    print(f"  sigma_min comparison at z={z}:")
    print(f"    linearized Y(z): {sig_lin:.6f}")
    print(f"    product side (P - z^{m})/|z|^{m - 1}: {sig_prod:.6f}  "
          f"(ratio {sig_prod / sig_lin:.2f})")


if __name__ == "__main__":
    main()
