"""Atom laws, seed streams, and factor/product samplers."""

import math

import numpy as np
import pytest

from rmtlab.ensembles import (
    ATOM_KINDS,
    AtomDistribution,
    ProductSpec,
    SeedStream,
    TruncatedUnitarySpec,
    atom,
    sample_atom,
    sample_haar_unitary,
    sample_iid_matrix,
    sample_product,
    sample_truncated_product,
)


def test_atom_kind_roster():
    assert set(ATOM_KINDS) == {
        "complex-gaussian",
        "real-gaussian",
        "rademacher",
        "four-moment-real",
        "four-moment-complex",
        "zero",
    }
    for kind in ATOM_KINDS:
        assert atom(kind).kind == kind


def test_unknown_atom_kind_rejected():
    with pytest.raises(ValueError):
        atom("cauchy")
    with pytest.raises(ValueError):
        AtomDistribution("cauchy")


def test_support_probabilities_validated():
    with pytest.raises(ValueError):
        AtomDistribution("rademacher", ((-1.0, 0.7), (1.0, 0.7)))


def test_unit_variance_and_centering():
    for kind in ATOM_KINDS:
        if kind == "zero":
            continue
        d = atom(kind)
        assert d.mixed_moment(1, 0) == 0.0
        assert d.mixed_moment(0, 1) == 0.0
        # E|xi|^2 = E Re^2 + E Im^2 = 1
        assert d.mixed_moment(2, 0) + d.mixed_moment(0, 2) == 1.0


def test_complex_gaussian_moments():
    d = atom("complex-gaussian")
    assert d.mixed_moment(2, 0) == 0.5
    assert d.mixed_moment(0, 2) == 0.5
    assert d.mixed_moment(4, 0) == 0.75
    assert d.mixed_moment(2, 2) == 0.25
    assert d.mixed_moment(1, 1) == 0.0
    assert d.mixed_moment(3, 1) == 0.0


def test_real_gaussian_moments():
    d = atom("real-gaussian")
    assert d.mixed_moment(2, 0) == 1.0
    assert d.mixed_moment(4, 0) == 3.0
    assert d.mixed_moment(6, 0) == 15.0
    for b in (1, 2, 3):
        assert d.mixed_moment(0, b) == 0.0
        assert d.mixed_moment(2, b) == 0.0


def test_rademacher_moments():
    d = atom("rademacher")
    for a in range(7):
        expected = 1.0 if a % 2 == 0 else 0.0
        assert d.mixed_moment(a, 0) == expected
        if a > 0:
            assert d.mixed_moment(0, a) == 0.0


def test_four_moment_real_matches_gaussian_exactly():
    three = atom("four-moment-real")
    gauss = atom("real-gaussian")
    for a in range(5):
        for b in range(5 - a):
            assert three.mixed_moment(a, b) == gauss.mixed_moment(a, b)
    # fourth moment is 3, matching N(0, 1), and the sixth must differ
    assert three.mixed_moment(4, 0) == 3.0
    assert three.mixed_moment(6, 0) != gauss.mixed_moment(6, 0)


def test_four_moment_complex_matches_gaussian_exactly():
    three = atom("four-moment-complex")
    gauss = atom("complex-gaussian")
    for a in range(5):
        for b in range(5 - a):
            assert three.mixed_moment(a, b) == gauss.mixed_moment(a, b)


def test_four_moment_complex_support_is_nine_products():
    d = atom("four-moment-complex")
    assert d.is_discrete and d.is_complex
    assert len(d.support) == 9
    assert abs(sum(p for _, p in d.support) - 1.0) < 1e-15
    s = math.sqrt(1.5)
    values = {complex(v) for v, _ in d.support}
    expected = {
        complex(vr, vi) for vr in (-s, 0.0, s) for vi in (-s, 0.0, s)
    }
    # the stored support spans the product of the two three-point parts,
    # each of variance 1/2, so coordinates sit at 0 and +-sqrt(3/2)
    assert {
        (round(v.real, 12), round(v.imag, 12)) for v in values
    } == {(round(v.real, 12), round(v.imag, 12)) for v in expected}


def test_discrete_moment_agrees_with_support_average():
    d = atom("four-moment-real")
    for a in (2, 4):
        averaged = sum(p * complex(v).real ** a for v, p in d.support)
        assert abs(d.mixed_moment(a, 0) - averaged) < 1e-12


def test_zero_atom():
    d = atom("zero")
    assert d.mixed_moment(0, 0) == 1.0
    assert d.mixed_moment(2, 0) == 0.0
    x = sample_atom(d, SeedStream(1), size=10)
    assert np.all(x == 0)


def test_seed_stream_reproducible_and_distinct():
    a1 = sample_atom(atom("complex-gaussian"), SeedStream(7, 3), size=100)
    a2 = sample_atom(atom("complex-gaussian"), SeedStream(7, 3), size=100)
    b = sample_atom(atom("complex-gaussian"), SeedStream(7, 4), size=100)
    c = sample_atom(atom("complex-gaussian"), SeedStream(8, 3), size=100)
    assert np.array_equal(a1, a2)
    assert not np.array_equal(a1, b)
    assert not np.array_equal(a1, c)


def test_seed_stream_validation():
    with pytest.raises(ValueError):
        SeedStream(-1)
    with pytest.raises(ValueError):
        SeedStream(0, -2)


def test_sample_atom_scalar_and_shape():
    d = atom("rademacher")
    x = sample_atom(d, SeedStream(0))
    assert np.ndim(x) == 0
    y = sample_atom(d, SeedStream(0), size=(3, 4))
    assert y.shape == (3, 4)
    assert set(np.unique(np.asarray(y).real)) <= {-1.0, 1.0}


def test_sample_iid_matrix_dtype_and_realness():
    m = sample_iid_matrix(8, atom("complex-gaussian"), SeedStream(2))
    assert m.shape == (8, 8)
    assert m.dtype == np.complex128
    assert m.flags["C_CONTIGUOUS"]
    r = sample_iid_matrix(8, atom("real-gaussian"), SeedStream(2))
    assert np.all(r.imag == 0)


def test_empirical_moments_track_exact_ones():
    stream = SeedStream(123)
    for kind in ("complex-gaussian", "four-moment-complex", "rademacher"):
        d = atom(kind)
        x = np.asarray(sample_atom(d, stream, size=200000))
        emp = np.mean(np.abs(x) ** 2)
        assert abs(emp - 1.0) < 0.02
        emp4 = np.mean(x.real ** 4)
        assert abs(emp4 - d.mixed_moment(4, 0)) < 0.05


def test_haar_unitary_is_unitary_and_reproducible():
    u = sample_haar_unitary(30, SeedStream(5))
    assert np.max(np.abs(u @ u.conj().T - np.eye(30))) < 1e-12
    assert abs(abs(np.linalg.det(u)) - 1.0) < 1e-10
    again = sample_haar_unitary(30, SeedStream(5))
    assert np.array_equal(u, again)


def test_haar_unitary_first_entry_statistics():
    # |u_00|^2 has mean 1/k under the invariant distribution
    k = 8
    vals = [
        abs(sample_haar_unitary(k, SeedStream(11, i))[0, 0]) ** 2
        for i in range(400)
    ]
    assert abs(np.mean(vals) - 1.0 / k) < 0.02


def test_product_spec_broadcast_and_validation():
    spec = ProductSpec(16, 3, atom("complex-gaussian"))
    assert len(spec.atoms) == 3
    with pytest.raises(ValueError):
        ProductSpec(16, 2, (atom("zero"),) * 3)
    with pytest.raises(ValueError):
        ProductSpec(16, 2, atom("zero"), normalization="banana")
    with pytest.raises(ValueError):
        ProductSpec(0, 2, atom("zero"))


def test_sample_product_scaling_and_factors():
    spec_raw = ProductSpec(12, 2, atom("complex-gaussian"),
                           normalization="raw")
    spec_norm = ProductSpec(12, 2, atom("complex-gaussian"))
    factors, prod_raw = sample_product(spec_raw, SeedStream(3))
    factors2, prod_norm = sample_product(spec_norm, SeedStream(3))
    assert len(factors) == 2
    assert np.array_equal(factors[0], factors2[0])
    chain = factors[0] @ factors[1]
    assert np.max(np.abs(prod_raw - chain)) < 1e-12
    assert np.max(np.abs(prod_norm - chain / 12.0)) < 1e-12


def test_truncated_spec_kappa_floor():
    spec = TruncatedUnitarySpec(128, 2, 0.6)
    assert spec.kappa == 76
    assert spec.host_dim == 204
    with pytest.raises(ValueError):
        TruncatedUnitarySpec(4, 1, 0.1)  # floor(0.4) = 0


def test_truncated_product_is_contraction():
    spec = TruncatedUnitarySpec(24, 2, 0.8)
    factors, prod = sample_truncated_product(spec, SeedStream(6))
    assert len(factors) == 2
    assert prod.shape == (24, 24)
    for f in factors:
        assert np.linalg.norm(f, 2) <= 1.0 + 1e-10
    assert np.linalg.norm(prod, 2) <= 1.0 + 1e-10
