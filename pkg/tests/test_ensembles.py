import math
import warnings
from itertools import combinations

import numpy as np
import pytest

from syklab import ensembles as en
from syklab.rng import stream

from oracles import dense_monomial


def test_sample_syk_dense_counts():
    h = en.sample_syk(4, 4, 1.0, 7)
    assert len(h.terms) == math.comb(8, 4) == 70
    assert h.normalization == pytest.approx(70 ** -0.5)
    assert h.model == "syk"
    # lexicographic supports, hermitian-canonical phases
    assert [m.indices for _, m in h.terms] == list(
        combinations(range(1, 9), 4)
    )
    assert all(m.phase_quarter == 2 for _, m in h.terms)


def test_sample_syk_determinism_and_replay():
    a = en.sample_syk(4, 4, 0.5, 7)
    b = en.sample_syk(4, 4, 0.5, 7)
    assert a.terms == b.terms
    # replaying the documented stream layout reproduces the kept set exactly
    gen = stream(7, "syk")
    keep = gen.random(70) < 0.5
    normals = gen.standard_normal(70)
    kept_sets = [idx for r, idx in enumerate(combinations(range(1, 9), 4))
                 if keep[r]]
    assert [m.indices for _, m in a.terms] == kept_sets
    norm = 1.0 / math.sqrt(70 * 0.5)
    expected = [norm * normals[r] for r in range(70) if keep[r]]
    assert [c for c, _ in a.terms] == expected


def test_sample_syk_nesting_and_coupling_invariance():
    h5 = en.sample_syk(4, 4, 0.5, 7)
    h8 = en.sample_syk(4, 4, 0.8, 7)
    kept5 = {m.indices for _, m in h5.terms}
    kept8 = {m.indices for _, m in h8.terms}
    assert kept5 <= kept8
    c5, c8 = h5.couplings(), h8.couplings()
    for key in kept5:
        assert c5[key] == pytest.approx(c8[key], abs=0, rel=1e-15)


def test_sample_syk_validation_and_warnings():
    with pytest.raises(ValueError):
        en.sample_syk(4, 3, 1.0, 0)
    with pytest.raises(ValueError):
        en.sample_syk(4, 10, 1.0, 0)
    with pytest.raises(ValueError):
        en.sample_syk(4, 4, 0.0, 0)
    with pytest.raises(ValueError):
        en.sample_syk(4, 4, 1.5, 0)
    with pytest.warns(UserWarning, match="p_min"):
        en.sample_syk(4, 4, 1e-4, 0)


def test_mean_term_count_within_binomial_band():
    n, q, p = 5, 4, 0.3
    total = math.comb(10, 4)
    counts = [len(en.sample_syk(n, q, p, seed).terms) for seed in range(200)]
    mean = np.mean(counts)
    sigma = math.sqrt(total * p * (1 - p))
    assert abs(mean - p * total) <= 3 * sigma / math.sqrt(200)


def test_materialized_hamiltonian_is_hermitian():
    for n, p, seed in ((3, 1.0, 0), (4, 0.6, 3), (5, 0.4, 8)):
        h = en.sample_syk(n, 4, p, seed)
        mat = h.packed.materialize()
        assert np.max(np.abs(mat - mat.conj().T)) < 1e-12
        assert np.max(np.abs(mat.imag - (-mat.imag.T))) < 1e-12


def test_coefficient_variance_matches_normalization():
    n, q, p = 4, 4, 0.5
    coeffs = []
    for seed in range(200):
        h = en.sample_syk(n, q, p, seed)
        coeffs.extend(c for c, _ in h.terms)
    var = np.var(coeffs)
    norm2 = 1.0 / (math.comb(8, 4) * p)
    assert abs(var - norm2) / norm2 < 0.1


def test_sample_two_color_counts_and_register():
    tc = en.sample_two_color(6, 3, 1.0, 1)
    assert [len(t) for t in tc.tau_terms] == [20, 20, 20]
    assert tc.n_majoranas == 12 and tc.n_modes == 6
    assert tc.tau_normalization == pytest.approx(math.comb(6, 3) ** -0.5)
    # per-color counts replay from the seeded stream
    tc2 = en.sample_two_color(6, 4, 0.5, 3)
    gen = stream(3, "two-color")
    keep = gen.random((4, 20)) < 0.5
    assert [len(t) for t in tc2.tau_terms] == keep.sum(axis=1).tolist()


def test_sample_two_color_validation():
    with pytest.raises(ValueError):
        en.sample_two_color(2, 3, 1.0, 0)  # n1 < 3
    with pytest.raises(ValueError):
        en.sample_two_color(5, 3, 1.0, 0)  # odd register
    with pytest.raises(ValueError):
        en.sample_two_color(6, 3, 0.0, 0)


def test_h2_terms_are_hermitian_canonical():
    tc = en.sample_two_color(6, 3, 0.7, 5)
    terms = tc.h2_terms()
    for coeff, mon in terms:
        assert mon.degree == 4 and mon.phase_quarter == 2
    mat = tc.packed.materialize()
    assert np.max(np.abs(mat - mat.conj().T)) < 1e-12
    # term for color j is (i / sqrt(n2)) tau_j chi_j
    j = 2
    tau_dense = sum(
        c * dense_monomial(m.indices, tc.n_modes, m.phase_quarter)
        for c, m in tc.tau_terms[j - 1]
    )
    chi_dense = dense_monomial([tc.n1 + j], tc.n_modes)
    expected = 1j / math.sqrt(tc.n2) * tau_dense @ chi_dense
    got = sum(
        c * dense_monomial(m.indices, tc.n_modes, m.phase_quarter)
        for c, m in terms
        if m.indices[-1] == tc.n1 + j
    )
    assert np.max(np.abs(got - expected)) < 1e-12


def test_extract_two_color_counts_and_constant():
    h = en.sample_syk(4, 4, 1.0, 7)
    twoc, c3, tbar = en.extract_two_color(h, 6)
    assert sum(len(t) for t in twoc.tau_terms) == 40
    assert len(tbar) == 30
    assert c3 == pytest.approx(2 * math.sqrt(2 * 20 / (8 * 35)))
    assert c3 == pytest.approx(0.7559, abs=1e-4)
    # partition property: every term lands in exactly one side
    assert sum(len(t) for t in twoc.tau_terms) + len(tbar) == len(h.terms)


def test_extract_two_color_operator_identity():
    from syklab.majorana import PackedTerms

    h = en.sample_syk(4, 4, 0.6, 13)
    twoc, c3, tbar = en.extract_two_color(h, 6)
    ext = twoc.n_modes
    ht = [(c, m.embed(ext)) for c, m in h.terms
          if m.indices[2] <= 6 < m.indices[3]]
    lhs = PackedTerms(ht, ext).materialize()
    rhs = c3 * twoc.packed.materialize()
    assert np.max(np.abs(lhs - rhs)) < 1e-12


def test_extract_two_color_validation():
    h = en.sample_syk(4, 4, 1.0, 7)
    with pytest.raises(ValueError):
        en.extract_two_color(h, 7)  # odd n1
    with pytest.raises(ValueError):
        en.extract_two_color(h, 2)  # n1 < 3
    h6 = en.sample_syk(4, 6, 1.0, 7)
    with pytest.raises(ValueError):
        en.extract_two_color(h6, 6)  # q != 4


def test_default_partition_parity():
    for n in range(4, 11):
        n1 = en.default_partition(n)
        assert n1 % 2 == 0
        assert (4 * n - n1) % 2 == 0
        assert 0.1 * n <= n1 and 0.1 * n <= 2 * n - n1


def test_json_round_trip_exact():
    h = en.sample_syk(4, 4, 0.5, 7)
    assert en.SykInstance.from_dict(h.to_dict()) == h
    tc = en.sample_two_color(6, 3, 0.6, 2)
    assert en.TwoColorInstance.from_dict(tc.to_dict()) == tc


def test_empty_instance_warns():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UserWarning)
        h = en.sample_syk(4, 4, 1e-9, 0)
    assert h.terms == ()


def test_ensemble_spec_validation():
    spec = en.EnsembleSpec(model="ssyk", p_grid=(0.5,), trials=2, base_seed=0,
                           n=(4, 5))
    spec.validate()
    with pytest.raises(ValueError, match="p=1.5"):
        en.EnsembleSpec(model="ssyk", p_grid=(1.5,), trials=2, base_seed=0,
                        n=4).validate()
    with pytest.raises(ValueError, match="model"):
        en.EnsembleSpec(model="bogus", p_grid=(0.5,), trials=2, base_seed=0,
                        n=4).validate()
    with pytest.raises(ValueError, match="needs n1"):
        en.EnsembleSpec(model="two-color", p_grid=(0.5,), trials=2,
                        base_seed=0).validate()
