import math
import time
import warnings

import numpy as np
import pytest

from syklab import ensembles as en
from syklab import spectral as sp
from syklab.majorana import PackedTerms, hermitian_canonical


def _single_term_instance(coeff, n=3):
    return en.SykInstance(
        n=n, q=4, p=1.0, seed=0,
        terms=((coeff, hermitian_canonical([1, 2, 3, 4], n)),),
    )


def _empty_instance(n=3):
    return en.SykInstance(n=n, q=4, p=0.5, seed=0, terms=())


def test_single_term_lambda_is_abs_coeff():
    for coeff in (0.7, -1.3):
        inst = _single_term_instance(coeff)
        assert sp.dense_lambda_max(inst).lambda_max == pytest.approx(abs(coeff))
        res = sp.lanczos_lambda_max(inst, seed=5)
        assert res.lambda_max == pytest.approx(abs(coeff), abs=1e-10)


def test_empty_instance_gives_zero():
    inst = _empty_instance()
    assert sp.dense_lambda_max(inst).lambda_max == 0.0
    assert sp.lanczos_lambda_max(inst).lambda_max == 0.0
    assert sp.lambda_max(inst, method="auto").lambda_max == 0.0


def test_lanczos_matches_dense_small_suite():
    rng = np.random.default_rng(0)
    for trial in range(15):
        n = int(rng.integers(3, 8))
        p = float(rng.choice([0.3, 0.7, 1.0]))
        seed = int(rng.integers(10_000))
        inst = en.sample_syk(n, 4, p, seed)
        dense = sp.dense_lambda_max(inst)
        lanczos = sp.lanczos_lambda_max(inst, tol=1e-9, seed=seed)
        assert abs(dense.lambda_max - lanczos.lambda_max) <= 1e-8
        assert lanczos.residual <= 1e-8
        assert lanczos.converged


def test_lanczos_two_color_matches_dense():
    tc = en.sample_two_color(6, 3, 1.0, 1)
    dense = sp.dense_lambda_max(tc)
    lanczos = sp.lanczos_lambda_max(tc, seed=2)
    assert abs(dense.lambda_max - lanczos.lambda_max) <= 1e-8


def test_lanczos_reports_nonconvergence():
    inst = en.sample_syk(6, 4, 1.0, 3)
    res = sp.lanczos_lambda_max(inst, tol=1e-14, max_iters=3, seed=0)
    assert not res.converged
    assert res.iterations == 3
    assert res.residual > 0


def test_lanczos_ritz_monotonicity():
    inst = en.sample_syk(5, 4, 1.0, 9)
    values = []
    for k in range(2, 12):
        values.append(sp.lanczos_lambda_max(inst, tol=0.0, max_iters=k,
                                            seed=4).lambda_max)
    diffs = np.diff(values)
    assert np.all(diffs >= -1e-12)


def test_sign_flip_distribution_symmetry():
    lams, lams_neg = [], []
    for seed in range(200):
        inst = en.sample_syk(4, 4, 1.0, seed)
        flipped = en.SykInstance(
            n=4, q=4, p=1.0, seed=seed,
            terms=tuple((-c, m) for c, m in inst.terms),
        )
        lams.append(sp.dense_lambda_max(inst).lambda_max)
        lams_neg.append(sp.dense_lambda_max(flipped).lambda_max)
    lams, lams_neg = np.array(lams), np.array(lams_neg)
    se = math.sqrt(lams.var() / 200 + lams_neg.var() / 200)
    assert abs(lams.mean() - lams_neg.mean()) <= 3 * se


def test_matvec_cost_linear_in_terms():
    rng = np.random.default_rng(1)
    n = 10
    dim = 1 << n
    all_terms = en.sample_syk(n, 4, 1.0, 2).terms
    small = PackedTerms(all_terms[:1000], n)
    large = PackedTerms(all_terms[:4000], n)
    vec = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)

    def best_time(packed):
        out = np.zeros(dim, dtype=complex)
        times = []
        for _ in range(7):
            t0 = time.perf_counter()
            packed.apply(vec, out)
            times.append(time.perf_counter() - t0)
        return min(times)

    ratio = best_time(large) / best_time(small)
    assert 2.0 <= ratio <= 6.0  # hard sanity bound
    if not 3.0 <= ratio <= 5.0:  # the calibrated +-25% band is advisory
        warnings.warn(f"matvec term-scaling ratio {ratio:.2f} outside [3, 5]")


def test_op_norm_sanity():
    assert sp.op_norm_sanity(_empty_instance(), 1.0)
    big = _single_term_instance(100.0)
    assert not sp.op_norm_sanity(big, 5.0)
    inst = en.sample_syk(6, 4, 1.0, 0)
    assert sp.op_norm_sanity(inst, 5.0)


def test_universality_scan_schema_and_determinism():
    spec = en.EnsembleSpec(model="ssyk", p_grid=(0.5,), trials=5, base_seed=3,
                           n=4, method="dense")
    table1 = sp.universality_scan(spec)
    table2 = sp.universality_scan(spec)
    assert len(table1.rows) == 5
    assert table1 == table2
    seeds = [row[2] for row in table1.rows]
    assert seeds == [3, 4, 5, 6, 7]
    n, p, mean, std, count = table1.cells[0]
    assert (n, p, count) == (4, 0.5, 5)
    assert mean == pytest.approx(
        np.mean([row[4] for row in table1.rows])
    )


def test_universality_scan_isolates_row_failures():
    def flaky_sampler(n, q, p, seed):
        if seed == 4:
            raise RuntimeError("synthetic row failure")
        return en.sample_syk(n, q, p, seed)

    spec = en.EnsembleSpec(model="ssyk", p_grid=(1.0,), trials=5, base_seed=3,
                           n=4, method="dense")
    table = sp.universality_scan(spec, sampler=flaky_sampler)
    assert len(table.rows) == 4
    assert len(table.failures) == 1
    assert table.failures[0][:3] == (4, 1.0, 4)
    assert "synthetic" in table.failures[0][3]


def test_lambda_max_caps():
    inst = en.sample_syk(4, 4, 1.0, 0)
    with pytest.raises(ValueError):
        sp.lambda_max(inst, method="bogus")
    big = en.SykInstance(n=21, q=4, p=1.0, seed=0,
                         terms=((1.0, hermitian_canonical([1, 2, 3, 4], 21)),))
    with pytest.raises(ValueError):
        sp.lanczos_lambda_max(big)
    with pytest.raises(ValueError):
        sp.dense_lambda_max(
            en.SykInstance(n=15, q=4, p=1.0, seed=0,
                           terms=((1.0, hermitian_canonical([1, 2, 3, 4], 15)),))
        )
