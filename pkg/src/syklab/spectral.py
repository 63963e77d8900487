"""Extremal eigenvalues of sampled Hamiltonians, dense and matrix-free.

The Lanczos path never materializes the Hamiltonian: each iteration applies
the packed term list through the kernel backend, with full
reorthogonalization against the whole Krylov basis (robust at desk-scale
dimensions, and it keeps the Ritz values monotone in exact arithmetic).
"""

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .ensembles import SykInstance, TwoColorInstance
from .majorana import DENSE_QUBIT_CAP
from .rng import derive_seed, stream

LANCZOS_QUBIT_CAP = 20


@dataclass(frozen=True)
class SpectralResult:
    lambda_max: float
    residual: float
    iterations: int
    method: str
    converged: bool


def _packed(h):
    if isinstance(h, (SykInstance, TwoColorInstance)):
        return h.packed
    return h  # already a PackedTerms


def _physical_modes(h):
    if isinstance(h, TwoColorInstance):
        return (h.n1 + h.n2) // 2
    return h.n


def dense_lambda_max(h, max_qubits=DENSE_QUBIT_CAP):
    """Exact top eigenvalue of the materialized Hamiltonian."""
    packed = _packed(h)
    if len(packed) == 0:
        return SpectralResult(0.0, 0.0, 0, "dense", True)
    mat = packed.materialize(max_qubits=max_qubits)
    herm_err = np.max(np.abs(mat - mat.conj().T))
    if herm_err > 1e-12:
        raise ValueError(f"materialized Hamiltonian not Hermitian ({herm_err:.2e})")
    dim = mat.shape[0]
    if dim <= 256:
        vals, vecs = np.linalg.eigh(mat)
        lam, vec = vals[-1], vecs[:, -1]
    else:
        vals, vecs = sla.eigh(mat, subset_by_index=[dim - 1, dim - 1])
        lam, vec = vals[0], vecs[:, 0]
    residual = float(np.linalg.norm(mat @ vec - lam * vec))
    return SpectralResult(float(lam), residual, 1, "dense", True)


def lanczos_lambda_max(h, tol=1e-8, max_iters=500, seed=0):
    """Top eigenvalue by matrix-free Lanczos with full reorthogonalization.

    The start vector comes from a dedicated counter-based stream so the whole
    iteration is reproducible; on non-convergence the best estimate and its
    residual are still returned, flagged ``converged=False``.
    """
    packed = _packed(h)
    if packed.n_modes > LANCZOS_QUBIT_CAP:
        raise ValueError(f"{packed.n_modes} qubits exceeds Lanczos cap "
                         f"{LANCZOS_QUBIT_CAP}")
    if len(packed) == 0:
        return SpectralResult(0.0, 0.0, 0, "lanczos", True)
    dim = packed.dim
    gen = stream(seed, "lanczos-start")
    v = gen.standard_normal(dim) + 1j * gen.standard_normal(dim)
    v /= np.linalg.norm(v)

    max_steps = min(max_iters, dim)
    basis = np.empty((max_steps, dim), dtype=complex)
    alphas, betas = [], []
    basis[0] = v
    steps = 0
    for k in range(max_steps):
        w = packed.apply(basis[k])
        alphas.append(float(np.real(np.vdot(basis[k], w))))
        # full reorthogonalization, twice for numerical safety
        span = basis[: k + 1]
        for _ in range(2):
            w -= span.T @ (span.conj() @ w)
        beta = float(np.linalg.norm(w))
        steps = k + 1
        tri = np.diag(alphas) + np.diag(betas, 1) + np.diag(betas, -1)
        ritz_vals, ritz_vecs = np.linalg.eigh(tri)
        est_residual = beta * abs(ritz_vecs[-1, -1])
        if est_residual <= tol or beta < 1e-14 or steps == max_steps:
            break
        basis[k + 1] = w / beta
        betas.append(beta)

    top = ritz_vals[-1]
    ritz_vec = basis[:steps].T @ ritz_vecs[:, -1]
    ritz_vec /= np.linalg.norm(ritz_vec)
    residual = float(np.linalg.norm(packed.apply(ritz_vec) - top * ritz_vec))
    return SpectralResult(float(top), residual, steps, "lanczos", residual <= tol)


def lambda_max(h, method="lanczos", tol=1e-8, max_iters=500, seed=0):
    """Dispatch to the dense or Lanczos solver; empty Hamiltonians give 0."""
    if method == "dense":
        return dense_lambda_max(h)
    if method == "lanczos":
        return lanczos_lambda_max(h, tol=tol, max_iters=max_iters, seed=seed)
    if method == "auto":
        packed = _packed(h)
        if packed.n_modes <= 9:
            return dense_lambda_max(h)
        return lanczos_lambda_max(h, tol=tol, max_iters=max_iters, seed=seed)
    raise ValueError(f"unknown method {method!r}")


def op_norm_sanity(h, c_threshold, method="auto", tol=1e-8):
    """Guardrail: is lambda_max below c * sqrt(n)?  Logged, never enforced."""
    result = lambda_max(h, method=method, tol=tol)
    n = _physical_modes(h)
    return result.lambda_max <= c_threshold * math.sqrt(n)


@dataclass(frozen=True)
class UniversalityTable:
    """Per-instance extremal energies across an (n, p) grid, plus cell stats."""

    rows: tuple  # of (n, p, seed, lambda_max, lambda_over_sqrt_n, residual, iters)
    cells: tuple  # of (n, p, mean lambda/sqrt(n), std, trial count)
    failures: tuple  # of (n, p, seed, message)

    def cell_means(self):
        return {(n, p): mean for n, p, mean, _, _ in self.cells}


def universality_scan(spec, sampler=None, pool_map=None):
    """Run the (n, p, trial) grid of ``spec`` and tabulate lambda_max.

    Rows are emitted sorted by (n, p, seed); solver failures mark their row
    failed instead of aborting the scan.  ``pool_map`` may supply a parallel
    ``map`` (results are reassembled in deterministic order regardless).
    """
    from .ensembles import sample_syk

    spec.validate()
    if sampler is None:
        sampler = sample_syk
    ns = [spec.n] if isinstance(spec.n, int) else list(spec.n)
    jobs = [
        (n, p, derive_seed(spec.base_seed, t))
        for n in ns
        for p in spec.p_grid
        for t in range(spec.trials)
    ]

    def run(job):
        n, p, seed = job
        inst = sampler(n, spec.q, p, seed)
        res = lambda_max(inst, method=spec.method, tol=spec.tol, seed=seed)
        return (n, p, seed, res.lambda_max, res.lambda_max / math.sqrt(n),
                res.residual, res.iterations)

    mapper = pool_map if pool_map is not None else map
    rows, failures = [], []
    for job, outcome in zip(jobs, mapper(_guard(run), jobs)):
        if isinstance(outcome, Exception):
            failures.append((job[0], job[1], job[2], str(outcome)))
        else:
            rows.append(outcome)
    rows.sort(key=lambda r: (r[0], r[1], r[2]))
    failures.sort()

    cells = []
    for n in ns:
        for p in spec.p_grid:
            vals = [r[4] for r in rows if r[0] == n and r[1] == p]
            if vals:
                arr = np.array(vals)
                cells.append((n, p, float(arr.mean()), float(arr.std()), len(arr)))
    return UniversalityTable(tuple(rows), tuple(cells), tuple(failures))


def _guard(fn):
    def wrapped(job):
        try:
            return fn(job)
        except Exception as exc:  # noqa: BLE001 - row-level isolation
            return exc

    return wrapped
