"""Anticommutation graphs of Majorana monomial sets and their Lovasz theta
function, solved by operator splitting (ADMM) with alternating
positive-semidefinite and affine projections.

The theta SDP ``max Tr(J X) s.t. X >= 0, Tr X = 1, X_jl = 0 on edges`` upper
bounds how well any single state can align with a whole operator family, so
sparsifying the graph (deleting vertices) can only shrink it; the scan and
fit utilities here chase how fast it shrinks.
"""

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .majorana import PackedTerms, hermitian_canonical
from .rng import stream


@dataclass(frozen=True)
class CommutationGraph:
    """Vertex-labeled anticommutation graph; edge iff the operators anticommute."""

    labels: tuple  # of MajoranaMonomial
    adjacency: np.ndarray  # symmetric boolean matrix, no self-loops
    lineage: tuple | None = None  # (parent descriptor, p, seed) when sparsified

    @property
    def n_vertices(self):
        return len(self.labels)

    @property
    def n_edges(self):
        return int(np.count_nonzero(np.triu(self.adjacency, 1)))

    def edge_indices(self):
        return np.nonzero(np.triu(self.adjacency, 1))


def degree_q_monomials(n, q):
    """All Hermitian-canonical degree-q monomials on 2n Majoranas, lex order."""
    return [hermitian_canonical(c, n) for c in combinations(range(1, 2 * n + 1), q)]


def build_graph(monomials):
    """Pairwise anticommutation graph via the parity rule."""
    labels = tuple(monomials)
    if not labels:
        raise ValueError("empty monomial set")
    n_modes = labels[0].n_modes
    supports = []
    seen = set()
    for m in labels:
        if m.n_modes != n_modes:
            raise ValueError("mixed mode counts in monomial set")
        if (m.support, m.phase_quarter) in seen:
            raise ValueError("duplicate monomials in vertex set")
        seen.add((m.support, m.phase_quarter))
        supports.append(m.support)
    s = np.array(supports, dtype=np.uint64)
    degree = np.bitwise_count(s)
    overlap = np.bitwise_count(s[:, None] & s[None, :])
    adjacency = ((degree[:, None] * degree[None, :] - overlap) % 2 == 1)
    np.fill_diagonal(adjacency, False)
    adjacency.setflags(write=False)
    return CommutationGraph(labels, adjacency)


def sparsify_vertices(g, p, seed, parent="graph"):
    """Keep each vertex independently with probability p (nested across p)."""
    if not 0 < p <= 1:
        raise ValueError(f"p={p} outside (0, 1]")
    gen = stream(seed, "graph-sparsify")
    keep = np.nonzero(gen.random(g.n_vertices) < p)[0]
    labels = tuple(g.labels[i] for i in keep)
    adjacency = g.adjacency[np.ix_(keep, keep)].copy()
    adjacency.setflags(write=False)
    return CommutationGraph(labels, adjacency, lineage=(parent, p, seed))


@dataclass(frozen=True)
class ThetaResult:
    theta: float
    trace_x: float
    max_edge_violation: float
    min_eigenvalue: float
    iterations: int
    converged: bool
    x_matrix: np.ndarray  # feasible-rounded primal iterate (warm-start fodder)


def _project_affine(v, rows, cols):
    v = 0.5 * (v + v.T)
    v[rows, cols] = 0.0
    v[cols, rows] = 0.0
    nv = v.shape[0]
    v[np.diag_indices(nv)] += (1.0 - np.trace(v)) / nv
    return v


def _project_psd(v):
    v = 0.5 * (v + v.T)
    vals, vecs = np.linalg.eigh(v)
    pos = vals > 0
    if pos.all():
        return v
    return (vecs[:, pos] * vals[pos]) @ vecs[:, pos].T


def _feasible_rounding(v, rows, cols):
    """Nearest convenient feasible point: zero edges, unit trace, eigenvalue
    floor shifted to 0.  Feasibility makes Tr(J X) a certified lower bound."""
    x = _project_affine(v.copy(), rows, cols)
    min_eig = float(np.linalg.eigvalsh(x)[0])
    if min_eig < 0:
        nv = x.shape[0]
        shift = -min_eig
        x = (x + shift * np.eye(nv)) / (1.0 + shift * nv)
        min_eig = float(np.linalg.eigvalsh(x)[0])
    return x, min_eig


def lovasz_theta(g, tol=1e-7, max_iters=50000, warm=None, over_relax=1.6,
                 rho0=None):
    """Solve the theta SDP for a commutation (or any) graph.

    The returned value is the objective of a feasibility-rounded iterate, so
    it is a certified lower bound on theta up to eigensolver noise; tol
    controls the splitting residuals (1e-7 gives ~1e-4 absolute accuracy on
    the graphs used here, 1e-9 gives ~1e-6).  ``warm`` may carry an
    (X, Z, U) triple, e.g. a parent solution restricted to kept vertices.
    Non-convergence returns the best iterate flagged ``converged=False``
    rather than raising.
    """
    nv = g.n_vertices
    if nv < 1:
        raise ValueError("theta needs at least one vertex")
    if nv == 1:
        x = np.ones((1, 1))
        return ThetaResult(1.0, 1.0, 0.0, 1.0, 0, True, x)
    rows, cols = g.edge_indices()
    if len(rows) == 0:
        x = np.full((nv, nv), 1.0 / nv)
        return ThetaResult(float(nv), 1.0, 0.0, 0.0, 0, True, x)

    if warm is not None:
        x, z, u = (np.array(a, dtype=float) for a in warm)
    else:
        x = np.eye(nv) / nv
        z = x.copy()
        u = np.zeros((nv, nv))
    # the prox step adds J/rho to every entry; rho ~ nv keeps that at the
    # scale of X itself, which cuts iteration counts by an order of magnitude
    rho = 4.0 * nv if rho0 is None else rho0
    iters = 0
    converged = False
    scale = math.sqrt(nv)
    for iters in range(1, max_iters + 1):
        x = _project_affine(z - u + 1.0 / rho, rows, cols)  # J/rho is all 1/rho
        x_relaxed = over_relax * x + (1.0 - over_relax) * z
        z_new = _project_psd(x_relaxed + u)
        u += x_relaxed - z_new
        primal = np.linalg.norm(x - z_new)
        dual = rho * np.linalg.norm(z_new - z)
        z = z_new
        eps_pri = scale * tol + tol * max(np.linalg.norm(x), np.linalg.norm(z))
        eps_dual = scale * tol + tol * rho * np.linalg.norm(u)
        if primal <= eps_pri and dual <= eps_dual:
            converged = True
            break
        if iters % 50 == 0:
            if primal > 10 * dual:
                rho *= 2.0
                u /= 2.0
            elif dual > 10 * primal:
                rho /= 2.0
                u *= 2.0

    # round several iterate combinations to feasibility; keep the best bound
    best = None
    for candidate in (0.5 * (x + z), z, x):
        x_f, min_eig = _feasible_rounding(candidate, rows, cols)
        val = float(np.sum(x_f))
        if best is None or val > best[0]:
            best = (val, x_f, min_eig)
    theta, x_best, min_eig = best[0], best[1], best[2]
    max_violation = float(np.max(np.abs(x_best[rows, cols]))) if len(rows) else 0.0
    return ThetaResult(
        theta=theta,
        trace_x=float(np.trace(x_best)),
        max_edge_violation=max_violation,
        min_eigenvalue=min_eig,
        iterations=iters,
        converged=converged,
        x_matrix=x_best,
    )


def commutation_index_bounds(g, theta, state_trials=32, seed=0, dense_cap=12):
    """(lower, upper) bounds on the commutation index of the vertex set.

    upper = theta / |S|.  lower maximizes the mean squared expectation over a
    candidate family: seeded random states, pure-Gaussian covariance samples
    (Pfaffian route, degree-4 sets only), and extremal eigenvectors of the
    summed operator plus, for small sets, of each individual operator.
    """
    nv = g.n_vertices
    upper = theta / nv
    n_modes = g.labels[0].n_modes
    if n_modes > dense_cap:
        raise ValueError(f"{n_modes} qubits exceeds lower-bound cap {dense_cap}")
    packed = PackedTerms([(1.0, m) for m in g.labels], n_modes)
    dim = packed.dim

    def mean_sq(vec):
        vals = packed.expectations(vec).real
        return float(np.sum(vals**2)) / nv

    gen = stream(seed, "commutation-index-states")
    lower = 0.0
    for _ in range(state_trials):
        vec = gen.standard_normal(dim) + 1j * gen.standard_normal(dim)
        vec /= np.linalg.norm(vec)
        lower = max(lower, mean_sq(vec))

    all_degree4 = all(m.degree == 4 for m in g.labels)
    if all_degree4:
        from .gaussian import random_pure_covariance

        supports = np.array(
            [[i - 1 for i in m.indices] for m in g.labels], dtype=int
        )
        a, b, c, d = supports.T
        for trial in range(state_trials):
            gam = random_pure_covariance(n_modes, seed=seed * 977 + trial,
                                         flipped=bool(trial % 2))
            pf = (gam[a, b] * gam[c, d] - gam[a, c] * gam[b, d]
                  + gam[a, d] * gam[b, c])
            lower = max(lower, float(np.sum(pf**2)) / nv)

    total = packed.materialize()
    vals, vecs = np.linalg.eigh(total)
    lower = max(lower, mean_sq(vecs[:, -1]), mean_sq(vecs[:, 0]))
    if nv <= 64:
        from .majorana import materialize

        for m in g.labels:
            _, top = np.linalg.eigh(materialize(m))
            lower = max(lower, mean_sq(top[:, -1]))
    return lower, upper


def variance_tail_bound(theta, kept_terms, t):
    """Concentration exponent kept_terms * t^2 / (2 * theta); pure arithmetic."""
    if theta <= 0 or kept_terms <= 0:
        raise ValueError("theta and kept_terms must be positive")
    if t < 0:
        raise ValueError("t must be nonnegative")
    return kept_terms * t * t / (2.0 * theta)


@dataclass(frozen=True)
class ScalingFit:
    points: tuple  # of (p, theta_mean, theta_std, trials)
    c1: float
    c2: float
    residual_sqrt: float
    residual_linear: float


def sqrt_scaling_fit(points):
    """Least-squares c1*sqrt(p) + c2 fit of theta means, with the linear
    model c1*p + c2 fitted on the same points for comparison."""
    points = tuple(points)
    ps = np.array([q[0] for q in points], dtype=float)
    ys = np.array([q[1] for q in points], dtype=float)
    if len(np.unique(ps)) < 3:
        raise ValueError("fit needs at least 3 distinct p values")
    results = {}
    for name, design in (
        ("sqrt", np.column_stack([np.sqrt(ps), np.ones_like(ps)])),
        ("linear", np.column_stack([ps, np.ones_like(ps)])),
    ):
        coeffs, _, rank, _ = np.linalg.lstsq(design, ys, rcond=None)
        if rank < 2:
            raise ValueError("degenerate design matrix")
        residual = float(np.linalg.norm(design @ coeffs - ys))
        results[name] = (coeffs, residual)
    (c1, c2), residual_sqrt = results["sqrt"]
    _, residual_linear = results["linear"]
    return ScalingFit(
        points=points,
        c1=float(c1),
        c2=float(c2),
        residual_sqrt=residual_sqrt,
        residual_linear=residual_linear,
    )
