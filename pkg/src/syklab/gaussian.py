"""Fermionic Gaussian states: covariance matrices, Wick energies, mean-field
ascent, and the sign-correlated constant-energy witness.

A Gaussian state on ``n`` modes is a real antisymmetric ``2n x 2n`` matrix
``Gamma_ij = (i/2) Tr(rho [gamma_i, gamma_j])`` with singular values at most
1 (exactly 1 for pure states).  The expectation of a Hermitian-canonical
degree-4 term on support ``a < b < c < d`` is the principal-submatrix
Pfaffian ``G_ab G_cd - G_ac G_bd + G_ad G_bc``, so energies and gradients
never touch the 2^n-dimensional Hilbert space.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .majorana import DENSE_QUBIT_CAP, materialize, weyl_brauer
from .rng import stream

ANTISYMMETRY_ATOL = 1e-12
VALIDITY_ATOL = 1e-10


def validate_covariance(gamma):
    """Raise unless gamma is antisymmetric with singular values <= 1."""
    gamma = np.asarray(gamma, dtype=float)
    if gamma.ndim != 2 or gamma.shape[0] != gamma.shape[1] or gamma.shape[0] % 2:
        raise ValueError(f"covariance must be 2n x 2n, got {gamma.shape}")
    asym = np.max(np.abs(gamma + gamma.T))
    if asym > ANTISYMMETRY_ATOL:
        raise ValueError(f"covariance not antisymmetric (max {asym:.2e})")
    top = np.linalg.norm(gamma, 2)
    if top > 1 + VALIDITY_ATOL:
        raise ValueError(f"covariance has singular value {top} > 1")
    return gamma


def is_pure(gamma, atol=VALIDITY_ATOL):
    gamma = np.asarray(gamma, dtype=float)
    n2 = gamma.shape[0]
    return np.max(np.abs(gamma @ gamma.T - np.eye(n2))) <= atol


def standard_pure_covariance(n, flipped=False):
    """Block-diagonal pure covariance; ``flipped`` negates the first block,
    reaching the orientation class rotations alone cannot."""
    block = np.array([[0.0, 1.0], [-1.0, 0.0]])
    gamma = np.kron(np.eye(n), block)
    if flipped:
        gamma[:2, :2] = -block
    return gamma


def random_pure_covariance(n, seed, flipped=False):
    gen = stream(seed, "gauss-rotation")
    a = gen.standard_normal((2 * n, 2 * n))
    rot, _ = np.linalg.qr(a)
    base = standard_pure_covariance(n, flipped=flipped)
    return rot @ base @ rot.T


def _term_supports(h):
    if h.q != 4:
        raise ValueError("Wick evaluation here is specialized to q = 4")
    coeffs = np.array([c for c, _ in h.terms])
    supports = np.array(
        [[i - 1 for i in m.indices] for _, m in h.terms], dtype=int
    ).reshape(len(h.terms), 4)
    return coeffs, supports


def _pfaffians(gamma, supports):
    a, b, c, d = supports.T
    return (
        gamma[a, b] * gamma[c, d]
        - gamma[a, c] * gamma[b, d]
        + gamma[a, d] * gamma[b, c]
    )


def energy_wick(gamma, h, validate=True):
    """Tr(rho_Gamma H) for a q=4 instance via 4x4 Pfaffians."""
    if validate:
        validate_covariance(gamma)
    if gamma.shape[0] != 2 * h.n:
        raise ValueError("covariance / instance mode-count mismatch")
    if not h.terms:
        return 0.0
    coeffs, supports = _term_supports(h)
    return float(coeffs @ _pfaffians(gamma, supports))


def wick_gradient(gamma, h):
    """dE/dGamma as an antisymmetric matrix (derivatives in the upper
    triangle; the energy is a function of the i < j entries only)."""
    n2 = gamma.shape[0]
    grad = np.zeros((n2, n2))
    if not h.terms:
        return grad
    coeffs, supports = _term_supports(h)
    a, b, c, d = supports.T
    np.add.at(grad, (a, b), coeffs * gamma[c, d])
    np.add.at(grad, (c, d), coeffs * gamma[a, b])
    np.add.at(grad, (a, c), -coeffs * gamma[b, d])
    np.add.at(grad, (b, d), -coeffs * gamma[a, c])
    np.add.at(grad, (a, d), coeffs * gamma[b, c])
    np.add.at(grad, (b, c), coeffs * gamma[a, d])
    return grad - grad.T


def directional_derivative(gamma, h, delta):
    """d/dt E(e^{t delta} Gamma e^{-t delta}) at t = 0, delta antisymmetric."""
    grad = wick_gradient(gamma, h)
    return 0.5 * float(np.sum(grad * (delta @ gamma - gamma @ delta)))


def materialize_gaussian(gamma, max_qubits=DENSE_QUBIT_CAP):
    """Dense density matrix of a pure covariance.

    Block-diagonalizes Gamma = Q T Q^T (real Schur of a skew-symmetric matrix
    is block diagonal) and assembles the product-state form in the rotated
    Majorana basis.
    """
    gamma = validate_covariance(gamma)
    if not is_pure(gamma):
        raise ValueError("materialization needs a pure covariance")
    n = gamma.shape[0] // 2
    if n > max_qubits:
        raise ValueError(f"{n} qubits exceeds dense cap {max_qubits}")
    t_mat, q_mat = sla.schur(gamma, output="real")
    dim = 1 << n
    dense_gammas = [materialize(weyl_brauer(i, n)) for i in range(1, 2 * n + 1)]
    rho = np.eye(dim, dtype=complex)
    for j in range(n):
        lam = t_mat[2 * j, 2 * j + 1]
        g_odd = sum(q_mat[b, 2 * j] * dense_gammas[b] for b in range(2 * n))
        g_even = sum(q_mat[b, 2 * j + 1] * dense_gammas[b] for b in range(2 * n))
        rho = rho @ ((np.eye(dim) + 1j * lam * (g_odd @ g_even)) / 2.0)
    return rho


def covariance_of_density(rho, n):
    """Gamma_ij = (i/2) Tr(rho [gamma_i, gamma_j]) recomputed densely."""
    dense_gammas = [materialize(weyl_brauer(i, n)) for i in range(1, 2 * n + 1)]
    gamma = np.zeros((2 * n, 2 * n))
    for i in range(2 * n):
        for j in range(i + 1, 2 * n):
            val = 1j * np.trace(rho @ dense_gammas[i] @ dense_gammas[j])
            gamma[i, j] = val.real
            gamma[j, i] = -val.real
    return gamma


@dataclass(frozen=True)
class GaussianOptResult:
    gamma_star: np.ndarray
    energy: float
    iterations: int
    gradient_norm_final: float


def _ascend(gamma, h, max_iters, gtol):
    """Riemannian gradient ascent over rotations of a pure covariance with
    backtracking line search; accepted steps never decrease the energy."""
    energy = energy_wick(gamma, h, validate=False)
    step = 1.0
    grad_norm = 0.0
    iters = 0
    for iters in range(1, max_iters + 1):
        grad = wick_gradient(gamma, h)
        direction = gamma @ grad - grad @ gamma
        grad_norm = float(np.linalg.norm(direction))
        if grad_norm <= gtol * max(1.0, abs(energy)):
            break
        slope = 0.5 * grad_norm**2
        accepted = False
        t = step
        for _ in range(50):
            rot = sla.expm(t * direction)
            trial = rot @ gamma @ rot.T
            trial_energy = energy_wick(trial, h, validate=False)
            if trial_energy >= energy + 1e-4 * t * slope:
                gamma = 0.5 * (trial - trial.T)
                energy = trial_energy
                step = t * 1.3
                accepted = True
                break
            t *= 0.5
        if not accepted:
            break
    return gamma, energy, iters, grad_norm


def gaussian_maximize(h, restarts=8, max_iters=300, gtol=1e-7, seed=0):
    """Best Gaussian energy over seeded restarts.

    Each restart ascends from a random rotation of the standard pure
    covariance and from its orientation flip (conjugation by rotations
    preserves the Pfaffian sign of Gamma, so both classes must be seeded).
    """
    if h.q != 4:
        raise ValueError("Gaussian optimization is specialized to q = 4")
    best = GaussianOptResult(
        standard_pure_covariance(h.n), 0.0, 0, 0.0
    )
    if not h.terms:
        return best
    best_energy = -np.inf
    total_iters = 0
    for r in range(restarts):
        for flipped in (False, True):
            if r == 0:
                gamma0 = standard_pure_covariance(h.n, flipped=flipped)
            else:
                gamma0 = random_pure_covariance(
                    h.n, seed=1000 * h.seed + 2 * r + int(flipped) + seed,
                    flipped=flipped,
                )
            gamma, energy, iters, gnorm = _ascend(gamma0, h, max_iters, gtol)
            total_iters += iters
            if energy > best_energy:
                best_energy = energy
                best = GaussianOptResult(gamma, energy, total_iters, gnorm)
    return GaussianOptResult(
        best.gamma_star, best.energy, total_iters, best.gradient_norm_final
    )


def explicit_witness(h, c0=1.0):
    """Constant-energy Gaussian witness built from the instance couplings.

    The covariance is ``g0 + C g1``: ``g0`` pairs the first n/2 modes, ``g1``
    fills the (n, 2n] block with coupling-weighted entries, and ``C`` is
    capped by the measured operator norm so the result is always a valid
    (generally mixed) state.
    """
    if h.q != 4:
        raise ValueError("witness construction is specialized to q = 4")
    n = h.n
    if n % 2 != 0:
        raise ValueError("witness needs even n (half-filled mode pairing)")
    g0 = np.zeros((2 * n, 2 * n))
    block = np.array([[0.0, 1.0], [-1.0, 0.0]])
    for m in range(n // 2):
        g0[2 * m : 2 * m + 2, 2 * m : 2 * m + 2] = block
    couplings = h.couplings()
    g1 = np.zeros((2 * n, 2 * n))
    for k in range(n + 1, 2 * n + 1):
        for l in range(k + 1, 2 * n + 1):
            total = 0.0
            for m in range(1, n // 2 + 1):
                total += couplings.get((2 * m - 1, 2 * m, k, l), 0.0)
            g1[k - 1, l - 1] = total
            g1[l - 1, k - 1] = -total
    g1_norm = np.linalg.norm(g1, 2) if g1.any() else 0.0
    scale = min(c0 / (n * math.sqrt(h.p)), 1.0 / (g1_norm + 1e-12))
    sigma = g0 + scale * g1
    return sigma, energy_wick(sigma, h)


def approx_factor(lambda_gauss, lambda_max):
    """lambda_Gauss / lambda_max, clamped to [0, 1 + 1e-6]."""
    if lambda_max <= 0:
        raise ValueError("approximation factor needs lambda_max > 0")
    ratio = lambda_gauss / lambda_max
    if ratio < 0 or ratio > 1 + 1e-6:
        warnings.warn(f"approximation factor {ratio} outside [0, 1]; clamping")
    return float(min(max(ratio, 0.0), 1 + 1e-6))
