"""Exact small-scale realization of the non-Gaussian variational rotation
for two-color instances: the paired base state, the rotation generator, the
rotated-state energy curve, and the single/double commutator quantities that
bound it.

Everything here is dense and exact; the registers are capped at desk scale
(the rotation generator is exponentiated through the eigendecomposition of
the Hermitian ``i * zeta``, so every evaluated propagator is exactly
unitary).
"""

import math
from dataclasses import dataclass
import numpy as np

from .majorana import PackedTerms, materialize, multiply, weyl_brauer

SWEEP_MAJORANA_CAP = 20
DOUBLE_COMM_MAJORANA_CAP = 24


@dataclass(frozen=True)
class ExtendedRegister:
    """Index map for phi/chi/sigma Majoranas on one shared register."""

    n1: int
    n2: int

    def __post_init__(self):
        if (self.n1 + 2 * self.n2) % 2 != 0:
            raise ValueError("n1 + 2*n2 must be even")

    @property
    def n_majoranas(self):
        return self.n1 + 2 * self.n2

    @property
    def n_modes(self):
        return self.n_majoranas // 2

    @property
    def dim(self):
        return 1 << self.n_modes

    def phi(self, i):
        if not 1 <= i <= self.n1:
            raise ValueError(f"phi index {i} outside [1, {self.n1}]")
        return weyl_brauer(i, self.n_modes)

    def chi(self, j):
        if not 1 <= j <= self.n2:
            raise ValueError(f"chi index {j} outside [1, {self.n2}]")
        return weyl_brauer(self.n1 + j, self.n_modes)

    def sigma(self, j):
        if not 1 <= j <= self.n2:
            raise ValueError(f"sigma index {j} outside [1, {self.n2}]")
        return weyl_brauer(self.n1 + self.n2 + j, self.n_modes)


def register_of(inst):
    return ExtendedRegister(inst.n1, inst.n2)


def _check_cap(reg, cap):
    if reg.n_majoranas > cap:
        raise ValueError(
            f"register has {reg.n_majoranas} Majoranas, above the cap {cap}"
        )


def build_rho0(reg):
    """The paired Gaussian base state prod_j (I + i sigma_j chi_j) / 2.

    Positive semidefinite with unit trace; every i*sigma_j*chi_j has
    expectation exactly 1.
    """
    _check_cap(reg, DOUBLE_COMM_MAJORANA_CAP)
    rho = np.eye(reg.dim, dtype=complex)
    for j in range(1, reg.n2 + 1):
        pair = multiply(reg.sigma(j), reg.chi(j)).with_extra_phase(1)
        rho = rho @ ((np.eye(reg.dim) + materialize(pair, reg.n_modes)) / 2.0)
    # the factors absorb 2^{-n2}; the phi half contributes the rest of 1/dim
    return rho / 2 ** (reg.n1 // 2)


def build_zeta(inst):
    """Dense rotation generator zeta = sum_j sigma_j tau_j (anti-Hermitian).

    The sigma-first ordering makes the first-order energy gain
    Tr(rho0 [zeta, H]) equal the positive coupling sum of
    ``single_commutator_value``; the opposite ordering is the same rotation
    run backwards (theta -> -theta).
    """
    reg = register_of(inst)
    _check_cap(reg, DOUBLE_COMM_MAJORANA_CAP)
    terms = []
    for j in range(1, inst.n2 + 1):
        sig = reg.sigma(j)
        for coeff, mon in inst.tau_terms[j - 1]:
            terms.append((coeff, multiply(sig, mon)))
    return PackedTerms(terms, reg.n_modes).materialize()


class SweepWorkspace:
    """Shared dense pieces for evaluating the rotated-state energy.

    With i*zeta = U diag(w) U^dag, the energy at angle theta is
    ``sum_ab exp(i theta (w_a - w_b)) * (U^dag rho0 U)_ab (U^dag H U)_ba``,
    so each grid point costs O(dim^2).
    """

    def __init__(self, inst):
        self.inst = inst
        self.reg = register_of(inst)
        self.rho0 = build_rho0(self.reg)
        self.h2 = inst.packed.materialize()
        self.zeta = build_zeta(inst)
        w, u = np.linalg.eigh(1j * self.zeta)
        self.freqs = w
        self._eigvecs = u
        p_mat = u.conj().T @ self.rho0 @ u
        q_mat = u.conj().T @ self.h2 @ u
        self._mixed = p_mat * q_mat.T

    def energy(self, theta):
        if not np.isfinite(theta):
            raise ValueError("theta must be finite")
        phase = np.exp(1j * theta * self.freqs)
        return float(np.real(phase @ self._mixed @ phase.conj()))

    def state(self, theta):
        """Dense rho_theta = e^{-theta zeta} rho0 e^{+theta zeta}."""
        if not np.isfinite(theta):
            raise ValueError("theta must be finite")
        u = self._eigvecs
        prop = (u * np.exp(1j * theta * self.freqs)) @ u.conj().T
        return prop @ self.rho0 @ prop.conj().T


def rho_theta_energy(inst, theta):
    """Tr(e^{-theta zeta} rho0 e^{+theta zeta} H) by exact unitary conjugation."""
    return SweepWorkspace(inst).energy(theta)


def single_commutator_value(inst, workspace=None):
    """Tr(rho0 [zeta, H]) two independent ways: dense matrices and the
    closed-form coupling sum (2/sqrt(n2)) binom(n1,3)^{-1} p^{-1} sum X J^2.

    Returns (route_a, route_b); route_b has no register-size cap.
    """
    norm = inst.tau_normalization
    j_squared = sum(
        (coeff / norm) ** 2 for terms in inst.tau_terms for coeff, _ in terms
    )
    route_b = (
        2.0
        / math.sqrt(inst.n2)
        / (math.comb(inst.n1, 3) * inst.p)
        * j_squared
    )
    ws = workspace if workspace is not None else SweepWorkspace(inst)
    comm = ws.zeta @ ws.h2 - ws.h2 @ ws.zeta
    route_a = float(np.real(np.trace(ws.rho0 @ comm)))
    return route_a, route_b


def double_commutator_norm(inst, workspace=None):
    """Operator norm of [zeta, [zeta, H]] (top singular value, dense)."""
    reg = register_of(inst)
    _check_cap(reg, DOUBLE_COMM_MAJORANA_CAP)
    ws = workspace if workspace is not None else SweepWorkspace(inst)
    inner = ws.zeta @ ws.h2 - ws.h2 @ ws.zeta
    outer = ws.zeta @ inner - inner @ ws.zeta
    return float(np.max(np.abs(np.linalg.eigvalsh(outer))))


@dataclass(frozen=True)
class HoSweepResult:
    thetas: tuple
    energies: tuple
    best_theta: float
    best_energy: float
    single_commutator: float
    double_commutator_norm: float

    def quadratic_lower_bound(self, theta):
        return theta * self.single_commutator - theta**2 * self.double_commutator_norm


def theta_sweep(inst, thetas=None, bound_slack=1e-8, workspace=None):
    """Evaluate the rotated-state energy across a theta grid.

    Also computes the commutator pair (S, D) and verifies the quadratic lower
    bound ``energy(theta) >= theta*S - theta^2*D`` at every grid point; this
    inequality is exact operator arithmetic, so a violation beyond
    ``bound_slack`` raises.
    """
    reg = register_of(inst)
    _check_cap(reg, SWEEP_MAJORANA_CAP)
    if thetas is None:
        thetas = np.arange(0.0, 1.0 + 1e-12, 0.01)
    thetas = np.asarray(thetas, dtype=float)
    ws = workspace if workspace is not None else SweepWorkspace(inst)
    energies = np.array([ws.energy(t) for t in thetas])
    _, single = single_commutator_value(inst, workspace=ws)
    double = double_commutator_norm(inst, workspace=ws)
    lower = thetas * single - thetas**2 * double
    worst = float(np.max(lower - energies))
    if worst > bound_slack:
        raise RuntimeError(
            f"quadratic lower bound violated by {worst:.2e}; "
            "this indicates an internal inconsistency"
        )
    best = int(np.argmax(energies))
    return HoSweepResult(
        thetas=tuple(float(t) for t in thetas),
        energies=tuple(float(e) for e in energies),
        best_theta=float(thetas[best]),
        best_energy=float(energies[best]),
        single_commutator=single,
        double_commutator_norm=double,
    )
