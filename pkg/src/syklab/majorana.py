"""Exact algebra of Majorana monomials and their action on state vectors.

A register of ``n`` fermionic modes carries ``2n`` Majorana operators
``gamma_1 .. gamma_2n`` represented by Weyl--Brauer matrices (Z-prefixed
Pauli strings ending in X or Y).  A monomial is an ordered product
``i^k * gamma_{i1} ... gamma_{iq}`` with strictly increasing indices; we
store the index set as a bitmask and the global quarter-phase ``k`` as an
integer mod 4, so all products and (anti)commutation checks are exact
integer arithmetic.

Qubit 1 is the most significant bit of a basis index, so dense matrices
match ``kron(P_1, ..., P_n)`` ordering.
"""

from dataclasses import dataclass
from functools import reduce

import numpy as np

from . import backend

DENSE_QUBIT_CAP = 14

_PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

_QUARTER = np.array([1, 1j, -1, -1j], dtype=complex)


@dataclass(frozen=True)
class MajoranaMonomial:
    """``i^phase_quarter * gamma_{i1} ... gamma_{iq}`` on ``2 * n_modes`` Majoranas.

    ``support`` is a bitmask: bit ``i - 1`` set means index ``i`` is present.
    """

    n_modes: int
    support: int
    phase_quarter: int

    def __post_init__(self):
        # tolerate numpy integers from callers; bitmask math needs Python ints
        object.__setattr__(self, "n_modes", int(self.n_modes))
        object.__setattr__(self, "support", int(self.support))
        object.__setattr__(self, "phase_quarter", int(self.phase_quarter))
        if not 1 <= self.n_modes <= 32:
            raise ValueError(f"mode count {self.n_modes} outside [1, 32]")
        if self.support < 0 or self.support >> (2 * self.n_modes):
            raise ValueError("support indices outside [1, 2n]")
        if self.phase_quarter not in (0, 1, 2, 3):
            raise ValueError(f"phase_quarter {self.phase_quarter} not in 0..3")

    @property
    def indices(self):
        """Strictly increasing 1-based Majorana indices."""
        return tuple(i + 1 for i in range(2 * self.n_modes) if (self.support >> i) & 1)

    @property
    def degree(self):
        return self.support.bit_count()

    @property
    def is_hermitian(self):
        # (i^k gamma_I)^dag = i^{2*binom(q,2) - k} gamma_I, so Hermitian iff
        # k and binom(q,2) share parity.
        q = self.degree
        return (self.phase_quarter - q * (q - 1) // 2) % 2 == 0

    def with_extra_phase(self, quarter):
        return MajoranaMonomial(
            self.n_modes, self.support, (self.phase_quarter + quarter) % 4
        )

    def embed(self, n_modes):
        """Same operator on a larger register (identity on the new modes)."""
        if n_modes < self.n_modes:
            raise ValueError("cannot shrink a monomial's register")
        return MajoranaMonomial(n_modes, self.support, self.phase_quarter)


def identity_monomial(n_modes):
    return MajoranaMonomial(n_modes, 0, 0)


def monomial(indices, n_modes, phase_quarter=0):
    """Monomial from an iterable of strictly increasing 1-based indices."""
    mask = 0
    prev = 0
    for i in indices:
        i = int(i)
        if not prev < i <= 2 * n_modes:
            raise ValueError(
                f"indices must be strictly increasing within [1, {2 * n_modes}]"
            )
        mask |= 1 << (i - 1)
        prev = i
    return MajoranaMonomial(n_modes, mask, phase_quarter % 4)


def hermitian_canonical(indices, n_modes):
    """Hermitian monomial ``i^{q/2} gamma_I`` (even ``q``) or ``i gamma_I`` (odd)."""
    m = monomial(indices, n_modes)
    q = m.degree
    quarter = (q // 2) % 4 if q % 2 == 0 else (q * (q - 1) // 2) % 2
    return m.with_extra_phase(quarter)


def weyl_brauer(i, n_modes):
    """The degree-1 monomial for the i-th Weyl--Brauer matrix, 1 <= i <= 2n."""
    if not 1 <= i <= 2 * n_modes:
        raise ValueError(f"Majorana index {i} outside [1, {2 * n_modes}]")
    return MajoranaMonomial(n_modes, 1 << (i - 1), 0)


def multiply(a, b):
    """Exact product: transposition-count parity plus pair annihilations."""
    if a.n_modes != b.n_modes:
        raise ValueError("mode-count mismatch")
    # Merging the two sorted index lists costs one transposition per pair
    # (i in a, j in b) with i > j; equal pairs then cancel via gamma^2 = 1.
    inversions = 0
    rest = b.support
    while rest:
        low = rest & -rest
        inversions += (a.support & ~(2 * low - 1)).bit_count()
        rest ^= low
    phase = (a.phase_quarter + b.phase_quarter + 2 * (inversions & 1)) % 4
    return MajoranaMonomial(a.n_modes, a.support ^ b.support, phase)


def anticommutes(a, b):
    """True iff the two monomials anticommute (parity rule)."""
    if a.n_modes != b.n_modes:
        raise ValueError("mode-count mismatch")
    overlap = (a.support & b.support).bit_count()
    return (a.degree * b.degree - overlap) % 2 == 1


def pauli_masks(m):
    """(x_mask, z_mask, quarter) of the monomial as a global Pauli string.

    The string acts as ``i^quarter * (-1)^popcount(b & z) |b ^ x>`` on basis
    index ``b``; qubit k sits at bit ``n_modes - k``.
    """
    n = m.n_modes
    x = z = 0
    quarter = m.phase_quarter
    rest = m.support
    while rest:
        low = rest & -rest
        i = low.bit_length()  # 1-based Majorana index
        rest ^= low
        k = (i + 1) // 2  # 1-based qubit
        gx = 1 << (n - k)
        gz = ((1 << (k - 1)) - 1) << (n - k + 1)
        if i % 2 == 0:  # Y-type: Y = i X Z
            gz |= 1 << (n - k)
            quarter += 1
        # (X^x Z^z)(X^gx Z^gz) picks up (-1)^|z & gx|
        quarter += 2 * (z & gx).bit_count()
        x ^= gx
        z ^= gz
    return x, z, quarter % 4


def weyl_brauer_matrix(i, n_modes):
    """Reference construction of the i-th Weyl--Brauer matrix by Kronecker products."""
    if not 1 <= i <= 2 * n_modes:
        raise ValueError(f"Majorana index {i} outside [1, {2 * n_modes}]")
    k = (i + 1) // 2
    letters = ["Z"] * (k - 1) + ["X" if i % 2 == 1 else "Y"] + ["I"] * (n_modes - k)
    return reduce(np.kron, (_PAULI[s] for s in letters))


def materialize(m, max_qubits=DENSE_QUBIT_CAP):
    """Exact dense matrix of the monomial."""
    if m.n_modes > max_qubits:
        raise ValueError(f"{m.n_modes} qubits exceeds dense cap {max_qubits}")
    x, z, quarter = pauli_masks(m)
    dim = 1 << m.n_modes
    idx = np.arange(dim, dtype=np.uint64)
    signs = 1.0 - 2.0 * (np.bitwise_count(idx & np.uint64(z)) & np.uint64(1)).astype(
        np.float64
    )
    mat = np.zeros((dim, dim), dtype=complex)
    mat[idx ^ np.uint64(x), idx] = _QUARTER[quarter] * signs
    return mat


def apply_monomial(m, vec, scale=1.0, out=None):
    """out += scale * materialize(m) @ vec, matrix-free in O(2^n)."""
    dim = 1 << m.n_modes
    if vec.shape != (dim,):
        raise ValueError(f"state vector has dimension {vec.shape}, expected ({dim},)")
    if out is None:
        out = np.zeros(dim, dtype=complex)
    elif out.shape != (dim,):
        raise ValueError("output buffer dimension mismatch")
    x, z, quarter = pauli_masks(m)
    backend.apply_terms(
        np.array([x], dtype=np.uint64),
        np.array([z], dtype=np.uint64),
        np.array([scale * _QUARTER[quarter]], dtype=complex),
        np.ascontiguousarray(vec, dtype=complex),
        out,
    )
    return out


class PackedTerms:
    """A real-coefficient sum of monomials packed into kernel-ready mask arrays.

    The packed weight of a term is ``coeff * i^quarter``, so applying or
    materializing needs no further phase bookkeeping.
    """

    def __init__(self, terms, n_modes):
        self.n_modes = n_modes
        self.dim = 1 << n_modes
        m = len(terms)
        self.x_masks = np.empty(m, dtype=np.uint64)
        self.z_masks = np.empty(m, dtype=np.uint64)
        self.weights = np.empty(m, dtype=complex)
        for t, (coeff, mon) in enumerate(terms):
            if mon.n_modes != n_modes:
                raise ValueError("term register mismatch")
            x, z, quarter = pauli_masks(mon)
            self.x_masks[t] = x
            self.z_masks[t] = z
            self.weights[t] = coeff * _QUARTER[quarter]

    def __len__(self):
        return len(self.weights)

    def apply(self, vec, out=None):
        if out is None:
            out = np.zeros(self.dim, dtype=complex)
        vec = np.ascontiguousarray(vec, dtype=complex)
        backend.apply_terms(self.x_masks, self.z_masks, self.weights, vec, out)
        return out

    def materialize(self, max_qubits=DENSE_QUBIT_CAP):
        if self.n_modes > max_qubits:
            raise ValueError(f"{self.n_modes} qubits exceeds dense cap {max_qubits}")
        mat = np.zeros((self.dim, self.dim), dtype=complex)
        backend.materialize_terms(self.x_masks, self.z_masks, self.weights, mat)
        return mat

    def expectations(self, vec):
        """Per-term <vec| w_t P_t |vec> values."""
        raw = np.empty(len(self.weights), dtype=complex)
        vec = np.ascontiguousarray(vec, dtype=complex)
        backend.term_expectations(self.x_masks, self.z_masks, vec, raw)
        return self.weights * raw
