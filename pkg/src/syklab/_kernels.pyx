# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops for Pauli-string (XZ-mask) operator application.

Every operator here is a signed permutation in the computational basis:
``P|b> = w * (-1)^popcount(b & z) |b ^ x>`` with the term weight ``w``
(coefficient times quarter-phase) folded in by the caller. The pure-numpy
twin of this module is ``syklab._pykernels``.
"""

from libc.stdint cimport uint64_t

cdef extern from *:
    """
    #if defined(__GNUC__) || defined(__clang__)
    static inline int syklab_popcount64(unsigned long long x)
    { return __builtin_popcountll(x); }
    #else
    static inline int syklab_popcount64(unsigned long long x)
    { int c = 0; while (x) { x &= x - 1; c++; } return c; }
    #endif
    """
    int syklab_popcount64(unsigned long long x) nogil


def apply_terms(const uint64_t[::1] x_masks, const uint64_t[::1] z_masks,
                const double complex[::1] weights,
                const double complex[::1] vec, double complex[::1] out):
    """out += sum_t weights[t] * P_t @ vec, term by term in index order."""
    cdef Py_ssize_t n_terms = x_masks.shape[0]
    cdef Py_ssize_t dim = vec.shape[0]
    cdef Py_ssize_t t, i
    cdef uint64_t xm, zm, u
    cdef double complex w
    with nogil:
        for t in range(n_terms):
            xm = x_masks[t]
            zm = z_masks[t]
            w = weights[t]
            for i in range(dim):
                u = (<uint64_t> i)
                if syklab_popcount64(u & zm) & 1:
                    out[u ^ xm] = out[u ^ xm] - w * vec[i]
                else:
                    out[u ^ xm] = out[u ^ xm] + w * vec[i]


def term_expectations(const uint64_t[::1] x_masks, const uint64_t[::1] z_masks,
                      const double complex[::1] vec,
                      double complex[::1] out):
    """out[t] = <vec| P_t |vec> for unit-weight terms."""
    cdef Py_ssize_t n_terms = x_masks.shape[0]
    cdef Py_ssize_t dim = vec.shape[0]
    cdef Py_ssize_t t, i
    cdef uint64_t xm, zm, u
    cdef double complex acc
    with nogil:
        for t in range(n_terms):
            xm = x_masks[t]
            zm = z_masks[t]
            acc = 0
            for i in range(dim):
                u = (<uint64_t> i)
                if syklab_popcount64(u & zm) & 1:
                    acc = acc - vec[u ^ xm].conjugate() * vec[i]
                else:
                    acc = acc + vec[u ^ xm].conjugate() * vec[i]
            out[t] = acc


def materialize_terms(const uint64_t[::1] x_masks, const uint64_t[::1] z_masks,
                      const double complex[::1] weights,
                      double complex[:, ::1] mat):
    """mat += sum_t weights[t] * P_t as a dense matrix."""
    cdef Py_ssize_t n_terms = x_masks.shape[0]
    cdef Py_ssize_t dim = mat.shape[0]
    cdef Py_ssize_t t, i
    cdef uint64_t xm, zm, u
    cdef double complex w
    with nogil:
        for t in range(n_terms):
            xm = x_masks[t]
            zm = z_masks[t]
            w = weights[t]
            for i in range(dim):
                u = (<uint64_t> i)
                if syklab_popcount64(u & zm) & 1:
                    mat[u ^ xm, i] = mat[u ^ xm, i] - w
                else:
                    mat[u ^ xm, i] = mat[u ^ xm, i] + w
