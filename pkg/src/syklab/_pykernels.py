"""Pure-numpy fallback for the compiled kernels in ``_kernels.pyx``.

Same signatures, same semantics; roughly 10x slower on large registers.
Selected automatically when the extension is missing or when
``SYKLAB_PURE_PYTHON=1`` is set.
"""

import numpy as np

_ONE = np.uint64(1)


def _signs(indices, z_mask):
    # (-1)^popcount(i & z) as float, vectorized over the basis index array
    return 1.0 - 2.0 * (np.bitwise_count(indices & z_mask) & _ONE).astype(np.float64)


def apply_terms(x_masks, z_masks, weights, vec, out):
    """out += sum_t weights[t] * P_t @ vec, term by term in index order."""
    dim = vec.shape[0]
    indices = np.arange(dim, dtype=np.uint64)
    for t in range(x_masks.shape[0]):
        targets = indices ^ x_masks[t]
        # targets is a permutation of indices, so fancy += has no collisions
        out[targets] += (weights[t] * _signs(indices, z_masks[t])) * vec


def term_expectations(x_masks, z_masks, vec, out):
    """out[t] = <vec| P_t |vec> for unit-weight terms."""
    dim = vec.shape[0]
    indices = np.arange(dim, dtype=np.uint64)
    cvec = vec.conj()
    for t in range(x_masks.shape[0]):
        out[t] = np.dot(cvec[indices ^ x_masks[t]], _signs(indices, z_masks[t]) * vec)


def materialize_terms(x_masks, z_masks, weights, mat):
    """mat += sum_t weights[t] * P_t as a dense matrix."""
    dim = mat.shape[0]
    indices = np.arange(dim, dtype=np.uint64)
    for t in range(x_masks.shape[0]):
        mat[indices ^ x_masks[t], indices] += weights[t] * _signs(indices, z_masks[t])
