"""Kernel backend selection: compiled extension when available, numpy otherwise.

``SYKLAB_PURE_PYTHON=1`` forces the fallback (used by the benchmark to
compare both paths in one process).
"""

import os

from . import _pykernels

if os.environ.get("SYKLAB_PURE_PYTHON") == "1":
    _impl = _pykernels
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl

        BACKEND = "compiled"
    except ImportError:
        _impl = _pykernels
        BACKEND = "python"

apply_terms = _impl.apply_terms
term_expectations = _impl.term_expectations
materialize_terms = _impl.materialize_terms

pure_apply_terms = _pykernels.apply_terms
pure_term_expectations = _pykernels.term_expectations
pure_materialize_terms = _pykernels.materialize_terms
