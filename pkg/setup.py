"""Build script: compiles the hot-loop kernels when Cython is available.

The package works without the extension (a numpy fallback is selected at
import time), so a failed build here is not fatal to installs from sdist.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "syklab._kernels",
                ["src/syklab/_kernels.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
