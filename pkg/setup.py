"""Build script for the optional compiled Jacobi kernel.

The package works without the extension (a NumPy fallback is selected at
import time), so failure to compile is not fatal for development installs:
run ``pip install -e . --no-build-isolation`` on a machine with a C
compiler to get the fast kernel.
"""

from setuptools import Extension, setup

try:
    import numpy as np
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "cstarpinv._kernels._jacobi",
                ["src/cstarpinv/_kernels/_jacobi.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)
