"""Build script for the optional compiled kernel extension.

The package works without the extension (a NumPy fallback is selected at
import time), so the build is marked optional: if no C toolchain is
available the install still succeeds.
"""

import os

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

ext_modules = []
if cythonize is not None and os.path.exists("src/quanton/_kernels.pyx"):
    ext_modules = cythonize(
        [
            Extension(
                "quanton._kernels",
                ["src/quanton/_kernels.pyx"],
                extra_compile_args=["-O3"],
                optional=True,
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
