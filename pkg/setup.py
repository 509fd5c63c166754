"""Builds the optional compiled kernel.

The package works without the extension (a NumPy fallback is selected at
import time); set CROSSNORM_SKIP_EXT=1 to force a pure-Python install.
"""

import os

from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("CROSSNORM_SKIP_EXT"):
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "crossnorm.kernels._batched",
                ["src/crossnorm/kernels/_batched.pyx"],
            )
        ],
        language_level="3",
    )

setup(ext_modules=ext_modules)
