"""Build script: compiles the Cython stepping kernel.

The package works without the extension (a NumPy fallback is selected at
import time); set SPINFILTER_SKIP_EXT=1 to skip compilation entirely, e.g.
on platforms without a C toolchain.
"""

import os

from setuptools import setup

if os.environ.get("SPINFILTER_SKIP_EXT") == "1":
    ext_modules = []
else:
    import numpy
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "spinfilter._core",
                ["src/spinfilter/_core.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )

setup(ext_modules=ext_modules)
