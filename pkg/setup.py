"""Build script wiring the optional Cython episode-loop extension.

The package works without the extension (a pure-Python twin of the loop is
selected at import time), so a missing/failed Cython toolchain only costs
speed, never functionality.
"""

import os

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize
    from setuptools import Extension

    if not os.path.exists("src/camopt/_core.pyx"):
        raise ImportError("extension sources absent")
    ext_modules = cythonize(
        [
            Extension(
                "camopt._core",
                sources=["src/camopt/_core.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                # contraction off: the compiled loop must round exactly like
                # the pure-Python twin, and fused multiply-adds would not
                extra_compile_args=["-O3", "-ffp-contract=off", "-fno-builtin-sin", "-fno-builtin-cos"],
            )
        ],
        language_level=3,
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
