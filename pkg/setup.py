"""Build script: compiles the optional Cython kernels.

The package works without the extension (pure-numpy fallback is selected at
import time), so a failed compile only costs speed. Set DREAMSNN_NO_EXT=1 to
skip the extension build entirely.
"""

import os

from setuptools import setup

ext_modules = []
if not os.environ.get("DREAMSNN_NO_EXT"):
    try:
        import numpy
        from Cython.Build import cythonize

        ext_modules = cythonize(
            ["src/dreamsnn/kernels/_speedups.pyx"],
            language_level=3,
            compiler_directives={
                "boundscheck": False,
                "wraparound": False,
                "cdivision": True,
            },
        )
        for ext in ext_modules:
            ext.include_dirs.append(numpy.get_include())
            ext.extra_compile_args = ["-O3"]
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
