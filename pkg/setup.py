"""Build script: compiles the optional Cython kernel extension.

The package works without the extension (a pure-numpy fallback is selected
at import time); set ONTOSELECT_SKIP_EXT=1 to skip compilation entirely.
"""

import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("ONTOSELECT_SKIP_EXT") != "1":
    try:
        import numpy
        from Cython.Build import cythonize

        kernels = Extension(
            "ontoselect._core._kernels",
            ["src/ontoselect/_core/_kernels.pyx"],
            include_dirs=[numpy.get_include()],
            extra_compile_args=["-O3"],
        )
        ext_modules = cythonize(
            [kernels],
            compiler_directives={
                "language_level": 3,
                "boundscheck": False,
                "wraparound": False,
                "cdivision": True,
                "initializedcheck": False,
            },
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
