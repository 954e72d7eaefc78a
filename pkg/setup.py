"""Build script: compiles the optional bit-parallel evaluation kernel.

The package is fully functional without the compiled extension; if Cython
(or a C compiler) is unavailable the install proceeds with the pure-Python
kernel only, and `modalcorr.kernel` selects the fallback at import time.
"""

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/modalcorr/_kernel.pyx"],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )
except Exception:
    ext_modules = []

setup(ext_modules=ext_modules)
