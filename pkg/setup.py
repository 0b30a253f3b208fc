import os

from setuptools import Extension, setup

_PYX = os.path.join("src", "wurmac", "sim", "_ckernel.pyx")

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [Extension("wurmac.sim._ckernel", [_PYX])],
        compiler_directives={"language_level": "3"},
    ) if os.path.exists(_PYX) else []
except ImportError:
    # No Cython: install pure-Python only, the sim falls back at import time.
    ext_modules = []

setup(ext_modules=ext_modules)
