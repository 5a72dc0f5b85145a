"""Build script for the optional compiled kernel.

The package is fully functional without the extension; `bicopter_safe._engine`
falls back to the pure-Python kernel when `_kernel_c` is absent.
"""
from setuptools import setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/bicopter_safe/_kernel_c.pyx"],
        language_level=3,
        compiler_directives={
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
