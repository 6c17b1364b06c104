"""Build script for the optional compiled kernels.

The package works without them: ``hyptail._kernel`` falls back to the
pure-Python implementation when the extension is missing.
"""
from setuptools import setup

try:
    from Cython.Build import cythonize
    from setuptools import Extension
except ImportError:  # pragma: no cover
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "hyptail._ckernels",
                ["src/hyptail/_ckernels.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
        compiler_directives={"boundscheck": False, "wraparound": False, "cdivision": True},
    )

setup(ext_modules=ext_modules)
