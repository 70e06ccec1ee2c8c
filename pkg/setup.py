"""Build script: compiles the optional Cython speedup kernels.

If Cython or a C compiler is unavailable the build falls back to the
pure-Python kernels selected at import time by qirmsim._kernels.
"""

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        "src/qirmsim/_kernels/_speedups.pyx",
        compiler_directives={"language_level": "3"},
    )
except Exception as exc:  # pragma: no cover - build-env dependent
    print(f"qirmsim: building without compiled kernels ({exc})")

setup(ext_modules=ext_modules)
