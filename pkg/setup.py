import os

from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("CANTRANS_SKIP_EXT"):
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "cantrans._core",
                    ["src/cantrans/_core.pyx"],
                    # -ffp-contract=off keeps the compiled kernels bit-compatible
                    # with the pure-Python fallback (no FMA contraction).
                    extra_compile_args=["-O3", "-ffp-contract=off"],
                )
            ],
            language_level=3,
        )
    except ImportError:
        # No Cython: install the pure-Python package; the compiled core is
        # selected at import only when present.
        ext_modules = []

setup(ext_modules=ext_modules)
