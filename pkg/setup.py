"""Builds the optional compiled nearest-neighbor kernel.

If Cython or a C compiler is unavailable the extension is skipped and the
package falls back to the numpy implementation at import time.
"""

from setuptools import Extension, setup

try:
    import numpy
    from Cython.Build import cythonize

    # -ffp-contract=off keeps distance arithmetic bit-identical to the
    # numpy fallback (no FMA contraction).
    ext_modules = cythonize(
        [
            Extension(
                "huse._loo_cy",
                ["src/huse/_loo_cy.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3", "-ffp-contract=off"],
            )
        ],
        language_level=3,
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
