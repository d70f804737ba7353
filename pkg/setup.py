"""Build script: compiles the optional C stepping kernel.

Set RINGSIM_NO_EXT=1 to skip the extension; the package then runs on the
pure-Python kernel selected at import time.
"""

import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("RINGSIM_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize

        # -ffp-contract=off keeps C arithmetic bit-identical to the
        # pure-Python fallback (no fused multiply-add).
        ext_modules = cythonize(
            [
                Extension(
                    "ringsim._kernel",
                    ["src/ringsim/_kernel.pyx"],
                    extra_compile_args=["-O3", "-ffp-contract=off"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
