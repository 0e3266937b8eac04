"""Build script: compiles the optional stepping kernel.

The package is fully functional without the extension (a numpy fallback is
selected at import time); the build therefore tolerates a missing compiler
or a failed cythonization instead of aborting the install.
"""

from setuptools import Extension, setup

extensions = []
try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "cbpsim._kernels",
                ["src/cbpsim/_kernels.pyx"],
                # -ffp-contract=off keeps the float ops identical to the
                # numpy fallback (no fused multiply-add), so both backends
                # produce bit-identical trajectories.
                extra_compile_args=["-O3", "-ffp-contract=off"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    pass

setup(ext_modules=extensions)
