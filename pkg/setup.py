"""Build the optional Cython kernel extension.

The package works without it: ``dionet._backend`` falls back to the
pure-Python kernels when ``dionet._kernels`` cannot be imported.
"""
import os

from setuptools import setup

ext_modules = []
if os.environ.get("DIONET_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:
        pass
    else:
        ext_modules = cythonize(
            [
                Extension(
                    "dionet._kernels",
                    ["src/dionet/_kernels.pyx"],
                    # contraction into FMA would break bit-parity with the
                    # pure-Python fallback
                    extra_compile_args=["-O3", "-ffp-contract=off"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
