"""Build script: compiles the Hamilton-search kernel if Cython and a C
compiler are available.  The package works without the extension (a pure
Python fallback is selected at import time), so a failed build is not fatal.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "bipham.hamkernel._fast",
                sources=["src/bipham/hamkernel/_fast.pyx"],
                extra_compile_args=["-O2"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
