"""Build the optional Cython kernels.

Set ``QWMARKOV_NO_EXT=1`` to skip compilation; the package then runs on
the numpy fallback in ``qwmarkov._fallback``.
"""
import os

import numpy as np
from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("QWMARKOV_NO_EXT"):
    try:
        from Cython.Build import cythonize
    except ImportError:
        cythonize = None
    if cythonize is not None:
        ext_modules = cythonize(
            [
                Extension(
                    "qwmarkov._kernels",
                    ["src/qwmarkov/_kernels.pyx"],
                    include_dirs=[np.get_include()],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
