import os

import numpy as np
from setuptools import Extension, setup

# GSURF_NO_EXT=1 installs the pure-Python fallback only.
ext_modules = []
if not os.environ.get("GSURF_NO_EXT"):
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "gsurf._ckernels",
                ["src/gsurf/_ckernels.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
