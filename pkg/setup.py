import os

import numpy as np
from setuptools import Extension, setup

PYX = "src/railbeam/nn/_kernels.pyx"

ext_modules = []
if os.path.exists(PYX):
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "railbeam.nn._kernels",
                    [PYX],
                    include_dirs=[np.get_include()],
                    extra_compile_args=["-O3"],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        # No Cython: the package still works on the pure-numpy kernel backend.
        ext_modules = []

setup(ext_modules=ext_modules)
