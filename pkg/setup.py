import os

from setuptools import setup

ext_modules = []
if os.environ.get("CLIQUEPART_NO_EXT", "") != "1":
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "cliquepart._kernels._ckernels",
                    ["src/cliquepart/_kernels/_ckernels.pyx"],
                    include_dirs=[np.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        # no Cython: the pure-Python kernels are used at runtime
        ext_modules = []

setup(ext_modules=ext_modules)
