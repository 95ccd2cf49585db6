import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

ext_modules = []
if cythonize is not None:
    ext_modules = cythonize(
        Extension(
            "underspec._core",
            ["src/underspec/_core.pyx"],
            include_dirs=[np.get_include()],
            define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            extra_compile_args=["-O2", "-ffp-contract=off"],
            optional=True,
        ),
        compiler_directives={"language_level": 3},
    )

setup(ext_modules=ext_modules)
