"""Build the optional Cython kernel; the package falls back to pure Python without it."""
import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # pragma: no cover
    cythonize = None

ext_modules = []
if cythonize is not None:
    ext_modules = cythonize(
        [
            Extension(
                "mmrelay._busy",
                ["src/mmrelay/_busy.pyx"],
                include_dirs=[np.get_include()],
                optional=True,
            )
        ],
        compiler_directives={"language_level": 3},
    )

setup(ext_modules=ext_modules)
