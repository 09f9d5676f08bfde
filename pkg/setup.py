"""Build hook for the optional compiled kernel.

The package is pure Python plus one Cython extension holding the greedy merge
loop. The extension is a performance twin of framepress/_kernels_py.py; when
Cython or a C compiler is unavailable the build still succeeds and the package
falls back to the numpy backend at import time (see framepress/kernels.py).
"""

from setuptools import Extension, setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "framepress._kernels",
                sources=["src/framepress/_kernels.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                extra_compile_args=["-O3"],
                optional=True,
            )
        ],
        language_level=3,
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
