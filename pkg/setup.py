"""Build script for the optional compiled kernel.

The package is fully functional without the extension: the import machinery
in ``mfdcca.kernels`` falls back to a vectorized NumPy implementation when
``mfdcca.kernels._speedups`` is missing.  ``optional=True`` keeps installs
working on hosts without a C toolchain.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "mfdcca.kernels._speedups",
                ["src/mfdcca/kernels/_speedups.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                optional=True,
            )
        ],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
