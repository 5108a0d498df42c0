"""Build script for the optional compiled kernels.

The package is fully functional without the extension (a numpy fallback is
selected at import time); any failure to compile must therefore not abort
the install.
"""

import warnings

from setuptools import setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    """build_ext that downgrades compiler failures to a warning."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # no compiler, missing headers, ...
            warnings.warn(f"compiled kernels skipped ({exc}); "
                          "the pure-numpy backend will be used")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            warnings.warn(f"building {ext.name} failed ({exc}); "
                          "the pure-numpy backend will be used")


def extensions():
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError as exc:
        warnings.warn(f"Cython/numpy unavailable at build time ({exc}); "
                      "skipping compiled kernels")
        return []
    return cythonize(
        [
            Extension(
                "gbvar._kernels",
                sources=["src/gbvar/_kernels.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )


setup(
    ext_modules=extensions(),
    cmdclass={"build_ext": optional_build_ext},
)
