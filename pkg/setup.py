"""Build script: compiles the optional RHS kernel when Cython and a C compiler are present."""
import os

from setuptools import setup

ext_modules = []
if os.environ.get("BONDI_HDG_PURE_PYTHON") != "1":
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:
        pass
    else:
        ext_modules = cythonize(
            [
                Extension(
                    "bondi_hdg._ccore",
                    ["src/bondi_hdg/_ccore.pyx"],
                    include_dirs=[numpy.get_include()],
                    extra_compile_args=["-O3"],
                )
            ],
            language_level=3,
        )

setup(ext_modules=ext_modules)
