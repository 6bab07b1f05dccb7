"""Build script: compiles the optional Cython kernel.

The package is fully functional without the extension (a pure-Python twin of
the kernel is selected at import time), so any failure here downgrades to a
source-only install instead of aborting.
"""

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "wmds._kernel",
                ["src/wmds/_kernel.pyx"],
                language="c++",
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except Exception as exc:  # pragma: no cover - environment dependent
    print(f"wmds: skipping Cython kernel build ({exc}); pure-Python kernel will be used")

setup(ext_modules=ext_modules)
