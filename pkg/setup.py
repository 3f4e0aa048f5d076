"""Build script for the optional compiled Gillespie kernel.

The extension is a pure speed-up; if Cython or a C compiler is missing the
package still works through the pure-Python kernel selected at import time.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

ext_modules = []
if cythonize is not None:
    ext_modules = cythonize(
        [
            Extension(
                "masep._gillespie_core",
                ["src/masep/_gillespie_core.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
