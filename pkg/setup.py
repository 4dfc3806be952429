"""Build script: compiles the optional fast simulation kernel.

The package is fully functional without the compiled extension (a pure
NumPy/Python twin is selected at import time), so a missing compiler or
Cython must not break installation.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "hessopt._fastcore",
                ["src/hessopt/_fastcore.pyx"],
                extra_compile_args=["-O2"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except Exception as exc:  # pragma: no cover - platform dependent
    print(f"hessopt: skipping compiled kernel ({exc}); pure-Python backend will be used")

setup(ext_modules=ext_modules)
