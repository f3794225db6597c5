"""Build script.  The compiled solver kernel is optional: if Cython or a C
compiler is unavailable the package installs anyway and falls back to the
pure-python kernel at import time."""

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/qdiode/_kernel.pyx"],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )
    include_dirs = [numpy.get_include()]
    for ext in ext_modules:
        ext.include_dirs.extend(include_dirs)
except Exception as exc:  # pragma: no cover - build-environment dependent
    import sys

    print(f"qdiode: building without compiled kernel ({exc})", file=sys.stderr)

setup(ext_modules=ext_modules)
