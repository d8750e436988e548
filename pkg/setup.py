"""Build script.

The compiled kernel is optional: if Cython or a C compiler is missing the
package installs anyway and falls back to the pure-Python kernel at import
time (see quivertilt.linalg).
"""

from setuptools import Extension, setup

ext_modules = []
try:
    import numpy as np
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "quivertilt._fpkernel",
                ["src/quivertilt/_fpkernel.pyx"],
                include_dirs=[np.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except Exception as exc:  # pragma: no cover - build environment dependent
    import sys

    print(f"quivertilt: skipping compiled kernel ({exc})", file=sys.stderr)

setup(ext_modules=ext_modules)
