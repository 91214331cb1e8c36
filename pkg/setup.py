"""Build the optional compiled chain kernel; the package works without it."""

import os

from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("SBMCOUNT_NO_EXT"):
    try:
        import numpy as np
        from Cython.Build import cythonize
    except ImportError:
        pass
    else:
        ext_modules = cythonize(
            [
                Extension(
                    "sbmcount._chain",
                    ["src/sbmcount/_chain.pyx"],
                    include_dirs=[np.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                    # no FMA contraction: the kernel must round exactly like the fallback
                    extra_compile_args=["-O3", "-ffp-contract=off"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
