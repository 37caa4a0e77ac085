from setuptools import Extension, setup

# The compiled kernels are an optional accelerator: the package falls back
# to the numpy implementation at import time if the extension is absent.
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "qteleport._kernels_cy",
                ["src/qteleport/_kernels_cy.pyx"],
                # -ffp-contract=off keeps results bitwise identical to the
                # numpy fallback (no FMA contraction in the complex updates)
                extra_compile_args=["-O3", "-ffp-contract=off"],
            )
        ],
        language_level=3,
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
