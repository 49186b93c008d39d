import os

from setuptools import Extension, setup

# The Cython kernel is an optional speedup; kinematics.py falls back to the
# pure-Python twin when the extension is absent. Set LPTVEHICLE_NO_EXT=1 to
# skip compilation entirely.
ext_modules = []
if not os.environ.get("LPTVEHICLE_NO_EXT"):
    try:
        from Cython.Build import cythonize
    except ImportError:
        cythonize = None
    if cythonize is not None:
        ext_modules = cythonize(
            [
                Extension(
                    "lptvehicle._kinematics_cy",
                    ["src/lptvehicle/_kinematics_cy.pyx"],
                    # No -ffast-math and contraction off: the compiled kernel
                    # must produce bit-identical doubles to the pure-Python one.
                    extra_compile_args=["-O2", "-ffp-contract=off"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
