"""Build hook for the optional compiled kernels.

Without Cython or a C compiler the package installs in pure-Python mode.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

if cythonize is not None:
    try:
        ext_modules = cythonize(
            [Extension("bilipfrac._ckernels", ["src/bilipfrac/_ckernels.pyx"], extra_compile_args=["-O2"])],
            compiler_directives={"language_level": "3"},
        )
    except Exception as exc:  # a broken toolchain should not block installation
        print(f"skipping compiled kernels: {exc}")
        ext_modules = []

setup(ext_modules=ext_modules)
