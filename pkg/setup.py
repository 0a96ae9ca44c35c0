"""Build hook for the optional compiled kernel backend.

The extension is best effort: without Cython or a C toolchain the install
still succeeds and the package runs on the pure-Python kernels. Compile
flags deliberately exclude -ffast-math and -march=native; value-changing
optimizations would break the bit-for-bit parity between the compiled and
pure backends.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "noarb._kernels._core",
                ["src/noarb/_kernels/_core.pyx"],
                extra_compile_args=["-O2"],
                optional=True,
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
