from setuptools import Extension, setup

# The compiled Jacobi kernel is optional: without Cython the package falls
# back to the numpy eigensolver at import time.
try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "specshift._jacobi",
                sources=["src/specshift/_jacobi.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )

setup(ext_modules=ext_modules)
