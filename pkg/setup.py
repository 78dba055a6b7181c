from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # pure-Python install; lattice_fill.kernels falls back
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "lattice_fill._kernels",
                ["src/lattice_fill/_kernels.pyx"],
                extra_compile_args=["-O3"],
                optional=True,
            )
        ],
        compiler_directives={"language_level": "3", "boundscheck": False, "wraparound": False, "cdivision": True},
    )

setup(ext_modules=ext_modules)
