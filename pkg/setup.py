import numpy as np
from Cython.Build import cythonize
from setuptools import Extension, setup

extensions = [
    Extension(
        "bitebullet._core._kernel",
        ["src/bitebullet/_core/_kernel.pyx"],
        include_dirs=[np.get_include(), "src/bitebullet/_core"],
        extra_compile_args=["-O3", "-fopenmp", "-ffp-contract=off"],
        extra_link_args=["-fopenmp"],
    )
]

setup(
    ext_modules=cythonize(extensions, compiler_directives={"language_level": "3"}),
)
