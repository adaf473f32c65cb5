from setuptools import Extension, setup
from Cython.Build import cythonize

# -ffp-contract=off keeps a*b+c as two IEEE operations so the compiled
# kernels are bitwise identical to the pure-Python fallback.
extensions = [
    Extension(
        "feedback_learn._kernels",
        ["src/feedback_learn/_kernels.pyx"],
        extra_compile_args=["-O3", "-ffp-contract=off"],
    )
]

setup(
    ext_modules=cythonize(
        extensions,
        compiler_directives={"language_level": "3"},
    )
)
