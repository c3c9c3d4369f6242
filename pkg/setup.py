from setuptools import Extension, setup

# The compiled kernel module is optional: loopflow.kernels falls back to the
# pure-Python implementation when the extension is absent.
try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [Extension("loopflow._kernels", ["src/loopflow/_kernels.pyx"])],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)
