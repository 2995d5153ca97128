"""Build script: compiles the quadrature kernel extension when possible.

The extension is optional. If Cython or a C compiler is unavailable the
package installs anyway and falls back to the pure-Python kernel at import
time (see sectlap._backend).
"""
import sys

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """Skip the extension instead of failing the whole install."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing, etc.
            print(f"warning: skipping compiled kernel ({exc})", file=sys.stderr)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print(f"warning: skipping {ext.name} ({exc})", file=sys.stderr)


ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "sectlap._kernels",
                ["src/sectlap/_kernels.pyx"],
                # -fno-builtin: stop gcc from fusing sin+cos into sincos etc. so the
                # compiled kernel matches the pure-Python twin bit for bit
                extra_compile_args=["-O3", "-fno-builtin"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    print("warning: Cython not available, building without compiled kernel", file=sys.stderr)

setup(ext_modules=ext_modules, cmdclass={"build_ext": OptionalBuildExt})
