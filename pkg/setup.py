"""Build script: compiles the optional t-SNE extension module.

The extension is a pure speed-up; the package falls back to a numpy
implementation when the compiled module is missing (set IROPSKIT_NO_EXT=1
to skip the build deliberately).
"""

import os
import sys

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """Build extensions, but degrade to the pure-Python fallback on failure."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing, etc.
            print(f"warning: extension build skipped ({exc}); "
                  "iropskit will use the numpy t-SNE backend", file=sys.stderr)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print(f"warning: building {ext.name} failed ({exc}); "
                  "iropskit will use the numpy t-SNE backend", file=sys.stderr)


ext_modules = []
cmdclass = {}
if os.environ.get("IROPSKIT_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [Extension("iropskit._tsne_core", ["src/iropskit/_tsne_core.pyx"])],
            language_level=3,
        )
        cmdclass["build_ext"] = OptionalBuildExt
    except ImportError:
        print("warning: Cython not available; building without the compiled "
              "t-SNE backend", file=sys.stderr)

setup(ext_modules=ext_modules, cmdclass=cmdclass)
