"""Build script for the optional compiled training core.

The skip-gram inner loop ships as a Cython extension. If Cython or a C
compiler is unavailable the build still succeeds and the package falls back
to the pure-numpy implementation at import time. Set ASPECTKIT_REQUIRE_EXT=1
to turn a failed extension build into a hard error.
"""

import os
import sys

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext

REQUIRE_EXT = os.environ.get("ASPECTKIT_REQUIRE_EXT", "") not in ("", "0")


class optional_build_ext(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:
            self._failed(exc)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            self._failed(exc)

    def _failed(self, exc):
        if REQUIRE_EXT:
            raise
        print(
            f"WARNING: building the compiled training core failed ({exc}); "
            "falling back to the pure-Python implementation",
            file=sys.stderr,
        )


def extensions():
    try:
        from Cython.Build import cythonize
    except ImportError:
        if REQUIRE_EXT:
            raise
        print(
            "WARNING: Cython not available; skipping the compiled training core",
            file=sys.stderr,
        )
        return []
    ext = Extension(
        "aspectkit.sgns._inner",
        sources=["src/aspectkit/sgns/_inner.pyx"],
        extra_compile_args=["-O3"],
    )
    return cythonize(
        [ext],
        compiler_directives={
            "language_level": 3,
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
            "initializedcheck": False,
            "embedsignature": True,
        },
    )


setup(ext_modules=extensions(), cmdclass={"build_ext": optional_build_ext})
