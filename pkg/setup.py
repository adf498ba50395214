"""Build script: compiles the optional fast kernel extension.

The package works without the extension (a numpy fallback is selected at
import time), so any failure here degrades to a pure-Python install.
"""

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "harmonica.models.kernels._mlp_cy",
                ["src/harmonica/models/kernels/_mlp_cy.pyx"],
            )
        ],
        language_level=3,
    )
except Exception as exc:  # pragma: no cover - depends on build host
    print(f"warning: fast kernel not built ({exc}); numpy fallback will be used")

setup(ext_modules=ext_modules)
