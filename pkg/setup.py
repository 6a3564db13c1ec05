import os

from setuptools import Extension, setup


def build_ext_modules():
    # The compiled tableau kernel is optional; knightmark.lp falls back to
    # the pure-Python kernel when the extension is missing.
    if os.environ.get("KNIGHTMARK_NO_EXT"):
        return []
    try:
        from Cython.Build import cythonize
    except Exception:
        return []
    ext = Extension(
        name="knightmark.lp._tableau",
        sources=[os.path.join("src", "knightmark", "lp", "_tableau.pyx")],
        libraries=["gmp"],
        extra_compile_args=["-O3"],
        language="c",
    )
    return cythonize([ext], language_level=3)


setup(ext_modules=build_ext_modules())
