from pathlib import Path

from Cython.Build import cythonize
from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext

KERNEL_DIR = Path("src") / "kgquest" / "_kernel"


class build_ext_with_shared_kernel(build_ext):
    """Standard extension build plus a standalone kernel library.

    libwcrkernel.so is linked from the same wcrkernel.c the extension
    embeds and dropped next to the extension module, so foreign-function
    callers (kgquest.ffi reports the path) load the exact compiled code
    the Python package runs.
    """

    def run(self):
        super().run()
        self._link_shared_kernel()

    def _link_shared_kernel(self):
        objects = self.compiler.compile(
            [str(KERNEL_DIR / "wcrkernel.c")],
            output_dir=self.build_temp,
            include_dirs=[str(KERNEL_DIR)],
            extra_postargs=["-O2", "-fPIC"],
        )
        out_dir = Path(self.get_ext_fullpath("kgquest._kernel._speed")).parent
        out_dir.mkdir(parents=True, exist_ok=True)
        self.compiler.link_shared_object(objects, str(out_dir / "libwcrkernel.so"))


setup(
    ext_modules=cythonize(
        [
            Extension(
                "kgquest._kernel._speed",
                sources=[
                    str(KERNEL_DIR / "_speed.pyx"),
                    str(KERNEL_DIR / "wcrkernel.c"),
                ],
                include_dirs=[str(KERNEL_DIR)],
            )
        ],
        language_level=3,
    ),
    cmdclass={"build_ext": build_ext_with_shared_kernel},
)
