"""Locate the standalone scoring kernel for foreign-function callers.

`python3 -m kgquest.ffi` prints the absolute path of libwcrkernel.so so
non-Python hosts can dlopen the exact kernel this package was built with.
"""

import sys
from pathlib import Path

LIBRARY_NAME = "libwcrkernel.so"


def library_path() -> Path:
    lib = Path(__file__).resolve().parent / "_kernel" / LIBRARY_NAME
    if not lib.exists():
        raise FileNotFoundError(
            f"{lib} not found; build it with `python3 setup.py build_ext --inplace`"
        )
    return lib


def main(argv=None) -> int:
    try:
        print(library_path())
    except FileNotFoundError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
