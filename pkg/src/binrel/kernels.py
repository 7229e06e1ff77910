"""Kernel lane selection.

Two interchangeable kernel modules implement the hot loops: a Cython
extension (``binrel._kernels_c``) and a pure-Python fallback
(``binrel._kernels_py``).  The compiled lane is preferred when importable;
set ``BINREL_KERNELS=py`` or ``BINREL_KERNELS=c`` to force one.
"""

from __future__ import annotations

import importlib
import os

ENV_VAR = "BINREL_KERNELS"

# operation codes shared by both lanes
OP_UNION, OP_INTER, OP_DIFF, OP_SYMDIFF = 0, 1, 2, 3

_ALIASES = {
    "py": "binrel._kernels_py",
    "pure": "binrel._kernels_py",
    "python": "binrel._kernels_py",
    "c": "binrel._kernels_c",
    "cython": "binrel._kernels_c",
    "compiled": "binrel._kernels_c",
}


def load_lane(name: str):
    """Import and return a kernel module by lane name ('py' or 'c')."""
    try:
        modname = _ALIASES[name.strip().lower()]
    except KeyError:
        raise ValueError(f"unknown kernel lane {name!r}; expected 'py' or 'c'") from None
    return importlib.import_module(modname)


def _select():
    forced = os.environ.get(ENV_VAR, "").strip()
    if forced:
        return load_lane(forced)
    try:
        return importlib.import_module("binrel._kernels_c")
    except ImportError:
        return importlib.import_module("binrel._kernels_py")


impl = _select()


def active_lane() -> str:
    return "c" if impl.__name__.endswith("_c") else "py"


def use_lane(name: str) -> None:
    """Swap the active kernel lane (used by tests and the lane benchmark)."""
    global impl
    impl = load_lane(name)
