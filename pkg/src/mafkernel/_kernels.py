"""Backend selection for the cut-set kernels.

The kernel bodies live in ``_kernel_impl.py`` and are loaded twice: once
with numba's ``njit`` applied (compiled, disk-cached) and once untouched
(pure Python over numpy).  ``MAFKERNEL_NUMBA=0`` in the environment selects
the pure path for the default backend; both stay available in-process for
cross-checking and benchmarking.

Topology agreement is decided with rooted triplets (LCA depths) or unrooted
quartets (four-point condition on leaf-to-leaf path lengths); a binary tree
is determined by its triplets / quartets.
"""

from __future__ import annotations

import importlib.util
import os
import sys
from pathlib import Path
from types import ModuleType

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is a declared dependency
    njit = None

_IMPL = Path(__file__).with_name("_kernel_impl.py")
_BACKENDS: dict[bool, ModuleType] = {}


def numba_enabled() -> bool:
    flag = os.environ.get("MAFKERNEL_NUMBA", "1").strip().lower()
    return njit is not None and flag not in ("0", "false", "no", "off")


def _load(use_numba: bool) -> ModuleType:
    name = f"{__package__}._kernel_impl_{'jit' if use_numba else 'py'}"
    spec = importlib.util.spec_from_file_location(name, _IMPL)
    module = importlib.util.module_from_spec(spec)
    if use_numba:
        module._JIT = njit(nogil=True, cache=True)
    module.compiled = use_numba
    # numba's disk cache re-imports the defining module by name
    sys.modules[name] = module
    spec.loader.exec_module(module)
    return module


def backend(use_numba: bool | None = None) -> ModuleType:
    """Kernel set; defaults to numba unless disabled by ``MAFKERNEL_NUMBA``."""
    if use_numba is None:
        use_numba = numba_enabled()
    use_numba = bool(use_numba) and njit is not None
    if use_numba not in _BACKENDS:
        _BACKENDS[use_numba] = _load(use_numba)
    return _BACKENDS[use_numba]
