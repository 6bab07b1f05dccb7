"""Kernel backend selector.

Exposes the term-map kernel from the compiled extension ``wmds._kernel``
when it is importable, falling back to the pure-Python twin
``wmds._kernel_py``.  Set WMDS_KERNEL=py or WMDS_KERNEL=c to force a
backend (forcing the compiled one raises if the extension is missing).

Both backends implement the same contract over packed-key term maps:
``BACKEND``, the packing constants and helpers (``SLOT_BITS``,
``SLOT_BIAS``, ``SLOT_MASK``, ``EXP_MAX``, ``pack_key``, ``unpack_key``,
``zero_key``) and the five operations ``axpy_terms``, ``mul_terms``,
``substitute_terms``, ``divide_binomial_terms``, ``eval_zero_terms``.
"""

import os

_choice = os.environ.get("WMDS_KERNEL", "").strip().lower()

if _choice == "py":
    from . import _kernel_py as _impl
elif _choice == "c":
    from . import _kernel as _impl  # type: ignore[no-redef]
elif _choice == "":
    try:
        from . import _kernel as _impl  # type: ignore[no-redef]
    except ImportError:
        from . import _kernel_py as _impl
else:
    raise ImportError(f"WMDS_KERNEL must be 'py' or 'c', got {_choice!r}")

BACKEND = _impl.BACKEND
SLOT_BITS = _impl.SLOT_BITS
SLOT_BIAS = _impl.SLOT_BIAS
SLOT_MASK = _impl.SLOT_MASK
EXP_MAX = _impl.EXP_MAX
pack_key = _impl.pack_key
unpack_key = _impl.unpack_key
zero_key = _impl.zero_key
axpy_terms = _impl.axpy_terms
mul_terms = _impl.mul_terms
substitute_terms = _impl.substitute_terms
divide_binomial_terms = _impl.divide_binomial_terms
eval_zero_terms = _impl.eval_zero_terms
