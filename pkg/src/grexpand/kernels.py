"""Backend selection for the lattice kernels.

The compiled extension is used when it imported successfully and every
modulus fits comfortably in 64-bit arithmetic; otherwise the
arbitrary-precision Python implementation runs. Set ``GREXPAND_PURE=1``
to force the Python backend.
"""

from __future__ import annotations

import os

from . import _pykernels

try:
    if os.environ.get("GREXPAND_PURE", "") not in ("", "0"):
        raise ImportError("pure backend requested")
    from . import _ckernels
except ImportError:
    _ckernels = None

BACKEND = "compiled" if _ckernels is not None else "python"

# products of two reduced entries plus carries must stay below 2**63
_C_LIMIT = 1 << 30


def _pick(moduli):
    if _ckernels is not None and (not moduli or max(moduli) < _C_LIMIT):
        return _ckernels
    return _pykernels


def hnf_mod(rows, moduli):
    return _pick(moduli).hnf_mod(rows, moduli)


def reduce_vector(basis, moduli, vec):
    return _pick(moduli).reduce_vector(basis, moduli, vec)


def is_member(basis, moduli, vec) -> bool:
    return _pick(moduli).reduce_vector(basis, moduli, vec) is None


def trajectory(moduli, A, F_rows, n_max, A_inv=None, stop=True, extra=0):
    return _pick(moduli).trajectory(moduli, A, F_rows, n_max, A_inv, stop, extra)


def chain_violation(moduli, bases) -> int:
    return _pick(moduli).chain_violation(moduli, bases)


def pivots_order(basis, moduli) -> int:
    """Index of the lattice over the relation lattice, i.e. the subgroup order."""
    num = 1
    den = 1
    for j, m in enumerate(moduli):
        num *= m
        den *= basis[j][j]
    return num // den
