"""Hot loops: straight-line circuit evaluation over Z/p on small square matrices.

Two backends compute identical results:

* ``numba`` -- ``@njit`` kernels on uint64 Montgomery residues. Only odd
  moduli below 2**62 qualify (the 128-bit product is assembled from 32-bit limbs).
* ``numpy`` -- object-dtype arrays of Python ints; works for any modulus.

Setting ``NCPIT_DISABLE_NUMBA=1`` in the environment forces the numpy path
everywhere. Other moduli always take the numpy path.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Sequence

import numpy as np

FAST_MODULUS_LIMIT = 1 << 62

OP_VAR, OP_CONST, OP_ADD, OP_MUL = 0, 1, 2, 3

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False

USING_NUMBA = HAVE_NUMBA and os.environ.get("NCPIT_DISABLE_NUMBA", "") not in ("1", "true", "yes")


@dataclass(frozen=True)
class Tape:
    """Flattened circuit: gate ``g`` is ``ops[g]`` applied to ``lhs[g]``/``rhs[g]``.

    For var gates ``lhs`` holds the 0-based variable index; for const gates it
    indexes ``consts``.
    """

    ops: np.ndarray
    lhs: np.ndarray
    rhs: np.ndarray
    consts: tuple
    output: int
    nvars: int


def pick_backend(modulus: int, backend: str | None = None) -> str:
    if backend is None:
        backend = "numba" if USING_NUMBA else "numpy"
    if backend == "numba":
        if not HAVE_NUMBA:
            raise RuntimeError("numba is not installed")
        # Montgomery form needs an odd modulus
        if modulus >= FAST_MODULUS_LIMIT or modulus % 2 == 0:
            return "numpy"
    elif backend != "numpy":
        raise ValueError(f"unknown backend {backend!r}")
    return backend


# ---------------------------------------------------------------------------
# numpy (object int) path


def _as_object(m, modulus: int) -> np.ndarray:
    a = np.empty(np.shape(m), dtype=object)
    for idx, x in np.ndenumerate(np.asarray(m, dtype=object)):
        a[idx] = int(x) % modulus
    return a


def _eval_tape_numpy(tape: Tape, mats: list, modulus: int, dim: int) -> np.ndarray:
    eye = np.zeros((dim, dim), dtype=object)
    eye[...] = 0
    for i in range(dim):
        eye[i, i] = 1
    vals: list = [None] * len(tape.ops)
    for g in range(len(tape.ops)):
        op = tape.ops[g]
        if op == OP_VAR:
            vals[g] = mats[tape.lhs[g]]
        elif op == OP_CONST:
            vals[g] = eye * (tape.consts[tape.lhs[g]] % modulus)
        elif op == OP_ADD:
            vals[g] = (vals[tape.lhs[g]] + vals[tape.rhs[g]]) % modulus
        else:
            vals[g] = (vals[tape.lhs[g]] @ vals[tape.rhs[g]]) % modulus
    return vals[tape.output]


def _matmul_numpy(a: np.ndarray, b: np.ndarray, modulus: int) -> np.ndarray:
    return (a @ b) % modulus


# ---------------------------------------------------------------------------
# numba path (Montgomery form, R = 2**64)


def _mont_pinv(modulus: int) -> int:
    r = 1 << 64
    return (-pow(modulus, -1, r)) % r


def _to_mont(a: np.ndarray, modulus: int) -> np.ndarray:
    flat = [(int(x) << 64) % modulus for x in np.asarray(a, dtype=object).ravel()]
    return np.array(flat, dtype=np.uint64).reshape(np.shape(a))


def _from_mont(a: np.ndarray, modulus: int) -> np.ndarray:
    rinv = pow(1 << 64, -1, modulus)
    out = np.empty(a.shape, dtype=object)
    for idx, x in np.ndenumerate(a):
        out[idx] = int(x) * rinv % modulus
    return out


if HAVE_NUMBA:

    @njit(cache=True)
    def _mul_wide(a, b):
        mask = np.uint64(0xFFFFFFFF)
        s = np.uint64(32)
        a_lo = a & mask
        a_hi = a >> s
        b_lo = b & mask
        b_hi = b >> s
        p0 = a_lo * b_lo
        p1 = a_lo * b_hi
        p2 = a_hi * b_lo
        p3 = a_hi * b_hi
        mid = (p0 >> s) + (p1 & mask) + (p2 & mask)
        lo = (p0 & mask) | ((mid & mask) << s)
        hi = p3 + (p1 >> s) + (p2 >> s) + (mid >> s)
        return hi, lo

    @njit(cache=True)
    def _mont_mul(a, b, p, pinv):
        hi, lo = _mul_wide(a, b)
        m = lo * pinv
        mhi, _ = _mul_wide(m, p)
        t = hi + mhi
        if lo != np.uint64(0):
            t += np.uint64(1)
        if t >= p:
            t -= p
        return t

    @njit(cache=True)
    def _add_mod(a, b, p):
        s = a + b
        if s >= p:
            s -= p
        return s

    @njit(cache=True)
    def _matmul_mont(a, b, out, p, pinv):
        n = a.shape[0]
        for i in range(n):
            for j in range(n):
                acc = np.uint64(0)
                for k in range(n):
                    x = a[i, k]
                    y = b[k, j]
                    if x != np.uint64(0) and y != np.uint64(0):
                        acc = _add_mod(acc, _mont_mul(x, y, p, pinv), p)
                out[i, j] = acc

    @njit(cache=True)
    def _eval_tape_mont(ops, lhs, rhs, consts_m, mats_m, p, pinv, output):
        ngates = ops.shape[0]
        dim = mats_m.shape[1]
        vals = np.zeros((ngates, dim, dim), dtype=np.uint64)
        for g in range(ngates):
            op = ops[g]
            if op == 0:
                vals[g, :, :] = mats_m[lhs[g]]
            elif op == 1:
                c = consts_m[lhs[g]]
                for i in range(dim):
                    vals[g, i, i] = c
            elif op == 2:
                a = lhs[g]
                b = rhs[g]
                for i in range(dim):
                    for j in range(dim):
                        vals[g, i, j] = _add_mod(vals[a, i, j], vals[b, i, j], p)
            else:
                _matmul_mont(vals[lhs[g]], vals[rhs[g]], vals[g], p, pinv)
        return vals[output].copy()

    @njit(cache=True)
    def _matmul_mont_entry(a, b, p, pinv):
        out = np.zeros_like(a)
        _matmul_mont(a, b, out, p, pinv)
        return out


def _eval_tape_numba(tape: Tape, mats: list, modulus: int, dim: int) -> np.ndarray:
    pinv = _mont_pinv(modulus)
    p = np.uint64(modulus)
    if tape.nvars:
        mats_m = np.stack([_to_mont(m, modulus) for m in mats])
    else:
        mats_m = np.zeros((1, dim, dim), dtype=np.uint64)
    consts_m = np.array([(c % modulus << 64) % modulus for c in tape.consts] or [0], dtype=np.uint64)
    out = _eval_tape_mont(tape.ops, tape.lhs, tape.rhs, consts_m, mats_m, p, np.uint64(pinv), tape.output)
    return _from_mont(out, modulus)


# ---------------------------------------------------------------------------
# public entry points


def eval_tape(tape: Tape, mats: Sequence, modulus: int, dim: int | None = None,
              backend: str | None = None) -> np.ndarray:
    """Evaluate ``tape`` at the given dim x dim integer matrices modulo ``modulus``.

    Returns an object array of Python ints in ``[0, modulus)``.
    """
    if len(mats) != tape.nvars:
        raise ValueError(f"expected {tape.nvars} matrices, got {len(mats)}")
    shapes = {np.shape(m) for m in mats}
    if len(shapes) > 1:
        raise ValueError("matrices of differing shapes")
    if mats:
        dim = np.shape(mats[0])[0]
    elif dim is None:
        raise ValueError("dim is required for a circuit without variables")
    objs = [_as_object(m, modulus) for m in mats]
    if pick_backend(modulus, backend) == "numba":
        return _eval_tape_numba(tape, objs, modulus, dim)
    return _eval_tape_numpy(tape, objs, modulus, dim)


def matmul_mod(a, b, modulus: int, backend: str | None = None) -> np.ndarray:
    a = _as_object(a, modulus)
    b = _as_object(b, modulus)
    if pick_backend(modulus, backend) == "numba":
        pinv = _mont_pinv(modulus)
        out = _matmul_mont_entry(_to_mont(a, modulus), _to_mont(b, modulus), np.uint64(modulus), np.uint64(pinv))
        return _from_mont(out, modulus)
    return _matmul_numpy(a, b, modulus)
