"""Pure-Python (numpy) versions of the hot loops.

Same signatures and results as the compiled ``_kernels`` extension, which
is preferred when importable. Point order out of :func:`enumerate_points`
differs between the two; callers sort.
"""
import math

import numpy as np

NAME = "python"

_SLACK = 1e-9


def enumerate_points(gram, R, bound, outer_lo, outer_hi, max_points):
    """Integer vectors k with ``k^T gram k <= bound``.

    ``R`` is the upper Cholesky factor (``gram = R^T R``). The last
    coordinate is restricted to ``[outer_lo, outer_hi]``. Returns
    ``(coeffs, norms, overflow)``; on overflow the arrays are empty.
    """
    gram = np.asarray(gram, float)
    R = np.asarray(R, float)
    n = gram.shape[0]
    empty = np.zeros((0, n), np.int64), np.zeros(0), False
    if bound < 0:
        return empty
    diag = np.diag(R)
    # breadth-first expansion from the last coordinate down
    ks = np.zeros((1, 0), np.int64)
    rem = np.array([float(bound)])
    for i in range(n - 1, -1, -1):
        if ks.shape[1]:
            center = -(ks.astype(float) @ (R[i, i + 1:] / diag[i]))
        else:
            center = np.zeros(ks.shape[0])
        width = np.sqrt(np.maximum(rem, 0.0)) / diag[i] * (1 + _SLACK) + _SLACK
        lo = np.ceil(center - width).astype(np.int64)
        hi = np.floor(center + width).astype(np.int64)
        if i == n - 1:
            lo = np.maximum(lo, outer_lo)
            hi = np.minimum(hi, outer_hi)
        counts = np.maximum(hi - lo + 1, 0)
        total = int(counts.sum())
        if total == 0:
            return empty
        if total > 64 * max_points + 1024:
            return np.zeros((0, n), np.int64), np.zeros(0), True
        parent = np.repeat(np.arange(ks.shape[0]), counts)
        offsets = np.arange(total) - np.repeat(np.cumsum(counts) - counts, counts)
        val = np.repeat(lo, counts) + offsets
        d = val - np.repeat(center, counts)
        rem = np.repeat(rem, counts) - diag[i] ** 2 * d * d
        ks = np.column_stack([val, ks[parent]])
        keep = rem >= -_SLACK * max(1.0, bound)
        ks, rem = ks[keep], rem[keep]
    norms = np.einsum("ni,ij,nj->n", ks.astype(float), gram, ks.astype(float))
    keep = norms <= bound
    ks, norms = ks[keep], norms[keep]
    if ks.shape[0] > max_points:
        return np.zeros((0, n), np.int64), np.zeros(0), True
    return ks, norms, False


def _phases(ks, A, b):
    kf = ks.astype(float)
    q = np.einsum("ni,ij,nj->n", kf, A, kf) + kf @ b
    return np.exp(-math.pi * q.imag) * np.exp(1j * math.pi * q.real)


def gauss_sum(ks, A, b):
    """Compensated sum of ``exp(i pi (k^T A k + b.k))`` over the rows of ks."""
    if ks.shape[0] == 0:
        return 0j
    t = _phases(ks, np.asarray(A, complex), np.asarray(b, complex))
    return complex(math.fsum(t.real.tolist()), math.fsum(t.imag.tolist()))


def gauss_sum_many(ks, A, bs, chunk=4096):
    """Plain sums for each row of ``bs``, sharing points and quadratic part."""
    bs = np.asarray(bs, complex)
    out = np.empty(bs.shape[0], complex)
    if ks.shape[0] == 0:
        out[:] = 0
        return out
    kf = ks.astype(float)
    base = _phases(ks, np.asarray(A, complex), np.zeros(ks.shape[1], complex))
    for s in range(0, bs.shape[0], chunk):
        q = bs[s:s + chunk] @ kf.T
        out[s:s + chunk] = (np.exp(-math.pi * q.imag) * np.exp(1j * math.pi * q.real)) @ base
    return out
