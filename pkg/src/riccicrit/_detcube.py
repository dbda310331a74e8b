"""Batched determinant evaluation and coefficient interpolation over F_p.

The randomized exact-cost matching machinery represents a cost matrix as a
per-edge vector of small "digits" (base cost, count of one special class,
count of another). Each edge also gets a random nonzero field scalar. The
determinant of the matrix whose (i, j) entry is

    scalar[i,j] * x^d0 * y^d1 * z^d2

is a polynomial whose (alpha, k, l) coefficient is a signed sum over the
permutations with exactly that digit signature. Distinct permutations
contribute distinct scalar monomials, so the coefficient is the zero
polynomial exactly when no such permutation exists; at random scalars a
nonzero value certifies existence, and a zero value is wrong with
probability at most n/p per trial (Schwartz-Zippel). We recover the
coefficients by evaluating the determinant on a grid of field points and
inverting the Vandermonde systems along each axis.

The prime is kept below 2^31 so products of two residues fit in int64 and
everything vectorizes under numpy.
"""

from __future__ import annotations

import numpy as np

from .errors import FieldConfigError

PRIME = (1 << 31) - 1

_MAX_GRID_POINTS = 2_000_000


def _powmod_vec(base: np.ndarray, exp: int) -> np.ndarray:
    """Elementwise base**exp mod PRIME via binary exponentiation."""
    result = np.ones_like(base)
    b = base % PRIME
    e = exp
    while e:
        if e & 1:
            result = (result * b) % PRIME
        b = (b * b) % PRIME
        e >>= 1
    return result


def det_batch(mats: np.ndarray) -> np.ndarray:
    """Determinants mod PRIME of a (B, n, n) int64 batch, via Gaussian elimination."""
    a = mats % PRIME
    batch, n, _ = a.shape
    det = np.ones(batch, dtype=np.int64)
    for k in range(n):
        col = a[:, k:, k]
        nz = col != 0
        pivot_offset = np.argmax(nz, axis=1)
        has_pivot = np.take_along_axis(nz, pivot_offset[:, None], axis=1)[:, 0]
        det = np.where(has_pivot, det, 0)
        pivot_row = k + pivot_offset
        swap = has_pivot & (pivot_row != k)
        idx = np.arange(batch)
        if swap.any():
            sw = idx[swap]
            rows = pivot_row[swap]
            tmp = a[sw, k, :].copy()
            a[sw, k, :] = a[sw, rows, :]
            a[sw, rows, :] = tmp
            det[sw] = (-det[sw]) % PRIME
        pivot = a[:, k, k]
        safe_pivot = np.where(pivot == 0, 1, pivot)
        det = (det * pivot) % PRIME
        if k + 1 < n:
            inv = _powmod_vec(safe_pivot, PRIME - 2)
            factors = (a[:, k + 1 :, k] * inv[:, None]) % PRIME
            a[:, k + 1 :, k:] = (a[:, k + 1 :, k:] - factors[:, :, None] * a[:, k : k + 1, k:]) % PRIME
    return det % PRIME


def _vandermonde_inverse(npoints: int) -> np.ndarray:
    """Inverse mod PRIME of the Vandermonde matrix on points 0..npoints-1."""
    if npoints > PRIME:
        raise FieldConfigError("more interpolation points than field elements")
    pts = np.arange(npoints, dtype=np.int64)
    # V[p][e] = p^e
    v = np.ones((npoints, npoints), dtype=np.int64)
    for e in range(1, npoints):
        v[:, e] = (v[:, e - 1] * pts) % PRIME
    # Gauss-Jordan inversion over F_p (small systems only).
    aug = np.concatenate([v, np.eye(npoints, dtype=np.int64)], axis=1) % PRIME
    for k in range(npoints):
        piv = k + int(np.argmax(aug[k:, k] != 0))
        if aug[piv, k] == 0:
            raise FieldConfigError("singular Vandermonde system")
        if piv != k:
            aug[[k, piv]] = aug[[piv, k]]
        inv = pow(int(aug[k, k]), PRIME - 2, PRIME)
        aug[k] = (aug[k] * inv) % PRIME
        for r in range(npoints):
            if r != k and aug[r, k]:
                aug[r] = (aug[r] - aug[r, k] * aug[k]) % PRIME
    return aug[:, npoints:] % PRIME


_VINV_CACHE: dict[int, np.ndarray] = {}


def vandermonde_inverse(npoints: int) -> np.ndarray:
    got = _VINV_CACHE.get(npoints)
    if got is None:
        got = _vandermonde_inverse(npoints)
        _VINV_CACHE[npoints] = got
    return got


def _mod_matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """(a @ b) mod PRIME with overflow-safe accumulation (small inner dims)."""
    out = np.zeros(a.shape[:-1] + b.shape[1:], dtype=np.int64)
    for k in range(a.shape[-1]):
        out = (out + a[..., k : k + 1] * b[k]) % PRIME
    return out


def digit_dims(digits: np.ndarray) -> tuple[int, ...]:
    """Degree bounds per axis: one more than the sum of per-row maxima."""
    rowmax = digits.max(axis=1)  # (n, naxes)
    return tuple(int(x) + 1 for x in rowmax.sum(axis=0))


class SignatureCube:
    """Coefficient array of the digit-generating determinant polynomial.

    ``cube[alpha, k, l]`` is nonzero only if some perfect matching of the
    digitized matrix has digit sums ``(alpha, k, l)``; nonzero is a
    certificate, zero is correct with high probability.
    """

    def __init__(self, digits: np.ndarray, scalars: np.ndarray):
        digits = np.asarray(digits, dtype=np.int64)
        n = digits.shape[0]
        if digits.shape[:2] != (n, n):
            raise ValueError("digits must be (n, n, naxes)")
        self.n = n
        self.naxes = digits.shape[2]
        # Factor x^min out of every row: shrinks the grid, shifts the target.
        rowmin = digits.min(axis=1)  # (n, naxes)
        self.offset = tuple(int(x) for x in rowmin.sum(axis=0))
        self.digits = digits - rowmin[:, None, :]
        self.scalars = np.asarray(scalars, dtype=np.int64) % PRIME
        self.dims = digit_dims(self.digits)
        total = 1
        for d in self.dims:
            total *= d
        if total > _MAX_GRID_POINTS:
            raise FieldConfigError(f"interpolation grid of {total} points is too large")
        self.cube = self._interpolate()

    def _interpolate(self) -> np.ndarray:
        dims = self.dims
        n = self.n
        grids = np.meshgrid(*[np.arange(d, dtype=np.int64) for d in dims], indexing="ij")
        points = np.stack([g.reshape(-1) for g in grids], axis=1)  # (G, naxes)
        ngrid = points.shape[0]
        values = np.empty(ngrid, dtype=np.int64)
        chunk = max(1, min(ngrid, 4096 * 49 // (n * n) + 1))
        for start in range(0, ngrid, chunk):
            pts = points[start : start + chunk]  # (c, naxes)
            mats = np.broadcast_to(self.scalars, (pts.shape[0], n, n)).copy()
            for axis in range(self.naxes):
                if dims[axis] == 1:
                    continue
                # point value ** digit, tabulated per chunk
                maxdig = int(self.digits[:, :, axis].max())
                pows = np.ones((pts.shape[0], maxdig + 1), dtype=np.int64)
                for e in range(1, maxdig + 1):
                    pows[:, e] = (pows[:, e - 1] * pts[:, axis]) % PRIME
                mats = (mats * pows[:, self.digits[:, :, axis]]) % PRIME
            values[start : start + chunk] = det_batch(mats)
        val = values.reshape(dims)
        # Invert the Vandermonde system along each axis in turn.
        for axis, d in enumerate(dims):
            if d == 1:
                continue
            vinv = vandermonde_inverse(d)
            moved = np.moveaxis(val, axis, 0).reshape(d, -1)
            moved = _mod_matmul(vinv, moved)
            val = np.moveaxis(moved.reshape((d,) + val.shape[:axis] + val.shape[axis + 1 :]), 0, axis)
        return val

    def coefficient(self, target: tuple[int, ...]) -> int:
        """Coefficient at absolute digit sums ``target`` (0 if out of range)."""
        idx = []
        for axis in range(self.naxes):
            t = target[axis] - self.offset[axis]
            if t < 0 or t >= self.dims[axis]:
                return 0
            idx.append(t)
        return int(self.cube[tuple(idx)])

    def support(self) -> set[tuple[int, ...]]:
        """All absolute digit-sum signatures with nonzero coefficient."""
        out = set()
        for idx in np.argwhere(self.cube != 0):
            out.add(tuple(int(i) + o for i, o in zip(idx, self.offset)))
        return out


def coefficient_at(digits: np.ndarray, scalars: np.ndarray, target: tuple[int, ...]) -> int:
    """One-shot coefficient lookup (builds a full cube for the submatrix)."""
    if digits.shape[0] == 0:
        return 1 if all(t == 0 for t in target) else 0
    cube = SignatureCube(digits, scalars)
    return cube.coefficient(target)
