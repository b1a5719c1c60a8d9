"""Dense complex linear algebra and scalar search primitives.

Matrices are plain 2-D ``numpy`` arrays of complex dtype. The full SVD is
delegated to LAPACK through :func:`numpy.linalg.svd`; the dominant singular
triplet used by every phase-allocation scheme is computed separately by
power iteration on the Gram matrix, so one can be checked against the other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .exceptions import BracketError, DegenerateMatrixError, InvalidInputError

__all__ = [
    "SvdResult",
    "as_complex_matrix",
    "svd",
    "dominant_singular_triplet",
    "bisect_root",
    "golden_maximize",
    "RANK_RTOL",
]

#: A singular value counts toward the rank iff it exceeds this times the largest.
RANK_RTOL = 1e-12

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def as_complex_matrix(a) -> np.ndarray:
    """Validate ``a`` as a finite, nonempty 2-D array and return it as complex128."""
    arr = np.asarray(a, dtype=np.complex128)
    if arr.ndim != 2 or arr.size == 0:
        raise InvalidInputError(f"expected a nonempty 2-D matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError("matrix has non-finite entries")
    return arr


def _fix_phase(u: np.ndarray, v: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Rotate each (u_i, v_i) pair so the first nonzero entry of v_i is real >= 0."""
    u = u.copy()
    v = v.copy()
    for i in range(v.shape[1]):
        col = v[:, i]
        scale = np.max(np.abs(col))
        if scale == 0.0:
            continue
        k = int(np.argmax(np.abs(col) > 1e-12 * scale))
        rot = np.conj(col[k]) / abs(col[k])
        v[:, i] *= rot
        u[:, i] *= rot
    return u, v


@dataclass(frozen=True)
class SvdResult:
    """Thin SVD ``A = sum_i s_i u_i v_i^H``.

    ``left_vectors`` and ``right_vectors`` hold the singular vectors as
    columns; ``rank`` counts singular values above ``RANK_RTOL * s_1``.
    """

    singular_values: np.ndarray
    left_vectors: np.ndarray
    right_vectors: np.ndarray
    rank: int

    def reconstruct(self) -> np.ndarray:
        return (self.left_vectors * self.singular_values) @ self.right_vectors.conj().T


def svd(a) -> SvdResult:
    """Thin SVD with a reproducible per-pair phase convention.

    Parameters
    ----------
    a : array_like
        Finite, nonempty 2-D complex matrix.

    Returns
    -------
    SvdResult
        Singular values sorted in nonincreasing order. For every pair the
        first nonzero entry of the right vector is real and nonnegative.
    """
    arr = as_complex_matrix(a)
    u, s, vh = np.linalg.svd(arr, full_matrices=False)
    u, v = _fix_phase(u, vh.conj().T)
    rank = int(np.count_nonzero(s > RANK_RTOL * s[0])) if s[0] > 0 else 0
    return SvdResult(singular_values=s, left_vectors=u, right_vectors=v, rank=rank)


def dominant_singular_triplet(a, max_squarings: int = 64) -> tuple[float, np.ndarray, np.ndarray]:
    """Largest singular value of ``a`` with unit left/right singular vectors.

    The smaller Gram matrix (``A^H A`` or ``A A^H``) is squared repeatedly,
    with renormalisation, until it is numerically rank one; its dominant
    column seeds a few plain power steps. Convergence is doubly exponential
    in the number of squarings, so small spectral gaps are not a problem.

    Returns
    -------
    sigma : float
    u : ndarray, shape (rows,)
        Left vector, ``A w = sigma u``.
    w : ndarray, shape (cols,)
        Right vector; first nonzero entry real and nonnegative.
    """
    arr = as_complex_matrix(a)
    fro = np.linalg.norm(arr)
    if fro == 0.0:
        raise DegenerateMatrixError("dominant triplet of a zero matrix is undefined")
    m = arr / fro
    tall = m.shape[0] >= m.shape[1]
    gram = m.conj().T @ m if tall else m @ m.conj().T

    b = gram
    for _ in range(max_squarings):
        tr = float(np.real(np.trace(b)))
        nb = np.linalg.norm(b)
        if tr <= 0.0:
            break
        # trace == Frobenius norm exactly when the PSD matrix is rank one
        if tr / nb - 1.0 < 1e-14:
            break
        b = b @ b
        b = b / np.linalg.norm(b)

    x = b[:, int(np.argmax(np.linalg.norm(b, axis=0)))]
    x = x / np.linalg.norm(x)
    for _ in range(3):
        y = gram @ x
        ny = np.linalg.norm(y)
        if ny == 0.0:
            break
        x = y / ny

    if tall:
        w = x
        av = arr @ w
        sigma = float(np.linalg.norm(av))
        u = av / sigma
    else:
        u = x
        ahu = arr.conj().T @ u
        sigma = float(np.linalg.norm(ahu))
        w = ahu / sigma
    u2, w2 = _fix_phase(u[:, None], w[:, None])
    return sigma, u2[:, 0], w2[:, 0]


def bisect_root(f: Callable[[float], float], lo: float, hi: float, tol: float,
                keep: str = "mid") -> float:
    """Root of a scalar function bracketed by ``[lo, hi]``.

    Plain bisection; stops once the bracket is no wider than ``tol`` and
    returns its midpoint (or a point where ``f`` is exactly zero). With
    ``keep="positive"`` or ``keep="negative"`` the final bracket end on
    which ``f`` has that sign is returned instead, which is useful when the
    root is a feasibility boundary.
    """
    if keep not in ("mid", "positive", "negative"):
        raise ValueError(f"bad keep={keep!r}")
    if not lo < hi:
        raise BracketError(f"need lo < hi, got [{lo}, {hi}]")
    flo = f(lo)
    if flo == 0.0:
        return lo
    fhi = f(hi)
    if fhi == 0.0:
        return hi
    if math.isnan(flo) or math.isnan(fhi) or (flo > 0) == (fhi > 0):
        raise BracketError(f"no sign change on [{lo}, {hi}]: f={flo}, {fhi}")
    neg_lo = flo < 0
    for _ in range(2000):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        fm = f(mid)
        if fm == 0.0:
            return mid
        if (fm < 0) == neg_lo:
            lo = mid
        else:
            hi = mid
    if keep == "mid":
        return 0.5 * (lo + hi)
    return lo if (keep == "negative") == neg_lo else hi


def golden_maximize(f: Callable, lo, hi, tol):
    """Golden-section search for the maximum of a unimodal function.

    Works elementwise on arrays: ``lo``, ``hi`` and ``tol`` may be arrays
    of a common shape and ``f`` must then map an array of abscissae to an
    array of values. All elements run the same number of iterations, which
    keeps the result deterministic and independent of batching.

    Returns
    -------
    x, fx
        Midpoint of the final bracket and ``f`` evaluated there.
    """
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    scalar = lo.ndim == 0 and hi.ndim == 0
    lo, hi = np.broadcast_arrays(lo, hi)
    lo = lo.astype(float).copy()
    hi = hi.astype(float).copy()
    if np.any(lo > hi):
        raise ValueError("golden_maximize: lo > hi")
    tol = np.broadcast_to(np.asarray(tol, dtype=float), lo.shape)
    width = hi - lo
    ratio = np.where(width > tol, tol / np.where(width > 0, width, 1.0), 1.0)
    n_iter = int(np.max(np.ceil(np.log(ratio) / math.log(_INV_PHI)))) if ratio.size else 0

    def call(x):
        return np.asarray(f(float(x) if scalar else x), dtype=float)

    x1 = hi - _INV_PHI * (hi - lo)
    x2 = lo + _INV_PHI * (hi - lo)
    f1 = call(x1)
    f2 = call(x2)
    for _ in range(n_iter):
        # ties move the upper end down, so a flat function drifts to lo
        right = f2 > f1
        lo = np.where(right, x1, lo)
        hi = np.where(right, hi, x2)
        new_x1 = np.where(right, x2, hi - _INV_PHI * (hi - lo))
        new_x2 = np.where(right, lo + _INV_PHI * (hi - lo), x1)
        x1, x2 = new_x1, new_x2
        # one fresh evaluation per element; evaluate both sides vectorised
        fresh = np.where(right, x2, x1)
        ff = call(fresh)
        f1, f2 = np.where(right, f2, ff), np.where(right, ff, f1)
    x = 0.5 * (lo + hi)
    fx = call(x)
    if scalar:
        return float(x), float(fx)
    return x, fx
