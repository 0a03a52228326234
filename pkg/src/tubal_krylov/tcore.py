"""T-product algebra on real third-order tensors.

Tensors are plain ``float64`` numpy arrays of shape ``(n1, n2, n3)``; frontal
slice ``k`` is ``a[:, :, k]``. A *tube* (the scalar of the algebra) is a 1-D
array of length ``n3``; functions that take tubes also accept ``(1, 1, n3)``
arrays. Tubal matrices (Hessenberg, triangular, bidiagonal factors) are just
``(p, q, n3)`` tensors of tubes.

Every product below is evaluated slice by slice in the mode-3 Fourier domain.
Only the slices ``0 .. n3 // 2`` are computed; the rest follow by conjugate
symmetry.
"""

import numpy as np

from . import _spectral as sp
from .errors import NotInvertibleError, ShapeError, SymmetryError

__all__ = [
    "as_tensor3",
    "fft_mode3",
    "ifft_mode3",
    "identity_t",
    "unit_tube",
    "tprod",
    "transpose_t",
    "ttrace",
    "tube_mul",
    "tube_inverse",
    "tubal_rank",
    "tube_times",
    "tkron",
    "tdiamond",
    "inner_t",
    "frob_norm",
    "tl2_norm",
    "unfold",
    "fold",
    "bcirc",
]


def as_tensor3(a, name="tensor"):
    """Validate and return ``a`` as a finite float64 third-order array."""
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 3 or min(a.shape) < 1:
        raise ShapeError(f"{name} must be a non-empty 3-way array, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} contains NaN or Inf")
    return a


def _as_tube(t, name="tube"):
    t = np.asarray(t, dtype=np.float64)
    if t.ndim == 3 and t.shape[:2] == (1, 1):
        t = t[0, 0]
    if t.ndim != 1 or t.size < 1:
        raise ShapeError(f"{name} must have shape (n3,) or (1, 1, n3), got {t.shape}")
    return t


def _check_n3(*arrays):
    n3s = {x.shape[-1] for x in arrays}
    if len(n3s) != 1:
        raise ShapeError(f"third dimensions differ: {sorted(n3s)}")
    return n3s.pop()


# --------------------------------------------------------------------------
# transforms


def fft_mode3(a):
    """Mode-3 DFT of every tube. Returns the full complex spectrum
    ``(n1, n2, n3)``; Fourier slice ``i`` is ``out[:, :, i]``."""
    return np.fft.fft(as_tensor3(a), axis=2)


def ifft_mode3(s, rtol=1e-10):
    """Inverse of :func:`fft_mode3`.

    Raises :class:`SymmetryError` if ``s`` is not conjugate symmetric
    (``conj(S_i) == S_{n3-i}``, 0-based) to within ``rtol`` relative to its
    largest entry, since it would then have no real preimage.
    """
    s = np.asarray(s)
    if s.ndim != 3:
        raise ShapeError(f"spectral tensor must be 3-way, got shape {s.shape}")
    n3 = s.shape[2]
    partner = (-np.arange(n3)) % n3
    dev = np.max(np.abs(np.conj(s) - s[:, :, partner])) if s.size else 0.0
    scale = np.max(np.abs(s)) if s.size else 0.0
    if dev > rtol * scale:
        raise SymmetryError(f"conjugate symmetry violated by {dev:.3e} (scale {scale:.3e})")
    return np.real(np.fft.ifft(s, axis=2))


# --------------------------------------------------------------------------
# constructors


def identity_t(n, n3):
    """Identity tensor: first frontal slice ``I_n``, the others zero."""
    e = np.zeros((n, n, n3))
    e[:, :, 0] = np.eye(n)
    return e


def unit_tube(n3):
    """The multiplicative identity tube ``e = (1, 0, ..., 0)``."""
    e = np.zeros(n3)
    e[0] = 1.0
    return e


# --------------------------------------------------------------------------
# products


def tprod(a, b):
    """T-product ``a * b`` of ``(n1, n2, n3)`` and ``(n2, m, n3)`` tensors."""
    a = as_tensor3(a, "a")
    b = as_tensor3(b, "b")
    n3 = _check_n3(a, b)
    if a.shape[1] != b.shape[0]:
        raise ShapeError(f"inner dimensions differ: {a.shape} * {b.shape}")
    return sp.unhat(np.matmul(sp.hat(a), sp.hat(b)), n3)


def transpose_t(a):
    """Transpose every frontal slice, then reverse the order of slices
    2..n3."""
    a = as_tensor3(a)
    n3 = a.shape[2]
    return np.ascontiguousarray(a[:, :, (-np.arange(n3)) % n3].transpose(1, 0, 2))


def ttrace(a):
    """T-trace: the tube whose Fourier coefficients are the traces of the
    Fourier slices of a tensor with square frontal slices."""
    a = as_tensor3(a)
    if a.shape[0] != a.shape[1]:
        raise ShapeError(f"T-trace needs square frontal slices, got {a.shape}")
    ah = sp.hat(a)
    return sp.tube_unhat(np.trace(ah, axis1=1, axis2=2), a.shape[2])


def tube_mul(a, b):
    """Product of two tubes (circular convolution)."""
    a = _as_tube(a, "a")
    b = _as_tube(b, "b")
    n3 = _check_n3(a, b)
    return sp.tube_unhat(sp.tube_hat(a) * sp.tube_hat(b), n3)


def _default_tube_tol(coef, n3):
    return n3 * np.finfo(float).eps * np.max(np.abs(coef))


def tube_inverse(a, tol=None):
    """Inverse tube, i.e. coefficient-wise reciprocal in the Fourier domain.

    A tube is invertible iff all its Fourier coefficients are non-zero;
    coefficients with magnitude ``<= tol`` count as zero. The default ``tol``
    is ``n3 * eps * max |coefficient|``.
    """
    a = _as_tube(a)
    n3 = a.size
    ah = sp.tube_hat(a)
    if tol is None:
        tol = _default_tube_tol(ah, n3)
    bad = np.flatnonzero(np.abs(ah) <= tol)
    if bad.size:
        k = int(bad[0])
        raise NotInvertibleError(
            f"tube is not invertible: Fourier coefficient {k} has magnitude {abs(ah[k]):.3e}",
            index=k,
        )
    return sp.tube_unhat(1.0 / ah, n3)


def tubal_rank(a, tol=None):
    """Number of non-zero Fourier coefficients of a tube (full spectrum)."""
    a = _as_tube(a)
    coef = np.fft.fft(a)
    if tol is None:
        tol = _default_tube_tol(coef, a.size)
    return int(np.count_nonzero(np.abs(coef) > tol))


def tube_times(a, b):
    """Tube-times-tensor product: every tube ``b[i, j, :]`` is multiplied by
    ``a``. Equal to ``tprod(b, tkron(a, I_m2))``."""
    a = _as_tube(a, "a")
    b = as_tensor3(b, "b")
    n3 = _check_n3(a, b)
    return sp.unhat(sp.tube_hat(a)[:, None, None] * sp.hat(b), n3)


def _kron_hat(ah, bh):
    nf, n1, n2 = ah.shape
    _, m1, m2 = bh.shape
    return np.einsum("kij,kab->kiajb", ah, bh).reshape(nf, n1 * m1, n2 * m2)


def tkron(a, b):
    """T-Kronecker product: slice-wise matrix Kronecker product in the Fourier
    domain. Result has shape ``(n1*m1, n2*m2, n3)``."""
    a = as_tensor3(a, "a")
    b = as_tensor3(b, "b")
    n3 = _check_n3(a, b)
    return sp.unhat(_kron_hat(sp.hat(a), sp.hat(b)), n3)


def _diamond_hat(ah, bh, s):
    nf, n1, ps = ah.shape
    ls = bh.shape[2]
    a4 = ah.reshape(nf, n1, ps // s, s)
    b4 = bh.reshape(nf, n1, ls // s, s)
    return np.einsum("kric,krjc->kij", a4.conj(), b4)


def tdiamond(a, b, s):
    """T-diamond product ``a^T <> b``.

    ``a`` is read as ``p`` lateral blocks of width ``s`` and ``b`` as ``l``
    such blocks; entry ``(i, j)`` of the ``(p, l, n3)`` result is the tubal
    inner product of block ``i`` of ``a`` with block ``j`` of ``b``.
    """
    a = as_tensor3(a, "a")
    b = as_tensor3(b, "b")
    n3 = _check_n3(a, b)
    if s < 1 or a.shape[1] % s or b.shape[1] % s:
        raise ShapeError(f"widths {a.shape[1]} and {b.shape[1]} are not multiples of s={s}")
    if a.shape[0] != b.shape[0]:
        raise ShapeError(f"row dimensions differ: {a.shape[0]} vs {b.shape[0]}")
    return sp.unhat(_diamond_hat(sp.hat(a), sp.hat(b), s), n3)


def inner_t(x, y):
    """Tubal inner product ``T-trace(x^T * y)``, a tube."""
    x = as_tensor3(x, "x")
    y = as_tensor3(y, "y")
    if x.shape != y.shape:
        raise ShapeError(f"shapes differ: {x.shape} vs {y.shape}")
    ip = np.sum(sp.hat(x).conj() * sp.hat(y), axis=(1, 2))
    return sp.tube_unhat(ip, x.shape[2])


# --------------------------------------------------------------------------
# norms


def frob_norm(a):
    """Frobenius norm (square root of the sum of squared entries)."""
    return float(np.linalg.norm(as_tensor3(a).ravel()))


def tl2_norm(y):
    """T-l2 norm of an ``(m, 1, n3)`` tensor, evaluated from its Fourier
    slices: ``(1/sqrt(n3)) * sqrt(sum_i ||Y_i||_2^2)``."""
    y = as_tensor3(y)
    if y.shape[1] != 1:
        raise ShapeError(f"T-l2 norm needs lateral size 1, got {y.shape}")
    return sp.weighted_norm(sp.slice_norms(sp.hat(y)) ** 2, y.shape[2])


# --------------------------------------------------------------------------
# explicit block-circulant forms (reference path, O((n n3)^2) memory)


def unfold(a):
    """Stack the frontal slices vertically: ``(n1*n3, n2)``."""
    a = as_tensor3(a)
    return np.concatenate([a[:, :, k] for k in range(a.shape[2])], axis=0)


def fold(mat, n1, n3):
    """Inverse of :func:`unfold`."""
    mat = np.asarray(mat, dtype=np.float64)
    if mat.ndim != 2 or mat.shape[0] != n1 * n3:
        raise ShapeError(f"cannot fold {mat.shape} into n1={n1}, n3={n3}")
    return np.stack([mat[k * n1:(k + 1) * n1] for k in range(n3)], axis=2)


def bcirc(a):
    """Block-circulant matrix ``(n1*n3, n2*n3)`` whose first block column is
    the stack of frontal slices; block ``(i, j)`` is slice ``(i - j) mod n3``."""
    a = as_tensor3(a)
    n1, n2, n3 = a.shape
    out = np.empty((n1 * n3, n2 * n3))
    for i in range(n3):
        for j in range(n3):
            out[i * n1:(i + 1) * n1, j * n2:(j + 1) * n2] = a[:, :, (i - j) % n3]
    return out
