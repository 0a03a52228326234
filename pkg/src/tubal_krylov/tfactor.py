"""Normalization, tubal-global QR, slice-wise T-QR and tubal back substitution.

The public functions take and return spatial tensors. The ``*_hat`` helpers
work on half spectra (see ``_spectral``) and are what the Krylov solvers call
inside their loops.
"""

from dataclasses import dataclass

import numpy as np

from . import _spectral as sp
from .errors import BreakdownError, RankDeficiencyError, ShapeError, SingularSystemError
from .tcore import _as_tube, _default_tube_tol, as_tensor3

__all__ = [
    "TubalQRResult",
    "SliceQRResult",
    "normalize",
    "tubal_global_qr",
    "tqr_slicewise",
    "tubal_back_substitution",
]

# A projection that removes more than this fraction of a block's norm gets a
# second Gram-Schmidt pass.
REORTH_RATIO = 0.7


@dataclass
class TubalQRResult:
    q: np.ndarray  # (n, k*s, n3), T-orthonormal blocks
    r: np.ndarray  # (k, k, n3), upper triangular tubes


@dataclass
class SliceQRResult:
    q: np.ndarray
    r: np.ndarray


def _default_norm_tol(norms):
    return 1e-12 * float(np.max(norms)) if norms.size else 0.0


def normalize_hat(ah, tol):
    """Scale every spectral slice to unit Frobenius norm.

    Returns ``(qh, th)`` with ``th`` the slice norms. Raises
    :class:`BreakdownError` at the first slice whose norm is ``<= tol``.
    """
    th = sp.slice_norms(ah)
    bad = np.flatnonzero(th <= tol)
    if bad.size:
        k = int(bad[0])
        raise BreakdownError(
            f"normalization breakdown: Fourier slice {k} has norm {th[k]:.3e} <= tol {tol:.3e}",
            index=k,
        )
    return ah / th[:, None, None], th.astype(complex)


def normalize(a, tol=None):
    """Split ``a`` (``n x s x n3``) into ``q`` with ``<q, q>_T = e`` and a tube
    ``t`` such that ``a = tube_times(t, q)``.

    Each Fourier slice of ``q`` is the matching slice of ``a`` divided by its
    Frobenius norm, and those norms are the Fourier coefficients of ``t``.
    ``tol`` defaults to ``1e-12`` times the largest slice norm; a zero tensor
    always breaks down at slice 0.
    """
    a = as_tensor3(a)
    n3 = a.shape[2]
    ah = sp.hat(a)
    if tol is None:
        tol = _default_norm_tol(sp.slice_norms(ah))
    qh, th = normalize_hat(ah, tol)
    return sp.unhat(qh, n3), sp.tube_unhat(th, n3)


def tubal_global_qr(z, s, tol=None):
    """Tubal-global QR of ``z = [Z_1, ..., Z_k]`` (blocks of width ``s``).

    Modified Gram-Schmidt with the tubal inner product, with one
    re-orthogonalization pass whenever projection removes more than 30% of a
    block's norm. Returns ``q`` and an upper triangular ``r`` with
    ``z = q * (r (x) I_s)`` and ``q^T <> q = I_k``.
    """
    z = as_tensor3(z)
    n, ks, n3 = z.shape
    if s < 1 or ks % s:
        raise ShapeError(f"width {ks} is not a multiple of s={s}")
    k = ks // s
    zh = sp.hat(z)
    nf = zh.shape[0]
    if tol is None:
        tol = _default_norm_tol(sp.slice_norms(zh))
    blocks = [zh[:, :, j * s:(j + 1) * s] for j in range(k)]
    qs = []
    rh = np.zeros((k, k, nf), dtype=complex)
    for j in range(k):
        w = blocks[j].copy()
        before = sp.slice_norms(w)
        for _ in range(2):
            for i, qi in enumerate(qs):
                c = np.sum(qi.conj() * w, axis=(1, 2))
                rh[i, j] += c
                w -= c[:, None, None] * qi
            if not qs or np.all(sp.slice_norms(w) >= REORTH_RATIO * before):
                break
        try:
            qj, rh[j, j] = normalize_hat(w, tol)
        except BreakdownError as err:
            raise RankDeficiencyError(
                f"block {j} is dependent on its predecessors ({err})", index=err.index, block=j
            ) from None
        qs.append(qj)
    qh = np.concatenate(qs, axis=2)
    return TubalQRResult(q=sp.unhat(qh, n3), r=sp.unhat(rh.transpose(2, 0, 1), n3).copy())


def tqr_hat(fh):
    """Batched economy QR of spectral slices ``(nf, n, m)``."""
    return np.linalg.qr(fh, mode="reduced")


def tqr_slicewise(f):
    """T-QR: matrix QR of every Fourier slice of ``f`` (``n x m x n3``).

    When ``n > m`` the economy factorization is returned, ``q`` being
    ``n x m x n3`` with ``q^T * q = I_m``; otherwise ``q`` is square and
    orthogonal. ``r`` has upper triangular Fourier slices.
    """
    f = as_tensor3(f)
    n3 = f.shape[2]
    qh, rh = tqr_hat(sp.hat(f))
    return SliceQRResult(q=sp.unhat(qh, n3), r=sp.unhat(rh, n3))


def back_substitute_hat(rh, gh, pivot_ok=None, active=None):
    """Solve ``R y = g`` for all Fourier slices at once.

    ``rh`` is ``(m, m, nf)`` tube coefficients of an upper triangular tubal
    matrix, ``gh`` is ``(m, nf)``. ``pivot_ok(i, coef)`` returns a boolean
    mask of usable pivots for row ``i``. Where ``active[i]`` is False the
    unknown is pinned to zero instead of raising (a frequency whose Krylov
    basis already terminated).
    """
    m, _, nf = rh.shape
    yh = np.zeros((m, nf), dtype=complex)
    for i in range(m - 1, -1, -1):
        acc = gh[i] - np.sum(rh[i, i + 1:] * yh[i + 1:], axis=0)
        piv = rh[i, i]
        ok = pivot_ok(i, piv)
        live = np.ones(nf, bool) if active is None else active[i]
        bad = np.flatnonzero(live & ~ok)
        if bad.size:
            raise SingularSystemError(
                f"diagonal tube {i} is not invertible (Fourier coefficient {int(bad[0])})",
                index=i,
            )
        use = live & ok
        yh[i, use] = acc[use] / piv[use]
    return yh


def tubal_back_substitution(r, g, tol=None):
    """Solve the upper triangular tubal system ``r * y = g``.

    ``r`` is ``(m, m, n3)``, ``g`` is ``(m, 1, n3)`` (or ``(m, n3)``); returns
    ``y`` of shape ``(m, 1, n3)`` via ``y_i = r_ii^{-1} * (g_i - sum_{j>i}
    r_ij * y_j)``. A diagonal tube counts as singular when one of its Fourier
    coefficients is ``<= tol`` (default: ``n3 * eps * max |coefficient|`` of
    that tube).
    """
    r = as_tensor3(r, "r")
    m, m2, n3 = r.shape
    g = np.asarray(g, dtype=np.float64)
    if g.ndim == 2:
        g = g[:, None, :]
    g = as_tensor3(g, "g")
    if m != m2 or g.shape != (m, 1, n3):
        raise ShapeError(f"need r (m, m, n3) and g (m, 1, n3); got {r.shape}, {g.shape}")
    rh = np.fft.rfft(r, axis=2)
    gh = np.fft.rfft(g[:, 0, :], axis=1)

    def pivot_ok(i, coef):
        full = np.fft.fft(_as_tube(r[i, i]))
        t = _default_tube_tol(full, n3) if tol is None else tol
        return np.abs(coef) > t

    yh = back_substitute_hat(rh, gh, pivot_ok)
    return sp.unhat(yh.T[:, :, None], n3)
