"""Half-spectrum helpers shared by the algebra and the solvers.

Real tensors are transformed with ``rfft`` along mode 3, which keeps only the
Fourier slices ``0 .. n3 // 2``; the remaining slices are the complex
conjugates of these and are never formed. Spectral arrays are stored
slice-first, shape ``(nf, n1, n2)``, so that batched ``matmul`` acts on the
trailing two axes.
"""

import numpy as np

from .errors import SymmetryError

# Imaginary residue tolerated on the self-conjugate slices before irfft.
IMAG_RTOL = 1e-10


def nfreq(n3):
    return n3 // 2 + 1


def hat(a):
    """Spatial ``(n1, n2, n3)`` real array -> half spectrum ``(nf, n1, n2)``."""
    return np.ascontiguousarray(np.moveaxis(np.fft.rfft(a, axis=2), 2, 0))


def unhat(ah, n3):
    """Inverse of :func:`hat`.

    The DC slice (and the Nyquist slice for even ``n3``) must be real; a
    residue above ``IMAG_RTOL`` times the largest coefficient means some
    kernel broke conjugate symmetry, and raises instead of being dropped.
    """
    scale = np.max(np.abs(ah)) if ah.size else 0.0
    self_conj = [0] if n3 % 2 else [0, n3 // 2]
    resid = np.max(np.abs(ah[self_conj].imag)) if ah.size else 0.0
    if resid > IMAG_RTOL * scale:
        raise SymmetryError(
            f"imaginary residue {resid:.3e} on a self-conjugate Fourier slice "
            f"(scale {scale:.3e})"
        )
    return np.fft.irfft(np.moveaxis(ah, 0, 2), n=n3, axis=2)


def tube_hat(t):
    return np.fft.rfft(t)


def tube_unhat(th, n3):
    return unhat(th[:, None, None], n3)[0, 0]


def weights(n3):
    """Multiplicity of each half-spectrum slice in the full spectrum."""
    w = np.full(nfreq(n3), 2.0)
    w[0] = 1.0
    if n3 % 2 == 0:
        w[-1] = 1.0
    return w


def weighted_norm(sq, n3):
    """``sqrt((1/n3) * sum over the full spectrum)`` given per-slice squared
    norms ``sq`` on the half spectrum."""
    return float(np.sqrt(np.dot(weights(n3), sq) / n3))


def slice_norms(ah):
    """Frobenius norm of every spectral slice, shape ``(nf,)``."""
    return np.sqrt(np.sum(np.abs(ah) ** 2, axis=(1, 2)))
