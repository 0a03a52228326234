"""Normalization, tubal-global QR and the slice-wise T-QR.

Run: python demos/02_normalize_and_qr.py
"""
import numpy as np

import tubal_krylov as tk

rng = np.random.default_rng(1)
n, s, k, n3 = 12, 2, 4, 4

# normalize splits A into a tube t and a block Q with <Q, Q>_T = e
A = rng.standard_normal((n, s, n3))
Q, t = tk.normalize(A)
print("<Q,Q>_T =", np.round(tk.inner_t(Q, Q), 14))
print("A == t (x) Q:", np.allclose(tk.tube_times(t, Q), A))

# A zero Fourier slice cannot be normalized
try:
    tk.normalize(np.ones((3, 1, 4)))
except tk.BreakdownError as err:
    print("breakdown at Fourier slice", err.index)

# Tubal-global QR of k blocks of width s: Z = Q * (R (x) I_s), Q^T <> Q = I
Z = rng.standard_normal((n, k * s, n3))
qr = tk.tubal_global_qr(Z, s)
recon = tk.tprod(qr.q, tk.tkron(qr.r, tk.identity_t(s, n3)))
print("reconstruction error:", np.abs(recon - Z).max())
print("orthonormality error:", np.abs(tk.tdiamond(qr.q, qr.q, s) - tk.identity_t(k, n3)).max())

# Slice-wise QR and tubal back substitution solve a small least-squares problem
H = rng.standard_normal((5, 4, n3))
g = rng.standard_normal((5, 1, n3))
f = tk.tqr_slicewise(H)
rhs = tk.tprod(tk.transpose_t(f.q), g)
y = tk.tubal_back_substitution(f.r, rhs)
normal = tk.tprod(tk.transpose_t(H), tk.tprod(H, y) - g)
print("normal-equation residual:", np.abs(normal).max())
