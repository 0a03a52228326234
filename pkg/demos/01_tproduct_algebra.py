"""The T-product and its companions on small tensors.

Run: python demos/01_tproduct_algebra.py
"""
import numpy as np

import tubal_krylov as tk

rng = np.random.default_rng(0)

# Tubes multiply by circular convolution: (1, 2) * (3, 4) = (1*3 + 2*4, 1*4 + 2*3)
a = np.array([1.0, 2.0]).reshape(1, 1, 2)
b = np.array([3.0, 4.0]).reshape(1, 1, 2)
print("tube product:", tk.tprod(a, b).ravel())

# The T-product equals a block-circulant matrix times the unfolded tensor
A = rng.standard_normal((4, 3, 5))
B = rng.standard_normal((3, 2, 5))
via_fft = tk.tprod(A, B)
via_bcirc = tk.fold(tk.bcirc(A) @ tk.unfold(B), 4, 5)
print("bcirc path agrees to", np.abs(via_fft - via_bcirc).max())

# The identity tensor has I in slice 0 and zeros elsewhere
print("I * B == B:", np.allclose(tk.tprod(tk.identity_t(3, 5), B), B))

# Transpose reverses products
lhs = tk.transpose_t(tk.tprod(A, B))
rhs = tk.tprod(tk.transpose_t(B), tk.transpose_t(A))
print("(A*B)^T == B^T * A^T:", np.allclose(lhs, rhs))

# Tubes are invertible iff no Fourier coefficient vanishes
t = np.array([3.0, 1.0, 0.5])
print("t * t^-1 =", np.round(tk.tube_mul(t, tk.tube_inverse(t)), 14))
try:
    tk.tube_inverse([1.0, 1.0])
except tk.NotInvertibleError as err:
    print("not invertible:", err)

# Tubal inner product and the diamond product of block tensors (s = 2)
X = rng.standard_normal((6, 4, 3))
G = tk.tdiamond(X, X, 2)
print("diamond Gram tensor shape:", G.shape)
print("block (0,0) equals <X_1, X_1>_T:", np.allclose(G[0, 0], tk.inner_t(X[:, :2], X[:, :2])))

# Frobenius norm is the Fourier-domain norm scaled by 1/sqrt(n3)
F = np.fft.fft(A, axis=2)
print("||A||_F =", tk.frob_norm(A), "=", np.linalg.norm(F) / np.sqrt(5))
