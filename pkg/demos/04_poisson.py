"""GMRES on the Laplacian-stencil tensor.

Run: python demos/04_poisson.py
"""
import numpy as np

import tubal_krylov as tk

A, B, X_star = tk.gen_poisson3d(10, s=3, n3=10)
h = 1.0 / 11
print("centre slice, top-left corner times h^3:")
print(np.round(A[:4, :4, 0] * h**3, 3))
print("neighbour slice diagonal times h^3:", np.round(np.diag(A[:, :, 1]) * h**3, 3))

for m0_sq, s in [(10, 3), (36, 3), (100, 3)]:
    A, B, X_star = tk.gen_poisson3d(m0_sq, s)
    X, rep = tk.ttg_gmres(A, B, m=10, tol=1e-6)
    print(f"{m0_sq}^3: {rep.restarts} cycle(s), {rep.iterations} inner steps, "
          f"relres {rep.final_relres:.2e}, {rep.elapsed:.2f} s")

# At small sizes the dense block-circulant solve gives the same answer
A, B, _ = tk.gen_poisson3d(10, s=3, n3=10)
X, _ = tk.ttg_gmres(A, B, m=10, tol=1e-10)
X_dense = tk.dense_reference_solve(A, B)
print("GMRES vs dense:", tk.frob_norm(X - X_dense) / tk.frob_norm(X_dense))
