"""Golub-Kahan bidiagonalization and the TTGK least-squares solver.

Run: python demos/05_ttgk_least_squares.py
"""
import numpy as np

import tubal_krylov as tk

rng = np.random.default_rng(5)

# Bidiagonalization relation A * V_k = U_{k+1} * (C_k (x) I_s)
A = rng.standard_normal((8, 6, 3))
B = rng.standard_normal((8, 2, 3))
gk = tk.ttg_golub_kahan(A, B, 3)
lhs = tk.tprod(A, gk.v_basis)
rhs = tk.tprod(gk.u_basis, tk.tkron(gk.cbar, tk.identity_t(2, 3)))
print("A V = U C error:", np.abs(lhs - rhs).max())

# Overdetermined problem: TTGK reaches the least-squares solution
A = rng.standard_normal((20, 8, 4))
B = rng.standard_normal((20, 2, 4))
X, rep = tk.ttgk_solve(A, B, kmax=50, tol=1e-10)
X_ls = tk.dense_reference_solve(A, B)
print(f"termination {rep.termination} after {rep.iterations} steps")
print("relres", rep.final_relres, "vs dense", tk.frob_norm(B - tk.tprod(A, X_ls)) / tk.frob_norm(B))
print("solution gap:", tk.frob_norm(X - X_ls) / tk.frob_norm(X_ls))

# Consistent square system
A, B, X_star = tk.gen_example1(40, 3, 3, seed=2)
X, rep = tk.ttgk_solve(A, B, tol=1e-8)
print(f"square: {rep.iterations} steps, error {tk.frob_norm(X - X_star) / tk.frob_norm(X_star):.2e}")
