"""Tubal-global Arnoldi, restarted tubal-global GMRES, tubal-global
Golub-Kahan bidiagonalization and the TTGK least-squares solver.

All iterations run on the half spectrum of the operator, computed once per
call. In the Fourier domain the tubal-global process decouples into one
global Krylov process per frequency, sharing step counts. A frequency whose
basis terminates (its new block has norm below ``rtol`` times the norm before
projection) is frozen: later basis slices there are zero and the projected
solve pins the matching unknowns to zero. Other frequencies keep going. This
matters in practice because right-hand sides such as ``A * ones`` have no
content outside the DC slice.

The public decomposition functions (:func:`tubal_global_arnoldi`,
:func:`ttg_golub_kahan`) report the first such event as a breakdown and stop
there. The solvers treat it as per-frequency convergence.
"""

import time
from dataclasses import dataclass, field

import numpy as np

from . import _spectral as sp
from .errors import BreakdownError, ShapeError
from .tcore import as_tensor3, tl2_norm, tprod
from .tfactor import REORTH_RATIO, back_substitute_hat

__all__ = [
    "ArnoldiDecomposition",
    "BidiagDecomposition",
    "SolveReport",
    "tubal_global_arnoldi",
    "ttg_gmres",
    "residual_estimate",
    "projected_lsq",
    "ttg_golub_kahan",
    "ttgk_solve",
]

DEFAULT_RTOL = 1e-12
_EPS = np.finfo(float).eps


@dataclass
class ArnoldiDecomposition:
    basis: np.ndarray  # (n, (m+1)*s, n3): V_1 .. V_{m+1}
    hbar: np.ndarray  # (m+1, m, n3) Hessenberg tubes
    beta: np.ndarray  # (n3,) norm tube of the seed
    steps_completed: int
    breakdown: tuple | None = None  # (step, fourier slice), 1-based step


@dataclass
class BidiagDecomposition:
    u_basis: np.ndarray  # (n1, (k+1)*s, n3)
    v_basis: np.ndarray  # (n2, k*s, n3)
    cbar: np.ndarray  # (k+1, k, n3) lower bidiagonal: b_j on the diagonal, a_{j+1} below
    a1: np.ndarray  # (n3,) norm tube of B
    steps_completed: int
    breakdown: tuple | None = None


@dataclass
class SolveReport:
    """Outcome of one solver call.

    ``history`` holds ``(cycle, inner_step, relres)`` per inner step, where
    ``relres`` is the projected-problem residual divided by ``ref_norm``
    (``||B||``, or ``||R_0||`` when ``B`` is zero).
    ``restarts`` counts outer cycles actually run (1 if the first cycle
    converged); ``iterations`` counts inner steps over all cycles.
    ``final_relres`` is recomputed explicitly from ``B - A * X``.
    """

    method: str
    history: list = field(default_factory=list)
    iterations: int = 0
    restarts: int = 0
    elapsed: float = 0.0
    termination: str = "max-iterations"
    final_relres: float = float("nan")
    r0_norm: float = 0.0
    ref_norm: float = 0.0
    cycle_relres: list = field(default_factory=list)
    breakdowns: list = field(default_factory=list)
    stagnated: bool = False

    def to_dict(self):
        return {
            "method": self.method,
            "history": [list(h) for h in self.history],
            "iterations": self.iterations,
            "restarts": self.restarts,
            "elapsed": self.elapsed,
            "termination": self.termination,
            "final_relres": self.final_relres,
            "r0_norm": self.r0_norm,
            "ref_norm": self.ref_norm,
            "cycle_relres": list(self.cycle_relres),
            "breakdowns": [list(b) for b in self.breakdowns],
            "stagnated": self.stagnated,
        }


# --------------------------------------------------------------------------
# spectral cores


def _safe_scale(w, nrm, live):
    out = np.zeros_like(w)
    out[live] = w[live] / nrm[live, None, None]
    return out


def _seed(rh, rtol):
    """Normalize a seed block, freezing frequencies that are negligible
    relative to the largest one."""
    nrm = sp.slice_norms(rh)
    top = float(np.max(nrm)) if nrm.size else 0.0
    live = nrm > rtol * top
    return _safe_scale(rh, nrm, live), np.where(live, nrm, 0.0).astype(complex), live


def _block_ip(x, y):
    return np.sum(x.conj() * y, axis=(1, 2))


class _ArnoldiHat:
    """Incremental tubal-global Arnoldi on half spectra."""

    def __init__(self, ah, rh, m, rtol):
        self.ah = ah
        self.rtol = rtol
        v1, self.beta, live = _seed(rh, rtol)
        self.V = [v1]
        self.active = [live]
        nf = ah.shape[0]
        self.H = np.zeros((m + 1, m, nf), dtype=complex)
        self.j = 0

    def step(self):
        """Run one Arnoldi step; return the mask of frequencies that froze."""
        j = self.j
        vj = self.V[j]
        w = np.matmul(self.ah, vj)
        pre = sp.slice_norms(w)
        before = pre
        for _ in range(2):
            for i in range(j + 1):
                c = _block_ip(self.V[i], w)
                self.H[i, j] += c
                w -= c[:, None, None] * self.V[i]
            after = sp.slice_norms(w)
            if np.all(after >= REORTH_RATIO * before):
                break
            before = after
        nrm = sp.slice_norms(w)
        live = self.active[j] & (nrm > self.rtol * pre)
        self.H[j + 1, j] = np.where(live, nrm, 0.0)
        self.V.append(_safe_scale(w, nrm, live))
        self.active.append(live)
        self.j += 1
        return self.active[j] & ~live


class _GolubKahanHat:
    """Incremental tubal-global Golub-Kahan bidiagonalization on half spectra.

    With ``reorth`` every new block gets one Gram-Schmidt pass against all
    earlier blocks of its basis. The short recurrences alone lose
    orthogonality once the iteration starts to converge, and the residual
    history then drifts from its exact-arithmetic value.
    """

    def __init__(self, ah, bh, rtol, reorth=True):
        self.ah = ah
        self.aht = np.conj(np.swapaxes(ah, 1, 2))
        self.rtol = rtol
        self.reorth = reorth
        u1, a1, live = _seed(bh, rtol)
        self.U, self.alpha, self.u_active = [u1], [a1], [live]
        self.V, self.beta, self.v_active = [], [], []

    @property
    def k(self):
        return len(self.V)

    def step(self):
        """Extend by one block pair. Returns ``(frozen_v, frozen_u)`` masks."""
        j = self.k
        uj = self.U[j]
        vt = np.matmul(self.aht, uj)
        pre = sp.slice_norms(vt)
        if j:
            vt -= self.alpha[j][:, None, None] * self.V[j - 1]
        if self.reorth:
            for vi in self.V:
                vt -= _block_ip(vi, vt)[:, None, None] * vi
        bn = sp.slice_norms(vt)
        vlive = self.u_active[j] & (bn > self.rtol * pre)
        vj = _safe_scale(vt, bn, vlive)
        self.V.append(vj)
        self.beta.append(np.where(vlive, bn, 0.0).astype(complex))
        self.v_active.append(vlive)

        ut = np.matmul(self.ah, vj)
        pre = sp.slice_norms(ut)
        ut -= self.beta[j][:, None, None] * uj
        if self.reorth:
            for ui in self.U:
                ut -= _block_ip(ui, ut)[:, None, None] * ui
        an = sp.slice_norms(ut)
        ulive = vlive & (an > self.rtol * pre)
        self.U.append(_safe_scale(ut, an, ulive))
        self.alpha.append(np.where(ulive, an, 0.0).astype(complex))
        self.u_active.append(ulive)
        return self.u_active[j] & ~vlive, vlive & ~ulive

    def cbar(self):
        k = self.k
        nf = self.ah.shape[0]
        c = np.zeros((k + 1, k, nf), dtype=complex)
        for j in range(k):
            c[j, j] = self.beta[j]
            c[j + 1, j] = self.alpha[j + 1]
        return c


def _projected_lsq_hat(hbar, g0, active, n3):
    """Minimize ``|| g0 e_1 - Hbar y ||`` in every frequency.

    ``hbar`` is ``(p+1, p, nf)``, ``g0`` the seed norms ``(nf,)`` and
    ``active`` the ``(p, nf)`` column mask. Uses a complete slice-wise QR so
    the residual comes from the rotated right-hand side rather than from a
    difference of norms. Returns ``(y, g, resid)`` where ``resid`` is the
    T-l2 norm of the projected residual.
    """
    p1, p, nf = hbar.shape
    hk = np.ascontiguousarray(hbar.transpose(2, 0, 1))
    q, r = np.linalg.qr(hk, mode="complete")
    g = np.conj(q[:, 0, :]) * g0[:, None]  # Q^H (g0 e_1), (nf, p+1)
    scale = np.max(np.abs(hk), axis=(1, 2))
    ptol = p1 * _EPS * scale

    def pivot_ok(i, coef):
        return np.abs(coef) > ptol

    rt = np.ascontiguousarray(r[:, :p, :].transpose(1, 2, 0))
    y = back_substitute_hat(rt, g[:, :p].T, pivot_ok, active)
    res = g.T - np.einsum("ijk,jk->ik", r.transpose(1, 2, 0), y)
    resid = sp.weighted_norm(np.sum(np.abs(res) ** 2, axis=0), n3)
    return y, g, resid


def _combine(blocks, y):
    """``sum_i y_i (x) V_i`` on half spectra; ``blocks`` is a list of
    ``(nf, n, s)`` arrays and ``y`` is ``(p, nf)``."""
    stack = np.stack(blocks[: y.shape[0]])
    return np.einsum("ik,ikns->kns", y, stack)


def _first_index(mask):
    return int(np.flatnonzero(mask)[0])


# --------------------------------------------------------------------------
# public decompositions


def _check_square_system(a, b):
    a = as_tensor3(a, "a")
    b = as_tensor3(b, "b")
    if a.shape[0] != a.shape[1]:
        raise ShapeError(f"a must have square frontal slices, got {a.shape}")
    if b.shape[0] != a.shape[0] or b.shape[2] != a.shape[2]:
        raise ShapeError(f"a {a.shape} and b {b.shape} do not conform")
    return a, b


def _blocks_to_spatial(blocks, n3):
    return sp.unhat(np.concatenate(blocks, axis=2), n3)


def _tubes_to_spatial(t, n3):
    """``(p, q, nf)`` tube coefficients -> ``(p, q, n3)`` tensor."""
    return sp.unhat(np.ascontiguousarray(t.transpose(2, 0, 1)), n3)


def tubal_global_arnoldi(a, v, m, tol=DEFAULT_RTOL):
    """Build a T-orthonormal basis ``V_1 .. V_{m+1}`` of the tubal-global
    Krylov subspace of ``a`` (``n x n x n3``) and ``v`` (``n x s x n3``).

    ``h_ij = <V_i, A * V_j>_T``. The seed must be nonzero in every Fourier
    slice (otherwise :class:`BreakdownError`, as in normalization). If the
    block at step ``j`` has a Fourier slice with norm ``<= tol`` times its
    norm before projection, the process stops after ``j`` steps and the
    result carries ``breakdown=(j, slice)``; that slice of ``V_{j+1}`` and
    ``h_{j+1,j}`` are zero.
    """
    a, v = _check_square_system(a, v)
    n, s, n3 = v.shape
    if m < 1:
        raise ValueError("m must be >= 1")
    vh = sp.hat(v)
    norms = sp.slice_norms(vh)
    dead = norms <= tol * float(np.max(norms))
    if np.any(dead):
        k = _first_index(dead)
        raise BreakdownError(f"seed has a zero Fourier slice ({k})", index=k)
    arn = _ArnoldiHat(sp.hat(a), vh, m, tol)
    breakdown = None
    for _ in range(m):
        frozen = arn.step()
        if np.any(frozen):
            breakdown = (arn.j, _first_index(frozen))
            break
    j = arn.j
    return ArnoldiDecomposition(
        basis=_blocks_to_spatial(arn.V, n3),
        hbar=_tubes_to_spatial(arn.H[: j + 1, :j], n3),
        beta=sp.tube_unhat(arn.beta, n3),
        steps_completed=j,
        breakdown=breakdown,
    )


def ttg_golub_kahan(a, b, k, tol=DEFAULT_RTOL, reorth=True):
    """Tubal-global Golub-Kahan bidiagonalization of ``a`` (``n1 x n2 x n3``)
    started from ``b`` (``n1 x s x n3``), ``k`` steps.

    Returns bases ``U_1 .. U_{k+1}``, ``V_1 .. V_k`` and the lower bidiagonal
    ``cbar`` with ``A * V_k = U_{k+1} * (cbar (x) I_s)``. Breakdown handling
    mirrors :func:`tubal_global_arnoldi`. ``reorth=False`` gives the plain
    short-recurrence process.
    """
    a = as_tensor3(a, "a")
    b = as_tensor3(b, "b")
    if b.shape[0] != a.shape[0] or b.shape[2] != a.shape[2]:
        raise ShapeError(f"a {a.shape} and b {b.shape} do not conform")
    if k < 1:
        raise ValueError("k must be >= 1")
    n3 = a.shape[2]
    bh = sp.hat(b)
    norms = sp.slice_norms(bh)
    top = float(np.max(norms))
    dead = norms <= tol * top
    if top == 0.0 or np.any(dead):
        idx = _first_index(dead)
        raise BreakdownError(f"b has a zero Fourier slice ({idx})", index=idx)
    gk = _GolubKahanHat(sp.hat(a), bh, tol, reorth)
    breakdown = None
    for _ in range(k):
        fv, fu = gk.step()
        frozen = fv | fu
        if np.any(frozen):
            breakdown = (gk.k, _first_index(frozen))
            break
    return BidiagDecomposition(
        u_basis=_blocks_to_spatial(gk.U, n3),
        v_basis=_blocks_to_spatial(gk.V, n3),
        cbar=_tubes_to_spatial(gk.cbar(), n3),
        a1=sp.tube_unhat(gk.alpha[0], n3),
        steps_completed=gk.k,
        breakdown=breakdown,
    )


def residual_estimate(g_tail):
    """T-l2 norm of the last entry of the rotated right-hand side; equals
    ``||B - A * X_m||_F`` for the GMRES iterate of that cycle."""
    g = np.asarray(g_tail, dtype=np.float64).reshape(1, 1, -1)
    return tl2_norm(g)


def projected_lsq(hbar, beta):
    """Solve ``min_Y || E_1 * beta - hbar * Y ||_{T-l2}`` by slice-wise QR of
    ``hbar`` (``(p+1) x p x n3``) and tubal back substitution.

    Returns ``(y, g)``: ``y`` is ``p x 1 x n3`` and ``g`` is the rotated
    right-hand side ``Q^T * (E_1 * beta)``, ``(p+1) x 1 x n3``; its last
    entry feeds :func:`residual_estimate`.
    """
    hbar = as_tensor3(hbar, "hbar")
    p1, p, n3 = hbar.shape
    if p1 != p + 1:
        raise ShapeError(f"hbar must be (p+1, p, n3), got {hbar.shape}")
    bh = sp.tube_hat(np.asarray(beta, dtype=np.float64).reshape(-1))
    hh = np.fft.rfft(hbar, axis=2)
    active = np.ones((p, hh.shape[2]), bool)
    y, g, _ = _projected_lsq_hat(hh, bh, active, n3)
    return (
        sp.unhat(y.T[:, :, None], n3),
        sp.unhat(np.ascontiguousarray(g[:, :, None]), n3),
    )


# --------------------------------------------------------------------------
# solvers


def ttg_gmres(a, b, x0=None, m=10, max_restarts=50, tol=1e-6, breakdown_tol=DEFAULT_RTOL,
              stagnation_tol=1e-14):
    """Restarted tubal-global GMRES(m) for ``A * X = B`` with square slices.

    Each cycle builds ``m`` Arnoldi blocks from the current residual, solves
    the projected least-squares problem through a slice-wise QR of the
    Hessenberg tubes and tubal back substitution, and updates ``X``. Inner
    steps stop early once the projected residual drops below ``tol`` (relative
    to ``||B||``); each cycle ends with an explicit residual ``B - A * X``,
    which decides convergence. Returns ``(x, report)``.
    """
    a, b = _check_square_system(a, b)
    n, s, n3 = b.shape
    if m < 1 or max_restarts < 1 or tol <= 0:
        raise ValueError("need m >= 1, max_restarts >= 1 and tol > 0")
    x = np.zeros_like(b) if x0 is None else as_tensor3(x0, "x0").copy()
    if x.shape != b.shape:
        raise ShapeError(f"x0 {x.shape} does not match b {b.shape}")

    report = SolveReport(method="ttg-gmres")
    t0 = time.perf_counter()
    ah = sp.hat(a)
    bh = sp.hat(b)
    xh = sp.hat(x)
    rh = bh - np.matmul(ah, xh)
    r0 = sp.weighted_norm(sp.slice_norms(rh) ** 2, n3)
    bnorm = sp.weighted_norm(sp.slice_norms(bh) ** 2, n3)
    ref = bnorm if bnorm > 0.0 else r0
    report.r0_norm = r0
    report.ref_norm = ref
    if r0 == 0.0 or r0 / ref < tol:
        report.termination = "converged"
        report.final_relres = _explicit_relres(a, b, x, ref) if ref else 0.0
        report.elapsed = time.perf_counter() - t0
        return x, report

    prev = 1.0
    exhausted = False
    for cycle in range(1, max_restarts + 1):
        report.restarts = cycle
        arn = _ArnoldiHat(ah, rh, m, breakdown_tol)
        y = None
        for j in range(1, m + 1):
            frozen = arn.step()
            if np.any(frozen):
                report.breakdowns.append((cycle, j, _first_index(frozen)))
            cols = np.array(arn.active[:j])
            y, _, resid = _projected_lsq_hat(arn.H[: j + 1, :j], arn.beta, cols, n3)
            est = resid / ref
            report.iterations += 1
            report.history.append((cycle, j, est))
            exhausted = not np.any(arn.active[j])
            if est < tol or exhausted:
                break
        xh = xh + _combine(arn.V, y)
        rh = bh - np.matmul(ah, xh)
        relres = sp.weighted_norm(sp.slice_norms(rh) ** 2, n3) / ref
        report.cycle_relres.append(relres)
        if relres < tol:
            break
        if exhausted:
            report.termination = "breakdown"
            break
        if abs(prev - relres) <= stagnation_tol * prev:
            report.stagnated = True
            break
        prev = relres

    x = sp.unhat(xh, n3)
    report.final_relres = _explicit_relres(a, b, x, ref)
    if report.final_relres < tol:
        report.termination = "converged"
    report.elapsed = time.perf_counter() - t0
    return x, report


def _explicit_relres(a, b, x, r0):
    return float(np.linalg.norm((b - tprod(a, x)).ravel()) / r0)


def ttgk_solve(a, b, kmax=100, tol=1e-6, breakdown_tol=DEFAULT_RTOL, reorth=True):
    """Tubal-global Golub-Kahan least-squares solver (TTGK) for
    ``min_X ||A * X - B||_F``, starting from ``X_0 = 0``.

    The bidiagonalization is extended one block per iteration; at step ``k``
    the projected problem ``min_Y ||E_1 * a_1 - cbar_k * Y||_{T-l2}`` is solved
    by slice-wise QR and tubal back substitution. Stops when
    ``||R_k|| / ||B|| < tol`` (confirmed by an explicit residual) or after
    ``kmax`` steps. If the bidiagonalization terminates first, the iterate
    is the least-squares solution and ``termination`` is ``"least-squares"``.
    Returns ``(x, report)``; ``x`` is ``n2 x s x n3``.
    """
    a = as_tensor3(a, "a")
    b = as_tensor3(b, "b")
    if b.shape[0] != a.shape[0] or b.shape[2] != a.shape[2]:
        raise ShapeError(f"a {a.shape} and b {b.shape} do not conform")
    if kmax < 1 or tol <= 0:
        raise ValueError("need kmax >= 1 and tol > 0")
    n1, n2, n3 = a.shape
    s = b.shape[1]
    report = SolveReport(method="ttgk", restarts=1)
    t0 = time.perf_counter()
    bh = sp.hat(b)
    bnorm = sp.weighted_norm(sp.slice_norms(bh) ** 2, n3)
    if bnorm == 0.0:
        raise BreakdownError("normalization breakdown: b is zero", index=0)
    report.r0_norm = report.ref_norm = bnorm
    ah = sp.hat(a)
    gk = _GolubKahanHat(ah, bh, breakdown_tol, reorth)

    xh = np.zeros((ah.shape[0], n2, s), dtype=complex)
    for k in range(1, kmax + 1):
        fv, fu = gk.step()
        if np.any(fv | fu):
            report.breakdowns.append((1, k, _first_index(fv | fu)))
        cols = np.array(gk.v_active)
        y, _, resid = _projected_lsq_hat(gk.cbar(), gk.alpha[0], cols, n3)
        est = resid / bnorm
        report.iterations = k
        report.history.append((1, k, est))
        exhausted = not np.any(gk.v_active[-1] & gk.u_active[-1])
        if est < tol or exhausted or k == kmax:
            xh = _combine(gk.V, y)
            relres = sp.weighted_norm(sp.slice_norms(bh - np.matmul(ah, xh)) ** 2, n3) / bnorm
            if relres < tol:
                report.termination = "converged"
                break
            if exhausted:
                # A^T * R vanishes in every live frequency: least-squares optimum
                report.termination = "least-squares"
                break

    x = sp.unhat(xh, n3)
    report.cycle_relres.append(_explicit_relres(a, b, x, bnorm))
    report.final_relres = report.cycle_relres[-1]
    if report.final_relres < tol:
        report.termination = "converged"
    report.elapsed = time.perf_counter() - t0
    return x, report
