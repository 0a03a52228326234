"""Benchmark problems and the dense block-circulant reference solver."""

import warnings
from dataclasses import asdict, dataclass

import numpy as np
import scipy.linalg

from .errors import ShapeError, SingularSystemError, SizeGuardError
from .tcore import as_tensor3, bcirc, fold, tprod, unfold

__all__ = [
    "ProblemSpec",
    "gen_example1",
    "gen_poisson3d",
    "make_problem",
    "dense_reference_solve",
]

DENSE_LIMIT = 2000


@dataclass(frozen=True)
class ProblemSpec:
    """Flat description of a generated benchmark problem.

    ``kind`` is ``"example1"`` or ``"poisson3d"``; for ``poisson3d``, ``n``
    is the slice size ``m0**2`` and the seed is unused.
    """

    kind: str
    n: int
    s: int
    n3: int
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ("example1", "poisson3d"):
            raise ValueError(f"unknown problem kind {self.kind!r}")
        if min(self.n, self.s, self.n3) < 1:
            raise ValueError("problem sizes must be positive")

    def to_dict(self):
        return asdict(self)


def gen_example1(n, s, n3, seed=0):
    """Random slices ``A_i = I_n + i / (2 sqrt(n)) * U_i`` (``i = 1..n3``) with
    ``U_i`` uniform on [0, 1) from a seeded PCG64 stream, drawn slice by
    slice. The exact solution is ``ones(n, s, n3)``.

    Returns ``(a, b, x_star)`` with ``b = a * x_star``.
    """
    if min(n, s, n3) < 1:
        raise ValueError("sizes must be positive")
    rng = np.random.default_rng(seed)
    a = np.empty((n, n, n3))
    for i in range(1, n3 + 1):
        a[:, :, i - 1] = np.eye(n) + (i / (2.0 * np.sqrt(n))) * rng.random((n, n))
    x_star = np.ones((n, s, n3))
    return a, tprod(a, x_star), x_star


def _poisson_slices(n, h):
    c = -1.0 / h**3
    centre = 6.0 * np.eye(n) - np.eye(n, k=1) - np.eye(n, k=-1)
    centre[0, 0] = centre[-1, -1] = 0.0
    side = np.eye(n)
    side[0, 0] = side[-1, -1] = 0.0
    return c * centre, c * side


def gen_poisson3d(m0_sq, s, n3=None):
    """Laplacian-stencil tensor of size ``m0_sq x m0_sq x n3``.

    Frontal slice 1 is ``(-1/h^3) T`` with ``T = tridiag(-1, 6, -1)`` whose
    two corner diagonal entries are zero; slices 2 and ``n3`` (the circulant
    neighbours of slice 1) are ``(-1/h^3) E`` with ``E`` the identity minus
    its corner entries; all other slices vanish. ``h = 1 / (m0_sq + 1)`` and
    ``n3`` defaults to ``m0_sq``. Returns ``(a, b, x_star)`` with ``x_star``
    all ones.
    """
    n3 = m0_sq if n3 is None else n3
    if m0_sq < 3 or n3 < 3 or s < 1:
        raise ValueError("need m0_sq >= 3, n3 >= 3 and s >= 1")
    h = 1.0 / (m0_sq + 1)
    centre, side = _poisson_slices(m0_sq, h)
    a = np.zeros((m0_sq, m0_sq, n3))
    a[:, :, 0] = centre
    a[:, :, 1] = side
    a[:, :, n3 - 1] = side
    x_star = np.ones((m0_sq, s, n3))
    return a, tprod(a, x_star), x_star


def make_problem(spec):
    if spec.kind == "example1":
        return gen_example1(spec.n, spec.s, spec.n3, spec.seed)
    return gen_poisson3d(spec.n, spec.s, spec.n3)


def dense_reference_solve(a, b, limit=DENSE_LIMIT):
    """Solve ``a * X = b`` through the explicit ``bcirc(a)`` matrix.

    Square slices use an LU solve (ill-conditioning is reported as
    :class:`SingularSystemError`); rectangular ones a dense least-squares
    solve. Refuses problems with ``n1*n3`` or ``n2*n3`` above ``limit``.
    """
    a = as_tensor3(a, "a")
    b = as_tensor3(b, "b")
    n1, n2, n3 = a.shape
    if b.shape[0] != n1 or b.shape[2] != n3:
        raise ShapeError(f"a {a.shape} and b {b.shape} do not conform")
    if max(n1, n2) * n3 > limit:
        raise SizeGuardError(f"bcirc would be {n1 * n3} x {n2 * n3}, above the limit {limit}")
    big = bcirc(a)
    rhs = unfold(b)
    if n1 == n2:
        with warnings.catch_warnings(), np.errstate(divide="ignore", invalid="ignore"):
            warnings.simplefilter("error", scipy.linalg.LinAlgWarning)
            try:
                sol = scipy.linalg.solve(big, rhs)
            except (np.linalg.LinAlgError, scipy.linalg.LinAlgWarning) as err:
                raise SingularSystemError(f"bcirc(a) is singular: {err}") from None
        if not np.all(np.isfinite(sol)):
            raise SingularSystemError("bcirc(a) is singular: non-finite solution")
    else:
        sol = np.linalg.lstsq(big, rhs, rcond=None)[0]
    return fold(sol, n2, n3)
