import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import rel
from tubal_krylov import tcore as tc
from tubal_krylov.errors import BreakdownError, RankDeficiencyError, ShapeError, SingularSystemError
from tubal_krylov.tfactor import normalize, tqr_slicewise, tubal_back_substitution, tubal_global_qr


def test_normalize_unit_input_is_fixed_point(rng):
    q0, _ = normalize(rng.standard_normal((4, 2, 3)))
    q, t = normalize(q0)
    np.testing.assert_allclose(q, q0, atol=1e-12)
    np.testing.assert_allclose(t, tc.unit_tube(3), atol=1e-12)


def test_normalize_zero_breaks_down_at_first_slice():
    with pytest.raises(BreakdownError) as err:
        normalize(np.zeros((3, 2, 4)))
    assert err.value.index == 0


def test_normalize_reconstructs(rng):
    a = rng.standard_normal((4, 2, 3))
    q, t = normalize(a)
    assert rel(tc.tube_times(t, q), a) <= 1e-12
    np.testing.assert_allclose(tc.inner_t(q, q), tc.unit_tube(3), atol=1e-12)


def test_normalize_reports_dead_slice():
    # constant along mode 3 -> only the DC Fourier slice is non-zero
    a = np.ones((2, 2, 4))
    with pytest.raises(BreakdownError) as err:
        normalize(a)
    assert err.value.index == 1


def test_global_qr_single_block_equals_normalize(rng):
    z = rng.standard_normal((5, 2, 3))
    res = tubal_global_qr(z, 2)
    q, t = normalize(z)
    np.testing.assert_allclose(res.q, q, atol=1e-12)
    np.testing.assert_allclose(res.r[0, 0], t, atol=1e-12)


def test_global_qr_reduces_to_mgs(rng):
    z = rng.standard_normal((7, 4, 1))
    res = tubal_global_qr(z, 1)
    q, r = np.linalg.qr(z[:, :, 0])
    sign = np.sign(np.diag(r))
    np.testing.assert_allclose(res.q[:, :, 0], q * sign, atol=1e-12)
    np.testing.assert_allclose(res.r[:, :, 0], r * sign[:, None], atol=1e-12)


@pytest.mark.parametrize("shape,s", [((6, 6, 3), 2), ((12, 8, 4), 2), ((12, 8, 4), 4), ((9, 3, 5), 1)])
def test_global_qr_orthonormal_and_reconstructs(rng, shape, s):
    z = rng.standard_normal(shape)
    k = shape[1] // s
    res = tubal_global_qr(z, s)
    np.testing.assert_allclose(tc.tdiamond(res.q, res.q, s), tc.identity_t(k, shape[2]), atol=1e-10)
    recon = tc.tprod(res.q, tc.tkron(res.r, tc.identity_t(s, shape[2])))
    assert rel(recon, z) <= 1e-10
    assert np.all(np.abs(np.tril(np.moveaxis(res.r, 2, 0), -1)) <= 1e-12)


def test_global_qr_rank_deficiency(rng):
    z = rng.standard_normal((6, 4, 3))
    z[:, 2:4] = z[:, 0:2]
    with pytest.raises(RankDeficiencyError) as err:
        tubal_global_qr(z, 2)
    assert err.value.block == 1


def test_global_qr_width_must_divide():
    with pytest.raises(ShapeError):
        tubal_global_qr(np.ones((4, 3, 2)), 2)


def test_global_qr_near_dependent_blocks_stay_orthonormal(rng):
    z = rng.standard_normal((10, 3, 4))
    z[:, 1] = z[:, 0] + 1e-7 * z[:, 1]
    z[:, 2] = z[:, 0] + 1e-7 * z[:, 2]
    res = tubal_global_qr(z, 1)
    np.testing.assert_allclose(tc.tdiamond(res.q, res.q, 1), tc.identity_t(3, 4), atol=1e-10)


def test_tqr_examples(rng):
    f = rng.standard_normal((4, 3, 1))
    res = tqr_slicewise(f)
    assert rel(res.q[:, :, 0] @ res.r[:, :, 0], f[:, :, 0]) <= 1e-12
    res = tqr_slicewise(tc.identity_t(3, 4))
    np.testing.assert_allclose(np.abs(res.q), tc.identity_t(3, 4), atol=1e-12)
    np.testing.assert_allclose(np.abs(res.r), tc.identity_t(3, 4), atol=1e-12)


@pytest.mark.parametrize("shape", [(5, 3, 4), (4, 4, 3), (12, 8, 4), (3, 5, 2)])
def test_tqr_reconstructs(rng, shape):
    f = rng.standard_normal(shape)
    res = tqr_slicewise(f)
    assert rel(tc.tprod(res.q, res.r), f) <= 1e-10
    k = res.q.shape[1]
    qtq = tc.tprod(tc.transpose_t(res.q), res.q)
    np.testing.assert_allclose(qtq, tc.identity_t(k, shape[2]), atol=1e-10)
    rhat = np.fft.fft(res.r, axis=2)
    for j in range(shape[2]):
        assert np.allclose(np.tril(rhat[:, :, j], -1), 0, atol=1e-12)


@given(st.integers(0, 2**32 - 1), st.integers(2, 6), st.integers(1, 5))
@settings(max_examples=30, deadline=None)
def test_tqr_preserves_tl2_norm(seed, n, n3):
    rng = np.random.default_rng(seed)
    q = tqr_slicewise(rng.standard_normal((n, n, n3))).q
    y = rng.standard_normal((n, 1, n3))
    assert abs(tc.tl2_norm(tc.tprod(tc.transpose_t(q), y)) - tc.tl2_norm(y)) <= 1e-10 * tc.tl2_norm(y)


def _random_upper(rng, m, n3):
    r = rng.standard_normal((m, m, n3))
    for i in range(m):
        r[i, :i] = 0.0
        r[i, i] = rng.standard_normal(n3) * 0.1
        r[i, i, 0] = 3.0  # dominant constant term -> invertible tube
    return r


def test_back_substitution_scalar_case(rng):
    r = _random_upper(rng, 1, 4)
    g = rng.standard_normal((1, 1, 4))
    y = tubal_back_substitution(r, g)
    np.testing.assert_allclose(y[0, 0], tc.tube_mul(tc.tube_inverse(r[0, 0]), g[0, 0]), atol=1e-12)


def test_back_substitution_identity(rng):
    g = rng.standard_normal((4, 1, 3))
    np.testing.assert_allclose(tubal_back_substitution(tc.identity_t(4, 3), g), g, atol=1e-14)


@pytest.mark.parametrize("m,n3", [(4, 3), (6, 4), (3, 1), (5, 6)])
def test_back_substitution_multiply_back(rng, m, n3):
    r = _random_upper(rng, m, n3)
    g = rng.standard_normal((m, 1, n3))
    y = tubal_back_substitution(r, g)
    assert tc.frob_norm(tc.tprod(r, y) - g) <= 1e-10 * tc.frob_norm(g)
    # 2-D g accepted
    np.testing.assert_allclose(tubal_back_substitution(r, g[:, 0, :]), y, atol=1e-14)


def test_back_substitution_singular_tube(rng):
    r = _random_upper(rng, 3, 2)
    r[1, 1] = [1.0, 1.0]  # Fourier coefficients (2, 0)
    with pytest.raises(SingularSystemError) as err:
        tubal_back_substitution(r, rng.standard_normal((3, 1, 2)))
    assert err.value.index == 1
