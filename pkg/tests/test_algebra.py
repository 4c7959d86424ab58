import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mongeval.algebra import (
    HermitianMatrix,
    MixedDetForm,
    complex_embedding,
    det_batch,
    jacobi_eigvalsh,
    mixed_det,
    moore_det,
    moore_det_batch,
    oct_abs2,
    oct_conj,
    oct_mul,
    oct_unit,
    polarized_det_batch,
    quat_abs2,
    quat_conj,
    quat_conj_transpose,
    quat_matmul,
    quat_mul,
    realize_quat_matrix,
    oct_det2,
)

RNG = np.random.default_rng(1234)


def random_quat_hermitian(rng, n, scale=1.0):
    a = scale * rng.standard_normal((n, n, 4))
    return 0.5 * (a + quat_conj_transpose(a))


def random_o2_hermitian(rng, scale=1.0):
    data = np.zeros((2, 2, 8))
    data[0, 0, 0] = scale * rng.standard_normal()
    data[1, 1, 0] = scale * rng.standard_normal()
    q = scale * rng.standard_normal(8)
    data[0, 1] = q
    data[1, 0] = oct_conj(q)
    return data


quat_coeffs = st.lists(st.floats(-10, 10), min_size=4, max_size=4)
oct_coeffs = st.lists(st.floats(-10, 10), min_size=8, max_size=8)


# ---------------------------------------------------------------------------
# quaternions
# ---------------------------------------------------------------------------

def test_quaternion_table():
    e = np.eye(4)
    one, i, j, k = e
    assert np.allclose(quat_mul(i, i), -one)
    assert np.allclose(quat_mul(j, j), -one)
    assert np.allclose(quat_mul(k, k), -one)
    assert np.allclose(quat_mul(i, j), k)
    assert np.allclose(quat_mul(j, k), i)
    assert np.allclose(quat_mul(k, i), j)
    assert np.allclose(quat_mul(j, i), -k)


@settings(max_examples=100, deadline=None)
@given(quat_coeffs, quat_coeffs)
def test_quaternion_conj_reverses_products(p, q):
    p, q = np.array(p), np.array(q)
    lhs = quat_conj(quat_mul(p, q))
    rhs = quat_mul(quat_conj(q), quat_conj(p))
    assert np.allclose(lhs, rhs, atol=1e-9)


@settings(max_examples=100, deadline=None)
@given(quat_coeffs, quat_coeffs, quat_coeffs)
def test_quaternion_associativity(p, q, r):
    p, q, r = map(np.array, (p, q, r))
    assert np.allclose(quat_mul(quat_mul(p, q), r), quat_mul(p, quat_mul(q, r)), atol=1e-6)


def test_quaternion_norm():
    q = RNG.standard_normal(4)
    prod = quat_mul(q, quat_conj(q))
    assert np.allclose(prod, quat_abs2(q) * np.eye(4)[0])


# ---------------------------------------------------------------------------
# octonions
# ---------------------------------------------------------------------------

def test_octonion_identity_and_units():
    e0 = oct_unit(0)
    for i in range(8):
        ei = oct_unit(i)
        assert np.allclose(oct_mul(e0, ei), ei)
        assert np.allclose(oct_mul(ei, e0), ei)
    assert np.allclose(oct_mul(oct_unit(1), oct_unit(2)), oct_unit(3))
    assert np.allclose(oct_conj(e0), e0)
    for i in range(1, 8):
        assert np.allclose(oct_conj(oct_unit(i)), -oct_unit(i))


def test_octonion_quaternion_subalgebra():
    rng = np.random.default_rng(0)
    for _ in range(20):
        p4, q4 = rng.standard_normal(4), rng.standard_normal(4)
        p8 = np.concatenate([p4, np.zeros(4)])
        q8 = np.concatenate([q4, np.zeros(4)])
        prod = oct_mul(p8, q8)
        assert np.allclose(prod[:4], quat_mul(p4, q4))
        assert np.allclose(prod[4:], 0)


@settings(max_examples=100, deadline=None)
@given(oct_coeffs, oct_coeffs)
def test_octonion_norm_multiplicativity(p, q):
    p, q = np.array(p), np.array(q)
    assert abs(oct_abs2(oct_mul(p, q)) - oct_abs2(p) * oct_abs2(q)) <= 1e-12 * max(
        1.0, oct_abs2(p) * oct_abs2(q)
    )


def test_octonion_q_times_conj():
    rng = np.random.default_rng(3)
    for _ in range(100):
        q = rng.standard_normal(8)
        assert np.abs(oct_mul(q, oct_conj(q)) - oct_abs2(q) * oct_unit(0)).max() <= 1e-12 * max(
            1.0, oct_abs2(q)
        )


# ---------------------------------------------------------------------------
# realization and complex embedding
# ---------------------------------------------------------------------------

def test_realize_identity():
    eye = np.zeros((3, 3, 4))
    eye[np.arange(3), np.arange(3), 0] = 1.0
    assert np.allclose(realize_quat_matrix(eye), np.eye(12))


def test_realize_left_mult_by_i():
    A = np.zeros((1, 1, 4))
    A[0, 0, 1] = 1.0
    R = realize_quat_matrix(A)
    expected = np.array([[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]], dtype=float)
    assert np.allclose(R, expected)
    assert np.isclose(np.linalg.det(R), 1.0)


def test_realize_is_action():
    rng = np.random.default_rng(5)
    A = rng.standard_normal((2, 2, 4))
    x = rng.standard_normal((2, 1, 4))
    lhs = realize_quat_matrix(A) @ x.reshape(-1)
    rhs = quat_matmul(A, x).reshape(-1)
    assert np.allclose(lhs, rhs)


def test_embedding_multiplicative_and_hermitian():
    rng = np.random.default_rng(6)
    X = rng.standard_normal((3, 3, 4))
    Y = rng.standard_normal((3, 3, 4))
    assert np.allclose(
        complex_embedding(quat_matmul(X, Y)), complex_embedding(X) @ complex_embedding(Y)
    )
    H = random_quat_hermitian(rng, 3)
    chi = complex_embedding(H)
    assert np.allclose(chi, chi.conj().T)


# ---------------------------------------------------------------------------
# Jacobi eigenvalues
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("m", [2, 4, 6, 8])
def test_jacobi_matches_lapack(m):
    rng = np.random.default_rng(m)
    a = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
    a = a + a.conj().T
    mine = jacobi_eigvalsh(a)
    ref = np.linalg.eigvalsh(a)
    assert np.abs(mine - ref).max() <= 1e-10 * max(1.0, np.abs(ref).max())


# ---------------------------------------------------------------------------
# Moore determinant
# ---------------------------------------------------------------------------

def test_moore_2x2_closed_form():
    rng = np.random.default_rng(7)
    for _ in range(50):
        a, b = rng.standard_normal(2)
        q = rng.standard_normal(4)
        A = np.zeros((2, 2, 4))
        A[0, 0, 0], A[1, 1, 0] = a, b
        A[0, 1], A[1, 0] = q, quat_conj(q)
        assert abs(moore_det(A) - (a * b - quat_abs2(q))) <= 1e-10 * max(1.0, abs(a * b))


def test_moore_identity_exact():
    for n in range(1, 5):
        assert moore_det(HermitianMatrix.identity("H", n)) == 1.0


def test_moore_of_embedded_complex_matrix():
    rng = np.random.default_rng(8)
    for n in (2, 3):
        c = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        c = c + c.conj().T
        A = np.zeros((n, n, 4))
        A[..., 0] = c.real
        A[..., 1] = c.imag
        assert abs(moore_det(A) - np.linalg.det(c).real) <= 1e-9 * max(
            1.0, abs(np.linalg.det(c))
        )


def test_moore_negative_eigenvalue_sign():
    A = np.zeros((2, 2, 4))
    A[0, 0, 0], A[1, 1, 0] = 1.0, -1.0
    assert np.isclose(moore_det(A), -1.0)


def test_moore_weak_multiplicativity():
    rng = np.random.default_rng(9)
    for n in (2, 3):
        for _ in range(10):
            A = random_quat_hermitian(rng, n)
            C = rng.standard_normal((n, n, 4))
            CAC = quat_matmul(quat_matmul(quat_conj_transpose(C), A), C)
            CC = quat_matmul(quat_conj_transpose(C), C)
            lhs = moore_det(CAC)
            rhs = moore_det(A) * moore_det(CC)
            assert abs(lhs - rhs) <= 1e-8 * max(1.0, abs(rhs))


def test_moore_batch_matches_scalar():
    rng = np.random.default_rng(10)
    batch = np.stack([random_quat_hermitian(rng, 3) for _ in range(20)])
    vals = moore_det_batch(batch)
    for k in range(20):
        assert abs(vals[k] - moore_det(batch[k])) <= 1e-10 * max(1.0, abs(vals[k]))


def test_moore_rejects_non_hermitian():
    rng = np.random.default_rng(11)
    with pytest.raises(ValueError):
        moore_det(rng.standard_normal((2, 2, 4)))


# ---------------------------------------------------------------------------
# octonionic 2x2 determinant
# ---------------------------------------------------------------------------

def test_oct_det2_examples():
    assert oct_det2(HermitianMatrix.identity("O2", 2)) == 1.0
    rng = np.random.default_rng(12)
    a, b = rng.standard_normal(2)
    q = rng.standard_normal(8)
    A = np.zeros((2, 2, 8))
    A[0, 0, 0], A[1, 1, 0] = a, b
    A[0, 1], A[1, 0] = q, oct_conj(q)
    assert np.isclose(oct_det2(A), a * b - oct_abs2(q))
    D = np.zeros((2, 2, 8))
    D[0, 0, 0], D[1, 1, 0] = a, b
    assert np.isclose(oct_det2(D), a * b)


# ---------------------------------------------------------------------------
# Hermitian matrices and mixed determinants
# ---------------------------------------------------------------------------

def test_hermitian_matrix_validation():
    with pytest.raises(ValueError):
        HermitianMatrix("R", np.array([[0.0, 1.0], [0.0, 0.0]]))
    with pytest.raises(ValueError):
        HermitianMatrix("O2", np.zeros((3, 3, 8)))
    with pytest.raises(ValueError):
        HermitianMatrix("Q", np.eye(2))
    m = HermitianMatrix("C", np.array([[1.0, 1j], [-1j, 2.0]]))
    assert m.n == 2
    assert np.isclose(m.det(), 2.0 - 1.0)


def _random_hermitian(field, n, rng, scale=1.0):
    if field == "R":
        a = scale * rng.standard_normal((n, n))
        return HermitianMatrix("R", 0.5 * (a + a.T))
    if field == "C":
        a = scale * (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
        return HermitianMatrix("C", 0.5 * (a + a.conj().T))
    if field == "H":
        return HermitianMatrix("H", random_quat_hermitian(rng, n, scale))
    return HermitianMatrix("O2", random_o2_hermitian(rng, scale))


@pytest.mark.parametrize("field,n", [("R", 3), ("R", 5), ("C", 3), ("H", 2), ("H", 3), ("O2", 2)])
def test_mixed_det_diagonal_restoration(field, n):
    rng = np.random.default_rng(13)
    H = _random_hermitian(field, n, rng)
    val = mixed_det([H] * n)
    ref = H.det(check=False)
    assert abs(val - ref) <= 1e-9 * max(1.0, H.norm() ** n)


@pytest.mark.parametrize("field,n", [("R", 3), ("C", 2), ("H", 2), ("O2", 2)])
def test_mixed_det_symmetry(field, n):
    rng = np.random.default_rng(14)
    mats = [_random_hermitian(field, n, rng) for _ in range(n)]
    base = mixed_det(mats)
    for _ in range(4):
        perm = rng.permutation(n)
        val = mixed_det([mats[p] for p in perm])
        assert abs(val - base) <= 1e-12 * max(1.0, abs(base))


def test_mixed_det_two_diag_example():
    D1 = HermitianMatrix("R", np.diag([1.0, 0.0]))
    D2 = HermitianMatrix("R", np.diag([0.0, 1.0]))
    assert np.isclose(mixed_det([D1, D2]), 0.5)


def test_mixed_det_form_validation():
    form = MixedDetForm("R", 2)
    with pytest.raises(ValueError):
        form([HermitianMatrix.identity("R", 2)])
    with pytest.raises(ValueError):
        form([HermitianMatrix.identity("R", 2), HermitianMatrix.identity("C", 2)])
    with pytest.raises(ValueError):
        form([HermitianMatrix.identity("R", 3)] * 2)
    with pytest.raises(ValueError):
        MixedDetForm("O2", 3)


def _psd(field, n, rng):
    if field == "R":
        a = rng.standard_normal((n, n))
        return HermitianMatrix("R", a @ a.T)
    if field == "C":
        a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        return HermitianMatrix("C", a @ a.conj().T)
    if field == "H":
        a = rng.standard_normal((n, n, 4))
        return HermitianMatrix("H", quat_matmul(quat_conj_transpose(a), a))
    data = np.zeros((2, 2, 8))
    q = rng.standard_normal(8)
    data[0, 0, 0] = rng.uniform(0.1, 2.0)
    norm_q = np.sqrt(oct_abs2(q))
    data[1, 1, 0] = oct_abs2(q) / data[0, 0, 0] + rng.uniform(0.1, 1.0)
    data[0, 1], data[1, 0] = q, oct_conj(q)
    assert data[0, 0, 0] * data[1, 1, 0] >= norm_q**2
    return HermitianMatrix("O2", data)


@pytest.mark.parametrize("field,n", [("R", 3), ("C", 2), ("H", 2), ("O2", 2)])
def test_mixed_det_nonnegative_on_psd(field, n):
    rng = np.random.default_rng(15)
    for _ in range(25):
        mats = [_psd(field, n, rng) for _ in range(n)]
        assert mixed_det(mats) >= -1e-10


def test_polarized_batch_matches_form():
    rng = np.random.default_rng(16)
    mats = [_random_hermitian("R", 3, rng) for _ in range(3)]
    batch = polarized_det_batch("R", [m.data[None] for m in mats])
    assert np.isclose(batch[0], mixed_det(mats))


def test_det_batch_fields():
    rng = np.random.default_rng(17)
    r = _random_hermitian("R", 3, rng)
    assert np.isclose(det_batch("R", r.data[None])[0], np.linalg.det(r.data))
    c = _random_hermitian("C", 3, rng)
    assert np.isclose(det_batch("C", c.data[None])[0], np.linalg.det(c.data).real)
    with pytest.raises(ValueError):
        det_batch("X", r.data[None])
