import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from aalg.algebra import (AlmostAbelianAlgebra, ad_matrices, bracket, decompose,
                          killing_form, mean_curvature, transform)
from aalg.metric import eta_matrix

ROT = [[0.0, -1.0], [1.0, 0.0]]
S3 = np.sqrt(3) / 2


def petrov_A():
    return [[-0.5, -S3, 0], [S3, -0.5, 0], [0, 0, 1]]


def matrices(max_m=5):
    return st.integers(2, max_m).flatmap(
        lambda m: arrays(float, (m, m), elements=st.floats(-2, 2, allow_nan=False)))


def test_bracket_examples():
    alg = AlmostAbelianAlgebra(3, ROT)
    assert np.array_equal(bracket(alg, alg.basis(2), alg.basis(0)), [0, 1, 0])
    assert not bracket(alg, alg.basis(0), alg.basis(1)).any()
    alg4 = AlmostAbelianAlgebra(4, petrov_A())
    np.testing.assert_allclose(bracket(alg4, alg4.basis(3), alg4.basis(1)), [-S3, -0.5, 0, 0])


def test_bracket_rejects_bad_length():
    alg = AlmostAbelianAlgebra(3, ROT)
    with pytest.raises(ValueError):
        bracket(alg, [1, 0], [0, 1, 0])


def test_algebra_validation():
    with pytest.raises(ValueError):
        AlmostAbelianAlgebra(2, [[1.0]])
    with pytest.raises(ValueError):
        AlmostAbelianAlgebra(4, ROT)
    # the abelian algebra is accepted
    assert not AlmostAbelianAlgebra(3, np.zeros((2, 2))).A.any()


def test_ad_matrices():
    alg = AlmostAbelianAlgebra(3, np.eye(2))
    np.testing.assert_array_equal(ad_matrices(alg)[2], np.diag([1.0, 1.0, 0.0]))
    rot = AlmostAbelianAlgebra(3, ROT)
    ad = ad_matrices(rot)
    # ad X1 applied to X3 gives -X2
    np.testing.assert_array_equal(ad[0] @ rot.basis(2), [0, -1, 0])
    for i in range(2):
        for j in range(2):
            assert not (ad[i] @ rot.basis(j)).any()


def test_killing_form_examples():
    assert killing_form(AlmostAbelianAlgebra(3, ROT))[2, 2] == pytest.approx(-2)
    assert not killing_form(AlmostAbelianAlgebra(3, np.zeros((2, 2)))).any()
    assert killing_form(AlmostAbelianAlgebra(3, np.diag([1.0, 2.0])))[2, 2] == pytest.approx(5)


def test_mean_curvature_examples():
    assert not mean_curvature(AlmostAbelianAlgebra(4, np.diag([1.0, -1, 0])), "b").any()
    np.testing.assert_array_equal(mean_curvature(AlmostAbelianAlgebra(3, np.eye(2)), "a"), [0, 0, -2])
    A = np.diag([1.0, 1.0, 1.0])
    np.testing.assert_array_equal(mean_curvature(AlmostAbelianAlgebra(4, A), "c"), [0, 0, 3, 0])


def test_decompose_examples():
    a = decompose(AlmostAbelianAlgebra(3, [[1, 2], [0, 1]]), "a")
    np.testing.assert_array_equal(a.S, [[1, 1], [1, 1]])
    np.testing.assert_array_equal(a.T, [[0, 1], [-1, 0]])
    b = decompose(AlmostAbelianAlgebra(4, petrov_A()), "b")
    np.testing.assert_allclose(b.S_L, petrov_A())
    assert not b.T_L.any()
    skew = np.zeros((3, 3))
    skew[1, 2], skew[2, 1] = 1.5, -1.5
    assert not decompose(AlmostAbelianAlgebra(4, skew), "b").S_L.any()


def test_transform_examples():
    alg = AlmostAbelianAlgebra(4, petrov_A())
    eta = eta_matrix("b", 4)
    new, eta2 = transform(alg, eta, np.eye(3), 1.0)
    np.testing.assert_array_equal(new.A, alg.A)
    np.testing.assert_array_equal(eta2, eta)
    # flips alpha and lambda, keeps beta
    new, eta2 = transform(alg, eta, np.diag([-1.0, 1, 1]), -1.0)
    np.testing.assert_allclose(new.A, [[0.5, -S3, 0], [S3, 0.5, 0], [0, 0, -1]])
    np.testing.assert_array_equal(eta2, eta)
    # case (c): normalise d to 1
    A = np.array([[1.0, 0, 0.5], [0, 2, 0], [0.3, 0, 4]])
    new, _ = transform(AlmostAbelianAlgebra(4, A), eta_matrix("c", 4), np.diag([1.0, 1, 4]), 0.25)
    assert new.A[2, 2] == pytest.approx(1.0)


def test_transform_errors():
    alg = AlmostAbelianAlgebra(3, ROT)
    eta = eta_matrix("a", 3)
    with pytest.raises(ValueError):
        transform(alg, eta, np.zeros((2, 2)), 1.0)
    with pytest.raises(ValueError):
        transform(alg, eta, np.eye(2), 0.0)


@given(matrices(), st.data())
def test_antisymmetry_and_jacobi(A, data):
    alg = AlmostAbelianAlgebra(A.shape[0] + 1, A)
    vec = arrays(float, alg.n, elements=st.floats(-3, 3, allow_nan=False))
    x, y, z = data.draw(vec), data.draw(vec), data.draw(vec)
    np.testing.assert_array_equal(bracket(alg, x, y), -bracket(alg, y, x))
    jac = (bracket(alg, x, bracket(alg, y, z)) + bracket(alg, y, bracket(alg, z, x))
           + bracket(alg, z, bracket(alg, x, y)))
    assert np.abs(jac).max() < 1e-12 * max(1.0, np.abs(A).max() ** 2 * 27)


def test_jacobi_random_triples(rng):
    for _ in range(1000):
        m = rng.integers(2, 6)
        alg = AlmostAbelianAlgebra(m + 1, rng.uniform(-2, 2, (m, m)))
        x, y, z = rng.uniform(-1, 1, (3, m + 1))
        jac = (bracket(alg, x, bracket(alg, y, z)) + bracket(alg, y, bracket(alg, z, x))
               + bracket(alg, z, bracket(alg, x, y)))
        assert np.abs(jac).max() < 1e-12


@given(matrices(), st.sampled_from("abc"))
def test_decompose_recompose(A, case):
    alg = AlmostAbelianAlgebra(A.shape[0] + 1, A)
    d = decompose(alg, case)
    if case == "a":
        back = d.S + d.T
    elif case == "b":
        back = d.S_L + d.T_L
    else:
        back = d.assemble()
        np.testing.assert_allclose(d.Sprime + d.Tprime, d.Aprime, atol=1e-15)
    np.testing.assert_allclose(back, A, rtol=0, atol=1e-15)


@given(matrices())
def test_killing_symmetric_rank_one(A):
    K = killing_form(AlmostAbelianAlgebra(A.shape[0] + 1, A))
    np.testing.assert_array_equal(K, K.T)
    assert np.count_nonzero(K) <= 1


@given(matrices(4), st.sampled_from("abc"), st.data())
def test_transform_round_trip(A, case, data):
    m = A.shape[0]
    P = data.draw(arrays(float, (m, m), elements=st.floats(-2, 2, allow_nan=False)))
    c = data.draw(st.floats(0.25, 4) | st.floats(-4, -0.25))
    if abs(np.linalg.det(P)) < 0.1 or np.linalg.cond(P) > 1e3:
        P = P + 3 * np.eye(m)
    if abs(np.linalg.det(P)) < 0.1 or np.linalg.cond(P) > 1e3:
        return
    alg = AlmostAbelianAlgebra(m + 1, A)
    eta = eta_matrix(case, m + 1)
    mid, eta1 = transform(alg, eta, P, c)
    back, eta2 = transform(mid, eta1, np.linalg.inv(P), 1 / c)
    scale = max(1.0, np.abs(A).max())
    np.testing.assert_allclose(back.A, A, atol=1e-12 * scale * np.linalg.cond(P) ** 2)
    np.testing.assert_allclose(eta2, eta, atol=1e-12 * np.linalg.cond(P) ** 2)
