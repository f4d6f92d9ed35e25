import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from aalg.metric import (LorentzianStructure, coordinate_metric, eta_matrix, exp_associated,
                         inner, left_invariant_frame, negative_index, orthonormal_frame,
                         structure_from_json, structure_to_json)
from scipy.linalg import expm

S3 = np.sqrt(3) / 2
PETROV = [[-0.5, -S3, 0], [S3, -0.5, 0], [0, 0, 1]]


def test_eta_examples():
    np.testing.assert_array_equal(eta_matrix("b", 4), np.diag([-1.0, 1, 1, 1]))
    np.testing.assert_array_equal(eta_matrix("c", 3), [[1, 0, 0], [0, 0, 1], [0, 1, 0]])
    np.testing.assert_array_equal(eta_matrix("a", 3), np.diag([1.0, 1, -1]))
    with pytest.raises(ValueError):
        eta_matrix("d", 4)
    with pytest.raises(ValueError):
        eta_matrix("a", 2)


def test_structure_rejects_wrong_eta():
    s = LorentzianStructure.from_case(PETROV, "b")
    with pytest.raises(ValueError):
        LorentzianStructure(s.alg, "a", s.eta)


def test_inner_examples():
    b = LorentzianStructure.from_case(PETROV, "b")
    assert inner(b, [1, 0, 0, 0], [1, 0, 0, 0]) == -1
    c = LorentzianStructure.from_case(np.eye(3), "c")
    assert inner(c, [0, 0, 1, 0], [0, 0, 0, 1]) == 1
    assert inner(c, np.zeros(4), [1, 2, 3, 4]) == 0


def test_orthonormal_frames():
    b = orthonormal_frame(LorentzianStructure.from_case(PETROV, "b"))
    np.testing.assert_array_equal(b.signs, [-1, 1, 1, 1])
    struct = LorentzianStructure.from_case(np.eye(4), "c")
    f = orthonormal_frame(struct)
    G = f.basis.T @ struct.eta @ f.basis
    np.testing.assert_allclose(G, np.diag(f.signs), atol=1e-15)
    np.testing.assert_array_equal(f.signs[3:], [1, -1])
    assert inner(struct, f.basis[:, 3], f.basis[:, 3]) == pytest.approx(1.0)
    assert inner(struct, f.basis[:, 3], f.basis[:, 4]) == pytest.approx(0.0)


def test_json_round_trip():
    s = LorentzianStructure.from_case(PETROV, "b")
    back = structure_from_json(structure_to_json(s))
    np.testing.assert_array_equal(back.A, s.A)
    assert back.case == "b"
    with pytest.raises(ValueError):
        structure_from_json({"n": 4, "metric": "b"})
    with pytest.raises(ValueError):
        structure_from_json({"n": 4, "metric": "b", "A": [[1, 2], [3]]})


def test_coordinate_metric_at_origin_slice():
    for case in "abc":
        s = LorentzianStructure.from_case(np.arange(9.0).reshape(3, 3) / 9, case)
        x = np.array([0.3, -1.2, 2.0, 0.0])
        np.testing.assert_array_equal(coordinate_metric(s, x), s.eta)


def test_petrov_coordinate_metric_entries(rng):
    s = LorentzianStructure.from_case(PETROV, "b")
    a, b = -0.5, S3
    for xn in rng.uniform(-3, 3, 20):
        g = coordinate_metric(s, np.array([0, 0, 0, xn]))
        w = np.exp(-2 * a * xn)
        np.testing.assert_allclose(g[:2, :2], w * np.array(
            [[-np.cos(2 * b * xn), -np.sin(2 * b * xn)],
             [-np.sin(2 * b * xn), np.cos(2 * b * xn)]]), rtol=1e-13, atol=1e-13)
        assert g[2, 2] == pytest.approx(np.exp(-2 * xn), rel=1e-14)


def test_diagonal_coordinate_metric():
    lam = np.array([0.7, -0.4, 1.1])
    s = LorentzianStructure.from_case(np.diag(lam), "b")
    xn = 0.8
    g = coordinate_metric(s, np.array([0, 0, 0, xn]))
    np.testing.assert_allclose(np.diag(g)[1:3], np.exp(-2 * lam[1:] * xn), rtol=1e-14)


def test_exp_associated_matches_expm(rng):
    for _ in range(20):
        a, b = rng.uniform(-2, 2, 2)
        tail = rng.uniform(-2, 2, 2)
        A = np.zeros((4, 4))
        A[:2, :2] = [[a, -b], [b, a]]
        A[2:, 2:] = np.diag(tail)
        t = rng.uniform(-3, 3)
        np.testing.assert_allclose(exp_associated(A, t), expm(A * t), rtol=1e-12, atol=1e-12)
    G = rng.uniform(-1, 1, (3, 3))
    np.testing.assert_allclose(exp_associated(G, 0.7), expm(0.7 * G), rtol=1e-13)


def test_frame_coframe_duality_and_pullback(rng):
    for case in "abc":
        s = LorentzianStructure.from_case(rng.uniform(-1, 1, (4, 4)), case)
        for _ in range(10):
            x = rng.uniform(-3, 3, 5)
            F, W = left_invariant_frame(s, x)
            np.testing.assert_allclose(F @ W, np.eye(5), atol=1e-12)
            np.testing.assert_allclose(W.T @ s.eta @ W, coordinate_metric(s, x), atol=1e-12)
        F0, W0 = left_invariant_frame(s, np.zeros(5))
        np.testing.assert_array_equal(F0, np.eye(5))
        np.testing.assert_array_equal(W0, np.eye(5))


@given(st.sampled_from("abc"), arrays(float, (3, 3), elements=st.floats(-1.5, 1.5)),
       arrays(float, 4, elements=st.floats(-2, 2)))
def test_signature_and_left_invariance(case, A, x):
    s = LorentzianStructure.from_case(A, case)
    g = coordinate_metric(s, x)
    assert negative_index(g, tol=1e-14) == 1
    y = x.copy()
    y[:3] += np.array([1.0, -2.0, 0.5])
    np.testing.assert_array_equal(coordinate_metric(s, y), g)
