import numpy as np
import pytest

from aalg.classify import (classify_ricci_flat, decomposability, enumerate_sym_group, gamma1,
                           gamma2, group_closed, is_lorentz, is_special_palindrome,
                           isotropy_structure, normal_form_block, normal_form_template)
from aalg.curvature import is_flat, is_locally_symmetric, is_ricci_flat
from aalg.metric import LorentzianStructure
from aalg.petrov import DomainError, build, metric_at

S3 = np.sqrt(3) / 2


def test_normal_form_examples():
    A = normal_form_template("rotation_i", {"alpha": -0.5, "beta": S3}, 4, tail=[1.0])
    np.testing.assert_allclose(A, build([1]).structure().A)
    np.testing.assert_array_equal(normal_form_template("jordan_ii", {"gamma": 0}, 3),
                                  [[-1, -1], [1, 1]])
    np.testing.assert_array_equal(normal_form_template("nilpotent_iii", {"delta": 0}, 4),
                                  [[0, 0, -1], [0, 0, 1], [1, 1, 0]])
    np.testing.assert_array_equal(normal_form_template("diagonal", None, 4, tail=[1, 2, 3]),
                                  np.diag([1.0, 2, 3]))


def test_normal_form_errors():
    with pytest.raises(ValueError):
        normal_form_block("rotation_i", alpha=0, beta=0)
    with pytest.raises(ValueError):
        normal_form_block("mystery")
    with pytest.raises(ValueError):
        normal_form_template("nilpotent_iii", {}, 3)


def test_classify_examples():
    c = classify_ricci_flat(build([1]).structure())
    assert c.tag == "PetrovFamily"
    assert c.params["alpha"] == -0.5 and c.params["beta"] == pytest.approx(S3)
    assert c.params["lambda"] == [1.0]
    skew = np.array([[0, 2.0, 1], [-2, 0, 0], [-1, 0, 0]])
    assert classify_ricci_flat(LorentzianStructure.from_case(skew, "a")).tag == "Flat"
    A = normal_form_template("nilpotent_iii", {"delta": 2}, 5)
    c = classify_ricci_flat(LorentzianStructure.from_case(A, "b"))
    assert c.tag == "PlaneWaveB" and c.params["delta"] == 2
    assert classify_ricci_flat(
        LorentzianStructure.from_case(np.diag([1.0, -1, 0]), "b")).tag == "NotRicciFlat"


def test_classify_normalises_petrov_signs():
    A = build([2, 1]).structure().A.copy()
    # flip beta and (alpha, lambda) as the isometric changes of basis would
    B = A.copy()
    B[0, 1], B[1, 0] = -A[0, 1], -A[1, 0]
    c = classify_ricci_flat(LorentzianStructure.from_case(B, "b"))
    assert c.tag == "PetrovFamily" and c.params["beta"] > 0
    c = classify_ricci_flat(LorentzianStructure.from_case(-A, "b"))
    assert c.params["alpha"] <= 0 and c.params["lambda"] == [2.0, 1.0]


def test_classify_plane_wave_c():
    A = np.zeros((4, 4))
    A[0, 0] = 2.0
    A[0, 1], A[1, 0] = 0.6, -0.6
    A[3, 3] = 2.0
    A[3, :3] = [0.5, 0.1, 0.0]
    c = classify_ricci_flat(LorentzianStructure.from_case(A, "c"))
    assert c.tag == "PlaneWaveC" and c.params["d"] == 2.0


def test_unrecognised_presentation():
    # rotating the lambda block by an eta-orthogonal map gives an isometric,
    # still Ricci-flat, but non-canonical matrix
    A = build([2, 1]).structure().A.copy()
    c, s_ = np.cos(0.4), np.sin(0.4)
    Q = np.array([[c, -s_], [s_, c]])
    A[2:, 2:] = Q @ A[2:, 2:] @ Q.T
    s = LorentzianStructure.from_case(A, "b")
    assert is_ricci_flat(s).ricci_flat and not is_flat(s)
    assert classify_ricci_flat(s).tag == "UnrecognizedPresentation"


def test_decomposability():
    assert decomposability([1, 0]) == ([1.0], 1)
    assert decomposability([3, 2, 1]) == ([3.0, 2.0, 1.0], 0)
    assert decomposability([0]) == ([], 1)


def test_decomposable_metric_splits(rng):
    big, small = build([1, 0]), build([1])
    for x in rng.uniform(-2, 2, (50, 5)):
        g = metric_at(big, x)
        np.testing.assert_allclose(g[np.ix_([0, 1, 2, 4], [0, 1, 2, 4])],
                                   metric_at(small, x[[0, 1, 2, 4]]), atol=1e-12, rtol=0)
        assert g[3, 3] == 1.0
        assert not g[3, [0, 1, 2, 4]].any()


def test_palindromes():
    assert is_special_palindrome([1, -1])
    assert is_special_palindrome([2, 0, -2])
    assert is_special_palindrome([2, 1, -1, -2])
    assert not is_special_palindrome([3, 2, 1])
    assert not is_special_palindrome([1])
    assert not is_special_palindrome([1, 0.5, -1])
    assert not is_special_palindrome([1, -1 + 1e-13])
    assert is_special_palindrome([1, -1 + 1e-13], tol=1e-12)


def test_candidate_sets():
    assert len(list(gamma1(4))) == 8
    assert list(gamma2(4)) == []
    g2 = list(gamma2(6))
    assert len(g2) == 32
    assert all(is_lorentz(M) for M in g2)
    assert all(is_lorentz(M) for M in gamma1(6))


@pytest.mark.parametrize("lam,order,abelian,label,with_g2", [
    ([1], 4, True, "Z2^2", False),
    ([3, 2, 1], 16, True, "Z2^4", False),
    ([1, -1], 16, False, "Z2 x D4", True),
    ([2, 0, -2], 32, False, None, True),
    ([2, 1, -1, -2], 64, False, "Z2^3 x| D4", True),
])
def test_isotropy(lam, order, abelian, label, with_g2):
    sol = build(lam)
    n = sol.n
    elems = enumerate_sym_group(sol)
    assert any(e.family == "gamma2" for e in elems) == with_g2
    iso = isotropy_structure(elems)
    assert iso.order == order and iso.abelian == abelian
    assert iso.order == 2 ** (n - 1 if is_special_palindrome(lam) else n - 2)
    if label is not None:
        assert iso.label == label
    for e in elems:
        assert is_lorentz(e.matrix)
        tn = e.matrix[n - 1, n - 1]
        assert e.is_automorphism == (tn == 1 if e.family == "gamma1" else tn == -1)
    assert group_closed([e.matrix for e in elems if e.is_automorphism])


def test_sym_group_preconditions():
    with pytest.raises(DomainError):
        enumerate_sym_group(build([1, 1]))
    with pytest.raises(DomainError):
        enumerate_sym_group(build([0, 0], allow_minkowski=True))


def test_isotropy_needs_automorphisms():
    with pytest.raises(ValueError):
        isotropy_structure([])


def test_local_symmetry_implies_flat_on_normal_forms(rng):
    structs = []
    for lam in ([1], [2, 1], [1, -1], [1, 0, -1], [0.5, 0.2]):
        structs.append(build(lam).structure())
    for n in (3, 4, 5, 6):
        structs.append(normal_form_template("jordan_ii", {"gamma": 0}, n))
    for n in (4, 5, 6):
        for delta in (0.0, 0.5, -1.3):
            structs.append(normal_form_template("nilpotent_iii", {"delta": delta}, n))
    for item in structs:
        s = item if isinstance(item, LorentzianStructure) else LorentzianStructure.from_case(item, "b")
        assert is_ricci_flat(s).ricci_flat
        if is_locally_symmetric(s):
            assert is_flat(s)
