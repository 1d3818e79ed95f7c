import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from opnormlab import counterexample as ce
from opnormlab import tensornorm as tn
from opnormlab.linalg import ShapeError, random_matrix, spectral_norm, unit


def pair(seed, ls=(3, 3), rs=(2, 2)):
    rng = np.random.default_rng(seed)
    return random_matrix(*ls, rng), random_matrix(*rs, rng)


def test_min_norm_examples():
    E = unit(0, 0, 2, 2)
    assert tn.min_norm(tn.TensorElement([(E, E)])) == 1.0
    y3 = ce.build_yn(ce.shift_family(3))
    assert tn.min_norm(y3) == pytest.approx(np.sqrt(3), abs=1e-12)
    a, b = pair(0)
    assert abs(tn.min_norm(tn.TensorElement([(a, b)]))
               - spectral_norm(a) * spectral_norm(b)) <= 1e-10


def test_zero_element():
    z = tn.TensorElement.zero((2, 2), (3, 3))
    assert tn.min_norm(z) == 0.0
    assert tn.haagerup_upper(z) == 0.0
    assert tn.projective_upper(z) == 0.0


def test_element_validation():
    with pytest.raises(ValueError):
        tn.TensorElement([])
    with pytest.raises(ShapeError):
        tn.TensorElement([(np.eye(2), np.eye(2)), (np.eye(3), np.eye(2))])


def test_opposite():
    a, b = pair(1)
    u = tn.TensorElement([(a, b), pair(2)])
    back = tn.opposite(tn.opposite(u))
    assert all(np.array_equal(x, y) for p, q in zip(u.pairs, back.pairs) for x, y in zip(p, q))
    v = tn.opposite(tn.TensorElement([(a, b)]), "second")
    assert np.array_equal(v.pairs[0][1], b.T) and np.array_equal(v.pairs[0][0], a)
    w = tn.opposite(tn.TensorElement([(a, b)]), "first")
    assert np.array_equal(w.pairs[0][0], a.T)
    with pytest.raises(ValueError):
        tn.opposite(u, "both")


def test_opposite_pads_rectangular_leg():
    u = tn.TensorElement([pair(3, (2, 2), (3, 1))])
    assert tn.opposite(u).right_shape == (3, 3)


def test_opposite_changes_min_norm_of_xn():
    fam = ce.shift_family(4)
    x, y = ce.build_xn(fam), ce.build_yn(fam)
    assert tn.min_norm(tn.opposite(x, "second")) == pytest.approx(tn.min_norm(y), abs=1e-12)
    assert tn.min_norm(x) == pytest.approx(1.0, abs=1e-12)
    assert tn.min_norm(y) == pytest.approx(2.0, abs=1e-12)


def test_haagerup_examples():
    a, b = pair(4)
    single = tn.TensorElement([(a, b)])
    assert tn.haagerup_upper(single) == pytest.approx(spectral_norm(a) * spectral_norm(b),
                                                      rel=1e-12)
    for n in (1, 2, 5):
        for d in (1, 2):
            assert tn.haagerup_upper(ce.build_xn(ce.shift_family(n, d))) == 1.0


def test_rotated_representation_same_element():
    (a1, b1), (a2, b2) = pair(5), pair(6)
    u = tn.TensorElement([(a1, b1), (a2, b2)])
    r = 1 / np.sqrt(2)
    v = tn.TensorElement([(r * (a1 + a2), r * (b1 + b2)), (r * (a1 - a2), r * (b1 - b2))])
    assert tn.min_norm(u - v) <= 1e-12
    m = tn.min_norm(u)
    assert tn.haagerup_upper(u) >= m - 1e-12
    assert tn.haagerup_upper(v) >= m - 1e-12


def test_gauge_preserves_element():
    u = tn.random_element((2, 2), (2, 2), 3, 7)
    M = random_matrix(3, 3, np.random.default_rng(8))
    assert np.allclose(tn.gauge(u, M).matrix(), u.matrix(), atol=1e-12)


def test_haagerup_optimize_single_pair():
    a, b = pair(9)
    res = tn.haagerup_optimize(tn.TensorElement([(a, b)]))
    assert res.value == pytest.approx(spectral_norm(a) * spectral_norm(b), rel=1e-12)
    assert res.gauge.shape == (1, 1)


def test_haagerup_optimize_redundant_pair():
    a, b = pair(10, (2, 2), (2, 2))
    # unbalanced scaling makes the stored representation a poor upper bound
    u = tn.TensorElement([(10 * a, b / 10), (np.zeros((2, 2)), np.zeros((2, 2)))])
    res = tn.haagerup_optimize(u, restarts=2, iters=200, rng=0)
    assert abs(res.value - spectral_norm(a) * spectral_norm(b)) <= 1e-6


def test_haagerup_optimize_bracket_on_xn():
    x = ce.build_xn(ce.shift_family(2))
    res = tn.haagerup_optimize(x, restarts=2, iters=30, rng=0)
    assert tn.min_norm(x) - 1e-9 <= res.value <= 1.0 + 1e-12
    assert "jittered" in res.diagnostics


def test_projective_examples():
    a, b = pair(11)
    assert tn.projective_upper(tn.TensorElement([(a, b)])) == pytest.approx(
        spectral_norm(a) * spectral_norm(b), rel=1e-12)
    assert tn.projective_upper(ce.build_xn(ce.shift_family(5))) == pytest.approx(5.0, abs=1e-12)


def test_certificate_elementary():
    a, b = pair(12)
    c = tn.theorem1_certificate(tn.TensorElement([(a, b)]))
    assert c.lower == pytest.approx(c.upper, rel=1e-12)
    assert c.consistent


def test_certificate_gap_on_yn():
    fam = ce.shift_family(4)
    c = tn.theorem1_certificate(ce.build_yn(fam))
    assert c.lower == pytest.approx(2.0, abs=1e-12)
    assert c.lower > tn.haagerup_upper(ce.build_xn(fam))


def test_certificate_random_3_pair():
    u = tn.random_element((3, 3), (3, 3), 3, 13)
    assert tn.theorem1_certificate(u).consistent


@settings(max_examples=40, deadline=None)
@given(st.tuples(*[st.integers(1, 4)] * 4), st.integers(1, 5), st.integers(0, 2**31))
def test_norm_ordering(dims, k, seed):
    u = tn.random_element(dims[:2], dims[2:], k, seed)
    m = tn.min_norm(u)
    assert m <= tn.haagerup_upper(u) + 1e-9
    # with each pair balanced (||a_i|| = ||b_i||) the Haagerup formula is at
    # most the sum of cross norms
    balanced = []
    for a, b in u.pairs:
        t = np.sqrt(spectral_norm(b) / spectral_norm(a))
        balanced.append((t * a, b / t))
    balanced = tn.TensorElement(balanced)
    assert np.allclose(balanced.matrix(), u.matrix(), atol=1e-12)
    assert tn.haagerup_upper(balanced) <= tn.projective_upper(u) * (1 + 1e-12)
    assert tn.theorem1_certificate(u).consistent


def test_json_round_trip():
    u = tn.random_element((2, 3), (1, 2), 2, 14)
    v = tn.TensorElement.from_json(u.to_json())
    assert np.array_equal(u.matrix(), v.matrix())
    d = u.to_dict()
    d["left_shape"] = [3, 3]
    with pytest.raises(ShapeError):
        tn.TensorElement.from_dict(d)
