import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from opnormlab import counterexample as ce
from opnormlab import superop as so
from opnormlab import tensornorm as tn
from opnormlab.linalg import (
    ShapeError, kron, random_matrix, random_unitary, schatten_norm, spectral_norm, unit, unvec,
    vec,
)


def rng(seed):
    return np.random.default_rng(seed)


def test_apply_identity_pair():
    c = random_matrix(3, 3, rng(0))
    assert np.array_equal(so.identity_map(3)(c), c)


def test_apply_matches_vec_identity():
    r = rng(1)
    a, b, c = random_matrix(2, 3, r), random_matrix(4, 2, r), random_matrix(3, 4, r)
    phi = so.Superoperator([(a, b)])
    ref = unvec(kron(a, b.T) @ vec(c), 2, 2)
    assert np.linalg.norm(phi(c) - ref) <= 1e-12


def test_apply_linear_in_pairs():
    r = rng(2)
    p1 = (random_matrix(2, 2, r), random_matrix(2, 2, r))
    p2 = (random_matrix(2, 2, r), random_matrix(2, 2, r))
    c = random_matrix(2, 2, r)
    both = so.Superoperator([p1, p2])(c)
    assert np.allclose(both, so.Superoperator([p1])(c) + so.Superoperator([p2])(c), atol=1e-14)


def test_apply_shape_error():
    with pytest.raises(ShapeError):
        so.identity_map(2)(np.eye(3))
    with pytest.raises(ShapeError):
        so.Superoperator([(np.eye(2), np.eye(2)), (np.eye(3), np.eye(2))])


def test_matrix_rep():
    assert np.array_equal(so.matrix_rep(so.identity_map(3)), np.eye(9))
    r = rng(3)
    a, b = random_matrix(2, 3, r), random_matrix(3, 2, r)
    assert np.array_equal(so.matrix_rep(so.Superoperator([(a, b)])), kron(a, b.T))


def test_s2_examples():
    r = rng(4)
    a, b = random_matrix(3, 3, r), random_matrix(2, 2, r)
    assert so.s2_norm(so.Superoperator([(a, b)])) == pytest.approx(
        spectral_norm(a) * spectral_norm(b), rel=1e-12)
    y3 = so.hs_map(ce.build_yn(ce.shift_family(3)))
    assert so.s2_norm(y3) == pytest.approx(np.sqrt(3), abs=1e-12)
    zero = so.Superoperator([(np.zeros((2, 2)), np.zeros((2, 2)))])
    assert so.s2_norm(zero) == 0.0


def test_s2_against_power_iteration():
    phi = so.random_superoperator((3, 2), 3, 5)
    assert so.s2_norm(phi) == pytest.approx(so.s2_norm_power(phi), rel=1e-9)


def test_seesaw_single_pair():
    r = rng(6)
    a, b = random_matrix(3, 3, r), random_matrix(3, 3, r)
    phi = so.Superoperator([(a, b)])
    ref = spectral_norm(a) * spectral_norm(b)
    assert abs(so.schatten_induced_lower(phi, 1, restarts=8) - ref) <= 1e-6
    assert abs(so.schatten_induced_lower(phi, np.inf, restarts=8) - ref) <= 1e-6


@pytest.mark.parametrize("p", [1, np.inf])
def test_seesaw_identity(p):
    assert so.schatten_induced_lower(so.identity_map(3), p, restarts=4) == pytest.approx(1.0)


def test_seesaw_witness_is_feasible():
    phi = so.random_superoperator((3, 3), 2, 7)
    res = so.seesaw(phi, 1, restarts=8)
    assert schatten_norm(res.witness, 1) == pytest.approx(1.0, rel=1e-12)
    assert schatten_norm(phi(res.witness), 1) == pytest.approx(res.value, rel=1e-12)
    res = so.seesaw(phi, np.inf, restarts=8)
    assert spectral_norm(res.witness) == pytest.approx(1.0, rel=1e-12)


def test_seesaw_rejects_other_p():
    with pytest.raises(ValueError):
        so.seesaw(so.identity_map(2), 2)


@pytest.mark.parametrize("seed", range(4))
def test_duality_inf_vs_adjoint(seed):
    phi = so.random_superoperator((2, 2), 2, seed)
    a = so.schatten_induced_lower(phi, np.inf, restarts=32, rng=seed)
    b = so.schatten_induced_lower(phi.adjoint(), 1, restarts=32, rng=seed)
    assert abs(a - b) <= 1e-6


def test_seesaw_deterministic():
    phi = so.random_superoperator((3, 3), 3, 8)
    r1, r2 = so.seesaw(phi, 1, rng=11), so.seesaw(phi, 1, rng=11)
    assert r1.value == r2.value and r1.restart == r2.restart
    assert np.array_equal(r1.witness, r2.witness)


def test_adjoint_trace_pairing():
    r = rng(9)
    phi = so.random_superoperator((2, 3), 2, r)
    c, d = random_matrix(2, 3, r), random_matrix(*phi.out_shape, r)
    lhs = np.trace(d.conj().T @ phi(c))
    rhs = np.trace(phi.adjoint()(d).conj().T @ c)
    assert lhs == pytest.approx(rhs, abs=1e-12)


def test_conjugated_by_transpose():
    r = rng(10)
    phi = so.random_superoperator((2, 2), 2, r)
    c = random_matrix(2, 2, r)
    assert np.allclose(phi.conjugated_by_transpose()(c), phi(c.T).T, atol=1e-14)


def test_interpolation_single_pair():
    r = rng(11)
    a, b = random_matrix(2, 2, r), random_matrix(3, 3, r)
    rep = so.interpolation_check(so.Superoperator([(a, b)]), restarts=8)
    ref = spectral_norm(a) * spectral_norm(b)
    for v in (rep.s2, rep.lower1, rep.lowerInf):
        assert abs(v - ref) <= 1e-6
    assert rep.rt_bound_holds and rep.verdict == "holds"


def test_interpolation_unitary_pair():
    u = random_unitary(3, 12)
    phi = so.Superoperator([(np.eye(3), np.eye(3)), (u, u.conj().T)])
    rep = so.interpolation_check(phi, restarts=32)
    assert rep.s2 <= 2 + 1e-12
    assert rep.lower1 >= rep.s2 - 1e-6 and rep.lowerInf >= rep.s2 - 1e-6
    assert rep.rt_bound_holds


def test_interpolation_inconclusive_below_cap():
    # an impossible tolerance forces the lower-bound check to fail
    phi = so.random_superoperator((3, 3), 3, 13)
    rep = so.interpolation_check(phi, restarts=1, tol=-1e6)
    assert rep.verdict == "inconclusive" and rep.upper1 is None


def test_interpolation_upper_bracket_at_cap():
    phi = so.random_superoperator((2, 2), 2, 14)
    rep = so.interpolation_check(phi, restarts=so.RESTART_CAP, tol=-1e6)
    # the forced tolerance makes the lower bounds fail; the diamond bracket
    # must still satisfy the inequality with a matching tolerance
    assert rep.upper1 is not None and rep.upper1 >= rep.lower1 - 1e-6
    assert rep.upperInf >= rep.lowerInf - 1e-6
    assert rep.verdict == "failed"


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 3), st.integers(1, 3), st.integers(1, 4), st.integers(0, 2**31))
def test_hs_map_is_isometric_for_min_norm(n, m, k, seed):
    u = tn.random_element((n, n), (m, m), k, seed)
    assert so.s2_norm(so.hs_map(u)) == pytest.approx(tn.min_norm(u), rel=1e-10)


def test_technical_bound_on_xn():
    # the map of x_n is the HS map of y_n
    for n in (2, 3, 4):
        fam = ce.shift_family(n)
        x = ce.build_xn(fam)
        assert np.array_equal(so.matrix_rep(so.Superoperator.from_element(x)),
                              so.matrix_rep(so.hs_map(ce.build_yn(fam))))
        s2, proj = so.technical_bound(x)
        assert s2 == pytest.approx(np.sqrt(n), abs=1e-12)
        assert proj == pytest.approx(n, abs=1e-12)
        assert s2 <= proj


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 3), st.integers(1, 3), st.integers(1, 4), st.integers(0, 2**31))
def test_technical_bound_random(n, m, k, seed):
    u = tn.random_element((n, n), (m, m), k, seed)
    s2, proj = so.technical_bound(u)
    assert s2 <= proj + 1e-12


def test_choi_identity_and_transpose():
    d = 3
    w = np.eye(d).reshape(-1, 1)
    assert np.array_equal(so.choi(so.identity_map(d)), w @ w.T)
    swap = sum(kron(unit(i, j, d, d), unit(j, i, d, d)) for i in range(d) for j in range(d))
    assert np.array_equal(so.choi(so.transpose_map(d)), swap)


def test_choi_round_trip():
    r = rng(15)
    phi = so.random_superoperator((2, 3), 2, r)
    psi = so.kraus_from_choi(so.choi(phi), phi.in_shape, phi.out_shape)
    for _ in range(20):
        c = random_matrix(2, 3, r)
        assert np.linalg.norm(phi(c) - psi(c)) <= 1e-10
    assert len(psi.pairs) <= 6


def test_diamond_identity_and_transpose():
    assert so.diamond_norm(so.identity_map(2)) == pytest.approx(1.0, abs=1e-6)
    assert so.diamond_norm(so.transpose_map(2)) == pytest.approx(2.0, abs=1e-5)


def test_diamond_dominates_lower_bounds():
    phi = so.random_superoperator((2, 2), 2, 16)
    dia = so.diamond_norm(phi)
    assert so.diamond_lower(phi, restarts=8, iters=300).value <= dia + 1e-6
    assert so.schatten_induced_lower(phi, 1, restarts=16) <= dia + 1e-6


def test_cb_operator_norm_of_conjugation():
    u = random_unitary(3, 17)
    assert so.cb_operator_norm(so.conjugation_map(u)) == pytest.approx(1.0, abs=1e-6)


def test_cb_invariance_examples():
    assert so.cb_invariance_check(so.identity_map(2))
    phi = so.random_superoperator((2, 2), 2, 18)
    assert so.cb_invariance_check(phi)
    t = so.transpose_map(2)
    c = random_matrix(2, 2, rng(19))
    assert np.array_equal(t.conjugated_by_transpose()(c), t(c))


def test_amplify():
    phi = so.random_superoperator((2, 2), 2, 20)
    amp = phi.amplify(3)
    r = rng(21)
    a, b = random_matrix(2, 2, r), random_matrix(3, 3, r)
    assert np.allclose(amp(kron(a, b)), kron(phi(a), b), atol=1e-13)


def test_compose():
    r = rng(22)
    phi = so.random_superoperator((2, 2), 2, r)
    psi = so.random_superoperator((2, 2), 2, r)
    c = random_matrix(2, 2, r)
    assert np.allclose(phi.compose(psi)(c), phi(psi(c)), atol=1e-13)
