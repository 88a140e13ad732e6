import numpy as np
import pytest

from opalg import gns, states
from opalg.errors import EmptyList
from opalg.matkernel import operator_norm
from opalg.states import State

from conftest import block_algebra, diagonal_algebra, full_matrix_algebra, random_unitary


def test_character_gives_one_dimensional_rep():
    d2 = diagonal_algebra(2)
    rep = gns.gns(d2, State(d2, np.diag([1.0, 0.0])))
    assert rep.hilbert_dim == 1 and rep.null_dim == 1
    assert rep.represent(np.diag([5.0, 7.0]))[0, 0] == pytest.approx(5)


def test_trace_gives_left_regular_rep(rng):
    m2 = full_matrix_algebra(2)
    rep = gns.gns(m2, State(m2, np.eye(2) / 2))
    assert rep.hilbert_dim == 4
    for _ in range(10):
        x = m2.random_element(rng)
        assert abs(operator_norm(rep.represent(x)) - operator_norm(x)) < 1e-8
    # L_x on Hilbert-Schmidt space is x (x) 1: same spectrum, doubled multiplicity
    x = m2.random_element(rng, hermitian=True)
    w = np.linalg.eigvalsh(rep.represent(x))
    assert np.allclose(w, np.sort(np.repeat(np.linalg.eigvalsh(x), 2)), atol=1e-10)


def test_vector_state_gives_identity_rep(rng):
    m2 = full_matrix_algebra(2)
    rep = gns.gns(m2, State.vector(m2, [1, 0]))
    assert rep.hilbert_dim == 2
    # unitarily equivalent to the identity representation: equal traces on the algebra
    for b in m2.basis:
        assert abs(np.trace(rep.represent(b)) - np.trace(b)) < 1e-10


def test_cyclic_vector_and_homomorphism(rng):
    a = block_algebra([1, 2], rng)
    phi = states.faithful_state(a, states.tracial_state_set(a))[0]
    rep = gns.gns(a, phi)
    for _ in range(10):
        x, y = a.random_element(rng), a.random_element(rng)
        assert abs(np.vdot(rep.xi, rep.represent(x) @ rep.xi) - phi(x)) < 1e-9
        assert operator_norm(rep.represent(x @ y) - rep.represent(x) @ rep.represent(y)) < 1e-9 * operator_norm(x) * operator_norm(y)
        assert operator_norm(rep.represent(x.conj().T) - rep.represent(x).conj().T) < 1e-9 * operator_norm(x)
    for b in a.basis:
        assert abs(operator_norm(rep.represent(b)) - operator_norm(b)) < 1e-6


def test_unitary_invariance(rng):
    m2 = full_matrix_algebra(2)
    phi = State(m2, np.diag([0.7, 0.3]))
    u = random_unitary(2, rng)
    phi_u = State(m2, u @ phi.rho @ u.conj().T)  # phi o Ad(u*)
    r1, r2 = gns.gns(m2, phi), gns.gns(m2, phi_u)
    for _ in range(5):
        x = m2.random_element(rng)
        s1 = np.linalg.svd(r1.represent(x), compute_uv=False)
        s2 = np.linalg.svd(r2.represent(u @ x @ u.conj().T), compute_uv=False)
        assert np.allclose(s1, s2, atol=1e-9)


def test_direct_sums(rng):
    d3 = diagonal_algebra(3)
    rep = gns.direct_sum_rep(d3, states.pure_states(d3))
    assert rep.hilbert_dim == 3
    for _ in range(5):
        x = d3.random_element(rng)
        assert abs(operator_norm(rep.represent(x)) - operator_norm(x)) < 1e-10
    m2 = full_matrix_algebra(2)
    single = gns.direct_sum_rep(m2, [State(m2, np.eye(2) / 2)])
    x = m2.random_element(rng)
    assert abs(operator_norm(single.represent(x)) - operator_norm(x)) < 1e-10
    with pytest.raises(EmptyList):
        gns.direct_sum_rep(m2, [])


def test_representability_certificate(rng):
    d2 = diagonal_algebra(2)
    tests = [d2.random_element(rng) for _ in range(5)]
    assert gns.representability_certificate(d2, states.pure_states(d2), tests).passed
    x = np.diag([0.0, 2.0])
    rep = gns.representability_certificate(d2, [State(d2, np.diag([1.0, 0.0]))], [x])
    assert not rep.passed and rep.rows[0].deficit == pytest.approx(4)
    assert gns.representability_certificate(d2, states.pure_states(d2), []).passed
