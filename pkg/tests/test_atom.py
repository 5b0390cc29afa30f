import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from rfspec.atom import (
    AtomParams,
    DegeneratePoles,
    PoleHit,
    build_generator,
    evaluate_time_propagator,
    expm_propagator,
    generator_eigenvalues,
    green_elements,
    green_elements_closed_form,
    laplace_matrix,
    laplace_propagator,
    q_poly,
    q_roots,
    steady_state,
    steady_state_printed_population,
    steady_state_population,
    time_propagator,
)

atoms = st.builds(
    AtomParams,
    v=st.floats(0.05, 60),
    delta_L=st.floats(-30, 30),
    gamma=st.floats(0.2, 3),
)


def test_params_validation():
    with pytest.raises(ValueError):
        AtomParams(v=1.0, gamma=0.0)
    with pytest.raises(ValueError):
        AtomParams(v=-1.0)
    with pytest.raises(ValueError):
        AtomParams(v=1.0, delta_L=np.inf)
    p = AtomParams(v=3.0, delta_L=4.0)
    assert p.omega == 5.0


def test_undriven_eigenvalues():
    ev = np.sort(np.linalg.eigvals(build_generator(AtomParams(v=0.0))).real)
    assert np.allclose(ev, [-2, -1, -1, 0], atol=1e-14)


def test_resonant_eigenvalues():
    ev = np.linalg.eigvals(build_generator(AtomParams(v=10.0)))
    w = np.sqrt(99.75)
    for ref in (0, -1, -1.5 + 1j * w, -1.5 - 1j * w):
        assert np.min(np.abs(ev - ref)) < 1e-12
    assert np.isclose(w, 9.987492177719089)


@given(atoms)
@settings(max_examples=40, deadline=None)
def test_trace_conservation(p):
    L = build_generator(p)
    assert np.allclose(L[0] + L[3], 0, atol=1e-13)


@given(atoms)
@settings(max_examples=40, deadline=None)
def test_nonzero_eigenvalues_stable(p):
    ev = np.linalg.eigvals(build_generator(p))
    ev = ev[np.argsort(np.abs(ev))][1:]
    assert np.all(ev.real < 0)


def test_propagation_keeps_physical_state():
    rng = np.random.default_rng(1)
    p = AtomParams(v=4.0, delta_L=-1.5)
    L = build_generator(p)
    from scipy.linalg import expm

    for _ in range(20):
        a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        rho = a @ a.conj().T
        rho /= np.trace(rho)
        for t in (0.1, 1.0, 7.0):
            r = expm(L * t) @ rho.ravel()
            assert abs(r[0] + r[3] - 1) < 1e-12
            assert -1e-10 <= r[3].real <= 1 + 1e-10


def test_steady_state_undriven():
    assert np.allclose(steady_state(AtomParams(v=0.0)), 0)


def test_steady_state_saturation():
    r = steady_state(AtomParams(v=1e4))
    assert abs(r[2].real - 0.5) < 1e-6


def test_steady_state_population_value():
    p = AtomParams(v=2.0)
    r = steady_state(p)
    assert r[2].real == pytest.approx(1 / 3, rel=1e-12)
    assert steady_state_population(p) == pytest.approx(1 / 3)
    # printed closed form lacks the factor 2 and does not saturate at 1/2
    assert steady_state_printed_population(p) == pytest.approx(0.5)
    assert steady_state_printed_population(AtomParams(v=1e4)) > 0.99


@given(atoms)
@settings(max_examples=40, deadline=None)
def test_steady_state_is_physical(p):
    r = steady_state(p)
    assert r[1] == pytest.approx(np.conj(r[0]), abs=1e-14)
    assert -1e-14 <= r[2].real <= 0.5 + 1e-14
    assert r[2].real == pytest.approx(steady_state_population(p), rel=1e-9, abs=1e-15)


def test_q_roots_resonant():
    r = q_roots(AtomParams(v=10.0))
    w = np.sqrt(99.75)
    assert np.allclose(r, [-1.5 - 1j * w, -1.5 + 1j * w, -1.0], rtol=1e-12)


def test_q_roots_undriven_double_root():
    r = q_roots(AtomParams(v=0.0))
    assert np.allclose(r, [-2, -1, -1], atol=1e-12)


def test_q_roots_residual():
    p = AtomParams(v=50.0, delta_L=80.0)
    r = q_roots(p)
    assert np.all(r.real < 0)
    assert np.max(np.abs(q_poly(r, p))) < 1e-8 * abs(q_poly(0.0, p))


@given(atoms)
@settings(max_examples=60, deadline=None)
def test_q_roots_sorted_and_conjugate_closed(p):
    r = q_roots(p)
    assert np.max(np.abs(q_poly(r, p))) < 1e-8 * max(abs(q_poly(0.0, p)), 1.0)
    assert np.allclose(np.sort_complex(r), np.sort_complex(np.conj(r)), atol=1e-9 * p.omega)
    assert np.all(np.diff(np.round(r.real, 6)) >= 0)


def test_plus_kind_middle_column_zero():
    P = laplace_propagator(1.3 - 0.4j, "+", AtomParams(v=3.0, delta_L=1.0))
    assert P.kind == "+" and P.at_point == 1.3 - 0.4j
    assert np.all(P.entries[:, 1] == 0)
    M = laplace_propagator(1.3 - 0.4j, "-", AtomParams(v=3.0, delta_L=1.0)).entries
    assert np.all(M[:, 0] == 0)


def test_green_element_undriven():
    e = green_elements(1.0 + 0j, AtomParams(v=0.0))
    assert e["21", "21"] == pytest.approx(0.5, abs=1e-15)


def test_closed_forms_match_resolvent():
    rng = np.random.default_rng(7)
    for _ in range(100):
        p = AtomParams(v=rng.uniform(0.1, 40), delta_L=rng.uniform(-20, 20), gamma=rng.uniform(0.3, 2))
        z = complex(rng.uniform(0.05, 5), rng.uniform(-40, 40))
        a, b = green_elements(z, p), green_elements_closed_form(z, p)
        for k in a:
            assert abs(a[k] - b[k]) <= 1e-10 * max(abs(a[k]), 1e-12), k


def test_starred_elements_conjugation():
    p = AtomParams(v=5.0, delta_L=2.5)
    for z in (0.7 + 3j, 2.0 - 1.0j, 4.0 + 0.2j):
        e = green_elements(z, p)
        ec = green_elements(np.conj(z), p)
        for a, b in ((("11", "12"), ("11", "21")), (("21", "21"), ("12", "12")), (("21", "22"), ("12", "22"))):
            assert e[a] == pytest.approx(np.conj(ec[b]), rel=1e-12)


def test_pole_hit():
    p = AtomParams(v=10.0)
    with pytest.raises(PoleHit):
        laplace_matrix(q_roots(p)[2], "+", p)
    with pytest.raises(PoleHit):
        laplace_matrix(0.0, "-", p)


def test_resolvent_is_laplace_transform():
    p = AtomParams(v=3.0, delta_L=1.0)
    z = 0.8 - 2.0j
    D = laplace_matrix(z, "-", p)
    for i, j in ((0, 1), (1, 1), (2, 2), (2, 1)):
        f = lambda t: np.exp(-z * t) * expm_propagator(t, "-", p)[i, j]  # noqa: E731
        val, _ = integrate.quad(f, 0, 40, complex_func=True, limit=400)
        assert abs(val - D[i, j]) < 1e-6


def test_time_propagator_initial_condition():
    p = AtomParams(v=6.0, delta_L=1.0)
    for kind in "+-":
        M = evaluate_time_propagator(time_propagator(kind, p), 0.0)
        assert np.allclose(M, expm_propagator(0.0, kind, p), atol=1e-12)


def test_time_propagator_undriven_single_term():
    tp = time_propagator("+", AtomParams(v=0.0))
    # rho sigma_+ moves rho22 into the rho21 slot, which then decays alone
    el = tp[1][2]
    assert len(el) == 1
    (a, rate), = el.terms
    assert a == pytest.approx(1) and rate == pytest.approx(-1)


def test_time_propagator_matches_expm():
    rng = np.random.default_rng(3)
    for _ in range(10):
        p = AtomParams(v=rng.uniform(0.5, 30), delta_L=rng.uniform(-10, 10))
        for kind in "+-":
            tp = time_propagator(kind, p)
            for t in (0.1, 1.0, 5.0, 20.0):
                A = evaluate_time_propagator(tp, t)
                B = expm_propagator(t, kind, p)
                assert np.max(np.abs(A - B)) <= 1e-8 * max(np.max(np.abs(B)), 1e-3)
            for row in tp:
                for el in row:
                    assert np.all(el.rates.real <= 1e-12)


def test_jordan_block_raises():
    # v = gamma/2 at resonance: the complex pair merges into a defective double root
    p = AtomParams(v=0.5)
    assert np.allclose(generator_eigenvalues(p)[1:3], -1.5, atol=1e-6)
    with pytest.raises(DegeneratePoles):
        time_propagator("+", p)
