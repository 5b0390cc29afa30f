import numpy as np
import pytest
from scipy.linalg import expm

from rfspec.atom import AtomParams, build_generator, steady_state
from rfspec.delay import DelayRequest, g22_tau
from rfspec.errors import ToleranceNotMet
from rfspec.quadrature import (
    TimeDiagram,
    _g22_windows,
    brute_force_g22_tau,
    brute_force_gnm,
    consistent_orderings,
    multitime_correlation,
)
from rfspec.spectral import SlotSequence, g11_zero, g22_zero


def test_diagram_rules():
    d = TimeDiagram(("+", "-", "-", "+"))
    assert d.kinds == ("+", "-", "-")
    assert d.selector == "+"
    assert TimeDiagram(list(d.tags)) == d
    with pytest.raises(ValueError):
        TimeDiagram(("+", "x"))


def test_equal_times_give_population():
    p = AtomParams(v=3.0, delta_L=1.0)
    r = steady_state(p)
    val = multitime_correlation(TimeDiagram(("+", "-")), [2.0, 2.0], p, r)
    assert val == pytest.approx(r[2], abs=1e-15)


def test_first_order_correlation_matches_regression():
    # <sigma_+(t) sigma_-(t + tau)> by direct propagation of sigma_- rho ... in matrix form
    p = AtomParams(v=4.0, delta_L=-0.7)
    r = steady_state(p)
    rho = np.array([[1 - r[2], r[0]], [r[1], r[2]]])
    sp = np.array([[0, 0], [1, 0]])
    sm = sp.T
    L = build_generator(p)
    for tau in (0.0, 0.4, 2.5):
        x = expm(L * tau) @ (rho @ sp).ravel()
        ref = np.trace(sm @ x.reshape(2, 2))
        val = multitime_correlation(TimeDiagram(("+", "-")), [0.0, tau], p, r)
        assert val == pytest.approx(ref, abs=1e-10)


def test_times_must_be_ordered():
    p = AtomParams(v=1.0)
    with pytest.raises(ValueError):
        multitime_correlation(TimeDiagram(("+", "-")), [1.0, 0.5], p, steady_state(p))


def test_ordering_counts():
    T, tau = 10.0, 1.0
    assert len(consistent_orderings(_g22_windows(T, tau, "full"))) == 24
    assert len(consistent_orderings(_g22_windows(T, tau, "i1"))) == 24
    assert len(consistent_orderings(_g22_windows(T, tau, "i2"))) == 6
    assert len(consistent_orderings(_g22_windows(T, tau, "i3"))) == 6
    assert len(consistent_orderings(_g22_windows(T, tau, "i4"))) == 4


def test_gnm_first_order():
    p = AtomParams(v=10.0, delta_L=2.0)
    seq = SlotSequence.intensity([(1.0, 0.5)])
    val, err = brute_force_gnm(seq, p, return_error=True)
    assert abs(val.imag) < 1e-12
    assert val.real == pytest.approx(g11_zero(1.0, 0.5, p), rel=1e-4)
    assert err < 1e-6 * abs(val)


def test_gnm_second_order():
    p = AtomParams(v=10.0, delta_L=2.0)
    seq = SlotSequence.intensity([(1.0, 3.0), (1.0, -7.0)])
    assert brute_force_gnm(seq, p).real == pytest.approx(g22_zero(1.0, 3.0, -7.0, p), rel=1e-4)


def test_g22_tau_zero_is_gnm():
    p = AtomParams(v=5.0)
    r = DelayRequest(1.0, 2.0, -1.0, 0.0, p)
    seq = SlotSequence.intensity([(1.0, 2.0), (1.0, -1.0)])
    assert brute_force_g22_tau(r) == pytest.approx(brute_force_gnm(seq, p).real, rel=1e-8)


def test_domain_decomposition_sums_to_whole():
    p = AtomParams(v=5.0, delta_L=1.0)
    r = DelayRequest(1.2, 4.0, -2.0, 0.7, p)
    whole = brute_force_g22_tau(r)
    parts = sum(brute_force_g22_tau(r, domain=d) for d in ("i1", "i2", "i3", "i4"))
    assert parts.real == pytest.approx(whole, rel=1e-6)
    assert whole == pytest.approx(g22_tau(r), rel=1e-6)


def test_horizon_doubling():
    p = AtomParams(v=5.0)
    seq = SlotSequence.intensity([(1.0, 5.0)])
    brute_force_gnm(seq, p, check_horizon=True)
    with pytest.raises(ToleranceNotMet):
        # far too short to forget the initial ground state
        brute_force_gnm(seq, p, horizon=2.0, check_horizon=True)


def test_tolerance_beyond_capability():
    p = AtomParams(v=5.0)
    seq = SlotSequence.intensity([(1.0, 0.0)])
    with pytest.raises(ToleranceNotMet) as info:
        brute_force_gnm(seq, p, tol=1e-14)
    assert info.value.requested == 1e-14


def test_convergence_under_tighter_tolerance():
    p = AtomParams(v=6.0, delta_L=1.0)
    seq = SlotSequence.intensity([(1.0, 6.0), (1.0, -6.0)])
    a, err = brute_force_gnm(seq, p, tol=1e-5, return_error=True)
    b = brute_force_gnm(seq, p, tol=5e-6)
    assert abs(a - b) <= max(err, 1e-12 * abs(a))


def test_order_limit():
    p = AtomParams(v=1.0)
    with pytest.raises(ValueError):
        brute_force_gnm(SlotSequence.intensity([(1.0, 0.0)] * 3), p)


def test_bad_domain():
    with pytest.raises(ValueError):
        brute_force_g22_tau(DelayRequest(1.0, 0, 0, 0.1, AtomParams(v=1.0)), domain="i5")
