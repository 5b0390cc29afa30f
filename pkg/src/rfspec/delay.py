"""Time-delayed second-order intensity correlation of two filtered channels.

Channel 1 (detuning ``delta1``) is detected at time t and channel 2
(``delta2``) at t + tau.  The fourfold convolution splits into four domains
according to whether the channel-2 integration times fall before or after t:

* I1: both before t, a damped copy of the zero-delay function;
* I2 / I3: the sigma_+ / sigma_- time of channel 2 falls in (t, t + tau];
* I4: both channel-2 times fall in (t, t + tau].

With the time-domain propagators written as sums of exponentials the
remaining integrals are divided differences of ``exp``, which stay finite
when exponents coincide.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from math import factorial

import numpy as np
from scipy import integrate, linalg

from .atom import (
    EMBED,
    RESTRICT,
    SELECT,
    AtomParams,
    _generator,
    laplace_matrix,
    propagator_modes,
    steady_state,
)
from .errors import DegenerateExponent, DegeneratePoles, FallbackFailed, ImaginaryResidual, ZeroIntensity
from .spectral import G22_SIGNS, g11_zero, g22_zero

# divided differences switch to the series form below this spread
CONFLUENCE_TOL = 1e-2


@dataclass(frozen=True)
class DelayRequest:
    gamma_f: float
    delta1: float
    delta2: float
    tau: float
    params: AtomParams

    def __post_init__(self):
        if not self.gamma_f > 0:
            raise ValueError("filter bandwidth must be positive")
        if np.any(np.asarray(self.tau) < 0):
            raise ValueError("tau must be >= 0; use DelayRequest.signed for negative delays")

    @classmethod
    def signed(cls, gamma_f, delta1, delta2, tau, params):
        """Request for any sign of tau; tau < 0 is served by swapping the channels."""
        if tau < 0:
            return cls(gamma_f, delta2, delta1, -tau, params)
        return cls(gamma_f, delta1, delta2, tau, params)


# -- divided differences of exp --------------------------------------------


def _exprel(h):
    h = np.asarray(h, dtype=complex)
    small = np.abs(h) < 1e-5
    safe = np.where(small, 1.0, h)
    series = 1 + h / 2 + h * h / 6 + h**3 / 24
    return np.where(small, series, np.expm1(safe) / safe)


def dd1(a, b):
    """exp[a, b] = (e^a - e^b) / (a - b), finite at a = b."""
    a, b = np.broadcast_arrays(np.asarray(a, complex), np.asarray(b, complex))
    hi = np.where(a.real >= b.real, a, b)
    lo = np.where(a.real >= b.real, b, a)
    return np.exp(hi) * _exprel(lo - hi)


def _dd2_explicit(a, b, c):
    a, b, c = np.broadcast_arrays(*(np.asarray(x, complex) for x in (a, b, c)))
    # put the most separated pair in the denominator
    dab, dbc, dac = np.abs(a - b), np.abs(b - c), np.abs(a - c)
    if np.any(np.maximum(np.maximum(dab, dbc), dac) < CONFLUENCE_TOL):
        raise DegenerateExponent("three exponents within confluence tolerance")
    use_ab = (dab >= dbc) & (dab >= dac)
    use_bc = ~use_ab & (dbc >= dac)
    x = np.where(use_ab, a, np.where(use_bc, b, a))
    y = np.where(use_ab, c, np.where(use_bc, a, b))
    z = np.where(use_ab, b, np.where(use_bc, c, c))
    # exp[x, y, z] = (exp[x, y] - exp[y, z]) / (x - z)
    return (dd1(x, y) - dd1(y, z)) / (x - z)


def _dd2_series(a, b, c, order=8):
    m = (a + b + c) / 3
    x, y, z = a - m, b - m, c - m
    total = np.zeros_like(m)
    for k in range(order + 1):
        hk = np.zeros_like(m)
        for i in range(k + 1):
            for j in range(k - i + 1):
                hk = hk + x**i * y**j * z ** (k - i - j)
        total = total + hk / factorial(k + 2)
    return np.exp(m) * total


def dd2(a, b, c):
    """Second divided difference of exp at three (possibly coincident) points."""
    a, b, c = np.broadcast_arrays(*(np.asarray(x, complex) for x in (a, b, c)))
    try:
        return _dd2_explicit(a, b, c)
    except DegenerateExponent:
        spread = np.maximum(np.maximum(np.abs(a - b), np.abs(b - c)), np.abs(a - c))
        close = spread < CONFLUENCE_TOL
        out = np.empty(a.shape, dtype=complex)
        if np.any(~close):
            out[~close] = _dd2_explicit(a[~close], b[~close], c[~close])
        out[close] = _dd2_series(a[close], b[close], c[close])
        return out


# -- closed-form coefficients ----------------------------------------------


def _lams(gamma_f, delta1, delta2):
    return (
        complex(gamma_f, -delta1),  # sigma_+, channel 1
        complex(gamma_f, -delta2),  # sigma_+, channel 2
        complex(gamma_f, delta2),  # sigma_-, channel 2
        complex(gamma_f, delta1),  # sigma_-, channel 1
    )


@lru_cache(maxsize=512)
def _coefficients(params, gamma_f, delta1, delta2):
    """Amplitudes and exponents of I2, I3 (single sums) and I4 (double sums).

    Raises DegeneratePoles when the propagators have no residue expansion.
    """
    lam = _lams(gamma_f, delta1, delta2)
    s = G22_SIGNS
    r = steady_state(params)
    modes = {k: propagator_modes(k, params) for k in "+-"}
    pref = gamma_f**4

    def Dt(p, kind):
        return laplace_matrix(p, kind, params)

    single = {}
    for name, latest, others in (("i2", 1, (0, 2, 3)), ("i3", 2, (0, 1, 3))):
        sel = SELECT[s[latest]]
        coef = 0
        for j1, j2, j3 in itertools.permutations(others):
            S = lam[j1] + lam[j2] + lam[j3]
            w = Dt(lam[j2] + lam[j3], s[j2]) @ (Dt(lam[j3], s[j3]) @ r)
            rates, amps = modes[s[j1]]
            coef = coef + pref * (amps @ w)[:, sel] / (S - rates)
        rates = modes[s[0]][0]
        single[name] = (np.asarray(coef), lam[latest] + rates)

    amps4, A4, B4 = [], [], []
    for i1, i2 in itertools.permutations((1, 2)):
        for j1, j2 in itertools.permutations((0, 3)):
            w = Dt(lam[j2], s[j2]) @ r
            rates_r, amps_r = modes[s[j1]]
            u = (amps_r @ w) / (2 * gamma_f - rates_r)[:, None]
            rates_q, amps_q = modes[s[i2]]
            c = np.einsum("qij,rj->qri", amps_q, u)[..., SELECT[s[i1]]]
            amps4.append(pref * c.ravel())
            A4.append(np.repeat(lam[i1] + rates_q, len(rates_r)))
            B4.append((lam[i2] - rates_q[:, None] + rates_r[None, :]).ravel())
    return single, (np.concatenate(amps4), np.concatenate(A4), np.concatenate(B4))


def _single_term(coef, expo, tau, gamma_f):
    # sum_r coef_r e^{-2 G tau} (e^{b_r tau} - 1) / b_r
    tau = np.asarray(tau, dtype=float)
    t = tau[..., None]
    val = t * dd1((expo - 2 * gamma_f) * t, -2 * gamma_f * t)
    return np.sum(coef * val, axis=-1)


def _double_term(coef, A, B, tau, gamma_f):
    # e^{-2 G tau} int_0^tau e^{A a} int_0^a e^{B b} db da
    tau = np.asarray(tau, dtype=float)
    t = tau[..., None]
    damp = -2 * gamma_f * t
    val = t**2 * dd2((A + B) * t + damp, A * t + damp, damp + 0 * A)
    return np.sum(coef * val, axis=-1)


# -- quadrature fallback for defective generators ----------------------------


def _quad_complex(f, a, b):
    val, err = integrate.quad(f, a, b, complex_func=True, epsabs=0, epsrel=1e-11, limit=400)
    if abs(err) > 1e-6 * max(abs(val), 1e-300):
        raise FallbackFailed(f"quadrature fallback stalled at error {abs(err):.1e}")
    return val


def _fallback(name, req: DelayRequest):
    """I2, I3 or I4 by adaptive quadrature over the matrix-exponential propagator."""
    params, G, tau = req.params, req.gamma_f, float(req.tau)
    if tau == 0:
        return 0j
    L = _generator(params)
    lam = _lams(G, req.delta1, req.delta2)
    s = G22_SIGNS
    r = steady_state(params)
    I4 = np.eye(4)

    def E(x):
        return linalg.expm(L * x)

    def Dt(p, kind):
        return laplace_matrix(p, kind, params)

    if name in ("i2", "i3"):
        latest, others = (1, (0, 2, 3)) if name == "i2" else (2, (0, 1, 3))
        y = np.zeros(4, dtype=complex)
        for j1, j2, j3 in itertools.permutations(others):
            S = lam[j1] + lam[j2] + lam[j3]
            w = Dt(lam[j2] + lam[j3], s[j2]) @ (Dt(lam[j3], s[j3]) @ r)
            y += G**4 * np.linalg.solve(S * I4 - L, EMBED[s[j1]] @ w)
        sel = SELECT[s[latest]]
        f = lambda u: np.exp(lam[latest] * u - 2 * G * tau) * (RESTRICT @ (E(u) @ y))[sel]  # noqa: E731
        return _quad_complex(f, 0.0, tau)

    total = 0j
    for i1, i2 in itertools.permutations((1, 2)):
        for j1, j2 in itertools.permutations((0, 3)):
            w = Dt(lam[j2], s[j2]) @ r
            y = G**4 * np.linalg.solve(2 * G * I4 - L, EMBED[s[j1]] @ w)

            def inner(a, i1=i1, i2=i2, y=y):
                def f(b):
                    v = RESTRICT @ (E(b) @ y)
                    v = RESTRICT @ (E(a - b) @ (EMBED[s[i2]] @ v))
                    return np.exp(lam[i1] * a + lam[i2] * b - 2 * G * tau) * v[SELECT[s[i1]]]

                return _quad_complex(f, 0.0, a)

            total += _quad_complex(inner, 0.0, tau)
    return total


# -- public API ---------------------------------------------------------------


def _key(req):
    return req.params, float(req.gamma_f), float(req.delta1), float(req.delta2)


def i1(req: DelayRequest):
    """Domain with both channel-2 times before t: exp(-2 Gamma tau) G22_0."""
    g0 = g22_zero(req.gamma_f, req.delta1, req.delta2, req.params)
    return np.exp(-2 * req.gamma_f * np.asarray(req.tau, dtype=float)) * g0


def _single(name, req):
    try:
        single, _ = _coefficients(*_key(req))
    except DegeneratePoles:
        return _vectorize_fallback(name, req)
    coef, expo = single[name]
    return _single_term(coef, expo, req.tau, req.gamma_f)


def _vectorize_fallback(name, req):
    taus = np.asarray(req.tau, dtype=float)
    out = np.array(
        [_fallback(name, DelayRequest(req.gamma_f, req.delta1, req.delta2, t, req.params)) for t in taus.ravel()]
    )
    return out.reshape(taus.shape) if taus.ndim else complex(out[0])


def i2(req: DelayRequest):
    """Domain where only the sigma_+ time of channel 2 lies in (t, t + tau]."""
    return _single("i2", req)


def i3(req: DelayRequest):
    """Domain where only the sigma_- time of channel 2 lies in (t, t + tau]."""
    return _single("i3", req)


def i4(req: DelayRequest):
    """Domain where both channel-2 times lie in (t, t + tau]."""
    try:
        _, (coef, A, B) = _coefficients(*_key(req))
    except DegeneratePoles:
        return _vectorize_fallback("i4", req)
    return _double_term(coef, A, B, req.tau, req.gamma_f)


def g22_tau(req: DelayRequest, rtol=1e-8):
    """G^(2,2)_tau = Re(I1 + I2 + I3 + I4); tau may be an array."""
    parts = [i1(req), i2(req), i3(req), i4(req)]
    total = sum(parts)
    scale = sum(np.abs(p) for p in parts)
    if np.any(np.abs(np.imag(total)) > rtol * np.maximum(scale, 1e-300)):
        raise ImaginaryResidual("delayed correlation has a significant imaginary part")
    out = np.real(total)
    return out if np.ndim(out) else float(out)


def g22_tau_curve(gamma_f, delta1, delta2, taus, params: AtomParams):
    """G^(2,2)_tau over a tau grid of either sign."""
    taus = np.asarray(taus, dtype=float)
    out = np.empty(taus.shape)
    pos = taus >= 0
    if np.any(pos):
        out[pos] = g22_tau(DelayRequest(gamma_f, delta1, delta2, taus[pos], params))
    if np.any(~pos):
        out[~pos] = g22_tau(DelayRequest(gamma_f, delta2, delta1, -taus[~pos], params))
    return out


def _intensity_product(gamma_f, delta1, delta2, params):
    g1 = g11_zero(gamma_f, delta1, params)
    g2 = g11_zero(gamma_f, delta2, params)
    denom = float(g1 * g2)
    if not denom > 1e-30:
        raise ZeroIntensity("filtered intensity vanishes; normalisation undefined")
    return denom


def g2_normalized(req: DelayRequest):
    """g2 = G^(2,2)_tau / [G^(1,1)_0(delta1) G^(1,1)_0(delta2)]."""
    denom = _intensity_product(req.gamma_f, req.delta1, req.delta2, req.params)
    return g22_tau(req) / denom


def g2_curve(gamma_f, delta1, delta2, taus, params: AtomParams):
    """Normalized g2 over a tau grid of either sign."""
    denom = _intensity_product(gamma_f, delta1, delta2, params)
    return g22_tau_curve(gamma_f, delta1, delta2, taus, params) / denom


def delta_g2(gamma_f, delta1, delta2, params: AtomParams):
    """Unnormalized spectral correlation G22_0 - G11(delta1) G11(delta2); broadcasts."""
    g0 = g22_zero(gamma_f, delta1, delta2, params)
    out = g0 - g11_zero(gamma_f, delta1, params) * g11_zero(gamma_f, delta2, params)
    return out if np.ndim(out) else float(out)
