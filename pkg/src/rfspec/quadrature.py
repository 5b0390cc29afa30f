"""Brute-force reference values from the defining time integrals.

Nothing here uses Laplace transforms, residues or the stationary state.  The
atom starts in its ground state at time 0 and every multitime average is built
from the full 4x4 generator with explicit sigma_+/sigma_- insertions.

The ordered-simplex integral for one time ordering ``t_N <= ... <= t_1`` is
computed as a cascade of Volterra integrals,

    b_N(s) = rho(s),
    b_k(s) = int_0^s exp(L (s - s')) w_{k+1}(s') Op_{k+1} b_{k+1}(s') ds',
    value  = int_0^T w_1(s) Tr[Op_1 b_1(s)] ds,

integrated innermost-first by an adaptive Runge-Kutta scheme; all orderings
are advanced together.  ``w_k`` is the exponential filter kernel of the slot
placed at level k, restricted to that slot's integration window.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, linalg

from .atom import EMBED, OP_MINUS, OP_PLUS, RESTRICT, SELECT, AtomParams, _generator
from .errors import ToleranceNotMet

OPS = {"+": OP_PLUS, "-": OP_MINUS}
TRACE = np.array([1, 0, 0, 1], dtype=complex)
GROUND = np.array([1, 0, 0, 0], dtype=complex)


# -- diagrams ---------------------------------------------------------------


@dataclass(frozen=True)
class TimeDiagram:
    """Row tags ('+' upper / '-' lower) of a time-ordered operator sequence, earliest first."""

    tags: tuple

    def __post_init__(self):
        tags = tuple(self.tags)
        if not tags or any(t not in ("+", "-") for t in tags):
            raise ValueError("tags must be a non-empty sequence of '+'/'-'")
        object.__setattr__(self, "tags", tags)

    @property
    def kinds(self):
        """Propagator kind of each line: the row of its outgoing (earlier) time."""
        return self.tags[:-1]

    @property
    def selector(self):
        return self.tags[-1]


def multitime_correlation(diagram: TimeDiagram, times, params: AtomParams, initial) -> complex:
    """Evaluate a time-ordered dipole correlation by chaining matrix-exponential propagators."""
    times = np.asarray(times, dtype=float)
    if times.shape != (len(diagram.tags),):
        raise ValueError("need one time per diagram tag")
    if np.any(np.diff(times) < 0):
        raise ValueError("times must be non-decreasing")
    L = _generator(params)
    v = np.asarray(initial, dtype=complex)
    for kind, dt in zip(diagram.kinds, np.diff(times)):
        v = RESTRICT @ linalg.expm(L * dt) @ EMBED[kind] @ v
    return complex(v[SELECT[diagram.selector]])


# -- orderings --------------------------------------------------------------


def consistent_orderings(windows):
    """Latest-first orderings of slots compatible with their integration windows.

    ``windows`` holds (start, end) per slot; a slot whose window ends no later
    than another's starts must come earlier in time.
    """
    n = len(windows)
    out = []
    for perm in itertools.permutations(range(n)):
        ok = True
        for a in range(n):
            for b in range(a + 1, n):
                later, earlier = perm[a], perm[b]
                if windows[later][1] <= windows[earlier][0] and windows[later] != windows[earlier]:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            out.append(perm)
    return out


# -- cascade integrator --------------------------------------------------------


def _cascade(lams, gammas, signs, refs, windows, params, rtol):
    """Sum over orderings of the windowed simplex integrals; returns a complex value."""
    N = len(lams)
    L = _generator(params)
    orders = np.array(consistent_orderings(windows))
    n_ord = len(orders)
    lams = np.asarray(lams, dtype=complex)
    gammas = np.asarray(gammas, dtype=float)
    refs = np.asarray(refs, dtype=float)
    starts = np.array([w[0] for w in windows])
    ends = np.array([w[1] for w in windows])
    ops = np.array([OPS[s] for s in signs])
    final_row = np.array([TRACE @ OPS[s] for s in signs])

    # operator applied when entering level k (k = 1..N-1 feeds b_{k-1}); level 0 closes
    lvl_ops = ops[orders[:, 1:]]  # (n_ord, N-1, 4, 4)
    lvl_slot = orders[:, 1:]
    close_row = final_row[orders[:, 0]]  # (n_ord, 4)
    close_slot = orders[:, 0]
    nb = N - 1

    def rhs(s, y, active):
        rho = y[:4]
        B = y[4 : 4 + 4 * n_ord * nb].reshape(n_ord, nb, 4)
        w = active * gammas * np.exp(-lams * (refs - s))
        feed = np.concatenate([B[:, 1:, :], np.broadcast_to(rho, (n_ord, 1, 4))], axis=1)
        src = w[lvl_slot][..., None] * np.einsum("okij,okj->oki", lvl_ops, feed)
        dB = B @ L.T + src
        dc = w[close_slot] * np.einsum("oi,oi->o", close_row, B[:, 0, :])
        return np.concatenate([L @ rho, dB.ravel(), dc])

    y = np.concatenate([GROUND, np.zeros(4 * n_ord * nb + n_ord, dtype=complex)])
    breaks = sorted(set([0.0] + list(starts) + list(ends)))
    for a, b in zip(breaks[:-1], breaks[1:]):
        if b <= a:
            continue
        # windows only switch at breakpoints, so the mask is fixed per segment
        mid = 0.5 * (a + b)
        active = ((starts <= mid) & (mid <= ends)).astype(float)
        sol = integrate.solve_ivp(
            rhs, (a, b), y, method="DOP853", rtol=rtol, atol=1e-14 * rtol, args=(active,)
        )
        if not sol.success:
            raise ToleranceNotMet(f"integrator failed: {sol.message}")
        y = sol.y[:, -1]
    return complex(math.fsum(y[-n_ord:].real) + 1j * math.fsum(y[-n_ord:].imag))


# the integrator cannot usefully go below this relative tolerance, and
# error estimates are not trusted for requests tighter than TOL_MIN
RTOL_FLOOR = 1e-13
TOL_MIN = 1e-11


def _with_error(fn, tol):
    """Evaluate at two tolerances; the spread is the error estimate."""
    coarse = fn(max(tol * 1e-2, 10 * RTOL_FLOOR))
    fine = fn(max(tol * 1e-3, RTOL_FLOOR))
    err = abs(fine - coarse)
    scale = max(abs(fine), 1e-300)
    if tol < TOL_MIN:
        raise ToleranceNotMet(
            f"tol {tol:.1e} is beyond quadrature capability ({TOL_MIN:.0e})",
            achieved=max(err / scale, TOL_MIN),
            requested=tol,
        )
    if err > tol * scale:
        raise ToleranceNotMet(
            f"quadrature error {err / scale:.2e} exceeds tol {tol:.1e}", achieved=err / scale, requested=tol
        )
    return fine, err


def default_horizon(params: AtomParams, gamma_min):
    return 40.0 / min(params.gamma, gamma_min)


def _horizon_check(fn, T, value, tol):
    doubled = fn(2 * T)
    change = abs(doubled - value) / max(abs(doubled), 1e-300)
    if change > tol:
        raise ToleranceNotMet(
            f"doubling the horizon changes the result by {change:.2e}", achieved=change, requested=tol
        )


def brute_force_gnm(seq, params: AtomParams, horizon=None, tol=1e-6, return_error=False, check_horizon=False):
    """G^(n,m) from the defining convolution at a finite horizon, all (n+m)! orderings.

    With ``check_horizon`` the run is repeated at twice the horizon and must
    agree to ``tol`` (the stationary limit has been reached).
    """
    N = len(seq.slots)
    if N > 4:
        raise ValueError("brute force limited to n+m <= 4")
    gmin = min(s.gamma_f for s in seq.slots)
    T = default_horizon(params, gmin) if horizon is None else float(horizon)
    lams = [s.lam for s in seq.slots]
    gammas = [s.gamma_f for s in seq.slots]
    signs = [s.sign for s in seq.slots]

    def run(T, rt):
        return _cascade(lams, gammas, signs, [T] * N, [(0.0, T)] * N, params, rt)

    value, err = _with_error(lambda rt: run(T, rt), tol)
    if check_horizon:
        _horizon_check(lambda T2: run(T2, max(tol * 1e-3, RTOL_FLOOR)), T, value, tol)
    return (value, err) if return_error else value


# slot order: sigma_+ ch1, sigma_+ ch2, sigma_- ch2, sigma_- ch1
DOMAINS = ("full", "i1", "i2", "i3", "i4")


def _g22_windows(T, tau, domain):
    early, late, whole = (0.0, T), (T, T + tau), (0.0, T + tau)
    w2, w3 = {
        "full": (whole, whole),
        "i1": (early, early),
        "i2": (late, early),
        "i3": (early, late),
        "i4": (late, late),
    }[domain]
    return [early, w2, w3, early]


def brute_force_g22_tau(req, horizon=None, tol=1e-6, domain="full", return_error=False, check_horizon=False):
    """Delayed G^(2,2)_tau, or one of its four integration domains, at a finite horizon.

    Channel 1 is detected at the horizon T, channel 2 at T + tau.
    """
    if domain not in DOMAINS:
        raise ValueError(f"domain must be one of {DOMAINS}")
    G, d1, d2, tau = req.gamma_f, req.delta1, req.delta2, float(req.tau)
    T = default_horizon(req.params, G) if horizon is None else float(horizon)
    lams = [complex(G, -d1), complex(G, -d2), complex(G, d2), complex(G, d1)]
    if tau == 0 and domain in ("i2", "i3", "i4"):
        return (0j, 0.0) if return_error else 0j

    def run(T, rt):
        refs = [T, T + tau, T + tau, T]
        return _cascade(lams, [G] * 4, "++--", refs, _g22_windows(T, tau, domain), req.params, rt)

    value, err = _with_error(lambda rt: run(T, rt), tol)
    if check_horizon:
        _horizon_check(lambda T2: run(T2, max(tol * 1e-3, RTOL_FLOOR)), T, value, tol)
    if domain == "full":
        value = value.real
    return (value, err) if return_error else value
