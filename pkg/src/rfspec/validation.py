"""Validation battery run by ``rfspec validate``.

Each check compares the closed forms against an oracle (quadrature,
perturbation theory, secular limit, exact symmetries) and reports the achieved
error next to its tolerance.  ToleranceNotMet from the quadrature oracle is not
caught here; the CLI maps it to its own exit code.
"""

from __future__ import annotations

import time
from dataclasses import asdict, dataclass

import numpy as np
from scipy import ndimage, optimize, signal

from .atom import AtomParams, q_roots, steady_state, steady_state_printed_population
from .delay import DelayRequest, delta_g2, g2_curve, g22_tau
from .quadrature import brute_force_g22_tau, brute_force_gnm
from .secular import dressed_params, pair_detunings, secular_g2
from .spectral import SlotSequence, g11_zero, g22_perturbative, g22_zero, physical_spectrum

SEED = 20240611


@dataclass
class Check:
    name: str
    passed: bool
    achieved: float
    tolerance: float
    detail: str = ""
    seconds: float = 0.0

    def __post_init__(self):
        self.passed = bool(self.passed)
        self.achieved = float(self.achieved)
        self.tolerance = float(self.tolerance)


def _check(name, achieved, tol, detail="", below=True):
    ok = bool(achieved < tol) if below else bool(achieved > tol)
    return Check(name, ok, float(achieved), float(tol), detail)


# -- measurements shared by the checks ---------------------------------------


def spectrum_peaks(gamma_f, params, lo=-15.0, hi=15.0, n=3001):
    """Local maxima of S over a delta window, refined by a bounded scalar search."""
    d = np.linspace(lo, hi, n)
    S = physical_spectrum(gamma_f, d, params)
    idx, _ = signal.find_peaks(S)
    step = d[1] - d[0]
    out = []
    for i in idx:
        r = optimize.minimize_scalar(
            lambda x: -physical_spectrum(gamma_f, x, params), bounds=(d[i] - step, d[i] + step), method="bounded"
        )
        out.append(r.x)
    return np.array(out)


def outer_half_width(gamma_f, params, peak):
    """Half width at half maximum of a sideband, measured away from line centre."""
    S0 = physical_spectrum(gamma_f, peak, params)
    sgn = np.sign(peak)
    f = lambda x: physical_spectrum(gamma_f, peak + sgn * x, params) - S0 / 2  # noqa: E731
    return optimize.brentq(f, 0.0, 50.0)


def resonance_clusters(M, threshold):
    """Connected regions (8-neighbour) where |M| exceeds threshold * max|M|."""
    A = np.abs(M)
    mask = A >= threshold * A.max()
    lab, n = ndimage.label(mask, structure=np.ones((3, 3)))
    return lab, n


def triplet_points(omega):
    lines = (-omega, 0.0, omega)
    return np.array([(a, b) for a in lines for b in lines])


def distance_to_points(D1, D2, pts):
    grid = np.stack([D1, D2], axis=-1)
    return np.min(np.linalg.norm(grid[..., None, :] - pts, axis=-1), axis=-1)


def top_local_maxima(M, k):
    mx = (M == ndimage.maximum_filter(M, size=3, mode="nearest")) & np.isfinite(M)
    idx = np.argwhere(mx)
    order = np.argsort(M[mx])[::-1][:k]
    return idx[order]


# -- checks ---------------------------------------------------------------------


def check_spectrum_shape():
    p = AtomParams(v=10.0, delta_L=2.0)
    peaks = spectrum_peaks(0.1, p)
    target = np.array([-p.omega, 0.0, p.omega])
    if len(peaks) != 3:
        return Check("spectrum maxima", False, np.inf, 0.2, f"found {len(peaks)} maxima")
    err = np.abs(np.sort(peaks) - target).max()
    widths = [outer_half_width(g, p, spectrum_peaks(g, p)[-1]) for g in (0.1, 0.5, 1.0, 2.0)]
    mono = bool(np.all(np.diff(widths) > 0))
    c = _check("spectrum maxima", err, 0.2, f"peaks {np.round(peaks, 4).tolist()}; widths {np.round(widths, 4).tolist()}")
    c.passed = c.passed and mono
    return c


def check_roots(n=100):
    rng = np.random.default_rng(SEED)
    worst = 0.0
    for v in rng.uniform(1.0, 200.0, n):
        p = AtomParams(v=v)
        w = np.sqrt(v * v - 0.25)
        ref = np.array([-1.5 - 1j * w, -1.5 + 1j * w, -1.0])
        got = q_roots(p)
        err = max(np.min(np.abs(got - r)) / abs(r) for r in ref)
        worst = max(worst, err)
    return _check("resonant roots", worst, 1e-10)


def check_symmetries(n=200):
    rng = np.random.default_rng(SEED + 1)
    G = rng.uniform(0.2, 3.0, n)
    d1, d2 = rng.uniform(-25, 25, (2, n))
    worst_diag = worst_anti = 0.0
    for k in range(n):
        pD = AtomParams(v=rng.uniform(0.5, 30.0), delta_L=rng.uniform(-10, 10))
        a, b = g22_zero(G[k], d1[k], d2[k], pD), g22_zero(G[k], d2[k], d1[k], pD)
        worst_diag = max(worst_diag, abs(a - b) / abs(a))
        p0 = AtomParams(v=pD.v)
        a, b = g22_zero(G[k], d1[k], d2[k], p0), g22_zero(G[k], -d1[k], -d2[k], p0)
        worst_anti = max(worst_anti, abs(a - b) / abs(a))
    return _check("symmetries", max(worst_diag, worst_anti), 1e-10, f"diag {worst_diag:.1e}, anti {worst_anti:.1e}")


def check_perturbative():
    p = AtomParams(v=1e-2)
    d = np.linspace(-2, 2, 5)
    D1, D2 = np.meshgrid(d, d, indexing="ij")
    worst = 0.0
    for G in (0.5, 1.0):
        exact = g22_zero(G, D1, D2, p)
        approx = g22_perturbative(G, D1, D2, p)
        worst = max(worst, np.abs(exact / approx - 1).max())
    return _check("weak-field limit", worst, 3e-2)


def check_quadrature(tol=1e-6):
    p = AtomParams(v=10.0, delta_L=2.0)
    G = 1.0
    d = np.linspace(-12, 12, 5)
    worst = 0.0
    for x in d:
        seq = SlotSequence.intensity([(G, x)])
        worst = max(worst, abs(brute_force_gnm(seq, p, tol=tol).real / g11_zero(G, x, p) - 1))
    for x in d:
        for y in d:
            seq = SlotSequence.intensity([(G, x), (G, y)])
            worst = max(worst, abs(brute_force_gnm(seq, p, tol=tol).real / g22_zero(G, x, y, p) - 1))
    worst_tau = 0.0
    for tau in (0.3, 1.0, 2.5):
        req = DelayRequest(G, 3.0, -7.0, tau, p)
        worst_tau = max(worst_tau, abs(brute_force_g22_tau(req, tol=tol) / g22_tau(req) - 1))
    c = _check("quadrature oracle", worst, 1e-4, f"zero delay {worst:.1e}, delayed {worst_tau:.1e}")
    c.passed = c.passed and worst_tau < 1e-3
    return c


PAIRS = ("RR", "RT", "TR", "RF", "FR", "TT", "FF", "TF", "FT")


def secular_deviation(v, gamma_f, taus, delta_L=0.0, pairs=PAIRS):
    p = AtomParams(v=v, delta_L=delta_L)
    dp = dressed_params(p)
    out = {}
    for pair in pairs:
        d1, d2 = pair_detunings(pair, p)
        g = g2_curve(gamma_f, d1, d2, taus, p)
        out[pair] = (g, g - secular_g2(pair, taus, dp, gamma_f))
    return out


def check_secular():
    taus = np.linspace(0, 0.3, 601)
    res = secular_deviation(200.0, 20.0, taus)
    rr = np.abs(res["RR"][1]).max()
    tt = max(res["TT"][0][0], res["FF"][0][0])
    rt = np.abs(res["RT"][1]).max()
    p = AtomParams(v=200.0, delta_L=120.0)
    d1, d2 = pair_detunings("FT", p)
    ft0 = g2_curve(20.0, d1, d2, [0.0], p)[0]
    # oscillation amplitude once the filter transient (a few 1/Gamma) has died out
    tail = taus >= 0.15
    amps = [np.ptp(dev[tail]) / 2 for _, dev in res.values()]
    amp = max(amps)
    ok = rr < 0.05 and tt < 0.05 and rt < 0.07 and ft0 > 1 and 1e-3 < amp < 0.1
    detail = f"|RR-1| {rr:.3f}, TT/FF(0) {tt:.3f}, RT dev {rt:.3f}, FT(0) {ft0:.3f}, osc amp {amp:.3f}"
    return Check("secular limit", ok, max(rr, rt), 0.07, detail)


def check_deviation_regime():
    taus = np.linspace(0, 1, 401)
    low = max(np.abs(d).max() for _, d in secular_deviation(20.0, 6.0, taus).values())
    high = max(np.abs(d).max() for _, d in secular_deviation(200.0, 20.0, taus).values())
    return _check("deviation regime", low / high, 3.0, f"max dev {low:.3f} vs {high:.3f}", below=False)


def check_maps():
    G = 0.4
    p = AtomParams(v=100.0)
    d = np.linspace(-160, 160, 81)
    D1, D2 = np.meshgrid(d, d, indexing="ij")
    pts = triplet_points(p.omega)
    dist = distance_to_points(D1, D2, pts)

    g2 = g22_zero(G, D1, D2, p) / (g11_zero(G, D1, p) * g11_zero(G, D2, p))
    top = top_local_maxima(g2, 10)
    min_dist = min(dist[i, j] for i, j in top)

    dg = delta_g2(G, D1, D2, p)
    peak = np.abs(dg).max()
    background = np.abs(dg[dist > 3.0]).max() / peak

    p7 = AtomParams(v=50.0, delta_L=80.0)
    d7 = np.linspace(-2 * p7.omega, 2 * p7.omega, 81)
    E1, E2 = np.meshgrid(d7, d7, indexing="ij")
    _, n_clusters = resonance_clusters(delta_g2(G, E1, E2, p7), 0.1)

    ok = min_dist > 5.0 and background <= 1e-2 and n_clusters == 7
    detail = f"g2 maxima min distance {min_dist:.1f}, dG2 background {background:.2e}, clusters {n_clusters}"
    return Check("correlation maps", ok, background, 1e-2, detail)


def check_factorization():
    rng = np.random.default_rng(SEED + 2)
    worst = 0.0
    for _ in range(3):
        p = AtomParams(v=rng.uniform(5, 40), delta_L=rng.uniform(-10, 10))
        G = rng.uniform(0.5, 5)
        d1, d2 = rng.uniform(-p.omega, p.omega, 2)
        worst = max(worst, abs(g2_curve(G, d1, d2, [30.0], p)[0] - 1))
    return _check("long-delay factorization", worst, 1e-3)


def steady_state_record(params=None):
    """Null-space population next to the printed closed form."""
    p = params or AtomParams(v=2.0)
    r = steady_state(p)
    return {
        "params": asdict(p),
        "rho22_null_space": float(r[2].real),
        "rho22_printed_formula": steady_state_printed_population(p),
        "rho22_derived_formula": p.v**2 / (4 * (p.gamma**2 + p.delta_L**2) + 2 * p.v**2),
    }


def run_battery(tol=1e-6):
    checks = [
        check_spectrum_shape,
        check_roots,
        check_symmetries,
        check_perturbative,
        lambda: check_quadrature(tol),
        check_secular,
        check_deviation_regime,
        check_maps,
        check_factorization,
    ]
    results = []
    for fn in checks:
        t0 = time.perf_counter()
        c = fn()
        c.seconds = time.perf_counter() - t0
        results.append(c)
    return {
        "checks": [asdict(c) for c in results],
        "all_passed": all(c.passed for c in results),
        "steady_state": steady_state_record(),
        "tol": tol,
    }
