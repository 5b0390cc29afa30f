"""Dissipative dynamics of a laser-driven two-level atom.

Density-matrix elements are flattened row-major into the basis
``(rho11, rho12, rho21, rho22)``; level ``|1>`` is the ground state.  The
reduced vector used by the correlation formulas is ``r = [rho12, rho21, rho22]``.

The Green's matrix element ``D^{ij}_{kl}(t)`` maps the initial element
``rho_ij`` onto ``rho_kl(t)``; it is the ``(kl, ij)`` entry of ``expm(L t)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import linalg

from .errors import DegeneratePoles, PoleHit

# flat index of each density-matrix element
IDX = {"11": 0, "12": 1, "21": 2, "22": 3}

SIGMA_PLUS = np.array([[0, 0], [1, 0]], dtype=complex)  # |2><1|
SIGMA_MINUS = np.array([[0, 1], [0, 0]], dtype=complex)  # |1><2|
SIGMA_Z = np.diag([-1.0, 1.0]).astype(complex)
SIGMA_X = SIGMA_PLUS + SIGMA_MINUS

# vec(A rho B) = kron(A, B.T) vec(rho) for row-major flattening
_EYE2 = np.eye(2, dtype=complex)


def _left(a):
    return np.kron(a, _EYE2)


def _right(b):
    return np.kron(_EYE2, b.T)


# rho -> rho sigma_+ (upper row, "+") and rho -> sigma_- rho (lower row, "-")
OP_PLUS = _right(SIGMA_PLUS)
OP_MINUS = _left(SIGMA_MINUS)

# 3-vector r -> 4-vector with the operator applied, and 4-vector -> r
EMBED = {
    "+": OP_PLUS[:, 1:],
    "-": OP_MINUS[:, 1:],
}
RESTRICT = np.eye(4, dtype=complex)[1:, :]

# pick {.}_+ / {.}_- out of a reduced vector
SELECT = {"+": 0, "-": 1}


def _check_sign(kind):
    if kind not in ("+", "-"):
        raise ValueError(f"kind must be '+' or '-', got {kind!r}")
    return kind


@dataclass(frozen=True)
class AtomParams:
    """Rabi frequency ``v``, laser detuning ``delta_L`` and half decay rate ``gamma``."""

    v: float
    delta_L: float = 0.0
    gamma: float = 1.0

    def __post_init__(self):
        if not (np.isfinite(self.gamma) and self.gamma > 0):
            raise ValueError("gamma must be positive")
        if not (np.isfinite(self.v) and self.v >= 0):
            raise ValueError("v must be non-negative")
        if not np.isfinite(self.delta_L):
            raise ValueError("delta_L must be finite")
        object.__setattr__(self, "v", float(self.v))
        object.__setattr__(self, "delta_L", float(self.delta_L))
        object.__setattr__(self, "gamma", float(self.gamma))

    @property
    def omega(self):
        """Generalized Rabi frequency sqrt(delta_L**2 + v**2)."""
        return float(np.hypot(self.delta_L, self.v))

    def scaled(self):
        """Same physics in units where gamma = 1."""
        return AtomParams(self.v / self.gamma, self.delta_L / self.gamma, 1.0)


@lru_cache(maxsize=256)
def _generator(params):
    d, v, g = params.delta_L, params.v, params.gamma
    comm = lambda a: _left(a) - _right(a)  # noqa: E731
    L = 0.5j * d * comm(SIGMA_Z) - 0.5j * v * comm(SIGMA_X)
    sp_sm = SIGMA_PLUS @ SIGMA_MINUS
    L = L + g * (2 * _left(SIGMA_MINUS) @ _right(SIGMA_PLUS) - _left(sp_sm) - _right(sp_sm))
    L.flags.writeable = False
    return L


def build_generator(params: AtomParams) -> np.ndarray:
    """Liouvillian of the rotating-frame master equation as a 4x4 matrix."""
    return _generator(params).copy()


def steady_state(params: AtomParams) -> np.ndarray:
    """Stationary reduced vector ``[rho12, rho21, rho22]`` from the null space of L."""
    ns = linalg.null_space(_generator(params), rcond=1e-10)
    if ns.shape[1] != 1:
        raise RuntimeError(f"generator null space has dimension {ns.shape[1]}")
    rho = ns[:, 0] / (ns[0, 0] + ns[3, 0])
    r = rho[1:].copy()
    # enforce hermiticity and a real population
    coh = 0.5 * (r[0] + np.conj(r[1]))
    r[0], r[1] = coh, np.conj(coh)
    r[2] = r[2].real
    return r


def steady_state_printed_population(params: AtomParams) -> float:
    """Excited population as printed in the literature formula v^2 / (4(g^2+D^2) + v^2)."""
    g, d, v = params.gamma, params.delta_L, params.v
    return v**2 / (4 * (g**2 + d**2) + v**2)


def steady_state_population(params: AtomParams) -> float:
    """Closed-form excited population v^2 / (4(g^2+D^2) + 2 v^2) of the Bloch equations."""
    g, d, v = params.gamma, params.delta_L, params.v
    return v**2 / (4 * (g**2 + d**2) + 2 * v**2)


def q_coefficients(params: AtomParams) -> np.ndarray:
    """Monic coefficients of Q(p) = (p+2g)[D^2+(p+g)^2] + (p+g) v^2, highest power first."""
    g, d, v = params.gamma, params.delta_L, params.v
    return np.array([1.0, 4 * g, 5 * g**2 + d**2 + v**2, 2 * g**3 + 2 * g * d**2 + g * v**2])


def q_poly(p, params: AtomParams):
    g, d, v = params.gamma, params.delta_L, params.v
    p = np.asarray(p)
    return (p + 2 * g) * (d**2 + (p + g) ** 2) + (p + g) * v**2


def _sort_roots(roots, scale):
    # round the real part so conjugate pairs tie and order by imaginary part
    key_re = np.round(roots.real / scale, 9)
    order = np.lexsort((roots.imag, key_re))
    return roots[order]


@lru_cache(maxsize=256)
def _q_roots(params):
    c = q_coefficients(params)
    companion = np.zeros((3, 3))
    companion[0, :] = -c[1:]
    companion[1, 0] = companion[2, 1] = 1.0
    roots = linalg.eigvals(companion)
    # Newton polish on the original cubic
    dc = np.polyder(c)
    for _ in range(2):
        dq = np.polyval(dc, roots)
        ok = np.abs(dq) > 1e-300
        roots = np.where(ok, roots - np.polyval(c, roots) / np.where(ok, dq, 1.0), roots)
    # real coefficients: make near-conjugate pairs exactly conjugate
    tol = 1e-12 * max(params.gamma, np.max(np.abs(roots)))
    for i in range(3):
        if abs(roots[i].imag) <= tol:
            roots[i] = roots[i].real
    roots = _sort_roots(roots, params.gamma)
    if abs(roots[0].imag) > tol and abs(roots[0] - np.conj(roots[1])) < 1e-8 * abs(roots[0]):
        re = 0.5 * (roots[0].real + roots[1].real)
        im = 0.5 * (abs(roots[0].imag) + abs(roots[1].imag))
        roots[0], roots[1] = complex(re, -im), complex(re, im)
    elif abs(roots[1].imag) > tol and abs(roots[1] - np.conj(roots[2])) < 1e-8 * abs(roots[1]):
        re = 0.5 * (roots[1].real + roots[2].real)
        im = 0.5 * (abs(roots[1].imag) + abs(roots[2].imag))
        roots[1], roots[2] = complex(re, -im), complex(re, im)
    roots = _sort_roots(roots, params.gamma)
    roots.flags.writeable = False
    return roots


def q_roots(params: AtomParams) -> np.ndarray:
    """Roots of Q(p) via companion-matrix eigenvalues, sorted by (Re, Im)."""
    return _q_roots(params).copy()


def pole_separation(params: AtomParams) -> float:
    """Smallest pairwise distance among the generator eigenvalues {0} + roots of Q."""
    poles = np.concatenate([[0.0], _q_roots(params)])
    d = np.abs(poles[:, None] - poles[None, :])
    return float(np.min(d[np.triu_indices(4, 1)]))


def generator_eigenvalues(params: AtomParams) -> np.ndarray:
    return np.concatenate([[0.0 + 0j], _q_roots(params)])


# -- Laplace domain ---------------------------------------------------------


def resolvent(p, params: AtomParams) -> np.ndarray:
    """(p - L)^{-1}, broadcasting over an array of p; raises PoleHit near eigenvalues."""
    p = np.asarray(p, dtype=complex)
    eig = generator_eigenvalues(params)
    dist = np.abs(p[..., None] - eig)
    scale = np.maximum(np.maximum(np.abs(p)[..., None], np.abs(eig)), params.gamma)
    if np.any(dist <= 1e-12 * scale):
        raise PoleHit(f"Laplace argument within tolerance of a generator eigenvalue")
    M = p[..., None, None] * np.eye(4) - _generator(params)
    return np.linalg.inv(M)


@dataclass(frozen=True)
class LaplacePropagator:
    """The 3x3 matrix D~^[kind](p) acting on reduced vectors."""

    kind: str
    entries: np.ndarray
    at_point: complex

    def __matmul__(self, other):
        return self.entries @ other


def laplace_matrix(p, kind, params: AtomParams) -> np.ndarray:
    """Array-valued D~^[kind](p) with shape ``p.shape + (3, 3)``."""
    _check_sign(kind)
    return RESTRICT @ resolvent(p, params) @ EMBED[kind]


def laplace_propagator(p: complex, kind: str, params: AtomParams) -> LaplacePropagator:
    p = complex(p)
    return LaplacePropagator(kind, laplace_matrix(p, kind, params), p)


GREEN_PAIRS = (
    ("11", "12"), ("11", "21"), ("11", "22"),
    ("21", "12"), ("21", "21"), ("21", "22"),
    ("12", "12"), ("12", "21"), ("12", "22"),
)


def green_elements(p, params: AtomParams) -> dict:
    """The nine Laplace-domain Green elements keyed by (initial, final), from the resolvent."""
    R = resolvent(p, params)
    return {(ij, kl): R[..., IDX[kl], IDX[ij]] for ij, kl in GREEN_PAIRS}


def green_elements_closed_form(p, params: AtomParams) -> dict:
    """Rational closed forms for the same nine elements.

    Starred partners are obtained by conjugating the i's in the coefficients
    while keeping ``p`` as is.  Elements odd in ``v`` carry the sign that goes
    with the ``-i v/2 [sigma_x, rho]`` drive term of the generator.
    """
    g, d, v = params.gamma, params.delta_L, params.v
    p = np.asarray(p, dtype=complex)
    Q = q_poly(p, params)
    e = {}
    e["11", "12"] = 1j * (p + 2 * g) * (p + g - 1j * d) * v / (2 * p * Q)
    e["11", "21"] = -1j * (p + 2 * g) * (p + g + 1j * d) * v / (2 * p * Q)
    e["11", "22"] = (p + g) * v**2 / (2 * p * Q)
    e["21", "12"] = v**2 / (2 * Q)
    e["12", "21"] = v**2 / (2 * Q)
    e["21", "21"] = (2 * (p + 2 * g) * (p + g + 1j * d) + v**2) / (2 * Q)
    e["12", "12"] = (2 * (p + 2 * g) * (p + g - 1j * d) + v**2) / (2 * Q)
    e["21", "22"] = 1j * (p + g + 1j * d) * v / (2 * Q)
    e["12", "22"] = -1j * (p + g - 1j * d) * v / (2 * Q)
    return e


# -- time domain -------------------------------------------------------------


@dataclass(frozen=True)
class ExpSum:
    """f(t) = sum_r amplitudes[r] * exp(rates[r] * t)."""

    amplitudes: np.ndarray
    rates: np.ndarray

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return np.sum(self.amplitudes * np.exp(np.multiply.outer(t, self.rates)), axis=-1)

    @property
    def terms(self):
        return list(zip(self.amplitudes, self.rates))

    def __len__(self):
        return len(self.rates)


@lru_cache(maxsize=256)
def _spectral_projectors(params, tol):
    """Residues of (p - L)^{-1} at its distinct poles (Sylvester's formula).

    Poles closer than ``tol * gamma`` are merged; the merge is accepted only if
    the merged eigenvalue is semisimple, otherwise DegeneratePoles is raised.
    """
    L = _generator(params)
    eig = generator_eigenvalues(params)
    clusters = []
    for lam in eig:
        for c in clusters:
            if abs(lam - c[0]) < tol * params.gamma:
                c.append(lam)
                break
        else:
            clusters.append([lam])
    poles = np.array([np.mean(c) for c in clusters])
    if len(poles) == 1:
        raise DegeneratePoles("all generator eigenvalues coincide")
    I = np.eye(4)
    projs = []
    for i, lam in enumerate(poles):
        P = I.astype(complex)
        for j, mu in enumerate(poles):
            if j != i:
                P = P @ (L - mu * I) / (lam - mu)
        projs.append(P)
    projs = np.array(projs)
    scale = max(1.0, np.max(np.abs(projs)))
    if len(clusters) < 4:
        # merged poles must be semisimple: (L - lam) P = 0
        for lam, P in zip(poles, projs):
            if np.max(np.abs((L - lam * I) @ P)) > 1e-8 * scale * max(params.gamma, abs(lam)):
                raise DegeneratePoles("generator has a non-trivial Jordan block")
    if np.max(np.abs(projs.sum(axis=0) - I)) > 1e-7 * scale:
        raise DegeneratePoles("spectral projectors ill-conditioned (poles nearly coincide)")
    poles.flags.writeable = False
    projs.flags.writeable = False
    return poles, projs


def propagator_modes(kind, params: AtomParams, tol=1e-6):
    """Rates and 3x3 residue matrices with D^[kind](t) = sum_r A_r exp(rate_r t)."""
    _check_sign(kind)
    poles, projs = _spectral_projectors(params, tol)
    amps = RESTRICT @ projs @ EMBED[kind]
    return poles.copy(), amps


def time_propagator(kind: str, params: AtomParams, tol=1e-6):
    """3x3 nested list of ExpSum giving D^[kind](t) by residues at simple poles."""
    rates, amps = propagator_modes(kind, params, tol)
    out = []
    cut = 1e-13 * max(1.0, float(np.max(np.abs(amps))))
    for i in range(3):
        row = []
        for j in range(3):
            a = amps[:, i, j]
            keep = np.abs(a) > cut
            row.append(ExpSum(a[keep].copy(), rates[keep].copy()))
        out.append(row)
    return out


def evaluate_time_propagator(tp, t) -> np.ndarray:
    """Evaluate a nested ExpSum matrix at time(s) t, shape ``t.shape + (3, 3)``."""
    t = np.asarray(t, dtype=float)
    M = np.empty(t.shape + (3, 3), dtype=complex)
    for i in range(3):
        for j in range(3):
            M[..., i, j] = tp[i][j](t)
    return M


def expm_propagator(t, kind, params: AtomParams) -> np.ndarray:
    """D^[kind](t) from the matrix exponential of the generator."""
    _check_sign(kind)
    t = np.asarray(t, dtype=float)
    E = linalg.expm(np.multiply.outer(t, _generator(params)))
    return RESTRICT @ E @ EMBED[kind]
