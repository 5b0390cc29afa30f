"""Stationary spectrally filtered correlation functions.

A correlation function of order (n, m) is a sum over all (n+m)! time orderings
of chains of Laplace-domain propagators evaluated at partial sums of the filter
exponents, applied to the stationary state.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .atom import SELECT, AtomParams, laplace_matrix, steady_state
from .errors import CapExceeded, ImaginaryResidual

DEFAULT_CAP = 8


@dataclass(frozen=True)
class FilterSlot:
    """One Fabry-Perot channel attached to a sigma_+ (sign '+') or sigma_- (sign '-') slot."""

    gamma_f: float
    delta_f: float
    sign: str

    def __post_init__(self):
        if self.sign not in ("+", "-"):
            raise ValueError("sign must be '+' or '-'")
        if not self.gamma_f > 0:
            raise ValueError("filter bandwidth must be positive")

    @property
    def lam(self) -> complex:
        # sigma_+ slots see the conjugated response
        if self.sign == "+":
            return complex(self.gamma_f, -self.delta_f)
        return complex(self.gamma_f, self.delta_f)


@dataclass(frozen=True)
class SlotSequence:
    slots: tuple

    def __post_init__(self):
        slots = tuple(self.slots)
        object.__setattr__(self, "slots", slots)
        signs = [s.sign for s in slots]
        n = signs.count("+")
        if signs != ["+"] * n + ["-"] * (len(signs) - n):
            raise ValueError("all '+' slots must precede the '-' slots")
        if len(slots) < 2:
            raise ValueError("need at least two slots")

    @classmethod
    def intensity(cls, channels: Sequence[tuple]):
        """Intensity-type sequence for channels [(gamma_1, delta_1), ...].

        Slot k and slot 2n+1-k share a filter with opposite signs.
        """
        plus = [FilterSlot(g, d, "+") for g, d in channels]
        minus = [FilterSlot(g, d, "-") for g, d in reversed(channels)]
        return cls(tuple(plus + minus))

    @property
    def n(self):
        return sum(s.sign == "+" for s in self.slots)

    @property
    def m(self):
        return len(self.slots) - self.n

    @property
    def is_intensity(self):
        if self.n != self.m:
            return False
        k = len(self.slots)
        return all(
            self.slots[i].gamma_f == self.slots[k - 1 - i].gamma_f
            and self.slots[i].delta_f == self.slots[k - 1 - i].delta_f
            for i in range(self.n)
        )

    def __len__(self):
        return len(self.slots)


def _neumaier(terms):
    """Compensated elementwise sum of a list of complex arrays."""
    shape = np.shape(terms[0])
    out = []
    for part in (np.real, np.imag):
        total = np.zeros(shape)
        comp = np.zeros(shape)
        for x in terms:
            x = part(x)
            t = total + x
            comp += np.where(np.abs(total) >= np.abs(x), (total - t) + x, (x - t) + total)
            total = t
        out.append(total + comp)
    return out[0] + 1j * out[1]


def perm_sum(lams, gammas, signs, params: AtomParams, cap=DEFAULT_CAP, return_scale=False):
    """Permutation sum for arbitrary exponents.

    ``lams`` and ``gammas`` are sequences (one entry per slot) of scalars or
    mutually broadcastable arrays; the result has the broadcast shape.
    """
    N = len(lams)
    if N > cap:
        raise CapExceeded(f"n+m = {N} exceeds cap {cap}")
    lams = np.broadcast_arrays(*[np.asarray(x, dtype=complex) for x in lams])
    shape = lams[0].shape
    gammas = [np.broadcast_to(np.asarray(g, dtype=float), shape) for g in gammas]
    r = np.broadcast_to(steady_state(params), shape + (3,))

    props = {}

    def prop(suffix):
        # D~^[s](Lambda) for the set of slots in the suffix, signed by its head
        key = (frozenset(suffix), signs[suffix[0]])
        if key not in props:
            lam = sum(lams[j] for j in suffix)
            props[key] = laplace_matrix(lam, signs[suffix[0]], params)
        return props[key]

    chains = {(): r}

    def chain(suffix):
        if suffix not in chains:
            inner = chain(suffix[1:])
            j = suffix[0]
            chains[suffix] = gammas[j][..., None] * np.einsum("...ij,...j->...i", prop(suffix), inner)
        return chains[suffix]

    lam_total = sum(lams)
    terms = []
    for perm in itertools.permutations(range(N)):
        v = chain(perm[1:])
        j1 = perm[0]
        terms.append(gammas[j1] * v[..., SELECT[signs[j1]]] / lam_total)
    value = _neumaier(terms)
    if return_scale:
        scale = sum(np.abs(t) for t in terms)
        return value, scale
    return value


def g_nm(seq: SlotSequence, params: AtomParams, cap=DEFAULT_CAP) -> complex:
    """Stationary filtered correlation function G^(n,m) for a slot sequence."""
    lams = [s.lam for s in seq.slots]
    gammas = [s.gamma_f for s in seq.slots]
    signs = [s.sign for s in seq.slots]
    value, scale = perm_sum(lams, gammas, signs, params, cap=cap, return_scale=True)
    if seq.is_intensity:
        _check_real(value, scale)
    return complex(value)


def _check_real(value, scale, rtol=1e-8):
    bad = np.abs(np.imag(value)) > rtol * np.maximum(scale, 1e-300)
    if np.any(bad):
        raise ImaginaryResidual("intensity correlation has a significant imaginary part")


def physical_spectrum(gamma_f, delta_f, params: AtomParams):
    """Filtered spectrum S(Gamma, delta) = Re{D~^[+](Gamma - i delta) r_inf}_-."""
    gamma_f = np.asarray(gamma_f, dtype=float)
    if np.any(gamma_f <= 0):
        raise ValueError("filter bandwidth must be positive")
    p = gamma_f - 1j * np.asarray(delta_f, dtype=float)
    D = laplace_matrix(p, "+", params)
    s = np.einsum("...ij,j->...i", D, steady_state(params))[..., SELECT["-"]].real
    return s if s.ndim else float(s)


def g11_zero(gamma_f, delta_f, params: AtomParams):
    """First-order field correlation G^(1,1)_0 = Gamma * S(Gamma, delta)."""
    return np.asarray(gamma_f) * physical_spectrum(gamma_f, delta_f, params)


def _g22_lams(gamma_f, delta1, delta2):
    g = np.asarray(gamma_f, dtype=float)
    d1 = np.asarray(delta1, dtype=float)
    d2 = np.asarray(delta2, dtype=float)
    return [g - 1j * d1, g - 1j * d2, g + 1j * d2, g + 1j * d1]


G22_SIGNS = ("+", "+", "-", "-")


def g22_zero(gamma_f, delta1, delta2, params: AtomParams):
    """Zero-delay second-order intensity correlation G^(2,2)_0 (broadcasts over detunings)."""
    if np.any(np.asarray(gamma_f) <= 0):
        raise ValueError("filter bandwidth must be positive")
    lams = _g22_lams(gamma_f, delta1, delta2)
    g = np.asarray(gamma_f, dtype=float)
    value, scale = perm_sum(lams, [g] * 4, G22_SIGNS, params, return_scale=True)
    _check_real(value, scale)
    out = np.real(value)
    return out if np.ndim(out) else float(out)


def g22_perturbative(gamma_f, delta1, delta2, params: AtomParams):
    """Leading weak-field term (Gamma v / 2)^4 P / Q of G^(2,2)_0."""
    G = np.asarray(gamma_f, dtype=float)
    d1 = np.asarray(delta1, dtype=float)
    d2 = np.asarray(delta2, dtype=float)
    g, D, v = params.gamma, params.delta_L, params.v
    P = (
        8 * G * g * d1 * d2
        + 8 * g * G**3
        + 4 * G**2 * (D**2 + 2 * d1 * d2 - D * (d1 + d2))
        + 4 * G**4
        + (d1**2 + d2**2 - D * (d1 + d2)) ** 2
        + g**2 * (4 * G**2 + (d1 + d2) ** 2)
    )
    Q = (
        (g**2 + D**2)
        * (G**2 + d1**2)
        * (G**2 + d2**2)
        * (4 * G**2 + (d1 + d2) ** 2)
        * ((G + g) ** 2 + (D - d1) ** 2)
        * ((G + g) ** 2 + (D - d2) ** 2)
    )
    out = (G * v / 2) ** 4 * P / Q
    return out if np.ndim(out) else float(out)
