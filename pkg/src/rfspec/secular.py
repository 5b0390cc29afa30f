"""Dressed-state parameters and secular-limit formulas for g2 between triplet lines.

The formulas hold for well separated lines with broad filters,
gamma << Gamma << Omega.  Line labels map to filter detunings
F -> -Omega, R -> 0, T -> +Omega.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .atom import AtomParams


class LineLabel(str, Enum):
    F = "F"
    R = "R"
    T = "T"

    def detuning(self, omega):
        return {"F": -omega, "R": 0.0, "T": omega}[self.value]


@dataclass(frozen=True)
class DressedParams:
    theta: float
    omega_R: float
    c2: float
    s2: float
    gamma1: float


def dressed_params(params: AtomParams) -> DressedParams:
    if params.v <= 0:
        raise ValueError("mixing angle undefined for an undriven atom")
    omega = params.omega
    theta = float(np.arccos(np.clip(params.delta_L / omega, -1.0, 1.0)))
    c2 = float(np.cos(theta / 2) ** 2)
    s2 = float(np.sin(theta / 2) ** 2)
    gamma1 = 2 * params.gamma * (c2**2 + s2**2)
    return DressedParams(theta, omega, c2, s2, gamma1)


def parse_pair(pair):
    """'TF' -> (LineLabel.T, LineLabel.F)."""
    if isinstance(pair, str):
        if len(pair) != 2:
            raise ValueError(f"line pair must have two letters, got {pair!r}")
        pair = tuple(pair)
    a, b = pair
    return LineLabel(a), LineLabel(b)


def pair_detunings(pair, params: AtomParams):
    """Filter detunings (delta1, delta2) for a named pair of triplet lines."""
    a, b = parse_pair(pair)
    return a.detuning(params.omega), b.detuning(params.omega)


def secular_g2(pair, tau, dp: DressedParams, gamma_f):
    """Secular-limit normalized g2 for the line pair (first-detected, second-detected)."""
    a, b = parse_pair(pair)
    tau = np.asarray(tau, dtype=float)
    F, R, T = LineLabel.F, LineLabel.R, LineLabel.T
    c4, s4 = dp.c2**2, dp.s2**2
    eg = np.exp(-dp.gamma1 * tau)
    e1 = np.exp(-gamma_f * tau)
    e2 = np.exp(-2 * gamma_f * tau)
    if (a, b) == (R, R):
        out = np.ones_like(tau)
    elif R in (a, b):
        out = (1 - e1) ** 2
    elif a == b:
        out = 1 - eg
    elif (a, b) == (T, F):
        out = c4 / s4 * (eg - 1) + (1 + c4 / s4) * (1 - 0.5 * e1) ** 2 + (1 + s4 / c4) * 0.25 * e2
    else:
        out = s4 / c4 * (eg - 1) + (1 + s4 / c4) * (1 - 0.5 * e1) ** 2 + (1 + c4 / s4) * 0.25 * e2
    return out if out.ndim else float(out)
