# %% [markdown]
# # Filtered fluorescence spectrum
# A driven two-level atom seen through a tunable Lorentzian filter.
# Rates are in units of the atomic decay rate.

# %%
import numpy as np
from scipy import signal

from rfspec import AtomParams, physical_spectrum, q_roots, steady_state

p = AtomParams(v=10.0, delta_L=2.0)
print("generalized Rabi frequency", p.omega)
print("steady-state excited population", steady_state(p)[2].real)
print("resonant roots at v=10", np.round(q_roots(AtomParams(v=10.0)), 6))

# %% [markdown]
# Three lines appear once the filter is narrower than their spacing.
# Wider filters smear the sidebands and pull the maxima inward.

# %%
d = np.linspace(-15, 15, 3001)
for G in (0.1, 0.5, 1.0, 2.0):
    S = physical_spectrum(G, d, p)
    idx, _ = signal.find_peaks(S)
    print(f"Gamma={G:4}: maxima at {np.round(d[idx], 2)}")
