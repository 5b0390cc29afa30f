# %% [markdown]
# # Frequency-resolved photon correlations
# Normalized g2 between two filtered channels as a function of the delay,
# compared with the dressed-state (secular) formulas.

# %%
import numpy as np

from rfspec import AtomParams
from rfspec.delay import g2_curve
from rfspec.secular import dressed_params, pair_detunings, secular_g2

p = AtomParams(v=200.0)
dp = dressed_params(p)
G = 20.0
taus = np.linspace(0, 0.3, 7)

# %%
for pair in ("RR", "RT", "TT", "TF"):
    d1, d2 = pair_detunings(pair, p)
    full = g2_curve(G, d1, d2, taus, p)
    approx = secular_g2(pair, taus, dp, G)
    print(pair, np.round(full, 3), "secular", np.round(approx, 3))

# %% [markdown]
# Detuning the laser makes sideband pairs bunch at zero delay.

# %%
pd = AtomParams(v=200.0, delta_L=120.0)
for pair in ("FT", "TF"):
    d1, d2 = pair_detunings(pair, pd)
    print(pair, "g2(0) =", g2_curve(G, d1, d2, [0.0], pd)[0])

# %% [markdown]
# Far beyond the correlation time the channels decouple.

# %%
print("g2 at tau=30:", g2_curve(1.0, 3.0, -7.0, [30.0], AtomParams(v=10.0, delta_L=2.0))[0])
