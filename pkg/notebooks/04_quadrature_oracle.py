# %% [markdown]
# # Brute-force check
# The closed forms against direct integration of the filtered multi-time
# correlation, which shares no algebra with them.

# %%
from rfspec import AtomParams
from rfspec.delay import DelayRequest, g22_tau
from rfspec.quadrature import brute_force_g22_tau, brute_force_gnm
from rfspec.spectral import SlotSequence, g22_zero

p = AtomParams(v=10.0, delta_L=2.0)
seq = SlotSequence.intensity([(1.0, 3.0), (1.0, -7.0)])
val, err = brute_force_gnm(seq, p, return_error=True)
print("quadrature", val.real, "+-", err, "closed form", g22_zero(1.0, 3.0, -7.0, p))

# %%
r = DelayRequest(1.0, 3.0, -7.0, 1.0, p)
print("delayed: quadrature", brute_force_g22_tau(r), "closed form", g22_tau(r))
