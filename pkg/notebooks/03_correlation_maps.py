# %% [markdown]
# # Two-photon correlation maps
# Zero-delay g2 and the connected part dG2 over both filter detunings.

# %%
import numpy as np
from scipy import ndimage

from rfspec import AtomParams
from rfspec.delay import delta_g2
from rfspec.spectral import g11_zero, g22_zero

G = 0.4
p = AtomParams(v=100.0)
d = np.linspace(-160, 160, 81)
D1, D2 = np.meshgrid(d, d, indexing="ij")
g2 = g22_zero(G, D1, D2, p) / (g11_zero(G, D1, p) * g11_zero(G, D2, p))
i, j = np.unravel_index(np.argmax(g2), g2.shape)
print("strongest g2", g2[i, j], "at", d[i], d[j])
print("swap residual", np.abs(g2 - g2.T).max())

# %% [markdown]
# With a detuned drive the connected part concentrates on seven resonances.

# %%
p7 = AtomParams(v=50.0, delta_L=80.0)
e = np.linspace(-2 * p7.omega, 2 * p7.omega, 81)
E1, E2 = np.meshgrid(e, e, indexing="ij")
a = np.abs(delta_g2(G, E1, E2, p7))
labels, n = ndimage.label(a >= 0.1 * a.max(), structure=np.ones((3, 3)))
centers = np.interp(ndimage.center_of_mass(a, labels, range(1, n + 1)), np.arange(len(e)), e)
print(n, "clusters at", np.round(centers / p7.omega, 2).tolist(), "(units of Omega)")
