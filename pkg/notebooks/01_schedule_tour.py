# %% [markdown]
# # A tour of the schedule catalog
#
# Each schedule is a pair of curves: the total variance tau^2(t) and the
# signal-to-noise ratio gamma(t). The kernel scales a(t), b(t) and the SDE
# coefficients f(t), g^2(t) all follow from these two.

# %%
import numpy as np

from tvsnr import CATALOG, eval_point, get_schedule, kernel, sde_coeffs, to_kernel

# %%
for name, spec in CATALOG.items():
    lo, hi = spec.interval
    ends = eval_point(spec, np.array([lo, hi]))
    smax, smin = np.exp(ends.log_snr_sq)
    print(f"{name:12s} t in [{lo:g}, {hi:g}]  gamma^2 from {smax:.3g} down to {smin:.3g}")

# %% [markdown]
# Variance-preserving variants keep gamma and pin tau^2 to one.

# %%
t = np.linspace(0.05, 0.95, 7)
for name in ("OTFM", "VP-OTFM"):
    p = eval_point(get_schedule(name), t)
    k = to_kernel(p)
    print(name, "tau^2:", np.round(p.tv_sq, 4))
    print(name, "a:    ", np.round(k.a, 4))
    print(name, "b:    ", np.round(k.b, 4))

# %% [markdown]
# The VP-OTFM midpoint: a = b = 1/sqrt(2), drift -2 and diffusion 4.

# %%
spec = get_schedule("VP-OTFM")
print(kernel(spec, 0.5), sde_coeffs(spec, 0.5))

# %% [markdown]
# The molecule preset of ISSNR and the NFE-scaled steepness rule.

# %%
from tvsnr import issnr_scaled_eta

mol = get_schedule("issnr-mol")
print(mol.params)
for nfe in (8, 32, 128, 512):
    print(nfe, round(issnr_scaled_eta(nfe), 3))
