# %% [markdown]
# # Toy study: curvature and support
#
# Data are three equally weighted atoms at 0 and +-sqrt(1.5) (mean 0,
# variance 1). The score is exact, so any difference between schedules comes
# from the path itself and not from a learned network.

# %%
import numpy as np

from tvsnr import (
    MixtureData,
    curvature,
    default_grid,
    density_shadow,
    get_schedule,
    peak_capture,
    relative_support,
    sample_batch,
    support_crossing,
    three_delta,
)

mix = three_delta()
names = ["VP-ISSNR", "OTFM", "VP-OTFM", "EDM-UT"]

# %% [markdown]
# ## Curvature of probability-flow trajectories

# %%
reports = {}
for name in names:
    spec = get_schedule(name)
    traj = sample_batch(spec, default_grid(spec, 256), mix, 500, seed=0)
    reports[name] = curvature(traj, spec, mix)
    pc = peak_capture(traj.final, mix)
    print(f"{name:10s} global curvature {reports[name].global_curvature:10.4g}  "
          f"peaks {[round(float(f), 3) for f in pc.fractions]}")

# %% [markdown]
# A single atom under OTFM gives straight lines, so the curvature vanishes.

# %%
one = MixtureData.preset("single-delta")
spec = get_schedule("OTFM")
traj = sample_batch(spec, default_grid(spec, 256), one, 200, seed=0)
print(curvature(traj, spec, one).global_curvature)

# %% [markdown]
# ## Relative support b(t) / b(t_max)

# %%
for name in ("VP-OTFM", "SMLD", "VP-ISSNR"):
    spec = get_schedule(name)
    rep = relative_support(spec, default_grid(spec, 10))
    print(f"{name:10s}", np.round(rep.rel_support, 3), " 0.9 reached at t =", round(support_crossing(spec), 4))

# %% [markdown]
# ## Density shadow
#
# The marginal p_t(x) on a (t, x) grid; near t = 0 it collapses to three spikes.

# %%
x_fine = np.linspace(-4, 4, 20001)
t, x, pdf = density_shadow(mix, get_schedule("VP-ISSNR"), t_grid=[1.0, 0.5, 0.1, 0.02], x_grid=x_fine)
for ti, row in zip(t, pdf):
    print(f"t={ti:4.2f}  peak density {row.max():8.3f}  mass {np.trapezoid(row, x):.4f}")
