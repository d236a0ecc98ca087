# %% [markdown]
# # Solver convergence
#
# With a single atom at the origin the probability-flow ODE is linear,
# x(t) = x(t_max) b(t) / b(t_max), so global errors are known exactly.

# %%
import numpy as np

from tvsnr import MixtureData, get_schedule, kernel, solve_euler, solve_heun, uniform_grid

one = MixtureData.preset("single-delta")
spec = get_schedule("VP-SMLD")
lo, hi = spec.interval
x0 = np.array([[1.3], [-0.7]])
exact = x0 * float(kernel(spec, lo).b / kernel(spec, hi).b)

# %%
steps = np.array([16, 32, 64, 128, 256])
errs = np.array([
    [np.max(np.abs(solve(spec, uniform_grid(int(n), lo, hi), one, x0).final - exact))
     for solve in (solve_euler, solve_heun)]
    for n in steps
])
for n, (e, h) in zip(steps, errs):
    print(f"{n:4d}  euler {e:.3e}  heun {h:.3e}")
slopes = np.polyfit(np.log(1.0 / steps), np.log(errs), 1)[0]
print("observed orders:", np.round(slopes, 2))

# %% [markdown]
# ## Stochastic sampling
#
# lambda = 0 is the ODE; larger lambda adds Langevin-like noise while keeping
# the same marginals. Final states still land on the atoms.

# %%
from tvsnr import default_grid, peak_capture, sample_batch, three_delta

mix = three_delta()
spec = get_schedule("VP-ISSNR")
for lam in (0.0, 0.5, 1.0):
    traj = sample_batch(spec, default_grid(spec, 512), mix, 2000, seed=1, solver="sde", lam=lam)
    pc = peak_capture(traj.final, mix)
    print(f"lambda={lam:3.1f}  outside={float(pc.outside_fraction):.4f}  "
          f"peaks={[round(float(f), 3) for f in pc.fractions]}")
