# %% [markdown]
# Evolutes and pedal surfaces built from sphere-family envelopes.

# %%
import numpy as np

from sphere_envelopes import Branch, FIXTURES
from sphere_envelopes.applications import evolute_at, verify_corollary, verify_evolute, verify_pedal
from sphere_envelopes.envelope import envelope_surface

# %% [markdown]
# The evolute of the cuspidal cylinder sits at distance equal to the radius
# of curvature of the cusp curve (t^2, t^3): |t| (4 + 9t^2)^(3/2) / 6.

# %%
fs = FIXTURES["parabolic-cylinder"].surface()
for u in (0.25, 0.5, 0.9):
    (root,) = evolute_at(fs, u, 0.0).roots
    print(f"u={u}: |delta|={abs(root.delta):.12f}  expected={u * (4 + 9 * u * u) ** 1.5 / 6:.12f}")

# %% [markdown]
# When the envelope is unique, the centre surface is an evolute of it.

# %%
for name in ("cone-distance", "axis-full", "sphere-geodesic"):
    fx = FIXTURES[name]
    chk = verify_evolute(fx.surface(), fx.radius(), fx.sample_grid(21, 21))
    print(name + "\n  " + "\n  ".join(chk.lines()))

# %% [markdown]
# Spheres through the origin: one envelope is the origin itself and the
# other is twice the pedal surface of the centres, 2 ((x . n) n).

# %%
fx = FIXTURES["sphere-through-origin"]
chk = verify_pedal(fx.surface(), fx.radius(), fx.sample_grid())
print("constant branch:", chk.detail["constant_branch"], "f1 =", chk.detail["f1"])
print("\n".join(chk.lines()))

# %% [markdown]
# If x is an evolute of f, the pedal of x equals the normal pedal of f.
# Checked on the geodesic-sphere pair with an arbitrary base point.

# %%
fx = FIXTURES["sphere-geodesic"]
fs, lam = fx.surface(), fx.radius()
chk = verify_corollary(fs, envelope_surface(fs, lam, Branch.UNIQUE), np.array([0.3, 0.1, -0.2]), fx.sample_grid())
print("\n".join(chk.lines()))
