# %% [markdown]
# How many envelopes does a sphere family have?  The answer follows from
# which of the five point classes is dense: two, one, one, uncountably many,
# uncountably many, or none when the family is not creative.

# %%
import numpy as np

from sphere_envelopes import Branch, BranchSpec, FIXTURES, envelope_at, envelope_count, multiplicity_witness

for name in ("translated-planes", "cone-distance", "axis-full", "axis-half", "fixed-sphere", "concentric"):
    fx = FIXTURES[name]
    print(f"{name:18s}", envelope_count(fx.surface(), fx.radius(), fx.sample_grid()).count.value)

# %% [markdown]
# Spheres of radius v/2 centred on the z axis at height v.  Each sphere meets
# the cone of envelopes in a whole circle, so a branch is chosen by an angle
# theta(u, v): f = ((sqrt 3/4) v cos theta, (sqrt 3/4) v sin theta, (3/4) v).

# %%
fx = FIXTURES["axis-half"]
fs, lam = fx.surface(), fx.radius()
for theta in (0.0, np.pi / 3, 1.0):
    print(f"theta={theta:.4f}", envelope_at(fs, lam, 0.0, 2.0, BranchSpec(Branch.CUSTOM, theta, 0.0)).f)

# %% [markdown]
# A witness of uncountability: two envelopes that agree outside a small
# ball and differ at its centre.  Scaling the bump gives a continuum.

# %%
for name, point in (("fixed-sphere", (0.0, 0.0)), ("axis-half", (0.0, 1.0))):
    fx = FIXTURES[name]
    w = multiplicity_witness(fx.surface(), fx.radius(), point, r=0.5)
    print(name, "both verified:", w.report0.passed and w.report_eps.passed,
          "differ by", round(w.difference_at_point, 3), "outside:", w.max_difference_outside)
