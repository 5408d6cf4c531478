# %% [markdown]
# Unit spheres centred on the cuspidal cylinder x = (u^2, u^3, v).
#
# The centre surface is singular along u = 0, but it carries a smooth frame,
# so the sphere family can still be classified and its envelopes built.

# %%
import numpy as np

from sphere_envelopes import Branch, FIXTURES, classify_grid, envelope_count, sample_branch, verify_envelope
from sphere_envelopes.discriminant import decompose_d
from sphere_envelopes.envelope import SampledMap
from sphere_envelopes.frame import Domain

fx = FIXTURES["parabolic-cylinder"]
fs, lam = fx.surface(), fx.radius()
grid = Domain(-1, 1, -1, 1).grid(101, 101)

# %% [markdown]
# Classification: two creators everywhere except the singular column, where
# the solution set is a segment.

# %%
cg = classify_grid(fs, lam, grid)
print("\n".join(cg.summary.lines()))
print("count:", envelope_count(fs, lam, grid).count.value)

# %% [markdown]
# The two branches against their closed form
# (u^2 -+ 3u/r, u^3 +- 2/r, v) with r = sqrt(9u^2 + 4).

# %%
r = np.sqrt(9 * grid.UU**2 + 4)
for branch, sign in ((Branch.PLUS, -1), (Branch.MINUS, 1)):
    eb = sample_branch(fs, lam, grid, branch)
    closed = np.stack([grid.UU**2 + sign * 3 * grid.UU / r, grid.UU**3 - sign * 2 / r, grid.VV], -1)
    print(branch.value, "max error", np.max(np.abs(eb.f - closed)), "verified", eb.report.passed)

# %% [markdown]
# The discriminant set D holds both envelope sheets plus one circle per
# singular sample: the unit circles x^2 + y^2 = 1 at each height v.  Their
# union is the cylinder (cos t, sin t, v), which lies in D but is not an
# envelope: it fails the on-sphere condition almost everywhere.

# %%
ds = decompose_d(fs, lam, fx.sample_grid(21, 11), m=32)
print(ds.counts, "max oracle residual", ds.max_residual)
patch = SampledMap(lambda u, v: np.stack([np.cos(u), np.sin(u), v + 0 * u], -1))
rep = verify_envelope(patch, fs, lam, grid)
print("cylinder patch fails at", f"{100 * rep.fail_fraction_sphere:.1f}%", "of samples")
