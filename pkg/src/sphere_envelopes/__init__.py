"""Envelopes of sphere families over framed surfaces.

Submodules: core (jets, tolerances), dsl (surface expressions), frame
(framed surfaces and invariants), creative (creative condition and the
Sigma1-Sigma5 classification), envelope (branches, counting, witnesses),
discriminant (D envelope sampling), applications (evolutes, pedals),
fixtures, export, config and cli.
"""

from .core import DEFAULT_TOLERANCES, Jet2, Tolerances, Vec3J, jet_lift, near_zero
from .creative import (CreatorSolution, Kind, Sigma, classify_grid, creator_identity_residual, jays,
                       solve_at, solve_creator)
from .dsl import parse, parse_vector, to_source
from .envelope import (Branch, BranchSpec, Count, envelope_at, envelope_count, envelope_frame,
                       multiplicity_witness, sample_branch, verify_envelope)
from .fixtures import FIXTURES, get_fixture
from .frame import (Domain, FramedSurface, basic_invariants, derive_frame, integrability_residuals,
                    reparametrize, rotate_frame)

__version__ = "0.1.0"
