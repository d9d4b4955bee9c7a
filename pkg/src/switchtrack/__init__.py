"""Tracking the best expert with long-term memory.

Linear-time relative entropy projection onto the simplex with lower box
constraints, the PoDS-theta / Share-theta learners and their relatives,
closed-form regret bounds and a small experiment harness.
"""
from .bounds import BoundInputs, figure1_table, optimal_tuning, pods_bound
from .learners import (EwState, FixedShareState, MppState, NumericalError, PodsState,
                       ShareState, SpecialistState, fixed_share_update, loss_update,
                       mpp_step, pods_step, predict, share_step, specialists_step, step)
from .projection import ProjectionResult, project, project_oracle, verify_kkt_form
from .schemes import MixingScheme, beta_from_scheme, scheme_weights
from .selection import select_kth
from .simplex import SimplexError, binary_entropy, kl_divergence, normalize

__version__ = "0.1.0"
