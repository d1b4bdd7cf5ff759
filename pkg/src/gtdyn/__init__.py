"""Markov dynamics on the dual object of U(N): chains, links, and the boundary."""
from .bdp1 import Bdp1Chain, dougall_rhs, log_dougall_rhs
from .boundary import EdreiOmega, LaurentWindow, boundary_link, phi_coefficients, validate_omega
from .exceptions import (GtdynError, MissingValueError, NumericDomainError, ScopeError,
                         SpaceMismatchError, WindowError)
from .links import SparseKernel, dim_gt_oracle, dim_weyl, link_kernel, link_row
from .nchain import NChain, OmegaPoint
from .params import AdmissiblePair, UvParams, ZwParams, measure_finite, shift_params
from .trajectory import Trajectory
from .verify import BoxTruncation, VerificationReport

__version__ = "0.1.0"

__all__ = [
    "AdmissiblePair",
    "Bdp1Chain",
    "BoxTruncation",
    "EdreiOmega",
    "GtdynError",
    "LaurentWindow",
    "MissingValueError",
    "NChain",
    "NumericDomainError",
    "OmegaPoint",
    "ScopeError",
    "SpaceMismatchError",
    "SparseKernel",
    "Trajectory",
    "UvParams",
    "VerificationReport",
    "WindowError",
    "ZwParams",
    "boundary_link",
    "dim_gt_oracle",
    "dim_weyl",
    "dougall_rhs",
    "link_kernel",
    "link_row",
    "log_dougall_rhs",
    "measure_finite",
    "phi_coefficients",
    "shift_params",
    "validate_omega",
]
