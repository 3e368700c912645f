"""Pure-state quantum marginal problems via two-party separability.

Subpackages: symgroup (symmetric-group representations), permalg (exact
permutation-operator algebra), ame (closed-form existence tests),
hierarchy (N-copy feasibility and dual witnesses), codes (quantum code
feasibility), solve (exact LP / dense SDP / SDPA interchange).
"""

from . import ame, blocks, codes, exactla, hierarchy, permalg, solve, symgroup
from .ame import AmeCandidate, FeasibilityReport, candidate, check_existence, scan
from .codes import CodeParams, code_check, singleton_check, verify_code_state
from .errors import (
    InternalConsistencyError,
    InvalidInputError,
    QmarginalError,
    ResourceCapError,
    SolverConvergenceError,
    UnsupportedFeatureError,
)
from .hierarchy import (
    BlockSdp,
    Certificate,
    MarginalSpec,
    WitnessLp,
    ame_marginal_spec,
    assemble_dual_witness,
    assemble_primal,
    certify,
    level_check,
    solve_primal,
    witness_value,
)

__version__ = "0.1.0"
