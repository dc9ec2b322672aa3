"""lpnkit: a solver toolkit for the Learning Parity with Noise problem.

Plan attack parameters, form weight-w combinations of oracle samples via
birthday bucketing, test all sub-key hypotheses with the fast
Walsh-Hadamard transform, and recover planted keys end to end.
"""

from .combiner import CombinedEquation, CombineResult, HalfCombination, combine
from .core import (
    BitVec,
    LpnInstance,
    Sample,
    SplitMix64,
    generate_instance,
    inner_product,
    oracle_sample,
    pileup_experiment,
    piling_up_bias,
    required_samples,
)
from .errors import InfeasiblePlanError, LpnError, ResourceBudgetError
from .planner import (
    Plan,
    TableRow,
    choose_b,
    choose_w,
    compute_T,
    cube_root_sample_bound,
    decimation_plan,
    emit_table,
    make_plan,
    minimum_samples,
    round_params,
)
from .solver import SolveResult, decimate, recover_suffix, solve, verify_key
from .walsh import (
    WalshSpectrum,
    best_candidate,
    brute_force_spectrum,
    build_spectrum,
    fwht_in_place,
)

__version__ = "0.1.0"
