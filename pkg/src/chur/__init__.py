"""Numerical verification toolkit for the uncertainty relation obeyed by
the characteristic functions of conjugate position and momentum densities.
"""

__version__ = "0.1.0"

from .charfunc import (char_momentum, char_momentum_autocorr, char_position,
                       char_sweep, displacement_expectation, lower_bound_check)
from .core import (ChurEvaluation, bound, bound_literal, evaluate_chur,
                   evaluate_grid, gram_determinant, gram_matrix,
                   hur_comparison, proof_chain_check)
from .errors import (ChurError, ConfigError, DomainOverflow, GridTooSmall,
                     InvalidShots, NonIntegrableMask, NotUnitary,
                     NotUnitVector, ShiftTooLarge, TeethUnresolved,
                     ZeroVariance)
from .grid import (GridSpec, MixedState, StateVector, load_state, mean,
                   overlap, save_state, to_momentum, to_position, translate,
                   variance)
from .mask import (DetectionProfile, MaskSpec, default_y_grid,
                   detect_momentum, detect_position, detection_profile,
                   mask_from_file, mask_transform_identity,
                   mask_uncertainty_relation, random_smooth_mask)
from .protocols import (FiniteDimResult, LqcResult, LqcScenario, QubitReadout,
                        WeylPair, finite_dim_chur, finite_dim_sweep,
                        lqc_bound_check, qubit_exact, qubit_sampled)
from .states import (CombSpec, GaussianSpec, RandomStateSpec, hermite_modes,
                     make_comb, make_gaussian, make_random)
from .tightness import (TightnessQuery, TightnessResult, gap_profile,
                        maximize_lambda)
