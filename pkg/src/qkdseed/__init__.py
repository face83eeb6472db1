"""Secure key bounds for QKD privacy amplification with non-uniform seeds."""

from .bounds import (BoundComparison, BoundInputs, KeyLengthBudget, SecurityParams, Tighter,
                     alternative_bound, compare_bounds, epsilon_secure, key_length,
                     key_length_budget, theorem1_bound)
from .decoy_bb84 import (ChannelModel, KeyRateResult, ProtocolParams, decoy_estimates,
                         gain_qber, key_rate, scan, table1_presets)
from .entropy import (MinEntropyEstimate, SeedQuality, SymbolDistribution,
                      estimate_min_entropy_mcv, min_entropy, seed_quality_from_per_bit)
from .errors import (ConvergenceError, EstimationError, ParameterError, ResourceError,
                     ValidationError)
from .hashing import (HashFamilyDescriptor, ToeplitzSeed, collision_probability_exhaustive,
                      privacy_amplify, toeplitz_hash)
from .oracle import (JointDistribution, SeedDistribution, adversarial_seed_distributions,
                     conditional_min_entropy, delta_exact, uniformity_distance, verify_theorem1)

__version__ = "0.1.0"
