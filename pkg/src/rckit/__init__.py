"""Discrete-time robust repetitive control toolkit.

Synthesis of internal-model repetitive controllers with an approximate
zero-phase plant inverse, small-gain and exact stability analysis, a
streaming runtime realization, and a hybrid sampled-data simulator for the
bundled elastic-joint robot-arm case study.
"""

from .arm import PlantParams, SignalSpec, backstepping_control, observer_step, plant_deriv
from .config import ConfigError, ToolConfig, default_config_dict, load_config
from .design import (DesignError, RcDesign, SensitivityCurve, WeightFunction,
                     closed_loop_unstable_count, make_weight, samples_per_period,
                     sensitivity_curve, stability_margin, synthesize, zpetc)
from .linalg import (ContinuousStateSpace, DiscreteStateSpace, mat_exp,
                     ss_to_tf, zoh_discretize)
from .polynomials import (Polynomial, RationalFunction, RootFindingError, ZeroSplit,
                          count_roots_in_disk, freq_response, is_schur_stable,
                          poly_from_roots, poly_roots, split_zeros)
from .runtime import (RepetitiveController, UncertifiedDesignError,
                      apply_difference_equation, expanded_taps)
from .simulation import (ExactnessReport, SimConfig, SimResult, SimulationDiverged,
                         SweepResult, decomposition_check, iss_sup_norm,
                         rk4_order_ratio, run_exactness, simulate, sweep_alpha)

__version__ = "0.1.0"
