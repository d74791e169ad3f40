"""Classical and improved first-order averaging for highly oscillatory systems."""

from .averaging import (SamplingPlan, birkhoff_average, plan_average,
                        refine_until_stable, trapezoid_average, tune_samples)
from .errors import OscavgError
from .integrate import Trajectory, exp_symmetric2, rk4, symplectic4
from .linear import SkewHermitianOperator, block_rotation_operator, make_operator
from .systems import (OscillatorySystem, averaged_trajectory, classical_field,
                      corrector, corrector_shift, fluctuation_diagnostic,
                      fluctuation_moments,
                      improved_field, lift_initial, reconstruct,
                      reconstruct_trajectory)

__version__ = "0.1.0"

__all__ = [
    "SamplingPlan", "birkhoff_average", "plan_average", "refine_until_stable",
    "trapezoid_average", "tune_samples", "OscavgError", "Trajectory",
    "exp_symmetric2", "rk4", "symplectic4", "SkewHermitianOperator",
    "block_rotation_operator", "make_operator", "OscillatorySystem",
    "averaged_trajectory", "classical_field", "corrector", "corrector_shift",
    "fluctuation_diagnostic", "fluctuation_moments", "improved_field",
    "lift_initial", "reconstruct",
    "reconstruct_trajectory", "__version__",
]
