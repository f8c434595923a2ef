"""Bounded Euler classes, Milnor-Wood bounds and signature oracles for surface bundles."""

__version__ = "0.1.0"

from .circle import (LiftedMap, MoebiusMap, PLMap, Rotation, canonical_lift,  # noqa: E402
                     classical_euler_cocycle, compose, translation_number)
from .errors import (AmbiguousLift, BundleSigError, DegenerateMap, DimensionMismatch,  # noqa: E402
                     InternalConsistency, MixedExactnessError, NotHomogeneous, NotOrientable,
                     NotSurjective, NotValidated, RelatorViolation, ZeroVector)
from .surface import (FundamentalCycle, Representation, SurfaceGroupPresentation,  # noqa: E402
                      build_fundamental_cycle, evaluate_cocycle_bar, evaluate_euler_bar,
                      evaluate_euler_relator_lift, milnor_wood_check)
from .wreath import (Permutation, WreathElement, cocycle, kernel_defect, section,  # noqa: E402
                     wreath_action, wreath_multiply)

__all__ = [
    "AmbiguousLift", "BundleSigError", "DegenerateMap", "DimensionMismatch", "FundamentalCycle",
    "InternalConsistency", "LiftedMap", "MixedExactnessError", "MoebiusMap", "NotHomogeneous",
    "NotOrientable", "NotSurjective", "NotValidated", "PLMap", "Permutation", "RelatorViolation",
    "Representation", "Rotation", "SurfaceGroupPresentation", "WreathElement", "ZeroVector",
    "build_fundamental_cycle", "canonical_lift", "classical_euler_cocycle", "cocycle", "compose",
    "evaluate_cocycle_bar", "evaluate_euler_bar", "evaluate_euler_relator_lift", "kernel_defect",
    "milnor_wood_check", "section", "translation_number", "wreath_action", "wreath_multiply",
]
