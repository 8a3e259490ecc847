"""physqa: deterministic 2D physics simulation and causal QA dataset generation."""

__version__ = "0.1.0"

from .engine import ENGINE_VERSION, SimulationBlowupError, SimulationTrace, simulate
from .scene import DynamicObject, SceneSpec, SceneValidationError, StaticElement

__all__ = [
    "ENGINE_VERSION",
    "SimulationBlowupError",
    "SimulationTrace",
    "simulate",
    "DynamicObject",
    "SceneSpec",
    "SceneValidationError",
    "StaticElement",
    "__version__",
]
