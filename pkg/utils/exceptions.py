# utils/exceptions.py - ERROR HIERARCHY

from typing import Optional


class MixedWaveError(Exception):
    """Base class for all solver errors"""


class MeshError(MixedWaveError, ValueError):
    """Invalid mesh input or mesh construction failure"""


class MeshNestingError(MeshError):
    """Fields or meshes that are expected to be nested are not"""


class QuadratureError(MixedWaveError, ValueError):
    """Unsupported quadrature request"""


class DegenerateElementError(MixedWaveError, ValueError):
    """Affine element map with vanishing Jacobian"""


class CoefficientError(MixedWaveError, ValueError):
    """Model coefficient not uniformly positive"""


class SolverError(MixedWaveError, RuntimeError):
    """Linear solver failure or residual contract violation"""


class PostprocessError(MixedWaveError, RuntimeError):
    """Local reconstruction broke the mean-preservation constraint"""


class AnalysisError(MixedWaveError, ValueError):
    """Invalid input to error norms, rates or studies"""


class ConfigError(MixedWaveError, ValueError):
    """Invalid run configuration; always names the offending key"""

    def __init__(self, key: Optional[str], message: str):
        self.key = key
        prefix = f"{key}: " if key else ""
        super().__init__(f"{prefix}{message}")
