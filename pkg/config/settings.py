# config/settings.py - SOLVER CONFIGURATION

from pathlib import Path
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Global solver configuration, overridable through the environment or a .env file"""

    model_config = SettingsConfigDict(env_file=".env", env_prefix="MIXEDWAVE_", extra="ignore")

    # Application settings
    APP_NAME: str = "MixedWave"
    APP_VERSION: str = "1.0.0"
    LOG_LEVEL: str = "INFO"

    # Quadrature
    QUADRATURE_DEGREE: int = 6
    EDGE_GAUSS_POINTS: int = 4
    DUALITY_GAUSS_POINTS: int = 2

    # Tolerances
    SOLVE_RESIDUAL_TOL: float = 1e-11
    MEAN_PRESERVATION_TOL: float = 1e-13
    COEFFICIENT_FLOOR: float = 1e-12
    JACOBIAN_FLOOR: float = 1e-14
    CLOCK_TOL: float = 1e-12

    # Time stepping defaults (numerical tests use T=1, tau=1/1000)
    DEFAULT_TAU: float = 1e-3
    DEFAULT_FINAL_TIME: float = 1.0
    PERMC_SPEC: str = "COLAMD"
    SHOW_PROGRESS: bool = False

    # Convergence studies
    DESK_MAX_LEVEL: int = 32
    MAX_WORKERS: int = 1

    # Paths
    BASE_DIR: Path = Path(__file__).parent.parent
    OUTPUTS_DIR: Path = BASE_DIR / "outputs"


# Global settings instance
settings = Settings()
