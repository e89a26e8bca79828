"""
Environment configuration loader for beurling-kit
Handles .env file loading and validation of limits, defaults and logging
"""

import os
from pathlib import Path
from typing import Any, Dict, Optional

import structlog
from dotenv import load_dotenv

logger = structlog.get_logger(__name__)

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")
LOG_FORMATS = ("json", "console")


class EnvironmentLoader:
    """Load and validate environment configuration"""

    def __init__(self, env_file: Optional[str] = None):
        """Initialize environment loader

        Args:
            env_file: Path to .env file (default: .env in project root)
        """
        self.project_root = Path(__file__).parent.parent.parent
        self.env_file = Path(env_file) if env_file else self.project_root / ".env"

    def load(self) -> Dict[str, Any]:
        """Load environment variables and return configuration dict"""

        # Load .env file if it exists; real environment variables win
        if self.env_file.exists():
            load_dotenv(self.env_file, override=False)
            logger.info("Loaded environment file", path=str(self.env_file))
        else:
            logger.debug("No .env file found", expected_path=str(self.env_file))

        config = {
            # Resource limits
            "limits": {
                "point_cap": self._number("BEURLING_KIT_CAP", "5000000", int),
                "lp_max_frequencies": self._number("BEURLING_KIT_LP_FREQUENCIES", "200", int),
                "lp_max_points": self._number("BEURLING_KIT_LP_POINTS", "2000", int),
            },

            # Defaults applied when neither the CLI nor the scenario sets them
            "defaults": {
                "seed": self._number("BEURLING_KIT_SEED", "42", int),
                "tolerance": self._number("BEURLING_KIT_TOLERANCE", "1e-9", float),
                "jobs": self._number("BEURLING_KIT_JOBS", "1", int),
            },

            # Logging Configuration
            "logging": {
                "level": os.getenv("LOG_LEVEL", "INFO").upper(),
                "format": os.getenv("LOG_FORMAT", "json").lower(),
            },

            # Report output
            "output": {
                "dir": os.getenv("BEURLING_KIT_OUT", "reports"),
            },
        }

        self._validate_config(config)
        return config

    @staticmethod
    def _number(env_var: str, default: str, cast) -> Any:
        raw = os.getenv(env_var, default)
        try:
            return cast(float(raw)) if cast is int else cast(raw)
        except ValueError:
            raise ValueError(f"Environment variable {env_var} must be numeric, got {raw!r}")

    def _validate_config(self, config: Dict[str, Any]) -> None:
        """Validate ranges of the loaded configuration"""

        checks = [
            ("BEURLING_KIT_CAP", config["limits"]["point_cap"] >= 1),
            ("BEURLING_KIT_LP_FREQUENCIES", config["limits"]["lp_max_frequencies"] >= 1),
            ("BEURLING_KIT_LP_POINTS", config["limits"]["lp_max_points"] >= 1),
            ("BEURLING_KIT_SEED", config["defaults"]["seed"] >= 0),
            ("BEURLING_KIT_TOLERANCE", config["defaults"]["tolerance"] > 0),
            ("BEURLING_KIT_JOBS", config["defaults"]["jobs"] >= 1),
            ("LOG_LEVEL", config["logging"]["level"] in LOG_LEVELS),
            ("LOG_FORMAT", config["logging"]["format"] in LOG_FORMATS),
        ]
        invalid = [env_var for env_var, ok in checks if not ok]

        if invalid:
            logger.error(
                "Invalid environment variables",
                invalid=invalid,
                env_file=str(self.env_file)
            )
            raise ValueError(
                f"Invalid environment variables: {', '.join(invalid)}. "
                f"Please check your environment or the .env file at {self.env_file}"
            )

        logger.debug("Environment configuration validated successfully")


# Global configuration instance
_config_instance = None


def get_config() -> Dict[str, Any]:
    """Get the global configuration instance"""
    global _config_instance

    if _config_instance is None:
        loader = EnvironmentLoader()
        _config_instance = loader.load()

    return _config_instance


def reload_config(env_file: Optional[str] = None) -> Dict[str, Any]:
    """Reload configuration from environment file"""
    global _config_instance

    loader = EnvironmentLoader(env_file)
    _config_instance = loader.load()

    return _config_instance
