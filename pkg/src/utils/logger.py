"""Logging configuration utilities."""

import logging
import logging.config
from pathlib import Path

import yaml

PROJECT_ROOT = Path(__file__).resolve().parents[2]
DEFAULT_LOGGING_CONFIG = PROJECT_ROOT / "config" / "logging_config.yaml"


def setup_logging(
    config_path: str | Path | None = None, level: str | None = None
) -> None:
    """Configure logging from a YAML dictConfig file.

    Args:
        config_path: Path to the logging YAML file. Defaults to
            config/logging_config.yaml next to the package.
        level: Optional console level overriding the file (e.g. "DEBUG").
    """
    config_file = Path(config_path) if config_path else DEFAULT_LOGGING_CONFIG
    if config_file.exists():
        with open(config_file) as f:
            config = yaml.safe_load(f)
        for handler in config.get("handlers", {}).values():
            filename = handler.get("filename")
            if filename:
                Path(filename).parent.mkdir(parents=True, exist_ok=True)
        if level:
            config["handlers"]["console"]["level"] = level.upper()
        logging.config.dictConfig(config)
    else:
        logging.basicConfig(level=(level or "INFO").upper())
        logging.warning(f"Logging config not found at {config_file}, using defaults")


def get_logger(name: str) -> logging.Logger:
    """Get logger instance.

    Args:
        name: Logger name (typically __name__ of the module).

    Returns:
        Configured logger instance.
    """
    return logging.getLogger(name)
