"""Exception hierarchy and exit-code mapping for the command line."""

import functools
from collections.abc import Callable
from typing import Any

from ..utils.logger import get_logger

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2
EXIT_NON_CONVERGENCE = 3
EXIT_IO = 4


class PolarFFTError(Exception):
    """Base exception for solver errors."""

    pass


class ConfigError(PolarFFTError):
    """Invalid or inconsistent run configuration."""

    pass


class AdmissibilityError(ConfigError):
    """Constitutive constants violate the energetic or plastic bounds."""

    pass


class ConvergenceError(PolarFFTError):
    """An iterative procedure did not reach its tolerance."""

    def __init__(
        self,
        message: str,
        step: int | None = None,
        iterations: int | None = None,
        error: float | None = None,
    ) -> None:
        """Initialize error.

        Args:
            message: Human readable description.
            step: Time step index at which the failure happened.
            iterations: Number of iterations performed.
            error: Last value of the error measure.
        """
        super().__init__(message)
        self.step = step
        self.iterations = iterations
        self.error = error


class IntegrationError(ConvergenceError):
    """The rate-form point integrator failed."""

    pass


class VoxelFormatError(PolarFFTError):
    """Malformed voxel geometry file."""

    pass


def exit_code_for(exc: BaseException) -> int:
    """Map an exception to the command-line exit code.

    Args:
        exc: Raised exception.

    Returns:
        Exit code (2 configuration, 3 non-convergence, 4 I/O, 1 otherwise).
    """
    if isinstance(exc, ConfigError):
        return EXIT_CONFIG
    if isinstance(exc, ConvergenceError):
        return EXIT_NON_CONVERGENCE
    if isinstance(exc, VoxelFormatError | OSError):
        return EXIT_IO
    return EXIT_FAILURE


def exit_on_error(func: Callable[..., int]) -> Callable[..., int]:
    """Turn exceptions raised by a command into exit codes.

    Args:
        func: Command returning an exit code.

    Returns:
        Wrapped command that logs failures and returns the mapped code.
    """

    @functools.wraps(func)
    def wrapper(*args: Any, **kwargs: Any) -> int:
        try:
            return func(*args, **kwargs)
        except ConvergenceError as e:
            details = []
            if e.step is not None:
                details.append(f"step {e.step}")
            if e.iterations is not None:
                details.append(f"{e.iterations} iterations")
            if e.error is not None:
                details.append(f"last error {e.error:.3e}")
            suffix = f" ({', '.join(details)})" if details else ""
            logger.error(
                f"{func.__name__} did not converge{suffix}: {e}. "
                "Consider a lower phase contrast or a larger threshold."
            )
            return exit_code_for(e)
        except PolarFFTError as e:
            logger.error(f"{func.__name__} failed: {e}")
            return exit_code_for(e)
        except OSError as e:
            logger.error(f"{func.__name__} failed on I/O: {e}", exc_info=True)
            return EXIT_IO

    return wrapper
