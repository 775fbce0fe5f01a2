"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """Invalid configuration: unknown names, bad field values, malformed files."""


class NumericalError(RuntimeError):
    """A numerical procedure failed (degenerate input, no usable data, ...)."""


class DegenerateLatentError(NumericalError):
    """A latent vector mapped to the zero vector before normalization."""


class ProjectionFailureError(NumericalError):
    """All restarts of an iterative projection hit degenerate latents."""


class InsufficientDataError(NumericalError):
    """Not enough valid points remain for a fit."""
