class ConfigurationError(ValueError):
    """Invalid parameters, schedules, or experiment configuration."""


class InvalidMatchgateError(ValueError):
    """A and B blocks violate the determinant condition."""


class NonGaussianError(ValueError):
    """Gate does not map single Majoranas to linear combinations of Majoranas."""


class NonCliffordError(ValueError):
    """Gate does not map Pauli strings to Pauli strings."""
