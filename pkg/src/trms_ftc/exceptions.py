"""Package exception types."""


class ConfigError(ValueError):
    """A configuration document or parameter override is invalid."""


class InfeasibleTrimError(RuntimeError):
    """No equilibrium input exists inside the actuator limits."""


class DesignError(RuntimeError):
    """Model construction or gain synthesis violated a required condition."""
