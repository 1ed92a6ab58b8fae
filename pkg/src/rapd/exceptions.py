"""Exception types shared across the package.

The CLI maps these onto exit codes; library users can catch them
individually.
"""


class ConfigError(Exception):
    """Malformed or inconsistent experiment configuration (exit code 1)."""


class DimensionError(ValueError):
    """Operands with incompatible shapes or block structure."""


class DomainError(ValueError):
    """Point outside the domain of a function or geometry."""


class ParameterError(ValueError):
    """Invalid numeric parameter (nonpositive step, bad probability, ...)."""


class RegimeError(RuntimeError):
    """Method/problem mismatch, e.g. accelerated steps without strong
    convexity or with a coupling that is not linear in the dual (exit
    code 2)."""


class DivergenceError(RuntimeError):
    """Iterates exceeded the divergence guard (exit code 3)."""
