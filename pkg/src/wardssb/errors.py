"""Exception types shared across the package."""


class InputError(ValueError):
    """Shapes or indices handed to a routine are inconsistent."""


class CapacityError(RuntimeError):
    """A Fock basis or dense solve would exceed the configured size limit."""


class SolverError(RuntimeError):
    """An eigensolver failed to converge."""


class ChannelAbsentError(RuntimeError):
    """No one-Goldstone channel couples to the requested charge density."""


class ConfigError(ValueError):
    """Run configuration violates the schema."""
