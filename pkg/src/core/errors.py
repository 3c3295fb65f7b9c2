class PolyMMPError(Exception):
    """Base class for every failure the engine reports."""

    exit_code: int = 5


class InputError(PolyMMPError):
    exit_code = 2


class SchemaError(InputError):
    exit_code = 2


class UnboundedError(InputError):
    pass


class InvariantError(PolyMMPError):
    exit_code = 3


class AmplenessError(InvariantError):
    exit_code = 4


class ConsistencyError(PolyMMPError):
    """An internal cross-check disagreed with a structural result."""

    exit_code = 5
