class SympLieError(Exception):
    pass


class PreconditionError(SympLieError, ValueError):
    pass


class InvalidSymplecticStructure(SympLieError, ValueError):
    pass


class UnsupportedAlgebraError(SympLieError, ValueError):
    pass


class DomainError(SympLieError, ValueError):
    pass


class ConsistencyError(SympLieError, RuntimeError):
    pass


class IntegrationIntegrityError(SympLieError, RuntimeError):
    pass


class SchemaError(SympLieError, ValueError):
    """A CLI configuration that does not match the expected shape."""
