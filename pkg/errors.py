"""
Error types shared by the geometry modules, the CLI and the results API.
Every error carries a stable code so it can be written out as JSON.
"""


class CollarError(Exception):
    code = 'collar_error'

    def __init__(self, message, **details):
        super().__init__(message)
        self.message = message
        self.details = details

    def to_dict(self):
        return {
            'error': self.code,
            'message': self.message,
            'details': {key: _jsonable(value) for key, value in self.details.items()},
        }


class DomainError(CollarError, ValueError):
    """Argument outside the domain of a formula."""
    code = 'domain_error'


class NotHyperbolicError(CollarError, ValueError):
    code = 'not_hyperbolic'


class IndeterminateError(CollarError):
    """Boundary points too close to decide linking."""
    code = 'indeterminate'


class SpecError(CollarError, ValueError):
    """Invalid pants decomposition."""
    code = 'invalid_spec'


class ConstructionError(CollarError):
    code = 'construction_failed'


class UnknownLabelError(CollarError, KeyError):
    code = 'unknown_label'

    def __str__(self):
        return self.message


class EnumerationBudgetError(CollarError):
    """Element budget exhausted; `partial` holds the classes below `certified_cutoff`."""
    code = 'enumeration_budget'

    def __init__(self, message, partial=None, certified_cutoff=0.0, **details):
        super().__init__(message, certified_cutoff=certified_cutoff, **details)
        self.partial = list(partial or [])
        self.certified_cutoff = certified_cutoff


class NotFoundError(CollarError):
    code = 'not_found'


class OracleRefusal(CollarError):
    code = 'oracle_refused'


class ConfigError(CollarError, ValueError):
    code = 'invalid_config'


def _jsonable(value):
    if isinstance(value, (str, int, float, bool)) or value is None:
        return value
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    return str(value)
