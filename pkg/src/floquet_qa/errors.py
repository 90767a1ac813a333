"""Exception hierarchy shared by all modules."""


class FloquetQAError(Exception):
    """Base class. ``context`` carries the offending point (time, params)."""

    exit_code = 3

    def __init__(self, message: str, **context):
        super().__init__(message)
        self.context = context

    def __str__(self) -> str:
        base = super().__str__()
        if not self.context:
            return base
        extra = ", ".join(f"{k}={v!r}" for k, v in self.context.items())
        return f"{base} ({extra})"


class InvalidParameter(FloquetQAError, ValueError):
    exit_code = 2


class NumericalFailure(FloquetQAError):
    pass


class PropagationFailure(NumericalFailure):
    pass


class DegenerateSpectrum(NumericalFailure):
    pass


class DegenerateQuasienergies(NumericalFailure):
    pass
