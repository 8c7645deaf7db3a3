import typing as TYPE


class FieldError(TYPE.NamedTuple):
    path: str
    value: TYPE.Any
    message: str

    def __str__(self) -> str:
        return '{}: {} (got {!r})'.format(self.path, self.message, self.value)


class LineError(TYPE.NamedTuple):
    line: int
    message: str

    def __str__(self) -> str:
        return 'line {}: {}'.format(self.line, self.message)


class ChipLCAError(Exception):
    def __init__(self, message: str = 'chiplca error'):
        super().__init__(message)


class ScenarioError(ChipLCAError, ValueError):
    def __init__(
        self,
        errors: TYPE.Sequence[FieldError],
        source: TYPE.Optional[str] = None,
    ):
        self.errors = list(errors)
        self.source = source
        head = 'Invalid scenario' + (' {}'.format(source) if source else '')
        super().__init__(
            '{} ({} error(s)):\n  {}'.format(
                head, len(self.errors), '\n  '.join(map(str, self.errors))
            )
        )


class InventoryError(ChipLCAError, ValueError):
    def __init__(
        self,
        errors: TYPE.Sequence[LineError],
        source: TYPE.Optional[str] = None,
    ):
        self.errors = list(errors)
        self.source = source
        head = 'Invalid inventory' + (' {}'.format(source) if source else '')
        super().__init__(
            '{} ({} error(s)):\n  {}'.format(
                head, len(self.errors), '\n  '.join(map(str, self.errors))
            )
        )


class ReportParseError(ChipLCAError, ValueError):
    def __init__(self, message: str = 'Malformed report document'):
        super().__init__(message)


class GeometryError(ChipLCAError, ValueError):
    def __init__(self, message: str = 'Die does not fit on the wafer'):
        super().__init__(message)


class DomainError(ChipLCAError, ValueError):
    def __init__(self, message: str = 'Argument outside its domain'):
        super().__init__(message)


class SingularError(ChipLCAError, ZeroDivisionError):
    def __init__(self, message: str = 'Zero denominator'):
        super().__init__(message)


class SweepError(ChipLCAError, ValueError):
    def __init__(
        self,
        path: str,
        valid: TYPE.Iterable[str] = (),
        what: str = 'parameter',
    ):
        self.path = path
        self.valid = list(valid)
        super().__init__(
            'Unknown sweep {} {!r}; valid: {}'.format(
                what, path, ', '.join(self.valid)
            )
        )
