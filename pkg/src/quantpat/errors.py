"""Exception types shared across the package."""


class ParseError(ValueError):
    def __init__(self, message, position=None):
        self.position = position
        if position is not None:
            message = f"{message} (at offset {position})"
        super().__init__(message)


class LinearityError(ParseError):
    """A pattern binds the same variable twice."""

    def __init__(self, name, position=None):
        self.name = name
        super().__init__(f"non-linear pattern: variable {name!r} occurs twice", position)


class BudgetExceeded(RuntimeError):
    """Head normalisation ran out of steps. ``trace`` holds the partial run."""

    def __init__(self, trace):
        self.trace = trace
        super().__init__(f"step budget exhausted after {len(trace.steps)} steps")


class NotCanonical(ValueError):
    pass


class NotHeadNormalizing(RuntimeError):
    def __init__(self, message, trace=None):
        self.trace = trace
        super().__init__(message)


class ShapeMismatch(ValueError):
    """A derivation does not have the shape a transformer expects."""

    def __init__(self, reason, path=(), expected=None, actual=None):
        self.reason = reason
        self.path = tuple(path)
        self.expected = expected
        self.actual = actual
        msg = f"{reason} at {list(self.path)}"
        if expected is not None or actual is not None:
            msg += f": expected {expected}, got {actual}"
        super().__init__(msg)


class RuleViolation(ValueError):
    """First node of a derivation that breaks its rule."""

    def __init__(self, path, reason):
        self.path = tuple(path)
        self.reason = reason
        super().__init__(f"rule violation at {list(self.path)}: {reason}")


class FormatError(ValueError):
    pass


class ReplayMismatch(AssertionError):
    def __init__(self, step_index, reason):
        self.step_index = step_index
        self.reason = reason
        super().__init__(f"replay mismatch at step {step_index}: {reason}")
