"""Exception types raised across the package."""


class DimensionError(ValueError):
    """Matrix or vector shapes are incompatible."""


class AlistParseError(ValueError):
    """Malformed alist document."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class FrameParseError(ValueError):
    """Malformed line in an LLR frame file."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class InsufficientFramesError(RuntimeError):
    """The frame stream ran out before enough suitable frames were found."""

    def __init__(self, collected, required, consumed):
        self.collected = collected
        self.required = required
        self.consumed = consumed
        super().__init__(
            f"only {collected} of {required} suitable frames found "
            f"after consuming {consumed} frames"
        )


class DegenerateThresholdError(ValueError):
    """A threshold makes a conditional probability undefined."""


class InfeasibleFilterError(ValueError):
    """The filter accepts frames with probability zero."""


class InfeasibleBudgetError(ValueError):
    """No grid point satisfies the frame-budget constraint."""

    def __init__(self, message, max_feasible=None):
        self.max_feasible = max_feasible
        super().__init__(message)
