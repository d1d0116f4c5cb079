class VerificationError(ValueError):
    """Base class for every input or model problem the verifier reports."""


class FormatError(VerificationError):
    pass


class SystemModelError(VerificationError):
    pass


class DegenerateLoopError(SystemModelError):
    pass


class IncompatibleSystemError(VerificationError):
    pass


class SearchBudgetExceeded(VerificationError):
    def __init__(self, space: int, budget: int):
        super().__init__(
            f"exhaustive search space of {space} states exceeds the budget of {budget}"
        )
        self.space = space
        self.budget = budget


class CounterexampleError(VerificationError):
    pass


class MissingParameterError(VerificationError):
    pass
