"""Exception hierarchy.

Every error carries a short machine-readable ``code`` that the CLI prints on
the diagnostic stream. Validation problems (bad input) and numerical failures
(the input is fine but the computation cannot be certified) are kept apart so
the CLI can map them to different exit statuses.
"""


class ExpSumError(Exception):
    code = "E_GENERIC"

    def __init__(self, message, **details):
        super().__init__(message)
        self.details = details


class ValidationError(ExpSumError, ValueError):
    code = "E_VALIDATION"


class NumericalError(ExpSumError, ArithmeticError):
    code = "E_NUMERICAL"


class PronyOrderError(NumericalError):
    code = "E_PRONY_ORDER"


class SigmaClusterError(NumericalError):
    code = "E_SIGMA_CLUSTER"


class RootCountError(NumericalError):
    code = "E_ROOT_COUNT"


class IllConditionedError(NumericalError):
    code = "E_ILL_COND"


class TruncationError(NumericalError):
    code = "E_TRUNCATION"


class ConvergenceError(NumericalError):
    """IRLS did not converge; ``best`` holds the best iterate seen."""

    code = "E_NO_CONVERGENCE"

    def __init__(self, message, best=None, **details):
        super().__init__(message, **details)
        self.best = best
