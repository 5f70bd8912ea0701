class ConfigurationError(ValueError):
    """
    A solver, instance or command configuration is invalid (bad parameter ranges, missing theory constants,
    inadmissible step sizes).
    """


class EvaluationError(ArithmeticError):
    """
    An oracle produced a non-finite value.

    :param index: The offending constraint index (``None`` when the objective is at fault).
    :type index: int
    """

    def __init__(self, message, index=None):
        super(EvaluationError, self).__init__(message)
        self.index = index


class DivergenceError(EvaluationError):
    """
    An iterate of an inner solver or of the baseline became non-finite.

    :param iteration: The inner iteration at which the iterate was first non-finite.
    :type iteration: int
    """

    def __init__(self, message, iteration=None):
        super(DivergenceError, self).__init__(message)
        self.iteration = iteration


class SolverAbort(RuntimeError):
    """
    The outer loop gave up because the inner solver kept stalling. The report collected so far is attached.
    """

    def __init__(self, message, report=None):
        super(SolverAbort, self).__init__(message)
        self.report = report


class UnboundedProblem(ValueError):
    """
    The linear program handed to the reference oracle has no finite optimum.
    """
