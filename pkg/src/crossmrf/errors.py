"""Exception hierarchy.

Every exception carries an ``exit_code`` used by the command-line front end,
so one failure class maps to one process status.
"""

__all__ = [
    "CrossMRFError",
    "GridError",
    "NonPositiveStep",
    "DegenerateDomain",
    "IndexOutOfRange",
    "NonPositiveRadius",
    "GraphError",
    "MalformedLine",
    "SelfEdge",
    "CycleDetected",
    "UnknownField",
    "KernelError",
    "NegativeDistance",
    "ZeroDelta",
    "NonPositiveR",
    "MissingKernel",
    "ShapeMismatch",
    "AsymmetricInput",
    "PdFailure",
    "CholeskyFailure",
    "NonPdBlock",
    "RegularizationExhausted",
    "InferenceError",
    "InsufficientSamples",
    "SingularSystem",
    "IndexOverlap",
    "EmptyTestSet",
    "BudgetExhaustedWarning",
    "BenchError",
    "ScenarioUnsupported",
    "InsufficientPoints",
    "MatrixFormatError",
]


class CrossMRFError(Exception):
    exit_code = 1


class GridError(CrossMRFError, ValueError):
    exit_code = 2


class NonPositiveStep(GridError):
    pass


class DegenerateDomain(GridError):
    pass


class IndexOutOfRange(CrossMRFError, IndexError):
    exit_code = 2


class NonPositiveRadius(GridError):
    pass


class GraphError(CrossMRFError, ValueError):
    exit_code = 3


class MalformedLine(GraphError):
    pass


class SelfEdge(GraphError):
    pass


class CycleDetected(GraphError):
    exit_code = 4


class UnknownField(GraphError, KeyError):
    pass


class KernelError(CrossMRFError, ValueError):
    exit_code = 5


class NegativeDistance(KernelError):
    pass


class ZeroDelta(KernelError):
    pass


class NonPositiveR(KernelError):
    pass


class MissingKernel(CrossMRFError, KeyError):
    exit_code = 6

    def __str__(self):
        # KeyError quotes its message; keep diagnostics on one readable line
        return str(self.args[0]) if self.args else "missing kernel"


class ShapeMismatch(CrossMRFError, ValueError):
    exit_code = 7


class AsymmetricInput(CrossMRFError, ValueError):
    exit_code = 7


class PdFailure(CrossMRFError, ArithmeticError):
    exit_code = 8


class CholeskyFailure(PdFailure):
    pass


class NonPdBlock(PdFailure):
    pass


class RegularizationExhausted(PdFailure):
    pass


class InferenceError(CrossMRFError, ValueError):
    exit_code = 9


class InsufficientSamples(InferenceError):
    pass


class SingularSystem(InferenceError):
    pass


class IndexOverlap(InferenceError):
    pass


class EmptyTestSet(InferenceError):
    pass


class BudgetExhaustedWarning(RuntimeWarning):
    """Emitted when an optimizer stops on its evaluation budget."""


class BenchError(CrossMRFError, ValueError):
    exit_code = 10


class ScenarioUnsupported(BenchError):
    pass


class InsufficientPoints(BenchError):
    pass


class MatrixFormatError(CrossMRFError, ValueError):
    exit_code = 11
