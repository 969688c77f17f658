"""Exception types shared across the package."""


class KernelToolError(Exception):
    """Base class for all errors raised by this package."""


class InstanceTooLargeError(KernelToolError):
    """An exhaustive routine was asked to run above its configured cap."""

    def __init__(self, n: int, cap: int):
        super().__init__(f"instance has {n} vertices, exhaustive cap is {cap}")
        self.n = n
        self.cap = cap


class ModelError(KernelToolError):
    """A fuzzy interval model is structurally unusable for the requested task."""


class FlavorError(ModelError):
    """An operation received a model of the wrong flavor (linear vs circular)."""


class PreconditionError(KernelToolError):
    """A documented operation precondition does not hold."""


class NotThresholdError(KernelToolError):
    """Degree peeling got stuck: the graph is not a threshold graph."""

    def __init__(self, stuck_vertices):
        super().__init__(
            "not a threshold graph: no isolated or dominating vertex among "
            f"{sorted(stuck_vertices)}"
        )
        self.stuck_vertices = frozenset(stuck_vertices)


class SequenceError(KernelToolError):
    """A construction sequence does not reproduce the given graph."""


class CnfError(KernelToolError):
    """A CNF formula violates the input invariants (tautology, bad index, ...)."""


class NotAKernelError(KernelToolError):
    """A vertex set claimed to be a kernel is not one."""


class NotBidirectionalError(KernelToolError):
    """An operation restricted to all-bidirectional digraphs got a one-way edge."""


class ParseError(KernelToolError):
    """Instance or auxiliary file syntax error, with a 1-based line number."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line
        self.message = message
