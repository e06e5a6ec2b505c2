"""Exception hierarchy shared by every module."""


class FineHypError(Exception):
    """Base class for all library errors."""


class GraphError(FineHypError):
    pass


class DisconnectedGraph(GraphError):
    pass


class SelfLoop(GraphError):
    pass


class DuplicateEdge(GraphError):
    pass


class BudgetExceeded(FineHypError):
    """A configured enumeration or materialization budget was exhausted."""


class EnumerationCapExceeded(BudgetExceeded):
    pass


class VertexNotOnEdges(FineHypError):
    pass


class ConstructionFailed(FineHypError):
    pass


class SupportOutsideIndex(FineHypError):
    pass


class SupportOutsideDomain(FineHypError):
    pass


class NotATree(FineHypError):
    pass


class DecompositionMismatch(FineHypError):
    pass


class MissingTruncationData(FineHypError):
    pass


class IncompleteCover(FineHypError):
    pass


class NonConvergence(FineHypError):
    pass


class EmptyDomain(FineHypError):
    pass
