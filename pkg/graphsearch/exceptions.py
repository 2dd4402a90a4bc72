"""
Error kinds raised by graphsearch.

Every error carries ``kind``, the name printed by the command line in its
diagnostic line ``error[<kind>]: <message>``.
"""


class GraphSearchError(Exception):
    """Base class of all graphsearch errors."""

    @property
    def kind(self):
        return type(self).__name__


# graph_core
class MalformedRecord(GraphSearchError, ValueError):
    def __init__(self, path, lineno, reason):
        self.path = str(path)
        self.lineno = lineno
        self.reason = reason
        GraphSearchError.__init__(
            self, "%s line %s: %s" % (self.path, lineno, reason)
        )


class DanglingEdge(GraphSearchError, ValueError):
    def __init__(self, path, lineno, external_id):
        self.path = str(path)
        self.lineno = lineno
        self.external_id = external_id
        GraphSearchError.__init__(
            self,
            "%s line %s: edge references unknown node %r"
            % (self.path, lineno, external_id),
        )


class EmptyGraph(GraphSearchError, ValueError):
    pass


class UnknownNode(GraphSearchError, KeyError):
    def __init__(self, node):
        self.node = node
        GraphSearchError.__init__(self, "unknown node %r" % (node,))

    def __str__(self):
        return self.args[0]


# embedding
class EmptyText(GraphSearchError, ValueError):
    pass


class DimensionMismatch(GraphSearchError, ValueError):
    pass


class ZeroVector(GraphSearchError, ValueError):
    pass


class MissingVector(GraphSearchError, KeyError):
    def __init__(self, node, message=None):
        self.node = node
        GraphSearchError.__init__(self, message or "no vector for node %r" % (node,))

    def __str__(self):
        return self.args[0]


# query_protocol
class MissingField(GraphSearchError, KeyError):
    def __init__(self, field, message=None):
        self.field = field
        GraphSearchError.__init__(
            self, message or "prompt field %r is missing or empty" % (field,)
        )

    def __str__(self):
        return self.args[0]


class EmptyQueryText(GraphSearchError, ValueError):
    pass


class NoAnswerBlock(GraphSearchError, ValueError):
    pass


class UnresolvableClass(GraphSearchError, ValueError):
    pass


# rollout
class BackendFailure(GraphSearchError, RuntimeError):
    pass


class AnswerExtractionFailed(GraphSearchError, RuntimeError):
    pass


class TokenBudgetExceeded(GraphSearchError, RuntimeError):
    pass


class ScriptExhausted(GraphSearchError, RuntimeError):
    pass


# tasks_eval
class InsufficientEdges(GraphSearchError, ValueError):
    pass


# cli
class ConfigInvalid(GraphSearchError, ValueError):
    def __init__(self, field, message):
        self.field = field
        GraphSearchError.__init__(self, "%s: %s" % (field, message))


class UnknownCommand(GraphSearchError, ValueError):
    pass
