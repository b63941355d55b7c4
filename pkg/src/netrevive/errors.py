"""Exception types shared across the package.

The CLI maps these onto distinct process exit codes, so keep the hierarchy
flat and the categories coarse.
"""


class NetreviveError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(NetreviveError):
    """Invalid or unparseable run configuration."""


class GraphConnectivityError(NetreviveError):
    """A generator exhausted its retries without producing a connected graph."""


class EdgeListFormatError(NetreviveError):
    """Malformed edge-list file (non-integer tokens, bad arity, empty graph)."""


class LayerModelError(NetreviveError):
    """Degenerate input to the layer recurrence or inconsistent layer params."""


class DynamicsError(NetreviveError):
    """Bad model name or parameters, or a model with no active state."""


class IsolatedNodeError(NetreviveError):
    """Degree-normalized dynamics evaluated on a node with no neighbors."""


class NumericalBlowupError(NetreviveError):
    """Non-finite state encountered during integration."""

    def __init__(self, message, t=None):
        super().__init__(message)
        self.t = t
