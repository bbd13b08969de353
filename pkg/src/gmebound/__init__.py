"""Lower bounds on the geometric measure of entanglement for mixed states.

Submodules: ``qstate`` (state containers and metrics), ``bloch``
(generator bases, Bloch decomposition, correlation-tensor tests and the
ten-parameter tomography scheme), ``prodrad`` (product numerical radius by
multistart see-saw), ``gme`` (bounds and verdicts), ``families``
(benchmark state families), ``cli`` (command-line front end).
"""

from . import bloch, cli, families, gme, prodrad, qstate, sampling

__all__ = ["bloch", "cli", "families", "gme", "prodrad", "qstate", "sampling"]
__version__ = "0.1.0"
