"""Buffer-protocol boundary for the fusedist distance library.

Bind in-memory numeric arrays from any host pipeline (anything
implementing the buffer protocol) and compute distances without going
through files or the command line. Contiguous row-major float64 buffers
are never copied; results are plain dicts. Errors are the core
library's exception types, re-exported here, each carrying a stable
``code`` string and suggested exit code.
"""

from fusedist import (FusedistError, InvalidInputError, NumericalError,
                      ProtocolError)

from .api import cfd_breakdown, distance, rdr
from .boundary import BoundView, as_view

__version__ = "0.1.0"

__all__ = [
    "BoundView", "FusedistError", "InvalidInputError", "NumericalError",
    "ProtocolError", "as_view", "cfd_breakdown", "distance", "rdr",
]
