"""Backend selection for the matrix-decomposition hot kernel.

The compiled extension is used when it was built; otherwise the pure
Python twin takes over. Set ``PERMFLIP_PURE_PYTHON=1`` to force the
fallback. Both implementations are deterministic and bit-identical.
"""

import os

from permflip._backend import matching_py

try:
    from permflip._backend import _matching as _compiled
except ImportError:
    _compiled = None

HAVE_COMPILED = _compiled is not None

if _compiled is not None and not os.environ.get("PERMFLIP_PURE_PYTHON"):
    _active = _compiled
else:
    _active = matching_py


def implementation():
    """Return the module providing ``greedy_birkhoff``."""
    return _active


def implementation_name():
    return "compiled" if _active is _compiled and _compiled is not None else "pure-python"
