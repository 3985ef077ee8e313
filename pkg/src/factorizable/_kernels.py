"""Backend selection for the hot kernels.

Set ``FACTORIZABLE_DISABLE_NUMBA=1`` to force the pure-numpy path; the
numpy path is also used when numba cannot be imported.
"""

import os

from . import _kernels_numpy

BACKEND = "numpy"
_impl = _kernels_numpy

if os.environ.get("FACTORIZABLE_DISABLE_NUMBA", "").strip().lower() not in ("1", "true", "yes"):
    try:
        from . import _kernels_numba as _impl  # noqa: F811

        BACKEND = "numba"
    except ImportError:  # pragma: no cover - numba is a declared dependency
        _impl = _kernels_numpy

kraus_apply = _impl.kraus_apply
kraus_choi = _impl.kraus_choi
vertex_tables = _impl.vertex_tables
nnls = _impl.nnls
qubit_table = _impl.qubit_table
qubit_bell_value = _impl.qubit_bell_value
