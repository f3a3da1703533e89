"""Backend selection: compiled extension when available, pure Python otherwise.

Set LPPLAB_FORCE_PY=1 to force the pure-Python kernels (used by the
benchmark and the backend-equivalence tests).
"""

import os

if os.environ.get("LPPLAB_FORCE_PY") == "1":
    from . import _kernels_py as _impl

    BACKEND = "python"
else:
    try:
        from . import _kernels_cy as _impl  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:
        from . import _kernels_py as _impl

        BACKEND = "python"

lpp_first_row = _impl.lpp_first_row
lpp_row_update = _impl.lpp_row_update
lpp_first_row_path = _impl.lpp_first_row_path
lpp_row_update_path = _impl.lpp_row_update_path
backtrack_profile = _impl.backtrack_profile
partition_row_update = _impl.partition_row_update
sturm_count = _impl.sturm_count
sturm_lambda_max = _impl.sturm_lambda_max
