"""Numeric backend selection.

The compiled extension (``_kernels``) is preferred; the pure-Python twin
(``_kernels_py``) is the fallback. Selection happens once at import time and
can be forced with the environment variable ``FEEDBACK_LEARN_BACKEND`` set to
``compiled`` or ``python``. Forcing ``compiled`` when the extension is not
built is an error rather than a silent downgrade.

Both backends produce bitwise-identical results (see
``tests/test_backend_equivalence.py``); the choice only affects speed.
"""

import os

_FORCED = os.environ.get("FEEDBACK_LEARN_BACKEND", "").strip().lower()

if _FORCED in ("", "compiled", "c"):
    try:
        from . import _kernels as kernels
    except ImportError:
        if _FORCED:
            raise ImportError(
                "FEEDBACK_LEARN_BACKEND=compiled but the feedback_learn._kernels "
                "extension is not built; install the package (pip install -e .) "
                "or unset the variable to use the pure-Python fallback"
            )
        from . import _kernels_py as kernels
elif _FORCED in ("python", "py", "pure"):
    from . import _kernels_py as kernels
else:
    raise ImportError(
        f"unknown FEEDBACK_LEARN_BACKEND value {_FORCED!r}; "
        "expected 'compiled' or 'python'"
    )


def backend_name() -> str:
    """Name of the active kernel backend: 'compiled' or 'python'."""
    return kernels.IMPLEMENTATION
