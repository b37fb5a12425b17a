"""Dimension cap shared by state constructors and dense solvers.

The doubled-space identity checks scale like dim**6, so every object that
carries a Hilbert-space dimension is bounded. The default cap of 16 can be
raised or lowered with the SCGT_MAX_DIM environment variable.
"""

import os

from .errors import DimensionCapError

DEFAULT_MAX_DIM = 16
ENV_VAR = "SCGT_MAX_DIM"


def max_dim() -> int:
    raw = os.environ.get(ENV_VAR)
    if raw is None:
        return DEFAULT_MAX_DIM
    try:
        value = int(raw)
    except ValueError as exc:
        raise ValueError(f"{ENV_VAR} must be an integer, got {raw!r}") from exc
    if value < 1:
        raise ValueError(f"{ENV_VAR} must be positive, got {value}")
    return value


def check_dim(dim: int, *, doubled: bool = False) -> None:
    """Raise DimensionCapError if ``dim`` exceeds the cap.

    ``doubled=True`` checks against the square of the cap, for two-copy
    operators living on the tensor-product space.
    """
    cap = max_dim()
    limit = cap * cap if doubled else cap
    if dim > limit:
        kind = "doubled-space" if doubled else "Hilbert-space"
        raise DimensionCapError(
            f"{kind} dimension {dim} exceeds cap {limit} "
            f"(set {ENV_VAR} to override)"
        )
