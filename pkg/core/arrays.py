from typing import Annotated

import numpy as np
from pydantic import BeforeValidator


def _as_vector(value) -> np.ndarray:
    vector = np.array(value, dtype=float, copy=True)
    if vector.ndim != 1:
        raise ValueError(f"expected a one-dimensional vector, got shape {vector.shape}")
    vector.flags.writeable = False
    return vector


# read-only float64 copy; pair with arbitrary_types_allowed
FloatVector = Annotated[np.ndarray, BeforeValidator(_as_vector)]
