"""Pure-numpy versions of the compiled kernels in ``_ckernels.pyx``."""

from __future__ import annotations

import numpy as np


def direct_convolve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.convolve(np.asarray(a, dtype=np.float64), np.asarray(b, dtype=np.float64))


def joint_sums(f1: np.ndarray, g1: np.ndarray, f2: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    f2 = np.asarray(f2, dtype=np.float64)
    return np.convolve(np.asarray(g1, dtype=np.float64), f2), np.convolve(np.asarray(f1, dtype=np.float64), f2)
