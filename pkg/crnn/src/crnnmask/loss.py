"""Power-law compressed magnitude reconstruction loss."""

from __future__ import annotations

import torch

DEFAULT_EXPONENT = 0.3


def compressed_mse(
    est_mag: torch.Tensor, target_mag: torch.Tensor, exponent: float = DEFAULT_EXPONENT
) -> torch.Tensor:
    """Mean squared difference of exponent-compressed magnitudes.

    Compression flattens the dynamic range so quiet speech regions still
    contribute to the gradient.
    """
    if est_mag.shape != target_mag.shape:
        raise ValueError(
            f"shape mismatch: {tuple(est_mag.shape)} vs {tuple(target_mag.shape)}"
        )
    if (est_mag < 0).any() or (target_mag < 0).any():
        raise ValueError("magnitudes must be non-negative")
    return torch.mean((est_mag**exponent - target_mag**exponent) ** 2)
