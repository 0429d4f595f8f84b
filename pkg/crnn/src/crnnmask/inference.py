"""Waveform-to-waveform inference with a trained checkpoint."""

from __future__ import annotations

import os

import numpy as np
import torch

from .data import complex_stft, inverse_stft
from .model import MaskNet
from .spec import StftSetup
from .training import load_checkpoint


def infer_arrays(
    noisy: np.ndarray,
    reference: np.ndarray,
    model: MaskNet,
    stft: StftSetup,
    mask_override: str | None = None,
) -> np.ndarray:
    """Mask the noisy magnitude, keep the noisy phase, resynthesize.

    ``mask_override`` forces an all-'ones' or all-'zeros' mask for
    debugging the reconstruction path.
    """
    noisy_spec = complex_stft(noisy, stft)
    ref_spec = complex_stft(reference[: noisy.size], stft)
    frames = min(noisy_spec.shape[0], ref_spec.shape[0])
    noisy_spec = noisy_spec[:frames]
    noisy_mag = noisy_spec.abs().to(torch.float32)
    ref_mag = ref_spec[:frames].abs().to(torch.float32)
    if mask_override == "ones":
        mask = torch.ones_like(noisy_mag)
    elif mask_override == "zeros":
        mask = torch.zeros_like(noisy_mag)
    elif mask_override is None:
        with torch.no_grad():
            mask = model(noisy_mag, ref_mag)
    else:
        raise ValueError(f"unknown mask_override {mask_override!r}")
    est_mag = (mask * noisy_mag).to(torch.float64)
    phase = torch.where(
        noisy_spec.abs() > 0, noisy_spec / noisy_spec.abs(), torch.ones_like(noisy_spec)
    )
    return inverse_stft(est_mag * phase, stft, length=noisy.size)


def infer(
    noisy: np.ndarray,
    reference: np.ndarray,
    checkpoint: str | os.PathLike,
    mask_override: str | None = None,
) -> np.ndarray:
    model, _, stft, _ = load_checkpoint(checkpoint)
    return infer_arrays(noisy, reference, model, stft, mask_override)
