"""Manifest and audio loading, plus the torch STFT front end.

Consumes the dataset-builder formats directly: JSON-lines manifests with
``clean`` / ``noisy`` / ``reference`` paths (relative to the manifest) and
a ``split`` field, and mono WAV audio.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import torch
from scipy.io import wavfile

from .spec import StftSetup


def read_manifest(path: str | os.PathLike) -> list[dict]:
    path = Path(path)
    records = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            rec = json.loads(line)
            for key in ("clean", "noisy", "reference"):
                rec[key] = str((path.parent / rec[key]).resolve())
            records.append(rec)
    return records


def load_wav(path: str | os.PathLike) -> tuple[np.ndarray, int]:
    rate, data = wavfile.read(path)
    if data.ndim == 2:
        data = data.mean(axis=1)
    if data.dtype == np.int16:
        data = data / 32768.0
    elif data.dtype == np.int32:
        data = data / 2147483648.0
    return data.astype(np.float64), int(rate)


def stft_window(setup: StftSetup) -> torch.Tensor:
    return torch.hann_window(setup.window_length, periodic=True, dtype=torch.float64)


def complex_stft(samples: np.ndarray, setup: StftSetup) -> torch.Tensor:
    """[frames, bins] complex spectrogram (centered frames)."""
    x = torch.as_tensor(samples, dtype=torch.float64)
    spec = torch.stft(
        x,
        n_fft=setup.fft_size,
        hop_length=setup.hop_length,
        win_length=setup.window_length,
        window=stft_window(setup),
        center=True,
        return_complex=True,
    )
    return spec.transpose(0, 1)


def magnitude(samples: np.ndarray, setup: StftSetup) -> torch.Tensor:
    return complex_stft(samples, setup).abs().to(torch.float32)


def inverse_stft(spec: torch.Tensor, setup: StftSetup, length: int) -> np.ndarray:
    """Invert a [frames, bins] complex spectrogram to ``length`` samples."""
    y = torch.istft(
        spec.transpose(0, 1),
        n_fft=setup.fft_size,
        hop_length=setup.hop_length,
        win_length=setup.window_length,
        window=stft_window(setup),
        center=True,
        length=length,
    )
    return y.numpy()


@dataclass
class Triplet:
    """Magnitude features for one training item."""

    noisy_mag: torch.Tensor
    reference_mag: torch.Tensor
    clean_mag: torch.Tensor


def load_triplet(record: dict, setup: StftSetup, segment_samples: int | None = None) -> Triplet:
    mags = []
    for key in ("noisy", "reference", "clean"):
        samples, rate = load_wav(record[key])
        if rate != setup.sample_rate:
            raise ValueError(
                f"{record[key]}: sample rate {rate} != expected {setup.sample_rate}"
            )
        if segment_samples is not None:
            samples = samples[:segment_samples]
        mags.append(magnitude(samples, setup))
    return Triplet(noisy_mag=mags[0], reference_mag=mags[1], clean_mag=mags[2])


def load_split(
    manifest: str | os.PathLike,
    split: str,
    setup: StftSetup,
    segment_samples: int | None = None,
) -> list[Triplet]:
    records = [r for r in read_manifest(manifest) if r.get("split") == split]
    return [load_triplet(r, setup, segment_samples) for r in records]
