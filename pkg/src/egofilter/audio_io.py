"""RIFF WAV reading and writing (mono; 16-bit PCM or 32-bit float)."""

from __future__ import annotations

import os

import numpy as np
from scipy.io import wavfile

from .dsp import Waveform
from .errors import InvalidInputError


def read_wav(path: str | os.PathLike) -> Waveform:
    """Load a WAV file as a float waveform in roughly [-1, 1].

    Integer PCM is scaled by the full-scale value of its width; multichannel
    input is downmixed by averaging.
    """
    rate, data = wavfile.read(path)
    if data.ndim == 2:
        data = data.mean(axis=1)
    if data.dtype == np.int16:
        x = data / 32768.0
    elif data.dtype == np.int32:
        x = data / 2147483648.0
    elif data.dtype == np.uint8:
        x = (data.astype(np.float64) - 128.0) / 128.0
    else:
        x = data.astype(np.float64)
    return Waveform(x, int(rate))


def write_wav(path: str | os.PathLike, w: Waveform, encoding: str = "float32") -> None:
    """Write a waveform as 32-bit float ('float32') or 16-bit PCM ('int16')."""
    if encoding == "float32":
        wavfile.write(path, w.sample_rate, w.samples.astype(np.float32))
    elif encoding == "int16":
        wavfile.write(path, w.sample_rate, quantize_int16(w.samples))
    else:
        raise InvalidInputError(f"unsupported encoding {encoding!r}")


def quantize_int16(x: np.ndarray) -> np.ndarray:
    """Round to the 16-bit PCM grid, hard-clipping out-of-range samples."""
    return np.clip(np.round(np.asarray(x) * 32768.0), -32768, 32767).astype(np.int16)
