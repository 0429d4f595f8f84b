"""Short-time Fourier analysis/synthesis and phase handling.

Whole utterances at 16 kHz are mapped to complex time-frequency matrices,
modified there, and mapped back by weighted overlap-add with window-square
normalization. The default configuration (FFT 1200, 25 ms window, 10 ms hop)
yields 601 frequency bins.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.signal import check_NOLA

from .errors import InvalidInputError

DEFAULT_SAMPLE_RATE = 16000

# Below this overlap-add window-energy sum, synthesis outputs silence
# instead of dividing by a vanishing normalizer.
_NORM_FLOOR = 1e-8


@lru_cache(maxsize=None)
def _window(shape: str, length: int) -> np.ndarray:
    if shape != "hann":
        raise InvalidInputError(f"unsupported window shape {shape!r} (expected 'hann')")
    n = np.arange(length)
    w = 0.5 * (1.0 - np.cos(2.0 * np.pi * n / length))  # periodic form
    w.flags.writeable = False
    return w


def _ceil_div(a: int, b: int) -> int:
    return -(-a // b)


def _readonly(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class Waveform:
    """Mono audio: float samples plus their rate in Hz.

    Immutable after construction; safe to share across threads.
    """

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self):
        samples = np.array(self.samples, dtype=np.float64)
        if samples.ndim != 1:
            raise InvalidInputError("waveform samples must be one-dimensional")
        if not np.all(np.isfinite(samples)):
            raise InvalidInputError("waveform samples must all be finite")
        rate = int(self.sample_rate)
        if rate <= 0:
            raise InvalidInputError("sample_rate must be a positive integer")
        object.__setattr__(self, "samples", _readonly(samples))
        object.__setattr__(self, "sample_rate", rate)

    def __len__(self) -> int:
        return self.samples.size

    @property
    def duration(self) -> float:
        """Length in seconds."""
        return self.samples.size / self.sample_rate

    def rms(self) -> float:
        return float(np.sqrt(np.mean(self.samples**2))) if len(self) else 0.0


@dataclass(frozen=True)
class StftConfig:
    """Analysis/synthesis parameters.

    The window/hop pair must satisfy the overlap-add condition so that
    ``istft(stft(x))`` reconstructs ``x`` wherever frames fully overlap.
    """

    fft_size: int = 1200
    window_length: int = 400
    hop_length: int = 160
    window_shape: str = "hann"

    def __post_init__(self):
        if self.window_length > self.fft_size:
            raise InvalidInputError(
                f"window_length {self.window_length} exceeds fft_size {self.fft_size}"
            )
        if not 0 < self.hop_length <= self.window_length:
            raise InvalidInputError(
                f"hop_length {self.hop_length} must be in (0, window_length]"
            )
        win = _window(self.window_shape, self.window_length)
        if not check_NOLA(win, self.window_length, self.window_length - self.hop_length):
            raise InvalidInputError("window/hop pair fails the overlap-add condition")

    @property
    def n_bins(self) -> int:
        return self.fft_size // 2 + 1

    def window(self) -> np.ndarray:
        return _window(self.window_shape, self.window_length)

    def frame_count(self, n_samples: int) -> int:
        """Frames needed to cover ``n_samples`` (final partial frame zero-padded)."""
        if n_samples <= 0:
            raise InvalidInputError("frame_count requires a positive sample count")
        return max(1, _ceil_div(n_samples - self.window_length, self.hop_length) + 1)

    def bin_frequencies(self, sample_rate: int) -> np.ndarray:
        return np.arange(self.n_bins) * sample_rate / self.fft_size


@dataclass(frozen=True)
class Spectrogram:
    """Complex time-frequency matrix indexed [frame, frequency bin]."""

    bins: np.ndarray
    config: StftConfig
    sample_rate: int

    def __post_init__(self):
        bins = np.array(self.bins, dtype=np.complex128)
        if bins.ndim != 2:
            raise InvalidInputError("spectrogram bins must be a 2-D matrix")
        if bins.shape[1] != self.config.n_bins:
            raise InvalidInputError(
                f"spectrogram has {bins.shape[1]} frequency bins, "
                f"config implies {self.config.n_bins}"
            )
        if not np.all(np.isfinite(bins)):
            raise InvalidInputError("spectrogram entries must all be finite")
        object.__setattr__(self, "bins", _readonly(bins))
        object.__setattr__(self, "sample_rate", int(self.sample_rate))

    @property
    def n_frames(self) -> int:
        return self.bins.shape[0]

    @property
    def n_bins(self) -> int:
        return self.bins.shape[1]

    def magnitude(self) -> np.ndarray:
        return np.abs(self.bins)


def stft(w: Waveform, config: StftConfig | None = None) -> Spectrogram:
    """Analyze a waveform into overlapping windowed DFT frames.

    Frames cover every input sample; the final partial frame is
    zero-padded. Windowed frames are zero-padded on the right up to
    ``fft_size`` before the DFT.
    """
    cfg = config or StftConfig()
    x = w.samples
    if x.size == 0:
        raise InvalidInputError("cannot transform an empty waveform")
    n_frames = cfg.frame_count(x.size)
    padded_len = (n_frames - 1) * cfg.hop_length + cfg.window_length
    padded = np.zeros(padded_len)
    padded[: x.size] = x
    idx = cfg.hop_length * np.arange(n_frames)[:, None] + np.arange(cfg.window_length)
    frames = padded[idx] * cfg.window()
    bins = np.fft.rfft(frames, n=cfg.fft_size, axis=1)
    return Spectrogram(bins, cfg, w.sample_rate)


def istft(s: Spectrogram) -> Waveform:
    """Synthesize a waveform by weighted overlap-add.

    Output length is ``(n_frames - 1) * hop + window_length``. Samples whose
    window-energy normalizer falls below 1e-8 are emitted as zero.
    """
    cfg = s.config
    win = cfg.window()
    frames = np.fft.irfft(s.bins, n=cfg.fft_size, axis=1)[:, : cfg.window_length]
    n_frames = s.n_frames
    out_len = (n_frames - 1) * cfg.hop_length + cfg.window_length
    idx = (cfg.hop_length * np.arange(n_frames)[:, None] + np.arange(cfg.window_length)).ravel()
    y = np.bincount(idx, weights=(frames * win).ravel(), minlength=out_len)
    norm = np.bincount(
        idx,
        weights=np.broadcast_to(win * win, (n_frames, cfg.window_length)).ravel(),
        minlength=out_len,
    )
    live = norm > _NORM_FLOOR
    y[live] /= norm[live]
    y[~live] = 0.0
    return Waveform(y, s.sample_rate)


def merge_phase(magnitude: np.ndarray, phase_source: Spectrogram) -> Spectrogram:
    """Combine a real magnitude matrix with the phase of ``phase_source``.

    Where ``phase_source`` is exactly zero its phase is taken as zero, so the
    output entry is the plain magnitude.
    """
    mag = np.asarray(magnitude, dtype=np.float64)
    if mag.shape != phase_source.bins.shape:
        raise InvalidInputError(
            f"magnitude shape {mag.shape} does not match spectrogram "
            f"shape {phase_source.bins.shape}"
        )
    if not np.all(np.isfinite(mag)):
        raise InvalidInputError("magnitude entries must all be finite")
    if np.any(mag < 0):
        raise InvalidInputError("magnitude entries must be non-negative")
    bins = mag * np.exp(1j * np.angle(phase_source.bins))
    return Spectrogram(bins, phase_source.config, phase_source.sample_rate)
