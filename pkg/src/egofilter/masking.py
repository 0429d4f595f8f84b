"""Ego-speech masking and spectral subtraction.

A time-frequency bin is marked as robot-dominated when the mixture magnitude
falls at or below the oversubtraction factor times the response-scaled
reference magnitude (optionally raised by the stationary noise floor). The
binary mask is smoothed with a small unit-sum 2-D tapered-cosine window, the
complement gates the mixture, and the result is amplified and resynthesized
with the mixture's own phase.
"""

from __future__ import annotations

import shlex
import subprocess
import tempfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.signal import convolve2d

from . import audio_io
from .alignment import DelayEstimate, detect_delay, trim_to_reference
from .calibration import ResponseProfile
from .dsp import Spectrogram, Waveform, istft, stft
from .errors import InvalidInputError, PostFilterError


@dataclass(frozen=True)
class MaskParams:
    """Oversubtraction factor, output gain, and smoothing half-widths."""

    alpha: float = 1.5
    beta: float = 2.0
    smooth_time_halfwidth: int = 3
    smooth_freq_halfwidth: int = 1
    subtract_noise_floor: bool = True

    def __post_init__(self):
        if self.alpha <= 0:
            raise InvalidInputError("alpha must be positive")
        if self.beta <= 0:
            raise InvalidInputError("beta must be positive")
        if self.smooth_time_halfwidth < 0 or self.smooth_freq_halfwidth < 0:
            raise InvalidInputError("smoothing half-widths must be >= 0")


@dataclass(frozen=True)
class SpeechMask:
    """Binary robot-speech mask and its smoothed form in [0, 1]."""

    raw: np.ndarray
    smoothed: np.ndarray


def smoothing_window(time_halfwidth: int, freq_halfwidth: int) -> np.ndarray:
    """Unit-sum 2-D tapered-cosine window of size (2L+1, 2I+1)."""
    w = np.outer(np.hanning(2 * time_halfwidth + 1), np.hanning(2 * freq_halfwidth + 1))
    return w / w.sum()


def build_mask(
    mix: Spectrogram,
    reference: Spectrogram,
    profile: ResponseProfile,
    params: MaskParams,
) -> SpeechMask:
    """Threshold the mixture against the response-scaled reference.

    ``raw[t, f] = 1`` iff ``|mix| <= alpha * |reference| * response[f]``
    (plus ``noise_floor[f]`` when enabled); the smoothed mask is the raw mask
    convolved with the unit-sum window, zero-padded borders, clamped to [0, 1].
    """
    if mix.bins.shape != reference.bins.shape:
        raise InvalidInputError(
            f"mixture {mix.bins.shape} and reference {reference.bins.shape} "
            "spectrograms must have identical shapes"
        )
    if mix.n_bins != profile.n_bins:
        raise InvalidInputError(
            f"spectrogram has {mix.n_bins} bins but profile has {profile.n_bins}"
        )
    threshold = params.alpha * np.abs(reference.bins) * profile.response
    if params.subtract_noise_floor:
        threshold = threshold + profile.noise_floor
    raw = (np.abs(mix.bins) <= threshold).astype(np.float64)
    window = smoothing_window(params.smooth_time_halfwidth, params.smooth_freq_halfwidth)
    smoothed = np.clip(convolve2d(raw, window, mode="same", boundary="fill"), 0.0, 1.0)
    return SpeechMask(raw=raw, smoothed=smoothed)


def subtract(mix: Spectrogram, mask: SpeechMask, params: MaskParams) -> Spectrogram:
    """Apply ``beta * (1 - smoothed mask)`` as a magnitude gain.

    The mixture's complex phase is kept, so this is a single complex
    multiply per bin.
    """
    if mask.smoothed.shape != mix.bins.shape:
        raise InvalidInputError(
            f"mask {mask.smoothed.shape} does not match mixture {mix.bins.shape}"
        )
    bins = params.beta * (1.0 - mask.smoothed) * mix.bins
    return Spectrogram(bins, mix.config, mix.sample_rate)


def filter_utterance(
    recording: Waveform,
    reference: Waveform,
    profile: ResponseProfile,
    params: MaskParams | None = None,
    delay: DelayEstimate | None = None,
    force_offset: bool = False,
) -> Waveform:
    """Remove the robot's own speech from a recording, given its reference.

    Pipeline: delay detection, trim to the reference window, analyze both,
    mask, subtract, resynthesize. Samples outside the aligned reference
    window pass through unmodified (the robot is not speaking there). Output
    length equals the recording length.

    A precomputed ``delay`` skips detection. A reference with exactly zero
    energy is aligned at offset 0: there is nothing to subtract, so the mask
    stays empty and only the beta gain applies inside the window.
    """
    params = params or MaskParams()
    if recording.sample_rate != reference.sample_rate:
        raise InvalidInputError("recording and reference sample rates differ")
    if recording.sample_rate != profile.sample_rate:
        raise InvalidInputError(
            f"recording rate {recording.sample_rate} does not match profile "
            f"rate {profile.sample_rate}"
        )
    silent_reference = not np.any(reference.samples)
    if delay is None:
        if silent_reference:
            delay = DelayEstimate(offset=0, peak=0.0, confident=False)
        else:
            delay = detect_delay(recording, reference)
    aligned = trim_to_reference(
        recording, reference, delay, force=force_offset or silent_reference
    )
    mix_spec = stft(aligned, profile.config)
    ref_spec = stft(reference, profile.config)
    mask = build_mask(mix_spec, ref_spec, profile, params)
    estimate = istft(subtract(mix_spec, mask, params))

    out = recording.samples.copy()
    n_ref = len(reference)
    dst_lo = max(delay.offset, 0)
    dst_hi = min(delay.offset + n_ref, len(recording))
    if dst_hi > dst_lo:
        src_lo = dst_lo - delay.offset
        out[dst_lo:dst_hi] = estimate.samples[src_lo : src_lo + (dst_hi - dst_lo)]
    return Waveform(out, recording.sample_rate)


def post_filter(estimate: Waveform, hook: str | None) -> Waveform:
    """Run an external restoration command over the estimate.

    The hook is invoked as ``<hook> <input.wav> <output.wav>`` and must exit
    0; its result is read back and returned. With no hook configured the
    estimate is returned unchanged.
    """
    if hook is None or hook == "":
        return estimate
    argv = shlex.split(hook) if isinstance(hook, str) else list(hook)
    with tempfile.TemporaryDirectory(prefix="egofilter-post-") as tmp:
        in_path = Path(tmp) / "input.wav"
        out_path = Path(tmp) / "output.wav"
        audio_io.write_wav(in_path, estimate, encoding="float32")
        proc = subprocess.run(
            argv + [str(in_path), str(out_path)],
            capture_output=True,
            text=True,
        )
        if proc.returncode != 0:
            raise PostFilterError(
                f"post-filter hook exited with status {proc.returncode}",
                stdout=proc.stdout,
                stderr=proc.stderr,
            )
        return audio_io.read_wav(out_path)
