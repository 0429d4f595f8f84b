"""Locating the reference signal inside a recording by cross-correlation.

The first half second of the reference acts as a detector; the lag with the
highest normalized correlation against the recording gives the delay. This
replaces frame-power voice activity detection, which mistakes fan noise and
room rumble for speech onsets.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import correlate

from .dsp import Waveform
from .errors import AlignmentError, InvalidInputError

DEFAULT_DETECTOR_SECONDS = 0.5

# Normalized correlation below this is treated as "reference not found".
DEFAULT_CONFIDENCE_THRESHOLD = 0.2


@dataclass(frozen=True)
class DelayEstimate:
    """Recording index where the reference starts, with the matched peak."""

    offset: int
    peak: float
    confident: bool


def detect_delay(
    recording: Waveform,
    reference: Waveform,
    detector_seconds: float = DEFAULT_DETECTOR_SECONDS,
    confidence_threshold: float = DEFAULT_CONFIDENCE_THRESHOLD,
) -> DelayEstimate:
    """Find the lag maximizing normalized cross-correlation.

    Negative lags are searched too (the reference may start before the
    recording origin). Normalization divides by the energies of the detector
    and of the overlapped recording segment at each lag, so the result is
    invariant to recording gain and the peak is comparable across inputs.
    """
    if recording.sample_rate != reference.sample_rate:
        raise InvalidInputError("recording and reference sample rates differ")
    m = int(round(detector_seconds * reference.sample_rate))
    if m <= 0:
        raise InvalidInputError("detector_seconds must be positive")
    if len(reference) < m:
        raise InvalidInputError(
            f"reference ({len(reference)} samples) shorter than detector ({m})"
        )
    if len(recording) < m:
        raise InvalidInputError(
            f"recording ({len(recording)} samples) shorter than detector ({m})"
        )
    detector = reference.samples[:m]
    det_norm = float(np.sqrt(np.dot(detector, detector)))
    if det_norm == 0.0:
        return DelayEstimate(offset=0, peak=0.0, confident=False)

    r = recording.samples
    n = r.size
    # correlate(...,'full')[i] pairs detector start with lag k = i - (m - 1)
    num = correlate(r, detector, mode="full", method="fft")
    lags = np.arange(-(m - 1), n)
    cums = np.concatenate(([0.0], np.cumsum(r * r)))
    lo = np.clip(lags, 0, n)
    hi = np.clip(lags + m, 0, n)
    seg_energy = cums[hi] - cums[lo]
    denom = det_norm * np.sqrt(seg_energy)
    c = np.divide(num, denom, out=np.zeros_like(num), where=denom > 0)
    i = int(np.argmax(c))
    return DelayEstimate(
        offset=int(lags[i]),
        peak=float(c[i]),
        confident=bool(c[i] >= confidence_threshold),
    )


def trim_to_reference(
    recording: Waveform,
    reference: Waveform,
    delay: DelayEstimate,
    force: bool = False,
) -> Waveform:
    """Slice ``recording[offset : offset + len(reference)]``, zero-padded.

    Raises unless the estimate is confident; pass ``force=True`` to override.
    """
    if not delay.confident and not force:
        raise AlignmentError(
            f"delay estimate not confident (peak {delay.peak:.3f}); "
            "pass force=True to trim anyway"
        )
    n = len(reference)
    out = np.zeros(n)
    src_lo = max(delay.offset, 0)
    src_hi = min(delay.offset + n, len(recording))
    if src_hi > src_lo:
        dst_lo = src_lo - delay.offset
        out[dst_lo : dst_lo + (src_hi - src_lo)] = recording.samples[src_lo:src_hi]
    return Waveform(out, recording.sample_rate)
