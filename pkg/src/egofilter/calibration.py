"""Speaker-microphone response and ego-noise estimation.

The playback chain is modeled per frequency bin as a real gain (the product
of the loudspeaker and microphone responses) plus an additive stationary
noise magnitude. Both are estimated from two recordings: one of a stepped
sine sweep, one of the idle device.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .dsp import Spectrogram, StftConfig, Waveform, istft, stft
from .errors import CalibrationError, InvalidInputError

PROFILE_FORMAT_VERSION = 1

# Frames count as excited when the reference magnitude exceeds this
# fraction of its global maximum; rejects silence without discarding
# quiet sweep steps.
EXCITATION_REL_THRESHOLD = 1e-4


@dataclass(frozen=True)
class SweepSpec:
    """Stepped sine sweep: f_start, f_start + f_step, ... strictly below f_end."""

    f_start: float = 0.0
    f_end: float = 8001.0
    f_step: float = 13.0
    dwell: float = 0.05
    amplitude: float = 0.5

    def __post_init__(self):
        if not 0 <= self.f_start < self.f_end:
            raise InvalidInputError("need 0 <= f_start < f_end")
        if self.f_step <= 0:
            raise InvalidInputError("f_step must be positive")
        if self.dwell <= 0:
            raise InvalidInputError("dwell must be positive")
        if self.amplitude <= 0:
            raise InvalidInputError("amplitude must be positive")

    def frequencies(self) -> np.ndarray:
        return np.arange(self.f_start, self.f_end, self.f_step)


def generate_sweep(spec: SweepSpec, sample_rate: int) -> Waveform:
    """Concatenate phase-continuous constant-frequency sine segments.

    Each of the swept frequencies is held for ``dwell`` seconds; the phase
    accumulator carries across segment boundaries so there are no clicks.
    """
    freqs = spec.frequencies()
    if freqs[-1] > sample_rate / 2:
        raise InvalidInputError(
            f"sweep reaches {freqs[-1]:g} Hz, above Nyquist ({sample_rate / 2:g} Hz)"
        )
    seg_len = int(round(spec.dwell * sample_rate))
    if seg_len == 0:
        raise InvalidInputError("dwell too short for this sample rate")
    out = np.empty(len(freqs) * seg_len)
    t = np.arange(seg_len) / sample_rate
    phase = 0.0
    for i, f in enumerate(freqs):
        out[i * seg_len : (i + 1) * seg_len] = spec.amplitude * np.sin(
            phase + 2.0 * np.pi * f * t
        )
        phase = (phase + 2.0 * np.pi * f * seg_len / sample_rate) % (2.0 * np.pi)
    return Waveform(out, sample_rate)


def estimate_noise_floor(ego_noise: Waveform, config: StftConfig | None = None) -> np.ndarray:
    """Per-bin mean magnitude of a stationary noise recording (>= 1 s).

    Frames wrap around the end of the (hop-aligned, truncated) recording:
    the noise is stationary, so circular framing keeps the mean free of
    zero-padding bias and exactly invariant to repeating the recording.
    """
    if ego_noise.duration < 1.0:
        raise InvalidInputError(
            f"noise recording is {ego_noise.duration:.2f} s, need at least 1 s"
        )
    cfg = config or StftConfig()
    usable = (len(ego_noise) // cfg.hop_length) * cfg.hop_length
    x = ego_noise.samples[:usable]
    n_frames = usable // cfg.hop_length
    idx = (cfg.hop_length * np.arange(n_frames)[:, None] + np.arange(cfg.window_length)) % usable
    frames = x[idx] * cfg.window()
    return np.abs(np.fft.rfft(frames, n=cfg.fft_size, axis=1)).mean(axis=0)


@dataclass(frozen=True)
class ResponseProfile:
    """Per-bin playback-chain gain plus mean ego-noise magnitude.

    ``interpolated`` flags bins the sweep never excited; their gain is filled
    by linear interpolation from neighboring estimated bins.
    """

    response: np.ndarray
    noise_floor: np.ndarray
    config: StftConfig
    sample_rate: int
    interpolated: np.ndarray

    def __post_init__(self):
        resp = np.array(self.response, dtype=np.float64)
        floor = np.array(self.noise_floor, dtype=np.float64)
        flags = np.array(self.interpolated, dtype=bool)
        n = self.config.n_bins
        if resp.shape != (n,) or floor.shape != (n,) or flags.shape != (n,):
            raise InvalidInputError(f"profile vectors must all have {n} bins")
        if not (np.all(np.isfinite(resp)) and np.all(np.isfinite(floor))):
            raise InvalidInputError("profile entries must be finite")
        if np.any(resp < 0) or np.any(floor < 0):
            raise InvalidInputError("profile entries must be non-negative")
        for name, arr in (("response", resp), ("noise_floor", floor), ("interpolated", flags)):
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "sample_rate", int(self.sample_rate))

    @property
    def n_bins(self) -> int:
        return self.response.size

    def excited_fraction(self) -> float:
        return 1.0 - float(self.interpolated.mean())

    def save(self, path: str | os.PathLike) -> None:
        """Write the versioned tab-separated text format."""
        cfg = self.config
        lines = [
            f"# egofilter-response-profile\tv{PROFILE_FORMAT_VERSION}",
            f"# sample_rate\t{self.sample_rate}",
            f"# fft_size\t{cfg.fft_size}",
            f"# window_length\t{cfg.window_length}",
            f"# hop_length\t{cfg.hop_length}",
            f"# window_shape\t{cfg.window_shape}",
            "# columns\tbin\tresponse\tnoise_floor\tinterpolated",
        ]
        for b in range(self.n_bins):
            # repr of the Python float round-trips exactly through text
            lines.append(
                f"{b}\t{float(self.response[b])!r}\t{float(self.noise_floor[b])!r}"
                f"\t{int(self.interpolated[b])}"
            )
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")

    @classmethod
    def load(cls, path: str | os.PathLike) -> "ResponseProfile":
        header: dict[str, str] = {}
        rows: list[tuple[int, float, float, bool]] = []
        with open(path, "r", encoding="utf-8") as fh:
            for raw in fh:
                line = raw.rstrip("\n")
                if not line:
                    continue
                if line.startswith("#"):
                    parts = line[1:].strip().split("\t")
                    if len(parts) >= 2:
                        header[parts[0]] = parts[1]
                    continue
                b, resp, floor, flag = line.split("\t")
                rows.append((int(b), float(resp), float(floor), bool(int(flag))))
        try:
            cfg = StftConfig(
                fft_size=int(header["fft_size"]),
                window_length=int(header["window_length"]),
                hop_length=int(header["hop_length"]),
                window_shape=header.get("window_shape", "hann"),
            )
            rate = int(header["sample_rate"])
        except KeyError as missing:
            raise InvalidInputError(f"profile file lacks header field {missing}") from None
        rows.sort(key=lambda r: r[0])
        if [r[0] for r in rows] != list(range(cfg.n_bins)):
            raise InvalidInputError("profile file does not cover every bin exactly once")
        return cls(
            response=np.array([r[1] for r in rows]),
            noise_floor=np.array([r[2] for r in rows]),
            config=cfg,
            sample_rate=rate,
            interpolated=np.array([r[3] for r in rows]),
        )


def estimate_response(
    played: Waveform,
    recorded: Waveform,
    noise_floor: np.ndarray,
    config: StftConfig | None = None,
    aggregate: str = "weighted_mean",
) -> ResponseProfile:
    """Estimate the per-bin playback-chain gain from an aligned sweep pair.

    For every excited frame the clamped magnitude ratio
    ``max(0, |recorded| - noise_floor) / |played|`` is formed; per bin the
    ratios are pooled by ``aggregate``: 'weighted_mean' (weights
    ``|played|^2``, the default: it suppresses frames admitted only through
    window sidelobe leakage), 'mean', or 'median'. Bins without any excited
    frame are linearly interpolated from their neighbors and flagged.
    """
    cfg = config or StftConfig()
    if played.sample_rate != recorded.sample_rate:
        raise InvalidInputError("played and recorded sample rates differ")
    n = min(len(played), len(recorded))
    if n == 0:
        raise InvalidInputError("empty calibration signals")
    floor = np.asarray(noise_floor, dtype=np.float64)
    if floor.shape != (cfg.n_bins,):
        raise InvalidInputError(f"noise_floor must have {cfg.n_bins} bins")

    mag_a = np.abs(stft(Waveform(played.samples[:n], played.sample_rate), cfg).bins)
    mag_x = np.abs(stft(Waveform(recorded.samples[:n], recorded.sample_rate), cfg).bins)
    peak = mag_a.max()
    if peak <= 0:
        raise CalibrationError("played signal is silent; nothing is excited")
    excited = mag_a > EXCITATION_REL_THRESHOLD * peak
    numer = np.maximum(0.0, mag_x - floor)

    n_bins = cfg.n_bins
    response = np.full(n_bins, np.nan)
    counts = excited.sum(axis=0)
    if aggregate == "weighted_mean":
        wsum = np.where(excited, mag_a**2, 0.0).sum(axis=0)
        rsum = np.where(excited, numer * mag_a, 0.0).sum(axis=0)
        ok = counts > 0
        response[ok] = rsum[ok] / wsum[ok]
    elif aggregate == "mean":
        with np.errstate(invalid="ignore", divide="ignore"):
            ratios = np.where(excited, numer / mag_a, 0.0)
        ok = counts > 0
        response[ok] = ratios.sum(axis=0)[ok] / counts[ok]
    elif aggregate == "median":
        for b in np.nonzero(counts > 0)[0]:
            sel = excited[:, b]
            response[b] = np.median(numer[sel, b] / mag_a[sel, b])
    else:
        raise InvalidInputError(f"unknown aggregate {aggregate!r}")

    estimated = np.isfinite(response)
    if not estimated.any():
        raise CalibrationError("no frequency bin was excited above threshold")
    if not estimated.all():
        known = np.nonzero(estimated)[0]
        missing = np.nonzero(~estimated)[0]
        response[missing] = np.interp(missing, known, response[known])
    return ResponseProfile(
        response=response,
        noise_floor=floor,
        config=cfg,
        sample_rate=played.sample_rate,
        interpolated=~estimated,
    )


def apply_response(w: Waveform, profile: ResponseProfile) -> Waveform:
    """Forward channel model: scale each bin's magnitude by the profile gain.

    Used to synthesize desk-scale 'as recorded' robot speech from a reference
    signal; noise is not added here.
    """
    if w.sample_rate != profile.sample_rate:
        raise InvalidInputError("waveform and profile sample rates differ")
    spec = stft(w, profile.config)
    shaped = Spectrogram(spec.bins * profile.response, profile.config, w.sample_rate)
    y = istft(shaped)
    return Waveform(y.samples[: len(w)], w.sample_rate)
