"""Overlapping-speech dataset synthesis.

A triplet overlays a gain-scaled clean utterance, behind a random stretch of
leading silence, onto a robot-speech recording. All addends are first snapped
to the 2^-23 grid (the float32 mantissa step at unit scale) so the mix is
bit-exact: ``noisy - clean == robot`` on every unclipped sample, in memory
and in the written float32 WAV files alike.
"""

from __future__ import annotations

import json
import os
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import audio_io
from .calibration import ResponseProfile, apply_response
from .dsp import Waveform
from .errors import InvalidInputError

_GRID = float(2**23)


@dataclass(frozen=True)
class MixSpec:
    """How to overlay a clean target onto robot speech."""

    target_gain_db: float = -25.0
    silence_min_s: float = 0.5
    silence_max_s: float = 1.5
    segment_length_s: float = 5.0
    seed: int = 0

    def __post_init__(self):
        if self.silence_min_s < 0 or self.silence_min_s > self.silence_max_s:
            raise InvalidInputError("need 0 <= silence_min_s <= silence_max_s")
        if self.segment_length_s <= 0:
            raise InvalidInputError("segment_length_s must be positive")


@dataclass(frozen=True)
class TrainingTriplet:
    """Clean target, noisy mixture, and robot reference, all segment-length."""

    clean: Waveform
    noisy: Waveform
    reference: Waveform
    transcript: str
    offset_samples: int
    room_tag: str
    clip_fraction: float


def _quantize(x: np.ndarray) -> np.ndarray:
    return np.round(x * _GRID) / _GRID


def _silence_rng(seed: int, index: int) -> np.random.Generator:
    # Counter-based: draws depend only on (seed, index), not on call order.
    return np.random.Generator(np.random.Philox(key=seed, counter=index))


def make_triplet(
    robot_speech: Waveform,
    clean_target: Waveform,
    reference: Waveform,
    spec: MixSpec,
    index: int,
    transcript: str = "",
    room_tag: str = "default",
) -> TrainingTriplet:
    """Mix one training/evaluation triplet.

    The leading-silence length is drawn uniformly from
    [silence_min_s, silence_max_s] by a counter-based generator keyed by
    (spec.seed, index), so the whole dataset is reproducible and
    order-independent. Summed samples outside [-1, 1] are hard-clipped and
    counted in ``clip_fraction``.
    """
    rate = robot_speech.sample_rate
    if clean_target.sample_rate != rate or reference.sample_rate != rate:
        raise InvalidInputError("triplet inputs must share one sample rate")
    seg = int(round(spec.segment_length_s * rate))
    if len(robot_speech) < seg:
        raise InvalidInputError(
            f"robot speech is {len(robot_speech)} samples, need {seg}"
        )
    if len(reference) < seg:
        raise InvalidInputError(f"reference is {len(reference)} samples, need {seg}")

    rng = _silence_rng(spec.seed, index)
    silence_s = rng.uniform(spec.silence_min_s, spec.silence_max_s)
    offset = int(round(silence_s * rate))

    gain = 10.0 ** (spec.target_gain_db / 20.0)
    clean = np.zeros(seg)
    tail = (gain * clean_target.samples)[: max(0, seg - offset)]
    clean[offset : offset + tail.size] = tail
    clean = _quantize(clean)
    robot = _quantize(robot_speech.samples[:seg])

    noisy = clean + robot  # exact: both addends on the 2^-23 grid
    clipped = np.abs(noisy) > 1.0
    noisy = np.clip(noisy, -1.0, 1.0)

    return TrainingTriplet(
        clean=Waveform(clean, rate),
        noisy=Waveform(noisy, rate),
        reference=Waveform(_quantize(reference.samples[:seg]), rate),
        transcript=transcript,
        offset_samples=offset,
        room_tag=room_tag,
        clip_fraction=float(clipped.mean()),
    )


def simulate_robot_recording(
    reference: Waveform,
    profile: ResponseProfile,
    noise_rms: float = 0.0,
    seed: int = 0,
) -> Waveform:
    """Desk-scale stand-in for an as-recorded robot utterance.

    Shapes the reference through the profile's per-bin gain and adds
    stationary white noise at the requested RMS.
    """
    shaped = apply_response(reference, profile)
    if noise_rms <= 0:
        return shaped
    noise = np.random.Generator(np.random.Philox(key=seed)).normal(
        0.0, noise_rms, size=len(shaped)
    )
    return Waveform(shaped.samples + noise, shaped.sample_rate)


def _collect_robot_files(robot_dir: Path) -> list[tuple[Path, Path, str]]:
    """(recording, reference, room_tag) per robot utterance.

    A sibling ``<stem>.ref.wav`` holds the reference signal the robot played;
    without one the recording doubles as its own reference. The room tag is
    the first subdirectory under ``robot_dir``, or 'default' for flat files.
    """
    out = []
    for path in sorted(robot_dir.rglob("*.wav")):
        if path.name.endswith(".ref.wav"):
            continue
        ref = path.with_name(path.stem + ".ref.wav")
        rel = path.relative_to(robot_dir)
        room = rel.parts[0] if len(rel.parts) > 1 else "default"
        out.append((path, ref if ref.exists() else path, room))
    return out


def _collect_clean_files(clean_dir: Path) -> list[tuple[Path, str]]:
    out = []
    for path in sorted(clean_dir.rglob("*.wav")):
        txt = path.with_suffix(".txt")
        if not txt.exists():
            warnings.warn(f"no transcript next to {path}, skipping", stacklevel=3)
            continue
        out.append((path, txt.read_text(encoding="utf-8").strip()))
    return out


def build_manifest(
    robot_dir: str | os.PathLike,
    clean_dir: str | os.PathLike,
    out_manifest: str | os.PathLike,
    spec: MixSpec,
    split: tuple[float, float] = (0.8, 0.2),
    audio_dir: str | os.PathLike | None = None,
) -> list[dict]:
    """Mix every robot recording with a randomly drawn clean utterance.

    Writes the triplet WAVs (float32) plus one JSON record per line to
    ``out_manifest``; paths in the manifest are relative to it. The
    train/validation split honors the given fractions within each room tag
    to within one item. Deterministic under ``spec.seed``.
    """
    robot_dir = Path(robot_dir)
    clean_dir = Path(clean_dir)
    out_manifest = Path(out_manifest)
    if abs(sum(split) - 1.0) > 1e-6:
        raise InvalidInputError("split fractions must sum to 1")
    robots = _collect_robot_files(robot_dir)
    cleans = _collect_clean_files(clean_dir)
    if not robots:
        raise InvalidInputError(f"no robot recordings under {robot_dir}")
    if not cleans:
        raise InvalidInputError(f"no clean utterances with transcripts under {clean_dir}")

    audio_root = Path(audio_dir) if audio_dir is not None else out_manifest.parent / "audio"
    audio_root.mkdir(parents=True, exist_ok=True)
    out_manifest.parent.mkdir(parents=True, exist_ok=True)

    rng = np.random.default_rng(np.random.SeedSequence(entropy=spec.seed, spawn_key=(1,)))
    pick = rng.integers(0, len(cleans), size=len(robots))

    # Per-room validation counts: round(n * validation fraction).
    by_room: dict[str, list[int]] = {}
    for i, (_, _, room) in enumerate(robots):
        by_room.setdefault(room, []).append(i)
    split_of = {}
    for room, idxs in sorted(by_room.items()):
        order = rng.permutation(len(idxs))
        n_val = int(round(len(idxs) * split[1]))
        chosen = {idxs[order[j]] for j in range(n_val)}
        for i in idxs:
            split_of[i] = "validation" if i in chosen else "train"

    records = []
    with open(out_manifest, "w", encoding="utf-8") as fh:
        for i, (rec_path, ref_path, room) in enumerate(robots):
            clean_path, transcript = cleans[pick[i]]
            triplet = make_triplet(
                audio_io.read_wav(rec_path),
                audio_io.read_wav(clean_path),
                audio_io.read_wav(ref_path),
                spec,
                index=i,
                transcript=transcript,
                room_tag=room,
            )
            stem = f"{i:05d}_{room}"
            paths = {}
            for kind in ("clean", "noisy", "reference"):
                p = audio_root / f"{stem}_{kind}.wav"
                audio_io.write_wav(p, getattr(triplet, kind), encoding="float32")
                paths[kind] = os.path.relpath(p, out_manifest.parent)
            record = {
                "clean": paths["clean"],
                "noisy": paths["noisy"],
                "reference": paths["reference"],
                "transcript": transcript,
                "offset_samples": triplet.offset_samples,
                "room_tag": room,
                "split": split_of[i],
                "clip_fraction": triplet.clip_fraction,
            }
            fh.write(json.dumps(record) + "\n")
            records.append(record)
    if not records:
        raise InvalidInputError("manifest came out empty")
    return records


def read_manifest(path: str | os.PathLike) -> list[dict]:
    """Load manifest records, resolving audio paths against the manifest dir."""
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
