"""Operator command line: calibrate, filter, mix, eval.

Settings resolve in order: explicit flag, environment variable (hooks only:
EGOFILTER_ASR_HOOK, EGOFILTER_POSTFILTER_HOOK), config file (``key = value``
lines), built-in default. Every command exits 0 exactly when its output
artifact was written.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import audio_io
from .alignment import detect_delay, trim_to_reference
from .calibration import ResponseProfile, estimate_noise_floor, estimate_response
from .dsp import StftConfig
from .errors import EgoFilterError
from .masking import MaskParams, filter_utterance, post_filter
from .metrics import METHODS, evaluate
from .mixer import MixSpec, build_manifest


def load_config(path: str | os.PathLike) -> dict[str, str]:
    """Parse ``key = value`` lines; '#' starts a comment."""
    out: dict[str, str] = {}
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise EgoFilterError(f"bad config line (expected key = value): {raw!r}")
        key, value = line.split("=", 1)
        out[key.strip()] = value.strip()
    return out


class _Settings:
    def __init__(self, args: argparse.Namespace):
        self.args = args
        self.config = load_config(args.config) if getattr(args, "config", None) else {}

    def get(self, key: str, default=None, cast=str, env: str | None = None):
        value = getattr(self.args, key, None)
        if value is not None:
            return value
        if env is not None and os.environ.get(env):
            return cast(os.environ[env])
        if key in self.config:
            return cast(self.config[key])
        return default

    def stft_config(self) -> StftConfig:
        return StftConfig(
            fft_size=self.get("fft_size", 1200, int),
            window_length=self.get("window_length", 400, int),
            hop_length=self.get("hop_length", 160, int),
        )

    def mask_params(self) -> MaskParams:
        return MaskParams(
            alpha=self.get("alpha", 1.5, float),
            beta=self.get("beta", 2.0, float),
            subtract_noise_floor=not getattr(self.args, "no_noise_floor", False),
        )

    def asr_hook(self):
        return self.get("asr_hook", None, env="EGOFILTER_ASR_HOOK")

    def postfilter_hook(self):
        return self.get("postfilter_hook", None, env="EGOFILTER_POSTFILTER_HOOK")


def _require_files(*paths: str) -> None:
    for p in paths:
        if not Path(p).exists():
            raise EgoFilterError(f"file not found: {p}")


def cmd_calibrate(args: argparse.Namespace) -> int:
    settings = _Settings(args)
    _require_files(args.played, args.recorded, args.noise)
    cfg = settings.stft_config()
    played = audio_io.read_wav(args.played)
    recorded = audio_io.read_wav(args.recorded)
    noise = audio_io.read_wav(args.noise)
    if not args.no_align:
        # Sweeps may start at 0 Hz (silence), so use a longer detector.
        delay = detect_delay(recorded, played, detector_seconds=args.detector_seconds)
        recorded = trim_to_reference(recorded, played, delay, force=args.force_offset)
        print(f"alignment: offset={delay.offset} samples, peak={delay.peak:.3f}")
    floor = estimate_noise_floor(noise, cfg)
    profile = estimate_response(played, recorded, floor, cfg, aggregate=args.aggregate)
    profile.save(args.out)
    n_interp = int(profile.interpolated.sum())
    print(
        f"excited bins: {profile.n_bins - n_interp}/{profile.n_bins} "
        f"({100 * profile.excited_fraction():.1f}%), interpolated: {n_interp}"
    )
    print(f"profile written to {args.out}")
    return 0


def cmd_filter(args: argparse.Namespace) -> int:
    settings = _Settings(args)
    _require_files(args.noisy, args.reference, args.profile)
    profile = ResponseProfile.load(args.profile)
    runtime_cfg = settings.stft_config()
    if profile.config != runtime_cfg:
        raise EgoFilterError(
            f"profile/config mismatch: profile FFT size {profile.config.fft_size} "
            f"(window {profile.config.window_length}, hop {profile.config.hop_length}) "
            f"vs runtime FFT size {runtime_cfg.fft_size} "
            f"(window {runtime_cfg.window_length}, hop {runtime_cfg.hop_length})"
        )
    noisy = audio_io.read_wav(args.noisy)
    reference = audio_io.read_wav(args.reference)
    params = settings.mask_params()
    t0 = time.perf_counter()
    delay = None
    if np.any(reference.samples):
        delay = detect_delay(noisy, reference)
        print(
            f"offset: {delay.offset} samples ({delay.offset / noisy.sample_rate:.3f} s), "
            f"peak: {delay.peak:.3f}"
        )
    estimate = filter_utterance(
        noisy, reference, profile, params, delay=delay, force_offset=args.force_offset
    )
    hook = settings.postfilter_hook()
    if hook:
        estimate = post_filter(estimate, hook)
    elapsed = time.perf_counter() - t0
    audio_io.write_wav(args.out, estimate, encoding="float32")
    print(f"filter time: {elapsed:.3f} s")
    print(f"estimate written to {args.out}")
    return 0


def cmd_mix(args: argparse.Namespace) -> int:
    settings = _Settings(args)
    _require_files(args.robot_dir, args.clean_dir)
    spec = MixSpec(
        target_gain_db=settings.get("gain_db", -25.0, float),
        silence_min_s=settings.get("silence_min", 0.5, float),
        silence_max_s=settings.get("silence_max", 1.5, float),
        segment_length_s=settings.get("segment_seconds", 5.0, float),
        seed=settings.get("seed", 0, int),
    )
    train_frac, val_frac = (float(x) for x in args.split.split(","))
    records = build_manifest(
        args.robot_dir,
        args.clean_dir,
        args.out_manifest,
        spec,
        split=(train_frac, val_frac),
        audio_dir=args.audio_dir,
    )
    rooms: dict[str, int] = {}
    for rec in records:
        rooms[rec["room_tag"]] = rooms.get(rec["room_tag"], 0) + 1
    per_room = ", ".join(f"{k}: {v}" for k, v in sorted(rooms.items()))
    print(f"manifest written to {args.out_manifest} ({len(records)} items; {per_room})")
    return 0


def cmd_eval(args: argparse.Namespace) -> int:
    settings = _Settings(args)
    _require_files(args.manifest)
    profile = None
    profile_path = settings.get("profile", None)
    if profile_path:
        _require_files(profile_path)
        profile = ResponseProfile.load(profile_path)
    report = evaluate(
        args.manifest,
        args.method,
        profile=profile,
        params=settings.mask_params(),
        asr_hook=settings.asr_hook(),
        postfilter_hook=settings.postfilter_hook(),
        jobs=args.jobs,
    )
    print(report.summary())
    failed = [it for it in report.items if it.error is not None]
    for it in failed:
        print(f"item {it.item_id} failed: {it.error}", file=sys.stderr)
    if args.out:
        report.save(args.out)
        print(f"report written to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="egofilter",
        description="Filter a robot's own speech out of its microphone recordings.",
    )
    parser.add_argument("--config", help="key = value settings file")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("calibrate", help="estimate the speaker-microphone response")
    p.add_argument("played", help="WAV of the sweep signal sent to the speaker")
    p.add_argument("recorded", help="WAV of the same sweep as captured by the microphone")
    p.add_argument("noise", help="WAV of the idle device (fan) noise, >= 1 s")
    p.add_argument("-o", "--out", required=True, help="output profile path")
    p.add_argument("--detector-seconds", type=float, default=2.0)
    p.add_argument("--aggregate", choices=("weighted_mean", "mean", "median"),
                   default="weighted_mean")
    p.add_argument("--no-align", action="store_true",
                   help="skip delay alignment (inputs already aligned)")
    p.add_argument("--force-offset", action="store_true",
                   help="trim even on a low-confidence delay estimate")
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("filter", help="remove robot speech from one recording")
    p.add_argument("noisy", help="WAV with overlapped robot + human speech")
    p.add_argument("reference", help="WAV the robot played (pre-acquired)")
    p.add_argument("-p", "--profile", required=True, help="response profile file")
    p.add_argument("-o", "--out", required=True, help="output estimate WAV")
    p.add_argument("--alpha", type=float, help="oversubtraction factor")
    p.add_argument("--beta", type=float, help="post-subtraction gain")
    p.add_argument("--no-noise-floor", action="store_true",
                   help="leave the stationary noise floor out of the mask threshold")
    p.add_argument("--postfilter", dest="postfilter_hook",
                   help="restoration command: <hook> <in.wav> <out.wav>")
    p.add_argument("--force-offset", action="store_true",
                   help="proceed on a low-confidence delay estimate")
    p.set_defaults(func=cmd_filter)

    p = sub.add_parser("mix", help="synthesize an overlapping-speech dataset")
    p.add_argument("robot_dir", help="directory of robot recordings (*.wav, optional *.ref.wav)")
    p.add_argument("clean_dir", help="directory of clean utterances with .txt transcripts")
    p.add_argument("-o", "--out-manifest", required=True)
    p.add_argument("--audio-dir", help="where to write triplet WAVs (default: next to manifest)")
    p.add_argument("--seed", type=int)
    p.add_argument("--gain-db", type=float, help="clean target gain in dB")
    p.add_argument("--silence-min", type=float)
    p.add_argument("--silence-max", type=float)
    p.add_argument("--segment-seconds", type=float)
    p.add_argument("--split", default="0.8,0.2", help="train,validation fractions")
    p.set_defaults(func=cmd_mix)

    p = sub.add_parser("eval", help="score a method over a manifest")
    p.add_argument("manifest")
    p.add_argument("--method", required=True, choices=METHODS)
    p.add_argument("-p", "--profile", help="response profile (needed for ss methods)")
    p.add_argument("--out", help="report file (JSON lines)")
    p.add_argument("--alpha", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--no-noise-floor", action="store_true")
    p.add_argument("--asr-hook", dest="asr_hook",
                   help="transcription command: <hook> <in.wav> prints text")
    p.add_argument("--postfilter-hook", dest="postfilter_hook")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_eval)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except EgoFilterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: file not found: {exc.filename}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
