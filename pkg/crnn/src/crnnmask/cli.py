"""Thin command line: train on a manifest, infer on a WAV pair."""

from __future__ import annotations

import argparse
import sys

import numpy as np
from scipy.io import wavfile

from .data import load_wav
from .inference import infer
from .spec import CrnnSpec, StftSetup, tiny, tiny_stft
from .training import TrainConfig, train


def cmd_train(args: argparse.Namespace) -> int:
    if args.preset == "tiny":
        stft = tiny_stft()
        spec = tiny(bins=stft.n_bins, batch_norm=args.batch_norm)
    else:
        stft = StftSetup()
        spec = CrnnSpec(batch_norm=args.batch_norm)
    config = TrainConfig(
        segment_seconds=args.segment_seconds,
        batch_size=args.batch_size,
        learning_rate=args.learning_rate,
        steps=args.steps,
        val_interval=args.val_interval,
        seed=args.seed,
    )
    summary = train(args.manifest, spec, stft, config, args.out)
    print(
        f"best val loss {summary['best_val_loss']:.6f} at step {summary['best_step']}; "
        f"checkpoint: {summary['checkpoint']}"
    )
    return 0


def cmd_infer(args: argparse.Namespace) -> int:
    noisy, rate = load_wav(args.noisy)
    reference, ref_rate = load_wav(args.reference)
    if rate != ref_rate:
        print("error: sample rates differ", file=sys.stderr)
        return 1
    estimate = infer(noisy, reference, args.checkpoint,
                     mask_override=args.mask_override)
    wavfile.write(args.out, rate, estimate.astype(np.float32))
    print(f"estimate written to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="crnnmask",
        description="Train or run the two-stream soft-mask network.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train from a triplet manifest")
    p.add_argument("manifest")
    p.add_argument("-o", "--out", required=True, help="checkpoint path")
    p.add_argument("--preset", choices=("full", "tiny"), default="full")
    p.add_argument("--batch-norm", action="store_true")
    p.add_argument("--segment-seconds", type=float, default=5.0)
    p.add_argument("--batch-size", type=int, default=1)
    p.add_argument("--learning-rate", type=float, default=1e-3)
    p.add_argument("--steps", type=int, default=500)
    p.add_argument("--val-interval", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("infer", help="filter one noisy/reference WAV pair")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--noisy", required=True)
    p.add_argument("--reference", required=True)
    p.add_argument("-o", "--out", required=True)
    p.add_argument("--mask-override", choices=("ones", "zeros"))
    p.set_defaults(func=cmd_infer)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
