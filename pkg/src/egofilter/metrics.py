"""Scoring: scale-invariant SDR, word error rate, and timed evaluation runs.

ASR is external: a hook command prints a transcript for a WAV file, and the
ground-truth text is the hook's own transcription of the clean signal (the
corpus text does not match once the segment is truncated mid-sentence).
"""

from __future__ import annotations

import json
import os
import shlex
import string
import subprocess
import tempfile
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import audio_io
from .calibration import ResponseProfile
from .dsp import Waveform
from .errors import AsrError, EvaluationError, InvalidInputError
from .masking import MaskParams, filter_utterance, post_filter

SI_SDR_CAP_DB = 200.0

METHODS = ("unfiltered", "ss", "ss+postfilter")

_PUNCT_TABLE = str.maketrans("", "", string.punctuation)


def si_sdr(estimate: Waveform, target: Waveform) -> float:
    """Scale-invariant signal-to-distortion ratio in dB.

    Projects the estimate onto the target's span; returns the energy ratio
    of the projection to the residual. Capped at +/-200 dB when either side
    is numerically zero relative to the other (1e-12 ratio).
    """
    if len(estimate) != len(target):
        raise InvalidInputError(
            f"estimate ({len(estimate)}) and target ({len(target)}) lengths differ"
        )
    t = target.samples
    e = estimate.samples
    t_energy = float(np.dot(t, t))
    if t_energy == 0.0:
        raise InvalidInputError("target signal is all zero")
    scale = float(np.dot(e, t)) / t_energy
    proj = scale * t
    residual = e - proj
    p = float(np.dot(proj, proj))
    r = float(np.dot(residual, residual))
    if r <= 1e-12 * p:
        return SI_SDR_CAP_DB
    if p <= 1e-12 * r:
        return -SI_SDR_CAP_DB
    return 10.0 * np.log10(p / r)


def normalize_tokens(text_or_tokens) -> list[str]:
    """Case-fold, strip punctuation, and drop empty tokens."""
    if isinstance(text_or_tokens, str):
        tokens = text_or_tokens.split()
    else:
        tokens = [str(t) for t in text_or_tokens]
    out = []
    for tok in tokens:
        tok = tok.casefold().translate(_PUNCT_TABLE).strip()
        if tok:
            out.append(tok)
    return out


def edit_distance(ref: list[str], hyp: list[str]) -> int:
    """Minimum substitutions + deletions + insertions, unit costs."""
    prev = list(range(len(hyp) + 1))
    for i, r in enumerate(ref, start=1):
        cur = [i]
        for j, h in enumerate(hyp, start=1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (r != h)))
        prev = cur
    return prev[-1]


def wer(reference_words, hypothesis_words) -> float:
    """Word error rate in percent; can exceed 100 on insertion-heavy output."""
    ref = normalize_tokens(reference_words)
    hyp = normalize_tokens(hypothesis_words)
    if not ref:
        raise InvalidInputError("reference is empty after normalization")
    return 100.0 * edit_distance(ref, hyp) / len(ref)


def transcribe(audio: Waveform, hook: str) -> list[str]:
    """Run the ASR hook (``<hook> <input.wav>``) and tokenize its stdout."""
    if not hook:
        raise InvalidInputError("ASR hook is not configured")
    argv = shlex.split(hook) if isinstance(hook, str) else list(hook)
    with tempfile.TemporaryDirectory(prefix="egofilter-asr-") as tmp:
        wav = Path(tmp) / "input.wav"
        audio_io.write_wav(wav, audio, encoding="int16")
        proc = subprocess.run(argv + [str(wav)], capture_output=True, text=True)
    if proc.returncode != 0:
        raise AsrError(
            f"ASR hook exited with status {proc.returncode}",
            stdout=proc.stdout,
            stderr=proc.stderr,
        )
    return normalize_tokens(proc.stdout)


@dataclass
class ItemResult:
    item_id: str
    room_tag: str
    si_sdr_db: float | None = None
    wer_percent: float | None = None
    compute_seconds: float | None = None
    error: str | None = None


@dataclass
class EvalReport:
    method: str
    items: list[ItemResult]
    aggregates: dict

    def summary(self) -> str:
        """Rows of mean/median/std per metric, per room tag and overall."""
        lines = [f"method: {self.method}"]
        for group in sorted(self.aggregates):
            stats = self.aggregates[group]
            n = stats.pop("_count") if "_count" in stats else None
            lines.append(f"== {group} (n={n}) ==" if n is not None else f"== {group} ==")
            lines.append(f"  {'metric':<16}{'mean':>10}{'median':>10}{'std':>10}")
            for metric, agg in stats.items():
                lines.append(
                    f"  {metric:<16}{agg['mean']:>10.3f}{agg['median']:>10.3f}"
                    f"{agg['std']:>10.3f}"
                )
            if n is not None:
                stats["_count"] = n
        return "\n".join(lines)

    def save(self, path: str | os.PathLike) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(json.dumps({"kind": "header", "method": self.method}) + "\n")
            for item in self.items:
                fh.write(json.dumps({"kind": "item", **asdict(item)}) + "\n")
            for group, stats in sorted(self.aggregates.items()):
                for metric, agg in stats.items():
                    if metric == "_count":
                        continue
                    fh.write(
                        json.dumps({"kind": "aggregate", "group": group, "metric": metric, **agg})
                        + "\n"
                    )


def _aggregate(items: list[ItemResult]) -> dict:
    groups: dict[str, list[ItemResult]] = {"overall": []}
    for it in items:
        if it.error is not None:
            continue
        groups["overall"].append(it)
        groups.setdefault(it.room_tag, []).append(it)
    out = {}
    for name, rows in groups.items():
        stats: dict = {"_count": len(rows)}
        for metric in ("si_sdr_db", "wer_percent", "compute_seconds"):
            vals = np.array([getattr(r, metric) for r in rows if getattr(r, metric) is not None])
            if vals.size == 0:
                continue
            stats[metric] = {
                "mean": float(vals.mean()),
                "median": float(np.median(vals)),
                # Sample std (N-1); a single item has no spread.
                "std": float(vals.std(ddof=1)) if vals.size > 1 else 0.0,
            }
        out[name] = stats
    return out


def _run_method(
    method: str,
    noisy: Waveform,
    reference: Waveform,
    profile: ResponseProfile | None,
    params: MaskParams,
    postfilter_hook: str | None,
) -> tuple[Waveform, float]:
    """Produce the estimate and the filtering-only wall time."""
    if method == "unfiltered":
        return noisy, 0.0
    if profile is None:
        raise InvalidInputError(f"method {method!r} needs a response profile")
    t0 = time.perf_counter()
    estimate = filter_utterance(noisy, reference, profile, params)
    elapsed = time.perf_counter() - t0
    if method == "ss+postfilter":
        if not postfilter_hook:
            raise InvalidInputError("method 'ss+postfilter' needs a post-filter hook")
        t0 = time.perf_counter()
        estimate = post_filter(estimate, postfilter_hook)
        elapsed += time.perf_counter() - t0
    return estimate, elapsed


def evaluate(
    manifest: str | os.PathLike,
    method: str,
    profile: ResponseProfile | None = None,
    params: MaskParams | None = None,
    asr_hook: str | None = None,
    postfilter_hook: str | None = None,
    jobs: int = 1,
) -> EvalReport:
    """Score one method over every manifest item.

    Per item: run the method on the noisy audio (timing the filtering step
    only), score SI-SDR against the clean target, and, when an ASR hook is
    configured, WER against the hook's transcription of the clean audio.
    Item failures are recorded in the report; only a fully failed run raises.
    """
    from .mixer import read_manifest  # local import to avoid a cycle

    if method not in METHODS:
        raise InvalidInputError(
            f"unknown method {method!r}; valid methods: {', '.join(METHODS)}"
        )
    params = params or MaskParams()
    records = read_manifest(manifest)
    if not records:
        raise InvalidInputError(f"manifest {manifest} is empty")

    def run_item(index_record) -> ItemResult:
        i, rec = index_record
        item_id = Path(rec["noisy"]).stem
        result = ItemResult(item_id=item_id, room_tag=rec.get("room_tag", "default"))
        try:
            noisy = audio_io.read_wav(rec["noisy"])
            clean = audio_io.read_wav(rec["clean"])
            reference = audio_io.read_wav(rec["reference"])
            estimate, elapsed = _run_method(
                method, noisy, reference, profile, params, postfilter_hook
            )
            # External post-filters may change length; score at clean length.
            if len(estimate) != len(clean):
                padded = np.zeros(len(clean))
                m = min(len(estimate), len(clean))
                padded[:m] = estimate.samples[:m]
                estimate = Waveform(padded, estimate.sample_rate)
            result.compute_seconds = elapsed
            result.si_sdr_db = si_sdr(estimate, clean)
            if asr_hook:
                truth = transcribe(clean, asr_hook)
                if truth:
                    result.wer_percent = wer(truth, transcribe(estimate, asr_hook))
        except Exception as exc:  # noqa: BLE001 - per-item failures are data
            result.error = f"{type(exc).__name__}: {exc}"
        return result

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            items = list(pool.map(run_item, enumerate(records)))
    else:
        items = [run_item(ir) for ir in enumerate(records)]

    if all(it.error is not None for it in items):
        raise EvaluationError(
            f"all {len(items)} items failed; first error: {items[0].error}"
        )
    return EvalReport(method=method, items=items, aggregates=_aggregate(items))
