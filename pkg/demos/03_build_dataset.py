"""Manufacture an overlapping-speech dataset from two directories of WAVs.

Every robot recording is overlaid with a randomly chosen clean utterance:
0.5 to 1.5 s of leading silence, then the clean speech at -25 dB. One JSON
line per triplet lands in the manifest, with a per-room train/validation
split. The same seed always produces byte-identical output.
"""

import tempfile
from pathlib import Path

import numpy as np

from egofilter import MixSpec, Waveform, build_manifest, read_manifest, write_wav

SR = 16000
rng = np.random.default_rng(7)

root = Path(tempfile.mkdtemp(prefix="egofilter-demo-"))
robot_dir = root / "robot"
clean_dir = root / "clean"
(robot_dir / "lab").mkdir(parents=True)
(robot_dir / "office").mkdir(parents=True)
clean_dir.mkdir()

# Toy corpus: noise bursts stand in for recordings.
for room, count in (("lab", 3), ("office", 7)):
    for i in range(count):
        w = Waveform(0.2 * rng.normal(0, 1, int(5.5 * SR)), SR)
        write_wav(robot_dir / room / f"{room}{i}.wav", w)
for i in range(5):
    w = Waveform(0.2 * rng.normal(0, 1, int(5.5 * SR)), SR)
    write_wav(clean_dir / f"utt{i}.wav", w)
    (clean_dir / f"utt{i}.txt").write_text(f"sample transcript {i}")

manifest = root / "manifest.jsonl"
records = build_manifest(
    robot_dir, clean_dir, manifest,
    MixSpec(target_gain_db=-25.0, silence_min_s=0.5, silence_max_s=1.5,
            segment_length_s=5.0, seed=42),
    split=(0.8, 0.2),
)

print(f"wrote {len(records)} triplets under {root}")
for rec in read_manifest(manifest)[:3]:
    print(f"  {Path(rec['noisy']).name}: room={rec['room_tag']} "
          f"split={rec['split']} offset={rec['offset_samples']}")
counts = {}
for rec in records:
    key = (rec["room_tag"], rec["split"])
    counts[key] = counts.get(key, 0) + 1
print("split counts:", dict(sorted(counts.items())))
