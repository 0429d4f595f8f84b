"""Delay detection against an exhaustive-lag correlation oracle."""

import numpy as np
import pytest

from egofilter import (
    AlignmentError,
    DelayEstimate,
    InvalidInputError,
    Waveform,
    detect_delay,
    trim_to_reference,
)

from .conftest import SR, speechlike


def exhaustive_delay(recording: np.ndarray, detector: np.ndarray):
    """Brute-force normalized correlation over every lag."""
    m = detector.size
    n = recording.size
    dn = np.sqrt(np.dot(detector, detector))
    best_lag, best_c = 0, -np.inf
    for lag in range(-(m - 1), n):
        lo = max(lag, 0)
        hi = min(lag + m, n)
        seg = recording[lo:hi]
        det = detector[lo - lag : hi - lag]
        sn = np.sqrt(np.dot(seg, seg))
        c = 0.0 if sn == 0 or dn == 0 else float(np.dot(det, seg) / (dn * sn))
        if c > best_c:
            best_lag, best_c = lag, c
    return best_lag, best_c


class TestDetectDelay:
    def test_zero_padded_prefix(self, rng):
        ref = speechlike(rng, SR)
        rec = Waveform(np.concatenate([np.zeros(3200), ref.samples]), SR)
        d = detect_delay(rec, ref)
        assert d.offset == 3200
        assert d.peak == pytest.approx(1.0, abs=1e-6)
        assert d.confident

    def test_zero_delay(self, rng):
        ref = speechlike(rng, SR)
        d = detect_delay(ref, ref)
        assert d.offset == 0
        assert d.peak == pytest.approx(1.0, abs=1e-9)

    def test_matches_exhaustive_oracle(self, rng):
        # Small sizes so the O(N*M) oracle stays quick.
        ref = Waveform(rng.normal(0, 0.2, 600), 1000)
        rec = Waveform(
            np.concatenate([np.zeros(150), ref.samples, rng.normal(0, 0.02, 100)]), 1000
        )
        d = detect_delay(rec, ref, detector_seconds=0.4)
        lag, peak = exhaustive_delay(rec.samples, ref.samples[:400])
        assert d.offset == lag == 150
        assert d.peak == pytest.approx(peak, abs=1e-9)

    def test_noise_robustness_10db(self, rng):
        hits = 0
        trials = 10
        for k in range(trials):
            r = np.random.default_rng(500 + k)
            ref = speechlike(r, SR)
            true = int(r.integers(0, SR))
            sig = np.concatenate([np.zeros(true), ref.samples, np.zeros(SR)])
            noise_rms = ref.rms() * 10 ** (-10 / 20)
            rec = Waveform(sig + r.normal(0, noise_rms, sig.size), SR)
            d = detect_delay(rec, ref)
            if abs(d.offset - true) <= 160:
                hits += 1
        assert hits >= 9

    def test_shift_equivariance(self, rng):
        ref = speechlike(rng, SR)
        base = detect_delay(ref, ref)
        for k in (1, 17, 1000):
            rec = Waveform(np.concatenate([np.zeros(k), ref.samples]), SR)
            assert detect_delay(rec, ref).offset == base.offset + k

    def test_amplitude_invariance(self, rng):
        ref = speechlike(rng, SR)
        rec = Waveform(np.concatenate([np.zeros(777), ref.samples]), SR)
        d1 = detect_delay(rec, ref)
        d2 = detect_delay(Waveform(6.5 * rec.samples, SR), ref)
        assert d1.offset == d2.offset
        assert d1.peak == pytest.approx(d2.peak, abs=1e-9)

    def test_peak_bounded(self, rng):
        rec = Waveform(rng.normal(0, 1, SR), SR)
        ref = speechlike(rng, SR)
        d = detect_delay(rec, ref)
        assert abs(d.peak) <= 1 + 1e-9

    def test_negative_lag_found(self, rng):
        ref = speechlike(rng, SR)
        rec = Waveform(ref.samples[2000:], SR)  # reference starts before recording
        d = detect_delay(rec, ref)
        assert d.offset == -2000

    def test_recording_shorter_than_detector_rejected(self, rng):
        ref = speechlike(rng, SR)
        with pytest.raises(InvalidInputError):
            detect_delay(Waveform(np.zeros(100), SR), ref)

    def test_reference_shorter_than_detector_rejected(self):
        with pytest.raises(InvalidInputError):
            detect_delay(Waveform(np.zeros(SR), SR), Waveform(np.ones(100), SR))

    def test_silent_detector_not_confident(self, rng):
        silent = Waveform(np.zeros(SR), SR)
        d = detect_delay(speechlike(rng, SR), silent)
        assert not d.confident
        assert d.peak == 0.0


class TestTrim:
    def test_zero_offset_equal_lengths(self, rng):
        ref = speechlike(rng, SR)
        out = trim_to_reference(ref, ref, DelayEstimate(0, 1.0, True))
        np.testing.assert_array_equal(out.samples, ref.samples)

    def test_slice_at_offset(self, rng):
        ref = speechlike(rng, 5 * SR)
        rec = Waveform(np.concatenate([np.zeros(3200), ref.samples, np.zeros(100)]), SR)
        out = trim_to_reference(rec, ref, DelayEstimate(3200, 1.0, True))
        assert len(out) == len(ref)
        np.testing.assert_array_equal(out.samples, ref.samples)

    def test_overrun_padded_with_zeros(self, rng):
        ref = speechlike(rng, SR)
        rec = Waveform(ref.samples[: SR - 100], SR)
        out = trim_to_reference(rec, ref, DelayEstimate(0, 1.0, True))
        assert len(out) == SR
        assert np.all(out.samples[-100:] == 0)

    def test_negative_offset_pads_head(self, rng):
        ref = speechlike(rng, SR)
        rec = Waveform(ref.samples[500:], SR)
        out = trim_to_reference(rec, ref, DelayEstimate(-500, 1.0, True))
        assert np.all(out.samples[:500] == 0)
        np.testing.assert_array_equal(out.samples[500:], rec.samples[: SR - 500])

    def test_not_confident_raises_unless_forced(self, rng):
        ref = speechlike(rng, SR)
        d = DelayEstimate(0, 0.05, False)
        with pytest.raises(AlignmentError):
            trim_to_reference(ref, ref, d)
        out = trim_to_reference(ref, ref, d, force=True)
        assert len(out) == len(ref)

    def test_output_length_always_reference_length(self, rng):
        ref = speechlike(rng, SR)
        rec = speechlike(rng, 2 * SR)
        for offset in (-100, 0, 500, 2 * SR - 10):
            out = trim_to_reference(rec, ref, DelayEstimate(offset, 1.0, True))
            assert len(out) == len(ref)
