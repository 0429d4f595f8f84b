"""Measure a playback chain's frequency response from a stepped sine sweep.

The robot plays a sweep through its loudspeaker while its own microphone
records. The ratio of recorded to played magnitudes, after subtracting the
fan-noise floor, gives one gain per frequency bin. Here the 'room' is a
known synthetic filter so we can check the estimate against the truth.
"""

import numpy as np
from scipy.signal import firwin, freqz, lfilter

from egofilter import (
    SweepSpec,
    Waveform,
    estimate_noise_floor,
    estimate_response,
    generate_sweep,
)

SR = 16000

# The sweep: 616 tones, 13 Hz apart, from 0 Hz up to just under Nyquist.
spec = SweepSpec(f_start=0, f_end=8001, f_step=13, dwell=0.05)
played = generate_sweep(spec, SR)
print(f"sweep: {len(spec.frequencies())} tones, {played.duration:.1f} s")

# A pretend speaker-room-microphone chain: a 31-tap low-pass, plus the fan.
taps = firwin(31, 7000, fs=SR)
rng = np.random.default_rng(0)
fan_rms = 1e-3
recorded = Waveform(
    lfilter(taps, 1.0, played.samples) + rng.normal(0, fan_rms, len(played)), SR
)

# The fan alone, recorded while the robot stands still.
fan_only = Waveform(rng.normal(0, fan_rms, 2 * SR), SR)
noise_floor = estimate_noise_floor(fan_only)

profile = estimate_response(played, recorded, noise_floor)
print(f"excited bins: {100 * profile.excited_fraction():.1f}%")

# Compare with the analytic truth.
freqs = profile.config.bin_frequencies(SR)
_, h = freqz(taps, worN=freqs, fs=SR)
band = (freqs > 100) & (freqs < 7000)
rel = np.abs(profile.response[band] - np.abs(h)[band]) / np.abs(h)[band]
print(f"max relative error in (100 Hz, 7 kHz): {100 * rel.max():.2f}%")

profile.save("chain.profile")
print("saved to chain.profile")
