"""Shared fixture builders: deterministic synthetic tones.

Every generator takes an explicit seed so reruns are bit-identical.
The low-level broadband noise mixed into morph fixtures keeps all mel
bands above the codec's log floor, which the geodesic checks rely on.
"""

import numpy as np
import pytest

from tonemorph.audio_io import AudioClip


def harmonic(f0_hz, amps, duration_s=1.0, sr_hz=44100, noise=0.0, seed=0):
    """Sum of sine partials at integer multiples of f0, plus optional
    seeded white noise."""
    t = np.arange(int(round(duration_s * sr_hz))) / sr_hz
    x = np.zeros_like(t)
    for k, a in enumerate(amps, start=1):
        x += a * np.sin(2.0 * np.pi * f0_hz * k * t)
    if noise:
        x += noise * np.random.default_rng(seed).standard_normal(t.size)
    return AudioClip(x, sr_hz)


def white_noise(duration_s=1.0, sr_hz=16000, amp=0.1, seed=42):
    rng = np.random.default_rng(seed)
    return AudioClip(amp * rng.standard_normal(int(round(duration_s * sr_hz))), sr_hz)


@pytest.fixture
def tone_pair():
    """Two 1 s tones with noise floors, the standard morph test pair."""
    a = harmonic(261.63, [0.5, 0.2, 0.08], noise=1e-3, seed=1)
    b = harmonic(392.0, [0.45, 0.22, 0.09], noise=1e-3, seed=2)
    return a, b
