"""STFT analysis/synthesis and mel filterbank construction.

The framing convention is fixed once here and shared by the codec and
the evaluation metric:

* the signal is center-padded by fft_size/2 (reflection), so frame m
  starts at sample m*hop of the padded signal and the frame count is
  floor(len/hop) + 1;
* the analysis window is a periodic Hann of win_length samples,
  zero-padded symmetrically to fft_size;
* the inverse uses the same window for weighted overlap-add and divides
  by the accumulated window-square envelope, which makes istft(stft(x))
  exact (up to rounding) wherever the envelope is nonzero.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .audio_io import AudioClip
from .errors import ConfigInvalid, InvalidRange, NonCola, ShapeMismatch

_ENVELOPE_FLOOR = 1e-8


@dataclass(frozen=True)
class StftConfig:
    fft_size: int
    hop_size: int
    win_length: int

    def __post_init__(self):
        f, h, w = self.fft_size, self.hop_size, self.win_length
        if f <= 0 or (f & (f - 1)) != 0:
            raise ConfigInvalid(f"fft_size must be a power of two, got {f}")
        if not (0 < h <= w <= f):
            raise ConfigInvalid(f"need 0 < hop <= win <= fft, got hop={h} win={w} fft={f}")


# the multi-resolution evaluation settings: (fft, hop, win)
EVAL_CONFIGS = (
    StftConfig(1024, 160, 600),
    StftConfig(2048, 240, 1200),
    StftConfig(512, 50, 240),
)


@dataclass
class ComplexSpectrogram:
    """T x K complex frames (K = fft_size/2 + 1) plus inversion metadata."""

    frames: np.ndarray
    config: StftConfig
    sample_rate_hz: int
    original_len: int

    def __post_init__(self):
        self.frames = np.asarray(self.frames, dtype=np.complex128)
        k = self.config.fft_size // 2 + 1
        if self.frames.ndim != 2 or self.frames.shape[1] != k:
            raise ShapeMismatch(
                f"expected (T, {k}) frames, got {self.frames.shape}"
            )
        if not np.all(np.isfinite(self.frames)):
            raise ValueError("spectrogram entries must be finite")


@dataclass
class MagnitudeSpectrogram:
    """T x K nonnegative magnitudes; original_len is carried along when
    known so phase reconstruction can crop its output exactly."""

    mags: np.ndarray
    config: StftConfig
    sample_rate_hz: int
    original_len: int | None = None

    def __post_init__(self):
        self.mags = np.asarray(self.mags, dtype=np.float64)
        k = self.config.fft_size // 2 + 1
        if self.mags.ndim != 2 or self.mags.shape[1] != k:
            raise ShapeMismatch(f"expected (T, {k}) magnitudes, got {self.mags.shape}")
        if not np.all(np.isfinite(self.mags)) or np.any(self.mags < 0):
            raise ValueError("magnitudes must be finite and nonnegative")


def num_frames(n_samples: int, hop_size: int) -> int:
    """Frame count under the center-padded convention."""
    return n_samples // hop_size + 1


@lru_cache(maxsize=32)
def _window(fft_size: int, win_length: int) -> np.ndarray:
    """Periodic Hann of win_length, zero-padded symmetrically to fft_size."""
    w = 0.5 - 0.5 * np.cos(2.0 * np.pi * np.arange(win_length) / win_length)
    out = np.zeros(fft_size)
    off = (fft_size - win_length) // 2
    out[off:off + win_length] = w
    out.setflags(write=False)
    return out


def stft(clip: AudioClip, cfg: StftConfig) -> ComplexSpectrogram:
    """Forward STFT of a clip under the shared framing convention."""
    if not isinstance(cfg, StftConfig):
        raise ConfigInvalid(f"expected StftConfig, got {type(cfg).__name__}")
    x = clip.samples
    pad = cfg.fft_size // 2
    mode = "reflect" if len(x) > 1 else "edge"
    xp = np.pad(x, pad, mode=mode)
    t = num_frames(len(x), cfg.hop_size)
    w = _window(cfg.fft_size, cfg.win_length)
    idx = np.arange(cfg.fft_size)[None, :] + cfg.hop_size * np.arange(t)[:, None]
    frames = np.fft.rfft(xp[idx] * w[None, :], axis=1)
    return ComplexSpectrogram(frames, cfg, clip.sample_rate_hz, len(x))


def istft(spec: ComplexSpectrogram) -> AudioClip:
    """Weighted overlap-add inverse, cropped to the original length.

    This is the least-squares inverse for the Hann analysis window, so
    it also serves as the projection step inside Griffin-Lim.  Raises
    NonCola if the window-square envelope has (near-)zeros inside the
    region being reconstructed.
    """
    cfg = spec.config
    t = spec.frames.shape[0]
    w = _window(cfg.fft_size, cfg.win_length)
    frames = np.fft.irfft(spec.frames, n=cfg.fft_size, axis=1) * w[None, :]
    total = (t - 1) * cfg.hop_size + cfg.fft_size
    out = np.zeros(total)
    env = np.zeros(total)
    w2 = w * w
    for m in range(t):
        s = m * cfg.hop_size
        out[s:s + cfg.fft_size] += frames[m]
        env[s:s + cfg.fft_size] += w2

    pad = cfg.fft_size // 2
    if num_frames(spec.original_len, cfg.hop_size) != t:
        raise ShapeMismatch(
            f"original_len {spec.original_len} inconsistent with {t} frames "
            f"at hop {cfg.hop_size}"
        )
    lo, hi = pad, pad + spec.original_len
    probe = env[lo:min(hi, total)]
    if probe.size and np.min(probe) <= _ENVELOPE_FLOOR:
        raise NonCola(
            f"window/hop pair (win={cfg.win_length}, hop={cfg.hop_size}) leaves "
            f"envelope gaps (min {np.min(probe):.2e})"
        )
    if hi > total:
        raise ShapeMismatch(
            f"original_len {spec.original_len} exceeds synthesizable range {total - pad}"
        )
    return AudioClip(out[lo:hi] / env[lo:hi], spec.sample_rate_hz)


def magnitude(spec: ComplexSpectrogram) -> MagnitudeSpectrogram:
    """Elementwise complex modulus."""
    return MagnitudeSpectrogram(
        np.abs(spec.frames), spec.config, spec.sample_rate_hz, spec.original_len
    )


def hz_to_mel(f):
    """HTK mel scale: 2595 * log10(1 + f/700)."""
    return 2595.0 * np.log10(1.0 + np.asarray(f, dtype=np.float64) / 700.0)


def mel_to_hz(m):
    return 700.0 * (10.0 ** (np.asarray(m, dtype=np.float64) / 2595.0) - 1.0)


@dataclass
class MelFilterbank:
    """Triangular filters with unit peak, equally spaced on the mel axis.

    weights[b, k] samples filter b at FFT bin k.  edges_hz[b] holds the
    (lower, center, upper) frequencies of the triangle, so the continuous
    response can be evaluated away from the bin grid.
    """

    weights: np.ndarray
    sample_rate_hz: int
    fmin_hz: float
    fmax_hz: float
    edges_hz: np.ndarray = field(repr=False)

    @property
    def n_bands(self) -> int:
        return self.weights.shape[0]

    @property
    def centers_hz(self) -> np.ndarray:
        return self.edges_hz[:, 1]

    def response(self, band: int, freq_hz: float) -> float:
        """Continuous triangle response of one filter: 1.0 at its center,
        0.0 at the neighboring centers."""
        lo, c, hi = self.edges_hz[band]
        return float(max(0.0, min((freq_hz - lo) / (c - lo), (hi - freq_hz) / (hi - c))))


@lru_cache(maxsize=16)
def build_mel(sr_hz: int, fft_size: int, n_bands: int,
              fmin_hz: float, fmax_hz: float) -> MelFilterbank:
    """Build an HTK-scale triangular filterbank for rfft bins of fft_size.

    Results are cached per parameter set and shared, so the arrays are
    marked read-only.
    """
    if n_bands < 2:
        raise InvalidRange(f"need at least 2 bands, got {n_bands}")
    if not (0.0 <= fmin_hz < fmax_hz <= sr_hz / 2):
        raise InvalidRange(
            f"need 0 <= fmin < fmax <= sr/2, got fmin={fmin_hz} fmax={fmax_hz} sr={sr_hz}"
        )
    n_bins = fft_size // 2 + 1
    bin_hz = np.arange(n_bins) * (sr_hz / fft_size)
    pts = mel_to_hz(np.linspace(hz_to_mel(fmin_hz), hz_to_mel(fmax_hz), n_bands + 2))
    lo, c, hi = pts[:-2, None], pts[1:-1, None], pts[2:, None]
    rising = (bin_hz[None, :] - lo) / (c - lo)
    falling = (hi - bin_hz[None, :]) / (hi - c)
    weights = np.clip(np.minimum(rising, falling), 0.0, None)
    edges = np.stack([pts[:-2], pts[1:-1], pts[2:]], axis=1)
    weights.setflags(write=False)
    edges.setflags(write=False)
    return MelFilterbank(weights, int(sr_hz), float(fmin_hz), float(fmax_hz), edges)


def apply_mel(mags: MagnitudeSpectrogram, fb: MelFilterbank) -> np.ndarray:
    """Project T x K magnitudes onto the filterbank, giving T x B."""
    if fb.weights.shape[1] != mags.mags.shape[1]:
        raise ShapeMismatch(
            f"filterbank built for {fb.weights.shape[1]} bins, "
            f"spectrogram has {mags.mags.shape[1]}"
        )
    if fb.sample_rate_hz != mags.sample_rate_hz:
        raise ShapeMismatch(
            f"filterbank sample rate {fb.sample_rate_hz} != spectrogram "
            f"rate {mags.sample_rate_hz}"
        )
    return mags.mags @ fb.weights.T
