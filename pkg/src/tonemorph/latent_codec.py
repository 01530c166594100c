"""Log-mel latent codec: encode audio to a latent, decode it back.

encode is log(max(mel(|STFT|), eps)); decode inverts the mel projection
with a cached Moore-Penrose pseudo-inverse (negative values clamped to
zero) and recovers phase with Griffin-Lim alternating projection.  Both
directions are deterministic, so identical inputs give bit-identical
outputs.
"""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .audio_io import AudioClip
from .errors import ConfigInvalid, RateMismatch, ShapeMismatch, SingularFilterbank
from .spectral import (
    ComplexSpectrogram,
    MagnitudeSpectrogram,
    MelFilterbank,
    StftConfig,
    apply_mel,
    build_mel,
    istft,
    magnitude,
    stft,
)


@dataclass(frozen=True)
class CodecConfig:
    sample_rate_hz: int = 44100
    fft_size: int = 2048
    hop_size: int = 512
    win_length: int = 2048
    n_mels: int = 128
    log_floor: float = 1e-5
    gl_iterations: int = 64
    fmin_hz: float = 0.0
    fmax_hz: float | None = None  # None -> Nyquist

    def __post_init__(self):
        if self.log_floor <= 0:
            raise ConfigInvalid("log_floor must be positive")
        if self.gl_iterations < 0:
            raise ConfigInvalid("gl_iterations must be >= 0")
        self.stft_config  # validates fft/hop/win

    @property
    def stft_config(self) -> StftConfig:
        return StftConfig(self.fft_size, self.hop_size, self.win_length)

    @property
    def effective_fmax_hz(self) -> float:
        return self.sample_rate_hz / 2 if self.fmax_hz is None else self.fmax_hz

    def filterbank(self) -> MelFilterbank:
        return build_mel(
            self.sample_rate_hz, self.fft_size, self.n_mels,
            self.fmin_hz, self.effective_fmax_hz,
        )


@dataclass
class MelLatent:
    """T x B log-mel matrix plus the metadata needed to decode it.

    Codec operations keep every entry at or above log(log_floor); the
    floor is re-applied after interpolation, and AdaIN may transiently
    dip below it before that happens, so it is not enforced here.
    """

    values: np.ndarray
    config: CodecConfig
    original_len: int

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.ndim != 2 or self.values.shape[0] < 1:
            raise ShapeMismatch(f"latent must be (T, B) with T >= 1, got {self.values.shape}")
        if self.values.shape[1] != self.config.n_mels:
            raise ShapeMismatch(
                f"latent has {self.values.shape[1]} bands, config says {self.config.n_mels}"
            )
        if not np.all(np.isfinite(self.values)):
            raise ValueError("latent entries must be finite")

    @property
    def n_frames(self) -> int:
        return self.values.shape[0]

    @property
    def n_bands(self) -> int:
        return self.values.shape[1]

    @property
    def floor(self) -> float:
        return float(np.log(self.config.log_floor))


# pseudo-inverses keyed by filterbank content; SVD is deterministic, so
# concurrent first computations install equal arrays and races are benign
_PINV_CACHE: dict = {}


def mel_pseudo_inverse(fb: MelFilterbank) -> np.ndarray:
    """K x B Moore-Penrose pseudo-inverse of the filterbank weights.

    Raises SingularFilterbank when the rows are linearly dependent
    (numerical rank below B).
    """
    key = (fb.weights.shape, hashlib.blake2b(fb.weights.tobytes()).digest())
    cached = _PINV_CACHE.get(key)
    if cached is not None:
        return cached
    u, s, vt = np.linalg.svd(fb.weights, full_matrices=False)
    tol = max(fb.weights.shape) * np.finfo(np.float64).eps * s[0]
    if np.sum(s > tol) < fb.n_bands:
        raise SingularFilterbank(
            f"filterbank rank {int(np.sum(s > tol))} < {fb.n_bands} bands"
        )
    pinv = (vt.T / s) @ u.T
    pinv.setflags(write=False)
    _PINV_CACHE[key] = pinv
    return pinv


def encode(clip: AudioClip, cfg: CodecConfig) -> MelLatent:
    """Audio -> floored log-mel latent.  The caller resamples first."""
    if clip.sample_rate_hz != cfg.sample_rate_hz:
        raise RateMismatch(
            f"clip at {clip.sample_rate_hz} Hz, codec expects {cfg.sample_rate_hz} Hz"
        )
    mel = apply_mel(magnitude(stft(clip, cfg.stft_config)), cfg.filterbank())
    values = np.log(np.maximum(mel, cfg.log_floor))
    return MelLatent(values, cfg, len(clip.samples))


def griffin_lim(
    mags: MagnitudeSpectrogram,
    iters: int,
    phase_seed: Optional[int] = None,
    callback: Optional[Callable[[int, float], None]] = None,
) -> AudioClip:
    """Recover a waveform whose STFT magnitude approximates ``mags``.

    Classic alternating projection: synthesize with the current phase,
    re-analyze, keep the new phase.  The initial phase is zero (or
    uniform random when phase_seed is given).  After analysis step n the
    callback receives (n, C_n) where C_n = || |STFT(x_n)| - mags ||_F;
    this inconsistency is non-increasing in n.
    """
    if iters < 0:
        raise ValueError("iters must be >= 0")
    m = mags.mags
    if phase_seed is None:
        phase = np.zeros_like(m)
    else:
        rng = np.random.default_rng(phase_seed)
        phase = rng.uniform(0.0, 2.0 * np.pi, size=m.shape)

    length = (
        mags.original_len
        if mags.original_len is not None
        else (m.shape[0] - 1) * mags.config.hop_size + 1
    )

    def synth(ph):
        spec = m * np.exp(1j * ph)
        return istft(
            ComplexSpectrogram(spec, mags.config, mags.sample_rate_hz, length)
        )

    for n in range(1, iters + 1):
        x = synth(phase)
        analyzed = stft(x, mags.config)
        if callback is not None:
            callback(n, float(np.linalg.norm(np.abs(analyzed.frames) - m)))
        phase = np.angle(analyzed.frames)
    return synth(phase)


def decode(latent: MelLatent) -> AudioClip:
    """Latent -> audio: exp, mel pseudo-inverse (clamped at zero), then
    Griffin-Lim with gl_iterations steps and zero initial phase."""
    cfg = latent.config
    mel_mag = np.exp(latent.values)
    linear = np.clip(mel_mag @ mel_pseudo_inverse(cfg.filterbank()).T, 0.0, None)
    mags = MagnitudeSpectrogram(
        linear, cfg.stft_config, cfg.sample_rate_hz, latent.original_len
    )
    return griffin_lim(mags, cfg.gl_iterations)


# --- flat binary latent container ---

_MAGIC = b"MLAT"
_VERSION = 1
_HEADER = struct.Struct("<4sHIIIIIIdQ")  # magic, ver, T, B, sr, fft, hop, win, eps, orig_len


def latent_to_bytes(latent: MelLatent) -> bytes:
    """Serialize header + row-major little-endian f32 values."""
    cfg = latent.config
    t, b = latent.values.shape
    header = _HEADER.pack(
        _MAGIC, _VERSION, t, b, cfg.sample_rate_hz, cfg.fft_size,
        cfg.hop_size, cfg.win_length, cfg.log_floor, latent.original_len,
    )
    return header + latent.values.astype("<f4").tobytes()


def latent_from_bytes(data: bytes) -> MelLatent:
    """Inverse of latent_to_bytes.  Values are re-floored at log(eps) to
    absorb the one-ULP dips the f32 cast can introduce; serialized
    gl_iterations and mel range are not stored and take config defaults."""
    if len(data) < _HEADER.size or data[:4] != _MAGIC:
        raise ValueError("not an MLAT container")
    magic, version, t, b, sr, fft, hop, win, eps, orig = _HEADER.unpack_from(data, 0)
    if version != _VERSION:
        raise ValueError(f"unsupported MLAT version {version}")
    expect = _HEADER.size + 4 * t * b
    if len(data) < expect:
        raise ValueError(f"MLAT payload truncated: {len(data)} < {expect}")
    cfg = CodecConfig(
        sample_rate_hz=sr, fft_size=fft, hop_size=hop, win_length=win,
        n_mels=b, log_floor=eps,
    )
    raw = np.frombuffer(data, dtype="<f4", count=t * b, offset=_HEADER.size)
    values = np.maximum(raw.astype(np.float64).reshape(t, b), np.log(eps))
    return MelLatent(values, cfg, orig)


def save_latent(latent: MelLatent, path) -> None:
    with open(path, "wb") as fh:
        fh.write(latent_to_bytes(latent))


def load_latent(path) -> MelLatent:
    with open(path, "rb") as fh:
        return latent_from_bytes(fh.read())
