"""WAV decoding/encoding and band-limited resampling.

Every clip entering the pipeline goes through this module first, so all
downstream code sees the same thing: a mono float64 buffer in [-1, 1]
plus its sample rate.  Reading supports PCM 16/24-bit and IEEE float32,
mono or stereo (averaged down); writing always produces float32 mono.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .errors import CorruptHeader, EmptyAudio, InvalidRate, UnsupportedFormat

_WAVE_FORMAT_PCM = 0x0001
_WAVE_FORMAT_IEEE_FLOAT = 0x0003
_WAVE_FORMAT_EXTENSIBLE = 0xFFFE


@dataclass
class AudioClip:
    """Mono waveform with its sample rate.

    samples is float64; nominal range is [-1, 1] but values are not
    clamped (synthesis may overshoot slightly).
    """

    samples: np.ndarray
    sample_rate_hz: int

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.float64)
        if self.samples.ndim != 1:
            raise ValueError("AudioClip.samples must be a 1-D array")
        if self.samples.size == 0:
            raise EmptyAudio("AudioClip.samples must be nonempty")
        if not np.all(np.isfinite(self.samples)):
            raise ValueError("AudioClip.samples must be finite")
        if int(self.sample_rate_hz) <= 0:
            raise InvalidRate("AudioClip.sample_rate_hz must be positive")
        self.sample_rate_hz = int(self.sample_rate_hz)

    @property
    def duration_s(self) -> float:
        return len(self.samples) / self.sample_rate_hz


def _parse_chunks(data: bytes):
    """Yield (chunk_id, payload) for every top-level RIFF chunk."""
    if len(data) < 12:
        raise CorruptHeader("file too small for a RIFF header")
    if data[0:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise CorruptHeader("not a RIFF/WAVE file")
    pos = 12
    while pos + 8 <= len(data):
        cid = data[pos:pos + 4]
        (size,) = struct.unpack_from("<I", data, pos + 4)
        body = data[pos + 8:pos + 8 + size]
        if len(body) < size:
            raise CorruptHeader(f"chunk {cid!r} truncated")
        yield cid, body
        pos += 8 + size + (size & 1)  # chunks are word-aligned


def decode_wav_bytes(data: bytes) -> AudioClip:
    """Decode an in-memory WAV file.  See read_wav for the contract."""
    fmt = None
    payload = None
    for cid, body in _parse_chunks(data):
        if cid == b"fmt ":
            fmt = body
        elif cid == b"data":
            payload = body
    if fmt is None or len(fmt) < 16:
        raise CorruptHeader("missing or short fmt chunk")
    if payload is None:
        raise CorruptHeader("missing data chunk")

    tag, channels, rate, _byte_rate, _block_align, bits = struct.unpack_from(
        "<HHIIHH", fmt, 0
    )
    if tag == _WAVE_FORMAT_EXTENSIBLE:
        if len(fmt) < 40:
            raise CorruptHeader("EXTENSIBLE fmt chunk too short")
        (tag,) = struct.unpack_from("<H", fmt, 24)  # first bytes of SubFormat GUID

    if channels not in (1, 2):
        raise UnsupportedFormat(f"{channels} channels (only mono/stereo supported)")
    if tag == _WAVE_FORMAT_PCM and bits == 16:
        raw = np.frombuffer(payload[: len(payload) - len(payload) % 2], dtype="<i2")
        samples = raw.astype(np.float64) / 32768.0
    elif tag == _WAVE_FORMAT_PCM and bits == 24:
        usable = len(payload) - len(payload) % 3
        b = np.frombuffer(payload[:usable], dtype=np.uint8).reshape(-1, 3)
        raw = (
            b[:, 0].astype(np.int32)
            | (b[:, 1].astype(np.int32) << 8)
            | (b[:, 2].astype(np.int32) << 16)
        )
        raw = np.where(raw >= 1 << 23, raw - (1 << 24), raw)
        samples = raw.astype(np.float64) / 8388608.0
    elif tag == _WAVE_FORMAT_IEEE_FLOAT and bits == 32:
        raw = np.frombuffer(payload[: len(payload) - len(payload) % 4], dtype="<f4")
        samples = raw.astype(np.float64)
    else:
        raise UnsupportedFormat(f"format tag {tag}, {bits}-bit")

    if samples.size == 0:
        raise EmptyAudio("data chunk holds no samples")
    if channels == 2:
        usable = samples.size - samples.size % 2
        samples = samples[:usable].reshape(-1, 2).mean(axis=1)
        if samples.size == 0:
            raise EmptyAudio("data chunk holds no complete stereo frames")
    return AudioClip(samples, rate)


def read_wav(path) -> AudioClip:
    """Read a RIFF/WAVE file into a mono clip.

    Stereo is downmixed by channel average; integer PCM is scaled by the
    type's max magnitude (32768 or 8388608).  Raises UnsupportedFormat,
    CorruptHeader or EmptyAudio for files outside the contract.
    """
    with open(path, "rb") as fh:
        return decode_wav_bytes(fh.read())


def encode_wav_bytes(clip: AudioClip) -> bytes:
    """Serialize a clip as a mono IEEE float32 WAV file."""
    pcm = clip.samples.astype("<f4").tobytes()
    n = len(clip.samples)
    sr = clip.sample_rate_hz
    fmt = struct.pack("<HHIIHH", _WAVE_FORMAT_IEEE_FLOAT, 1, sr, sr * 4, 4, 32)
    fact = struct.pack("<I", n)
    body = (
        b"WAVE"
        + b"fmt " + struct.pack("<I", len(fmt)) + fmt
        + b"fact" + struct.pack("<I", len(fact)) + fact
        + b"data" + struct.pack("<I", len(pcm)) + pcm
    )
    return b"RIFF" + struct.pack("<I", len(body)) + body


def write_wav(clip: AudioClip, path) -> None:
    """Write a mono float32 WAV.  Round trips through read_wav are exact
    up to the float64->float32 cast (<= 1e-7 for in-range samples)."""
    with open(path, "wb") as fh:
        fh.write(encode_wav_bytes(clip))


def peak_normalize(clip: AudioClip) -> AudioClip:
    """Scale so the largest |sample| is 1.0.  Silence passes through."""
    peak = float(np.max(np.abs(clip.samples)))
    if peak == 0.0:
        return clip
    return AudioClip(clip.samples / peak, clip.sample_rate_hz)


def resample(clip: AudioClip, target_sr_hz: int, taps: int = 64,
             kaiser_beta: float = 8.6) -> AudioClip:
    """Band-limited resampling by windowed-sinc (Kaiser window).

    Output length is round(len * target / source).  The sinc cutoff sits
    at the lower of the two Nyquist frequencies, so tones below both
    limits survive with their frequency and amplitude intact.  When the
    target equals the source rate the clip is returned unchanged.
    """
    if not isinstance(target_sr_hz, (int, np.integer)) or target_sr_hz <= 0:
        raise InvalidRate(f"target rate must be a positive integer, got {target_sr_hz!r}")
    target_sr_hz = int(target_sr_hz)
    src = clip.sample_rate_hz
    if target_sr_hz == src:
        return clip

    x = clip.samples
    n_out = int(round(len(x) * target_sr_hz / src))
    if n_out == 0:
        raise InvalidRate(f"resampling {len(x)} samples to {target_sr_hz} Hz yields no output")
    half = taps // 2
    k = np.arange(-half + 1, half + 1, dtype=np.float64)  # tap offsets
    cutoff = min(1.0, target_sr_hz / src)  # in units of source Nyquist

    def kernel(frac):
        # frac: (P,) fractional sample offsets; returns (P, taps) filters
        t = k[None, :] - frac[:, None]
        h = cutoff * np.sinc(cutoff * t)
        arg = 1.0 - (t / half) ** 2
        win = np.where(
            arg > 0.0, np.i0(kaiser_beta * np.sqrt(np.clip(arg, 0.0, None))), 0.0
        ) / np.i0(kaiser_beta)
        return h * win

    # fractional source positions of each output sample
    g = np.gcd(src, target_sr_hz)
    p, q = src // g, target_sr_hz // g  # position step = p/q source samples
    n = np.arange(n_out, dtype=np.int64)
    base = (n * p) // q
    if q <= 8192:
        # the fractional part cycles with period q: precompute one bank
        bank = kernel(np.arange(q, dtype=np.float64) / q)
        weights = bank[(n * p) % q]
    else:
        pos = n * (src / target_sr_hz)
        weights = kernel(pos - base)

    xp = np.pad(x, (half, half))
    idx = base[:, None] + k.astype(np.int64)[None, :] + half
    out = np.einsum("ij,ij->i", xp[idx], weights)
    return AudioClip(out, target_sr_hz)
