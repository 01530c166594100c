"""WAV decoding, encoding, downmix, and resampling.

The reader tests build RIFF containers by hand so the decode path is
checked against independently constructed bytes, not against our own
writer.
"""

import struct

import numpy as np
import pytest

from tonemorph.audio_io import (
    AudioClip,
    decode_wav_bytes,
    encode_wav_bytes,
    peak_normalize,
    read_wav,
    resample,
    write_wav,
)
from tonemorph.errors import (
    CorruptHeader,
    EmptyAudio,
    InvalidRate,
    UnsupportedFormat,
)


def riff(fmt_tag, channels, sr, bits, payload, extra=b""):
    """Minimal hand-assembled RIFF/WAVE file."""
    block = channels * bits // 8
    fmt = struct.pack(
        "<HHIIHH", fmt_tag, channels, sr, sr * block, block, bits
    ) + extra
    body = (
        b"WAVE"
        + b"fmt " + struct.pack("<I", len(fmt)) + fmt
        + b"data" + struct.pack("<I", len(payload)) + payload
    )
    return b"RIFF" + struct.pack("<I", len(body)) + body


def pcm16(*values, channels=1, sr=44100):
    return riff(1, channels, sr, 16, struct.pack(f"<{len(values)}h", *values))


def test_pcm16_scaling():
    clip = decode_wav_bytes(pcm16(16384))
    assert clip.samples.tolist() == [0.5]
    assert clip.sample_rate_hz == 44100


def test_pcm16_negative_full_scale():
    clip = decode_wav_bytes(pcm16(-32768, 32767))
    assert clip.samples[0] == -1.0
    assert abs(clip.samples[1] - 32767 / 32768) < 1e-12


def test_stereo_average_exact():
    # L=8192 (0.25), R=16384 (0.5) -> 0.375
    clip = decode_wav_bytes(pcm16(8192, 16384, channels=2))
    assert clip.samples.tolist() == [0.375]


def test_stereo_average_float():
    payload = np.array([0.2, 0.6], dtype="<f4").tobytes()
    clip = decode_wav_bytes(riff(3, 2, 16000, 32, payload))
    assert abs(clip.samples[0] - 0.4) < 1e-7


def test_pcm24_scaling():
    # one sample of 0x400000 = 4194304 -> 0.5
    payload = (4194304).to_bytes(3, "little", signed=True)
    clip = decode_wav_bytes(riff(1, 1, 44100, 24, payload))
    assert clip.samples.tolist() == [0.5]


def test_extensible_float():
    # WAVE_FORMAT_EXTENSIBLE: cbSize=22, valid bits, channel mask, then a
    # GUID whose first two bytes carry the real format tag (3 = float)
    extra = struct.pack("<HHI", 22, 32, 0x4) + struct.pack("<H", 3) + b"\x00" * 14
    payload = np.array([0.25], dtype="<f4").tobytes()
    data = riff(0xFFFE, 1, 44100, 32, payload, extra=extra)
    assert decode_wav_bytes(data).samples.tolist() == [0.25]


def test_five_seconds_length(tmp_path):
    clip = AudioClip(np.zeros(220500) + 0.01, 44100)
    path = tmp_path / "five.wav"
    write_wav(clip, path)
    assert len(read_wav(path).samples) == 220500


def test_float_roundtrip(tmp_path):
    clip = AudioClip(np.array([0.0, 0.5, -0.5]), 16000)
    path = tmp_path / "t.wav"
    write_wav(clip, path)
    back = read_wav(path)
    assert back.sample_rate_hz == 16000
    assert back.samples.tolist() == [0.0, 0.5, -0.5]


def test_write_no_clipping(tmp_path):
    clip = AudioClip(np.array([1.0, -1.25]), 16000)
    path = tmp_path / "hot.wav"
    write_wav(clip, path)
    assert read_wav(path).samples.tolist() == [1.0, -1.25]


def test_write_read_write_idempotent(tmp_path):
    rng = np.random.default_rng(3)
    clip = AudioClip(0.3 * rng.standard_normal(5000), 44100)
    p1, p2 = tmp_path / "a.wav", tmp_path / "b.wav"
    write_wav(clip, p1)
    write_wav(read_wav(p1), p2)
    assert p1.read_bytes() == p2.read_bytes()


def test_roundtrip_close_within_float32(tmp_path):
    rng = np.random.default_rng(4)
    x = rng.uniform(-1.0, 1.0, 2000)
    path = tmp_path / "r.wav"
    write_wav(AudioClip(x, 44100), path)
    assert np.max(np.abs(read_wav(path).samples - x)) < 1e-7


def test_downmix_linear():
    rng = np.random.default_rng(5)
    left = (rng.integers(-20000, 20000, 64)).astype(np.int64)
    right = (rng.integers(-20000, 20000, 64)).astype(np.int64)
    inter = np.empty(128, dtype=np.int64)
    inter[0::2], inter[1::2] = left, right
    stereo = decode_wav_bytes(pcm16(*inter.tolist(), channels=2))
    l_mono = decode_wav_bytes(pcm16(*left.tolist()))
    r_mono = decode_wav_bytes(pcm16(*right.tolist()))
    avg = (l_mono.samples + r_mono.samples) / 2
    assert np.max(np.abs(stereo.samples - avg)) < 1e-7


def test_unsupported_codec():
    with pytest.raises(UnsupportedFormat):
        decode_wav_bytes(riff(0x0055, 1, 44100, 16, b"\x00\x00"))  # MP3 tag


def test_unsupported_channel_count():
    payload = struct.pack("<3h", 0, 0, 0)
    with pytest.raises(UnsupportedFormat):
        decode_wav_bytes(riff(1, 3, 44100, 16, payload))


def test_corrupt_header():
    with pytest.raises(CorruptHeader):
        decode_wav_bytes(b"not a wav file at all")
    with pytest.raises(CorruptHeader):
        decode_wav_bytes(pcm16(1, 2, 3)[:20])  # truncated


def test_empty_audio():
    with pytest.raises(EmptyAudio):
        decode_wav_bytes(riff(1, 1, 44100, 16, b""))


def test_resample_identity_passthrough():
    clip = AudioClip(np.random.default_rng(6).standard_normal(1000), 44100)
    out = resample(clip, 44100)
    assert np.array_equal(out.samples, clip.samples)
    assert out.sample_rate_hz == 44100


def test_resample_length_rule():
    clip = AudioClip(np.zeros(220500) + 0.01, 44100)
    assert len(resample(clip, 16000).samples) == 80000


def test_resample_tone_preserved():
    sr = 44100
    t = np.arange(sr) / sr
    clip = AudioClip(0.5 * np.sin(2 * np.pi * 1000.0 * t), sr)
    out = resample(clip, 16000)

    def peak(c):
        spec = np.abs(np.fft.rfft(c.samples * np.hanning(len(c.samples))))
        k = int(np.argmax(spec))
        return k * c.sample_rate_hz / len(c.samples), spec[k] / len(c.samples)

    f_in, a_in = peak(clip)
    f_out, a_out = peak(out)
    assert abs(f_out - 1000.0) <= 16000 / len(out.samples) + 1e-9
    assert abs(a_out - a_in) / a_in < 0.01


@pytest.mark.parametrize("src", [16000, 44100])
@pytest.mark.parametrize("dst", [16000, 44100])
def test_resample_rate_pairs_keep_frequency(src, dst):
    t = np.arange(src) / src
    clip = AudioClip(0.5 * np.sin(2 * np.pi * 440.0 * t), src)
    out = resample(clip, dst)
    spec = np.abs(np.fft.rfft(out.samples))
    f_peak = np.argmax(spec) * dst / len(out.samples)
    assert abs(f_peak - 440.0) <= dst / len(out.samples) + 1e-9


def test_resample_invalid_rate():
    clip = AudioClip(np.ones(10), 44100)
    with pytest.raises(InvalidRate):
        resample(clip, 0)
    with pytest.raises(InvalidRate):
        resample(clip, -8000)


def test_peak_normalize():
    clip = AudioClip(np.array([0.1, -0.4, 0.2]), 44100)
    out = peak_normalize(clip)
    assert abs(np.max(np.abs(out.samples)) - 1.0) < 1e-12
    assert np.allclose(out.samples, clip.samples / 0.4)


def test_peak_normalize_silence_passthrough():
    clip = AudioClip(np.zeros(16), 44100)
    assert np.array_equal(peak_normalize(clip).samples, clip.samples)


def test_clip_validation():
    with pytest.raises(EmptyAudio):
        AudioClip(np.array([]), 44100)
    with pytest.raises(ValueError):
        AudioClip(np.array([np.nan]), 44100)
    with pytest.raises(InvalidRate):
        AudioClip(np.array([0.1]), 0)
    assert AudioClip(np.zeros(44100), 44100).duration_s == 1.0


def test_encode_bytes_match_file(tmp_path):
    clip = AudioClip(np.array([0.25, -0.75]), 44100)
    path = tmp_path / "x.wav"
    write_wav(clip, path)
    assert path.read_bytes() == encode_wav_bytes(clip)
