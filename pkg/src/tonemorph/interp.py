"""Interpolation core for latent morphing.

Vectors here are flat 1-D float arrays (a flattened log-mel latent).
The pieces compose bottom-up: normalize and angle_between define the
geometry, slerp walks the great circle with a LERP fallback for nearly
parallel inputs, adain restyles per-band statistics, and morph_latent
ties them together into the full latent-space morph operator.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from .audio_io import AudioClip, resample
from .errors import (
    AntipodalAmbiguous,
    BandMismatch,
    ConfigMismatch,
    DimMismatch,
    InvalidRange,
    NotUnit,
    ShapeMismatch,
    TooShort,
    ZeroVector,
)
from .latent_codec import CodecConfig, MelLatent, decode, encode

_UNIT_TOL = 1e-9

NORM_POLICIES = ("lerp-norm", "keep-a", "keep-b")


def normalize(v) -> tuple[np.ndarray, float]:
    """Return (v / ||v||, ||v||) for a flat vector."""
    vec = np.asarray(v, dtype=np.float64)
    if vec.ndim != 1 or vec.size < 1:
        raise DimMismatch(f"expected a flat nonempty vector, got shape {vec.shape}")
    norm = float(np.linalg.norm(vec))
    if norm == 0.0:
        raise ZeroVector("cannot normalize a zero vector")
    if not np.isfinite(norm):
        raise ValueError("vector entries must be finite")
    return vec / norm, norm


def angle_between(u0, u1) -> float:
    """Angle in [0, pi] between two unit vectors.

    Computed as 2*atan2(||u0 - u1||, ||u0 + u1||), which equals
    arccos(clamp(u0 . u1)) but stays fully accurate when the vectors are
    nearly parallel or nearly antipodal, where the arccos form loses
    about half the available precision.
    """
    a = np.asarray(u0, dtype=np.float64)
    b = np.asarray(u1, dtype=np.float64)
    if a.shape != b.shape:
        raise DimMismatch(f"dim {a.shape} vs {b.shape}")
    for name, vec in (("u0", a), ("u1", b)):
        err = abs(float(np.linalg.norm(vec)) - 1.0)
        if err > _UNIT_TOL:
            raise NotUnit(f"{name} is off unit norm by {err:.3e}")
    return 2.0 * float(np.arctan2(np.linalg.norm(a - b), np.linalg.norm(a + b)))


def lerp(a, b, alpha: float) -> np.ndarray:
    """(1 - alpha) * a + alpha * b elementwise."""
    x = np.asarray(a, dtype=np.float64)
    y = np.asarray(b, dtype=np.float64)
    if x.shape != y.shape:
        raise DimMismatch(f"dim {x.shape} vs {y.shape}")
    return (1.0 - alpha) * x + alpha * y


def slerp(v0, v1, alpha: float, theta_min: float = 1e-4) -> np.ndarray:
    """Spherical interpolation between v0 and v1, returned unit-norm.

    Inputs are normalized first; the result traces the great circle so
    that its angle to v0 grows linearly in alpha.  Below theta_min the
    sin ratios are ill-conditioned and a normalized LERP (which is
    indistinguishable at that scale) is used instead.  Past pi -
    theta_min the geodesic is ambiguous and no answer is right.
    """
    if not 0.0 <= alpha <= 1.0:
        raise InvalidRange(f"alpha {alpha} outside [0, 1]")
    u0, _ = normalize(v0)
    u1, _ = normalize(v1)
    theta = angle_between(u0, u1)
    if theta > np.pi - theta_min:
        raise AntipodalAmbiguous(
            f"angle {theta:.6f} rad is within {theta_min} of pi; geodesic undefined"
        )
    if theta < theta_min:
        unit, _ = normalize(lerp(u0, u1, alpha))
        return unit
    s = np.sin(theta)
    return (np.sin((1.0 - alpha) * theta) / s) * u0 + (np.sin(alpha * theta) / s) * u1


@dataclass(frozen=True)
class ChannelStats:
    """Per-band mean and population std over time frames."""

    mean: np.ndarray
    std: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "mean", np.asarray(self.mean, dtype=np.float64))
        object.__setattr__(self, "std", np.asarray(self.std, dtype=np.float64))
        if self.mean.ndim != 1 or self.mean.shape != self.std.shape:
            raise DimMismatch(
                f"stats vectors must be flat and equal length, got {self.mean.shape} / {self.std.shape}"
            )
        if np.any(self.std < 0):
            raise ValueError("std entries must be >= 0")

    @property
    def n_bands(self) -> int:
        return self.mean.shape[0]


def channel_stats(latent) -> ChannelStats:
    """Stats of a (T, B) latent (or raw matrix), per band over frames."""
    values = np.asarray(getattr(latent, "values", latent), dtype=np.float64)
    return ChannelStats(values.mean(axis=0), values.std(axis=0))


def adain(x: MelLatent, target: ChannelStats, sigma_floor: float = 1e-8) -> MelLatent:
    """Shift and scale each band of x so its stats match the target.

    Bands whose own std falls below sigma_floor carry no shape to
    rescale; they map to the target mean directly.
    """
    values = x.values
    if target.n_bands != values.shape[1]:
        raise BandMismatch(f"{target.n_bands} target bands vs {values.shape[1]} in latent")
    mu = values.mean(axis=0)
    sigma = values.std(axis=0)
    live = sigma >= sigma_floor
    scale = np.where(live, target.std / np.where(live, sigma, 1.0), 0.0)
    out = (values - mu) * scale + target.mean
    return MelLatent(out, x.config, x.original_len)


@dataclass(frozen=True)
class MorphSpec:
    """Knobs for one morph: blend weight, styling, and norm handling.

    norm_policy decides the magnitude reattached after the spherical
    step: "lerp-norm" blends the endpoint norms, "keep-a"/"keep-b" pin
    the output loudness to one side.
    """

    alpha: float
    use_adain: bool = False
    small_angle_threshold: float = 1e-4
    norm_policy: str = "lerp-norm"

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise InvalidRange(f"alpha {self.alpha} outside [0, 1]")
        if self.small_angle_threshold <= 0.0:
            raise InvalidRange("small_angle_threshold must be positive")
        if self.norm_policy not in NORM_POLICIES:
            raise InvalidRange(
                f"norm_policy {self.norm_policy!r} not one of {NORM_POLICIES}"
            )


def trim_latents(l0: MelLatent, l1: MelLatent) -> tuple[MelLatent, MelLatent]:
    """Cut both latents to the shorter frame count and sample length.

    The shared sample length is the min of the two originals, which by
    monotonicity of the framing rule always fits the kept frames.
    """
    if l0.config != l1.config:
        raise ConfigMismatch("latents come from different codec configs")
    t = min(l0.n_frames, l1.n_frames)
    n = min(l0.original_len, l1.original_len)
    return (
        MelLatent(l0.values[:t].copy(), l0.config, n),
        MelLatent(l1.values[:t].copy(), l1.config, n),
    )


def morph_latent(l0: MelLatent, l1: MelLatent, spec: MorphSpec) -> MelLatent:
    """Blend two latents of equal shape into one.

    Flattens both, walks the great circle between their directions,
    reattaches a norm per spec.norm_policy, optionally restyles band
    stats toward the blended endpoint stats, and re-applies the log
    floor.  At alpha 0 or 1 the matching endpoint is returned as an
    exact copy, and two identical latents blend to themselves at every
    alpha (restyling toward your own stats is a no-op); every downstream
    byte then matches a plain round trip.
    """
    if l0.config != l1.config:
        raise ConfigMismatch("latents come from different codec configs")
    if l0.values.shape != l1.values.shape:
        raise ShapeMismatch(
            f"latent shapes differ: {l0.values.shape} vs {l1.values.shape}; trim first"
        )
    if spec.alpha == 0.0:
        return MelLatent(l0.values.copy(), l0.config, l0.original_len)
    if spec.alpha == 1.0:
        return MelLatent(l1.values.copy(), l1.config, l1.original_len)
    if np.array_equal(l0.values, l1.values):
        return MelLatent(
            l0.values.copy(), l0.config, min(l0.original_len, l1.original_len)
        )

    v0 = l0.values.ravel()
    v1 = l1.values.ravel()
    _, n0 = normalize(v0)
    _, n1 = normalize(v1)
    direction = slerp(v0, v1, spec.alpha, spec.small_angle_threshold)
    if spec.norm_policy == "keep-a":
        norm = n0
    elif spec.norm_policy == "keep-b":
        norm = n1
    else:
        norm = (1.0 - spec.alpha) * n0 + spec.alpha * n1

    out_len = min(l0.original_len, l1.original_len)
    out = MelLatent((direction * norm).reshape(l0.values.shape), l0.config, out_len)
    if spec.use_adain:
        s0 = channel_stats(l0)
        s1 = channel_stats(l1)
        target = ChannelStats(
            lerp(s0.mean, s1.mean, spec.alpha), lerp(s0.std, s1.std, spec.alpha)
        )
        out = adain(out, target)
    floored = np.maximum(out.values, np.log(l0.config.log_floor))
    return MelLatent(floored, l0.config, out_len)


def morph_trajectory(
    clip_a: AudioClip,
    clip_b: AudioClip,
    steps: int,
    spec: MorphSpec,
    cfg: CodecConfig,
) -> list[AudioClip]:
    """Render a whole morph sweep: alpha = 0, 1/(steps-1), ..., 1.

    Both clips are resampled to the codec rate, encoded, and trimmed to
    a common shape; each grid point is morphed and decoded
    independently, so the ends equal the plain endpoint round trips.
    """
    if steps < 2:
        raise InvalidRange(f"steps must be >= 2, got {steps}")
    a = resample(clip_a, cfg.sample_rate_hz)
    b = resample(clip_b, cfg.sample_rate_hz)
    la, lb = trim_latents(encode(a, cfg), encode(b, cfg))
    if la.n_frames < 2:
        raise TooShort(f"clips give only {la.n_frames} shared frame(s); need >= 2")
    out = []
    for i in range(steps):
        step = dataclasses.replace(spec, alpha=i / (steps - 1))
        out.append(decode(morph_latent(la, lb, step)))
    return out
