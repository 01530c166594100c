"""Guitar tone morphing: a deterministic log-mel latent codec with
spherical latent interpolation, style matching, and SC-based evaluation."""

__version__ = "0.1.0"

from .audio_io import AudioClip, peak_normalize, read_wav, resample, write_wav
from .errors import ToneMorphError
from .interp import (
    ChannelStats,
    MorphSpec,
    adain,
    angle_between,
    channel_stats,
    lerp,
    morph_latent,
    morph_trajectory,
    normalize,
    slerp,
    trim_latents,
)
from .latent_codec import (
    CodecConfig,
    MelLatent,
    decode,
    encode,
    griffin_lim,
    load_latent,
    save_latent,
)
from .metrics import ScReport, aggregate, latent_diagnostics, multi_res_sc, sc
from .spectral import EVAL_CONFIGS, StftConfig, istft, magnitude, stft

__all__ = [
    "__version__",
    "AudioClip", "peak_normalize", "read_wav", "resample", "write_wav",
    "ToneMorphError",
    "ChannelStats", "MorphSpec", "adain", "angle_between", "channel_stats",
    "lerp", "morph_latent", "morph_trajectory", "normalize", "slerp",
    "trim_latents",
    "CodecConfig", "MelLatent", "decode", "encode", "griffin_lim",
    "load_latent", "save_latent",
    "ScReport", "aggregate", "latent_diagnostics", "multi_res_sc", "sc",
    "EVAL_CONFIGS", "StftConfig", "istft", "magnitude", "stft",
]
