"""Exception types raised by the tone-morphing pipeline.

Everything derives from ToneMorphError so callers can catch the whole
family at the CLI/service boundary and map it to an exit code or HTTP
status.  OS-level failures (missing files, permissions) are left to the
builtin OSError hierarchy.
"""


class ToneMorphError(Exception):
    """Base class for all domain errors."""


# --- audio_io ---

class UnsupportedFormat(ToneMorphError):
    """WAV codec or channel layout outside PCM16/PCM24/float32 mono/stereo."""


class CorruptHeader(ToneMorphError):
    """File is not a parsable RIFF/WAVE container."""


class EmptyAudio(ToneMorphError):
    """WAV file contains no samples."""


class InvalidRate(ToneMorphError):
    """Resample target rate is not a positive integer."""


# --- spectral ---

class ConfigInvalid(ToneMorphError):
    """STFT configuration violates 0 < hop <= win <= fft or fft not a power of two."""


class NonCola(ToneMorphError):
    """Window/hop pair leaves gaps in the overlap-add envelope."""


class InvalidRange(ToneMorphError):
    """Mel filterbank frequency range violates 0 <= fmin < fmax <= sr/2."""


class ShapeMismatch(ToneMorphError):
    """Matrix/vector operands do not agree in shape."""


# --- latent codec ---

class RateMismatch(ToneMorphError):
    """Sample rates of the operands differ."""


class SingularFilterbank(ToneMorphError):
    """Mel filterbank rows are not linearly independent; no pseudo-inverse."""


# --- interpolation ---

class ZeroVector(ToneMorphError):
    """Cannot normalize or interpolate a zero-norm vector."""


class NotUnit(ToneMorphError):
    """Operand expected to be unit-norm is not."""


class DimMismatch(ToneMorphError):
    """Vector operands have different lengths."""


class AntipodalAmbiguous(ToneMorphError):
    """Endpoints are (near-)antipodal; the interpolation geodesic is undefined."""


class BandMismatch(ToneMorphError):
    """Channel statistics do not match the latent's band count."""


class ConfigMismatch(ToneMorphError):
    """Latents were produced with different codec configurations."""


class TooShort(ToneMorphError):
    """Clip too short to yield at least two analysis frames."""


# --- metrics ---

class ZeroTarget(ToneMorphError):
    """Spectral convergence undefined: target spectrogram has zero norm."""


class EmptyInput(ToneMorphError):
    """Aggregation over an empty collection."""
