"""Spectral convergence distances and batch-report plumbing.

sc is the normalized Frobenius distance between two magnitude
spectrograms; multi_res_sc evaluates it at the three reference STFT
resolutions and averages.  Lower is better, 0 means identical.
"""

from __future__ import annotations

import csv
import io
import json
import statistics
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .audio_io import AudioClip
from .errors import EmptyInput, RateMismatch, ShapeMismatch, ZeroTarget
from .interp import angle_between, normalize
from .latent_codec import MelLatent
from .spectral import EVAL_CONFIGS, StftConfig, magnitude, stft


def _mag_array(x) -> np.ndarray:
    # accepts MagnitudeSpectrogram or a bare array
    return np.asarray(getattr(x, "mags", x), dtype=np.float64)


def sc(m_r, m_t) -> float:
    """|| M_t - M_r ||_F / || M_t ||_F on linear magnitudes.

    m_r is the rendered/reconstructed spectrogram, m_t the target.
    """
    r = _mag_array(m_r)
    t = _mag_array(m_t)
    if r.shape != t.shape:
        raise ShapeMismatch(f"magnitude shapes differ: {r.shape} vs {t.shape}")
    denom = float(np.linalg.norm(t))
    if denom == 0.0:
        raise ZeroTarget("target magnitudes are all zero")
    return float(np.linalg.norm(t - r) / denom)


@dataclass(frozen=True)
class ScResolutionResult:
    config: StftConfig
    sc: float


@dataclass(frozen=True)
class ScReport:
    per_resolution: tuple[ScResolutionResult, ...]
    mean: float

    @classmethod
    def from_results(cls, results: Sequence[ScResolutionResult]) -> "ScReport":
        values = [r.sc for r in results]
        return cls(tuple(results), float(statistics.fmean(values)))


def _pad_to(clip: AudioClip, n: int) -> AudioClip:
    if len(clip.samples) == n:
        return clip
    padded = np.concatenate([clip.samples, np.zeros(n - len(clip.samples))])
    return AudioClip(padded, clip.sample_rate_hz)


def multi_res_sc(
    reference: AudioClip,
    estimate: AudioClip,
    configs: Sequence[StftConfig] = EVAL_CONFIGS,
) -> ScReport:
    """sc(estimate, reference) at each config, plus their mean.

    The shorter signal is zero-padded to the longer before analysis so
    the spectrogram shapes line up without discarding content.
    """
    if reference.sample_rate_hz != estimate.sample_rate_hz:
        raise RateMismatch(
            f"{reference.sample_rate_hz} Hz reference vs {estimate.sample_rate_hz} Hz estimate"
        )
    n = max(len(reference.samples), len(estimate.samples))
    ref = _pad_to(reference, n)
    est = _pad_to(estimate, n)
    results = [
        ScResolutionResult(
            cfg, sc(magnitude(stft(est, cfg)), magnitude(stft(ref, cfg)))
        )
        for cfg in configs
    ]
    return ScReport.from_results(results)


def aggregate(pair_reports: Iterable[ScReport]) -> dict:
    """Dataset mean and median of per-pair mean SC values.

    The median of an even-length list is the average of the two central
    values, which keeps it robust when a few pairs blow up.
    """
    means = [r.mean for r in pair_reports]
    if not means:
        raise EmptyInput("no reports to aggregate")
    return {
        "dataset_mean": float(statistics.fmean(means)),
        "dataset_median": float(statistics.median(means)),
    }


def latent_diagnostics(
    l0: MelLatent, l1: MelLatent, morphed: MelLatent, alpha: float
) -> dict:
    """Geodesic position of a morphed latent relative to its endpoints.

    On the unit sphere the morph should sit at alpha * theta0 from
    endpoint A; expected_a states that target so callers can compare.
    """
    if l0.values.shape != l1.values.shape or l0.values.shape != morphed.values.shape:
        raise ShapeMismatch(
            f"latent shapes differ: {l0.values.shape} / {l1.values.shape} / {morphed.values.shape}"
        )
    u0, _ = normalize(l0.values.ravel())
    u1, _ = normalize(l1.values.ravel())
    um, _ = normalize(morphed.values.ravel())
    return {
        "angle_to_a": angle_between(um, u0),
        "angle_to_b": angle_between(um, u1),
        "expected_a": alpha * angle_between(u0, u1),
    }


# --- report serialization ---

_SC_FIELDS = tuple(f"sc_{cfg.fft_size}" for cfg in EVAL_CONFIGS)


def report_row(pair_id: str, report: ScReport) -> dict:
    """Flatten one pair's report into JSON/CSV-ready fields."""
    row = {"id": pair_id, "mean": report.mean}
    for res in report.per_resolution:
        row[f"sc_{res.config.fft_size}"] = res.sc
    return row


def render_json(rows: Sequence[dict], summary: dict) -> str:
    """Full evaluation payload: {pairs: [...], dataset_mean, dataset_median}
    plus any extra summary fields, with sorted keys for stable diffs."""
    return json.dumps({"pairs": list(rows), **summary}, sort_keys=True, indent=2) + "\n"


def render_csv(rows: Sequence[dict], summary: dict) -> str:
    """One row per pair, then a trailing summary row
    ("dataset", dataset_mean, dataset_median)."""
    fields = ["id"]
    if rows and "task" in rows[0]:
        fields.append("task")
    fields.extend(_SC_FIELDS)
    fields.append("mean")
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(fields)
    for row in rows:
        writer.writerow([row.get(f, "") for f in fields])
    writer.writerow(["dataset", summary["dataset_mean"], summary["dataset_median"]])
    return buf.getvalue()
