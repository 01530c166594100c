"""Spectral convergence metric, aggregation, and report rendering."""

import csv
import io
import json
import math

import numpy as np
import pytest

from conftest import harmonic, white_noise
from tonemorph.audio_io import AudioClip
from tonemorph.errors import EmptyInput, RateMismatch, ShapeMismatch, ZeroTarget
from tonemorph.interp import MorphSpec, morph_latent, trim_latents
from tonemorph.latent_codec import CodecConfig, encode
from tonemorph.metrics import (
    ScReport,
    ScResolutionResult,
    aggregate,
    latent_diagnostics,
    multi_res_sc,
    render_csv,
    render_json,
    report_row,
    sc,
)
from tonemorph.spectral import EVAL_CONFIGS, magnitude, stft


def test_sc_identical_is_zero():
    m = np.random.default_rng(0).uniform(0, 1, (6, 5))
    assert sc(m, m) == 0.0


def test_sc_analytic_values():
    target = np.array([[3.0, 4.0]])
    assert sc(np.zeros((1, 2)), target) == 1.0
    assert sc(2.0 * target, target) == 1.0
    assert abs(sc(np.array([[3.0, 0.0]]), target) - 4.0 / 5.0) < 1e-15


def test_sc_halved_estimate_is_half():
    m = np.random.default_rng(1).uniform(0.1, 1.0, (10, 7))
    assert sc(0.5 * m, m) == 0.5


def test_sc_joint_scaling_invariant():
    m = np.random.default_rng(2).uniform(0.1, 1.0, (4, 9))
    r = np.random.default_rng(3).uniform(0.1, 1.0, (4, 9))
    assert abs(sc(r, m) - sc(4.0 * r, 4.0 * m)) < 1e-15


def test_sc_triangle_bound():
    rng = np.random.default_rng(4)
    t = rng.uniform(0.1, 1.0, (5, 5))
    a = rng.uniform(0.1, 1.0, (5, 5))
    b = rng.uniform(0.1, 1.0, (5, 5))
    # ||t-a|| <= ||t-b|| + ||b-a|| after the shared normalization
    assert sc(a, t) <= sc(b, t) + np.linalg.norm(b - a) / np.linalg.norm(t) + 1e-12


def test_sc_errors():
    with pytest.raises(ShapeMismatch):
        sc(np.ones((2, 3)), np.ones((3, 2)))
    with pytest.raises(ZeroTarget):
        sc(np.ones((2, 2)), np.zeros((2, 2)))


def test_sc_accepts_spectrograms():
    clip = white_noise(0.3, 16000, seed=5)
    m = magnitude(stft(clip, EVAL_CONFIGS[0]))
    assert sc(m, m) == 0.0


def test_multi_res_identical_clip():
    clip = harmonic(220.0, [0.5, 0.2], 0.4, 16000, noise=1e-3, seed=6)
    report = multi_res_sc(clip, clip)
    assert report.mean == 0.0
    assert all(r.sc == 0.0 for r in report.per_resolution)
    assert tuple(r.config for r in report.per_resolution) == EVAL_CONFIGS


def test_multi_res_silence_estimate_is_one():
    clip = harmonic(220.0, [0.5], 0.4, 16000)
    silent = AudioClip(np.zeros(len(clip.samples)), 16000)
    report = multi_res_sc(clip, silent)
    assert abs(report.mean - 1.0) < 1e-12


def test_multi_res_halved_estimate():
    clip = white_noise(0.4, 16000, seed=7)
    half = AudioClip(0.5 * clip.samples, 16000)
    report = multi_res_sc(clip, half)
    for res in report.per_resolution:
        assert res.sc == 0.5


def test_multi_res_rate_mismatch():
    with pytest.raises(RateMismatch):
        multi_res_sc(
            AudioClip(np.ones(1000), 16000), AudioClip(np.ones(1000), 44100)
        )


def test_multi_res_pads_shorter():
    clip = harmonic(250.0, [0.5], 0.5, 16000, noise=1e-3, seed=8)
    head = AudioClip(clip.samples[:6000].copy(), 16000)
    padded = AudioClip(np.concatenate([head.samples, np.zeros(2000)]), 16000)
    a = multi_res_sc(clip, head)
    b = multi_res_sc(clip, padded)
    assert a.mean == b.mean
    # symmetric in which argument is short
    c = multi_res_sc(head, clip)
    assert c.mean > 0.0


def test_report_mean_is_mean_of_parts():
    clip = white_noise(0.3, 16000, seed=9)
    other = harmonic(300.0, [0.3], 0.3, 16000)
    report = multi_res_sc(clip, other)
    assert abs(report.mean - sum(r.sc for r in report.per_resolution) / 3.0) < 1e-12


def test_aggregate_values():
    def rep(m):
        return ScReport((ScResolutionResult(EVAL_CONFIGS[0], m),), m)

    out = aggregate([rep(0.1), rep(0.2), rep(0.9)])
    assert abs(out["dataset_mean"] - 0.4) < 1e-12
    assert out["dataset_median"] == 0.2

    even = aggregate([rep(0.1), rep(0.3)])
    assert abs(even["dataset_median"] - 0.2) < 1e-12

    with pytest.raises(EmptyInput):
        aggregate([])


def test_latent_diagnostics_geodesic():
    cfg = CodecConfig(
        sample_rate_hz=16000, fft_size=512, hop_size=128, win_length=512,
        n_mels=40, gl_iterations=2,
    )
    a = harmonic(220.0, [0.5, 0.2], 0.4, 16000, noise=1e-3, seed=10)
    b = harmonic(330.0, [0.4, 0.3], 0.4, 16000, noise=1e-3, seed=11)
    l0, l1 = trim_latents(encode(a, cfg), encode(b, cfg))
    morphed = morph_latent(l0, l1, MorphSpec(0.25))
    diag = latent_diagnostics(l0, l1, morphed, 0.25)
    assert abs(diag["angle_to_a"] - diag["expected_a"]) < 1e-9
    theta0 = diag["expected_a"] / 0.25
    assert abs(diag["angle_to_a"] + diag["angle_to_b"] - theta0) < 1e-9


def test_latent_diagnostics_endpoint():
    cfg = CodecConfig(
        sample_rate_hz=16000, fft_size=512, hop_size=128, win_length=512,
        n_mels=40, gl_iterations=2,
    )
    a = harmonic(220.0, [0.5], 0.3, 16000, noise=1e-3, seed=12)
    b = harmonic(350.0, [0.5], 0.3, 16000, noise=1e-3, seed=13)
    l0, l1 = trim_latents(encode(a, cfg), encode(b, cfg))
    diag = latent_diagnostics(l0, l1, morph_latent(l0, l1, MorphSpec(0.0)), 0.0)
    assert diag["angle_to_a"] == 0.0
    assert diag["expected_a"] == 0.0


def test_latent_diagnostics_shape_mismatch():
    cfg = CodecConfig(
        sample_rate_hz=16000, fft_size=512, hop_size=128, win_length=512,
        n_mels=8, gl_iterations=2,
    )
    from tonemorph.latent_codec import MelLatent

    l0 = MelLatent(np.full((4, 8), -2.0), cfg, 400)
    l1 = MelLatent(np.full((5, 8), -2.0), cfg, 500)
    with pytest.raises(ShapeMismatch):
        latent_diagnostics(l0, l1, l0, 0.5)


def test_report_row_fields():
    report = ScReport(
        tuple(ScResolutionResult(cfg, 0.1 * i) for i, cfg in enumerate(EVAL_CONFIGS)),
        0.1,
    )
    row = report_row("pair-1", report)
    assert row == {
        "id": "pair-1",
        "mean": 0.1,
        "sc_1024": 0.0,
        "sc_2048": 0.1,
        "sc_512": 0.2,
    }


def test_render_json_shape():
    rows = [{"id": "p0", "sc_1024": 0.1, "sc_2048": 0.2, "sc_512": 0.3, "mean": 0.2}]
    text = render_json(rows, {"dataset_mean": 0.2, "dataset_median": 0.2})
    assert text.endswith("\n")
    payload = json.loads(text)
    assert set(payload) == {"pairs", "dataset_mean", "dataset_median"}
    assert payload["pairs"] == rows
    # stable ordering for diffs
    assert text.index('"dataset_mean"') < text.index('"dataset_median"') < text.index('"pairs"')


def test_render_csv_shape():
    rows = [
        {"id": "p0", "task": "clean", "sc_1024": 0.1, "sc_2048": 0.2, "sc_512": 0.3, "mean": 0.2},
        {"id": "p1", "task": "clean", "sc_1024": 0.4, "sc_2048": 0.5, "sc_512": 0.6, "mean": 0.5},
    ]
    text = render_csv(rows, {"dataset_mean": 0.35, "dataset_median": 0.35})
    parsed = list(csv.reader(io.StringIO(text)))
    assert parsed[0] == ["id", "task", "sc_1024", "sc_2048", "sc_512", "mean"]
    assert len(parsed) == 4
    assert parsed[1][0] == "p0"
    assert parsed[3][0] == "dataset"
    assert float(parsed[3][1]) == 0.35


def test_render_csv_without_task_column():
    rows = [{"id": "p0", "sc_1024": 0.1, "sc_2048": 0.2, "sc_512": 0.3, "mean": 0.2}]
    text = render_csv(rows, {"dataset_mean": 0.2, "dataset_median": 0.2})
    parsed = list(csv.reader(io.StringIO(text)))
    assert parsed[0] == ["id", "sc_1024", "sc_2048", "sc_512", "mean"]
