"""Local HTTP facade over the morph pipeline.

A session is an immutable snapshot: two uploaded clips encoded, trimmed
to a common shape, with both endpoint reconstructions rendered up
front.  Morph renders are cached per (alpha quantized to 1/1000, adain)
and the quantized alpha is also the one actually rendered, so cached
bytes always equal a fresh recomputation bit for bit.
"""

from __future__ import annotations

import threading
import time
import uuid
from dataclasses import dataclass, field as dc_field

from fastapi import FastAPI, File, Form, UploadFile
from fastapi.responses import JSONResponse, Response
from fastapi.staticfiles import StaticFiles

from . import __version__
from .audio_io import decode_wav_bytes, encode_wav_bytes, resample
from .errors import ToneMorphError, ZeroTarget
from .interp import MorphSpec, angle_between, morph_latent, normalize, trim_latents
from .latent_codec import CodecConfig, MelLatent, decode, encode
from .metrics import latent_diagnostics, multi_res_sc

MAX_CLIP_SECONDS = 30.0


@dataclass
class Session:
    session_id: str
    latent_a: MelLatent
    latent_b: MelLatent
    theta0: float
    wav_a: bytes
    wav_b: bytes
    created_at: float
    # (alpha_milli, adain) -> WAV bytes; latents are immutable so
    # duplicate concurrent fills write identical values
    morph_cache: dict = dc_field(default_factory=dict)


class _Reject(Exception):
    """Internal: carries an HTTP status + error name out of helpers."""

    def __init__(self, status: int, name: str):
        super().__init__(name)
        self.status = status
        self.name = name


def _error(status: int, name: str) -> JSONResponse:
    return JSONResponse({"error": name}, status_code=status)


def _alpha_milli(alpha: float):
    """Quantized cache key, or None when alpha is out of range."""
    if not 0.0 <= alpha <= 1.0:  # also rejects NaN
        return None
    return int(round(alpha * 1000.0))


def create_app(max_sessions: int = 32, static_dir=None) -> FastAPI:
    app = FastAPI(title="tonemorph", version=__version__)
    sessions: dict[str, Session | None] = {}
    lock = threading.Lock()

    def _get(session_id: str):
        sess = sessions.get(session_id)
        return sess if isinstance(sess, Session) else None

    def _render(sess: Session, alpha_milli: int, use_adain: bool) -> bytes:
        if alpha_milli == 0:
            return sess.wav_a
        if alpha_milli == 1000:
            return sess.wav_b
        key = (alpha_milli, use_adain)
        cached = sess.morph_cache.get(key)
        if cached is not None:
            return cached
        latent = _morph(sess, alpha_milli, use_adain)
        wav = encode_wav_bytes(decode(latent))
        sess.morph_cache[key] = wav
        return wav

    def _morph(sess: Session, alpha_milli: int, use_adain: bool) -> MelLatent:
        spec = MorphSpec(alpha_milli / 1000.0, use_adain=use_adain)
        return morph_latent(sess.latent_a, sess.latent_b, spec)

    def _flags(adain: str) -> bool:
        if adain not in ("on", "off"):
            raise _Reject(400, "InvalidFlag")
        return adain == "on"

    @app.get("/api/health")
    def health():
        return {"status": "ok", "version": __version__}

    @app.post("/api/session")
    def create_session(
        file_a: UploadFile = File(...),
        file_b: UploadFile = File(...),
        sample_rate: int = Form(44100),
        n_mels: int = Form(128),
        gl_iterations: int = Form(64),
    ):
        with lock:
            if len(sessions) >= max_sessions:
                return _error(429, "TooManySessions")
            session_id = uuid.uuid4().hex
            sessions[session_id] = None  # reserve the slot
        try:
            sess = _build_session(session_id, file_a.file.read(), file_b.file.read(),
                                  sample_rate, n_mels, gl_iterations)
        except _Reject as exc:
            with lock:
                sessions.pop(session_id, None)
            return _error(exc.status, exc.name)
        with lock:
            sessions[session_id] = sess
        cfg = sess.latent_a.config
        return {
            "session_id": session_id,
            "frames": sess.latent_a.n_frames,
            "bands": sess.latent_a.n_bands,
            "theta0": sess.theta0,
            "duration_s": sess.latent_a.original_len / cfg.sample_rate_hz,
        }

    def _build_session(session_id, raw_a, raw_b, sample_rate, n_mels, gl_iterations):
        try:
            clip_a = decode_wav_bytes(raw_a)
            clip_b = decode_wav_bytes(raw_b)
        except ToneMorphError as exc:
            raise _Reject(400, type(exc).__name__) from exc
        for clip in (clip_a, clip_b):
            if clip.duration_s > MAX_CLIP_SECONDS:
                raise _Reject(413, "ClipTooLong")
        try:
            cfg = CodecConfig(
                sample_rate_hz=sample_rate, n_mels=n_mels, gl_iterations=gl_iterations
            )
            la, lb = trim_latents(
                encode(resample(clip_a, cfg.sample_rate_hz), cfg),
                encode(resample(clip_b, cfg.sample_rate_hz), cfg),
            )
            theta0 = angle_between(
                normalize(la.values.ravel())[0], normalize(lb.values.ravel())[0]
            )
            wav_a = encode_wav_bytes(decode(la))
            wav_b = encode_wav_bytes(decode(lb))
        except ToneMorphError as exc:
            raise _Reject(400, type(exc).__name__) from exc
        return Session(session_id, la, lb, theta0, wav_a, wav_b, time.time())

    @app.get("/api/session/{session_id}/morph")
    def get_morph(session_id: str, alpha: float, adain: str = "off"):
        sess = _get(session_id)
        if sess is None:
            return _error(404, "UnknownSession")
        am = _alpha_milli(alpha)
        if am is None:
            return _error(400, "InvalidRange")
        try:
            use_adain = _flags(adain)
        except _Reject as exc:
            return _error(exc.status, exc.name)
        return Response(content=_render(sess, am, use_adain), media_type="audio/wav")

    @app.get("/api/session/{session_id}/diagnostics")
    def get_diagnostics(session_id: str, alpha: float, adain: str = "off"):
        sess = _get(session_id)
        if sess is None:
            return _error(404, "UnknownSession")
        am = _alpha_milli(alpha)
        if am is None:
            return _error(400, "InvalidRange")
        try:
            use_adain = _flags(adain)
        except _Reject as exc:
            return _error(exc.status, exc.name)
        morphed = _morph(sess, am, use_adain)
        out = latent_diagnostics(sess.latent_a, sess.latent_b, morphed, am / 1000.0)
        # SC against each endpoint render, all in the same float32 WAV
        # domain so alpha 0/1 compare exactly equal signals
        morph_clip = decode_wav_bytes(_render(sess, am, use_adain))
        for key, wav in (("sc_to_a", sess.wav_a), ("sc_to_b", sess.wav_b)):
            try:
                out[key] = multi_res_sc(decode_wav_bytes(wav), morph_clip).mean
            except ZeroTarget:
                out[key] = None
        return out

    @app.get("/api/session/{session_id}/spectrogram")
    def get_spectrogram(session_id: str, alpha: float, adain: str = "off"):
        sess = _get(session_id)
        if sess is None:
            return _error(404, "UnknownSession")
        am = _alpha_milli(alpha)
        if am is None:
            return _error(400, "InvalidRange")
        try:
            use_adain = _flags(adain)
        except _Reject as exc:
            return _error(exc.status, exc.name)
        morphed = _morph(sess, am, use_adain)
        return {
            "t": morphed.n_frames,
            "b": morphed.n_bands,
            "values": morphed.values.ravel().tolist(),
        }

    if static_dir is not None:
        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="ui")

    return app
