"""Command line front end.

Subcommands: morph (render a blend or a whole sweep between two clips),
reconstruct (codec round trip plus a quality readout), eval (batch SC
evaluation over a task manifest), serve (HTTP interface for the UI).
Exit codes: 0 success, 1 pipeline/file errors, 2 bad flags or malformed
manifests.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import socket
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .audio_io import peak_normalize, read_wav, resample, write_wav
from .errors import ToneMorphError, ZeroTarget
from .interp import (
    NORM_POLICIES,
    MorphSpec,
    angle_between,
    morph_latent,
    normalize,
    trim_latents,
)
from .latent_codec import CodecConfig, decode, encode
from .metrics import (
    ScReport,
    ScResolutionResult,
    aggregate,
    latent_diagnostics,
    multi_res_sc,
    render_csv,
    render_json,
    report_row,
)

TASK_NAMES = (
    "clean-to-high-gain",
    "clean-to-low-gain",
    "low-to-high-gain",
    "clean-to-modulation",
    "modulation-to-high-gain",
)

# manifest "codec" keys accepted as CodecConfig overrides
_CODEC_KEYS = (
    "fft_size", "hop_size", "win_length", "n_mels", "log_floor", "gl_iterations",
)


class ManifestError(ValueError):
    """Structurally bad manifest (missing keys, duplicate ids, empty)."""


@dataclass(frozen=True)
class EvalPair:
    pair_id: str
    source_path: Path
    target_path: Path


@dataclass(frozen=True)
class EvalTask:
    name: str
    pairs: tuple[EvalPair, ...]


@dataclass(frozen=True)
class TaskManifest:
    tasks: tuple[EvalTask, ...]
    sample_rate_hz: int = 44100
    codec_overrides: dict = field(default_factory=dict)

    def codec_config(self) -> CodecConfig:
        return CodecConfig(sample_rate_hz=self.sample_rate_hz, **self.codec_overrides)

    def missing_files(self) -> list[Path]:
        missing = []
        for task in self.tasks:
            for pair in task.pairs:
                for path in (pair.source_path, pair.target_path):
                    if not path.is_file():
                        missing.append(path)
        return sorted(set(missing))


def load_manifest(path) -> TaskManifest:
    """Parse a task manifest; paths resolve relative to the manifest file.

    Expected shape:
      {"sample_rate": 44100, "codec": {"n_mels": 128, ...},
       "tasks": [{"name": ..., "pairs": [{"id", "source_path", "target_path"}]}]}
    """
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ManifestError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(data, dict) or not isinstance(data.get("tasks"), list):
        raise ManifestError(f"{path}: expected an object with a 'tasks' list")
    if not data["tasks"]:
        raise ManifestError(f"{path}: empty manifest")
    overrides = data.get("codec", {})
    if not isinstance(overrides, dict):
        raise ManifestError(f"{path}: 'codec' must be an object")
    for key in overrides:
        if key not in _CODEC_KEYS:
            raise ManifestError(f"{path}: unknown codec override {key!r}")
    base = path.resolve().parent
    tasks = []
    for i, raw_task in enumerate(data["tasks"]):
        if not isinstance(raw_task, dict) or "pairs" not in raw_task:
            raise ManifestError(f"{path}: task #{i} lacks a 'pairs' list")
        name = str(raw_task.get("name", f"task-{i}"))
        pairs = []
        seen = set()
        for raw_pair in raw_task["pairs"]:
            try:
                pid = str(raw_pair["id"])
                src = base / raw_pair["source_path"]
                tgt = base / raw_pair["target_path"]
            except (TypeError, KeyError) as exc:
                raise ManifestError(
                    f"{path}: task {name!r} has a pair without id/source_path/target_path"
                ) from exc
            if pid in seen:
                raise ManifestError(f"{path}: duplicate pair id {pid!r} in task {name!r}")
            seen.add(pid)
            pairs.append(EvalPair(pid, src, tgt))
        tasks.append(EvalTask(name, tuple(pairs)))
    return TaskManifest(
        tuple(tasks), int(data.get("sample_rate", 44100)), dict(overrides)
    )


def _usage(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return 2


def _codec_config(args) -> CodecConfig:
    return CodecConfig(
        sample_rate_hz=args.sr, n_mels=args.mels, gl_iterations=args.gl_iters
    )


def _load_input(path, cfg: CodecConfig, normalize_peak: bool):
    clip = resample(read_wav(path), cfg.sample_rate_hz)
    return peak_normalize(clip) if normalize_peak else clip


def cmd_morph(args) -> int:
    if args.alpha is not None:
        if not 0.0 <= args.alpha <= 1.0:
            return _usage(f"--alpha {args.alpha} outside [0, 1]")
        alphas = [float(args.alpha)]
    else:
        if args.steps < 2:
            return _usage(f"--steps must be >= 2, got {args.steps}")
        alphas = [i / (args.steps - 1) for i in range(args.steps)]

    cfg = _codec_config(args)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    use_peak = args.normalize_peak == "on"
    clip_a = _load_input(args.a, cfg, use_peak)
    clip_b = _load_input(args.b, cfg, use_peak)
    la, lb = trim_latents(encode(clip_a, cfg), encode(clip_b, cfg))
    theta0 = angle_between(
        normalize(la.values.ravel())[0], normalize(lb.values.ravel())[0]
    )

    steps_info = []
    for alpha in alphas:
        spec = MorphSpec(
            alpha, use_adain=args.adain == "on", norm_policy=args.norm_policy
        )
        latent = morph_latent(la, lb, spec)
        name = f"morph_{alpha:.3f}.wav"
        write_wav(decode(latent), out_dir / name)
        diag = latent_diagnostics(la, lb, latent, alpha)
        steps_info.append({"alpha": alpha, "file": name, **diag})

    manifest = {
        "command": "morph",
        "version": __version__,
        "a": str(Path(args.a).resolve()),
        "b": str(Path(args.b).resolve()),
        "codec": dataclasses.asdict(cfg),
        "adain": args.adain,
        "norm_policy": args.norm_policy,
        "normalize_peak": args.normalize_peak,
        "alphas": alphas,
        "theta0": theta0,
        "frames": la.n_frames,
        "steps": steps_info,
    }
    (out_dir / "run_manifest.json").write_text(
        json.dumps(manifest, sort_keys=True, indent=2) + "\n"
    )
    return 0


def cmd_reconstruct(args) -> int:
    cfg = _codec_config(args)
    clip = resample(read_wav(args.infile), cfg.sample_rate_hz)
    recon = decode(encode(clip, cfg))
    write_wav(recon, args.out)
    try:
        report = multi_res_sc(clip, recon)
    except ZeroTarget:
        print(json.dumps({"note": "zero-energy input, sc omitted"}, sort_keys=True))
        return 0
    payload = {f"sc_{r.config.fft_size}": r.sc for r in report.per_resolution}
    payload["mean"] = report.mean
    print(json.dumps(payload, sort_keys=True))
    return 0


def _reconstruct_clip(path, cfg: CodecConfig):
    clip = resample(read_wav(path), cfg.sample_rate_hz)
    return clip, decode(encode(clip, cfg))


def _pair_report(pair: EvalPair, cfg: CodecConfig, mode: str) -> ScReport:
    if mode == "reconstruct":
        src, recon = _reconstruct_clip(pair.source_path, cfg)
        return multi_res_sc(src, recon)
    # endpoints: run the actual morph pipeline at alpha 0 and 1 and score
    # each rendered endpoint against its own original
    src = resample(read_wav(pair.source_path), cfg.sample_rate_hz)
    tgt = resample(read_wav(pair.target_path), cfg.sample_rate_hz)
    la, lb = trim_latents(encode(src, cfg), encode(tgt, cfg))
    rep_a = multi_res_sc(src, decode(morph_latent(la, lb, MorphSpec(0.0))))
    rep_b = multi_res_sc(tgt, decode(morph_latent(la, lb, MorphSpec(1.0))))
    combined = [
        ScResolutionResult(ra.config, 0.5 * (ra.sc + rb.sc))
        for ra, rb in zip(rep_a.per_resolution, rep_b.per_resolution)
    ]
    return ScReport.from_results(combined)


def cmd_eval(args) -> int:
    out_path = Path(args.out)
    if out_path.suffix.lower() not in (".json", ".csv"):
        return _usage(f"--out must end in .json or .csv, got {out_path.name}")
    try:
        manifest = load_manifest(args.manifest)
    except ManifestError as exc:
        return _usage(str(exc))
    missing = manifest.missing_files()
    if missing:
        for p in missing:
            print(f"missing file: {p}", file=sys.stderr)
        return 1
    cfg = manifest.codec_config()

    rows = []
    all_reports = []
    task_reports: dict[str, list[ScReport]] = {}
    for task in manifest.tasks:
        for pair in task.pairs:
            report = _pair_report(pair, cfg, args.mode)
            row = report_row(pair.pair_id, report)
            row["task"] = task.name
            rows.append(row)
            all_reports.append(report)
            task_reports.setdefault(task.name, []).append(report)

    summary = aggregate(all_reports)
    summary["tasks"] = {
        name: aggregate(reports) for name, reports in task_reports.items()
    }
    if out_path.suffix.lower() == ".json":
        out_path.write_text(render_json(rows, summary))
    else:
        out_path.write_text(render_csv(rows, {k: summary[k] for k in ("dataset_mean", "dataset_median")}))
    print(
        f"pairs={len(rows)} dataset_mean={summary['dataset_mean']:.6g} "
        f"dataset_median={summary['dataset_median']:.6g} -> {out_path}"
    )
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(max_sessions=args.max_sessions, static_dir=args.static)
    sock = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    sock.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
    try:
        sock.bind((args.host, args.port))
    except OSError as exc:
        print(f"error: cannot bind {args.host}:{args.port}: {exc}", file=sys.stderr)
        sock.close()
        return 1
    sock.listen(128)
    print(f"PORT={sock.getsockname()[1]}", flush=True)
    server = uvicorn.Server(uvicorn.Config(app, log_level="warning"))
    server.run(sockets=[sock])
    return 0


def _add_codec_flags(parser) -> None:
    parser.add_argument(
        "--sr", type=int, choices=(16000, 44100), default=44100,
        help="working sample rate (inputs are resampled)",
    )
    parser.add_argument("--mels", type=int, default=128, help="mel band count")
    parser.add_argument(
        "--gl-iters", type=int, default=64, help="phase recovery iterations"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tonemorph", description="Guitar tone morphing toolkit."
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__}"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    m = sub.add_parser("morph", help="blend two clips at one or many alphas")
    m.add_argument("--a", required=True, metavar="PATH", help="tone A (WAV)")
    m.add_argument("--b", required=True, metavar="PATH", help="tone B (WAV)")
    pick = m.add_mutually_exclusive_group(required=True)
    pick.add_argument("--alpha", type=float, help="single blend weight in [0, 1]")
    pick.add_argument(
        "--steps", type=int, help="render an inclusive sweep of this many alphas"
    )
    m.add_argument("--out", required=True, metavar="DIR", help="output directory")
    _add_codec_flags(m)
    m.add_argument("--adain", choices=("on", "off"), default="off",
                   help="match band statistics to the blended style")
    m.add_argument("--norm-policy", choices=NORM_POLICIES, default="lerp-norm")
    m.add_argument("--normalize-peak", choices=("on", "off"), default="off",
                   help="peak-normalize inputs before encoding")
    m.set_defaults(func=cmd_morph)

    r = sub.add_parser("reconstruct", help="codec round trip with SC readout")
    r.add_argument("--in", dest="infile", required=True, metavar="PATH")
    r.add_argument("--out", required=True, metavar="PATH")
    _add_codec_flags(r)
    r.set_defaults(func=cmd_reconstruct)

    e = sub.add_parser("eval", help="batch SC evaluation over a task manifest")
    e.add_argument("--manifest", required=True, metavar="PATH")
    e.add_argument("--out", required=True, metavar="PATH.{json|csv}")
    e.add_argument("--mode", choices=("reconstruct", "endpoints"),
                   default="reconstruct")
    e.set_defaults(func=cmd_eval)

    s = sub.add_parser("serve", help="serve the HTTP interface")
    s.add_argument("--host", default="127.0.0.1")
    s.add_argument("--port", type=int, default=8000,
                   help="0 picks an ephemeral port (printed as PORT=N)")
    s.add_argument("--static", default=None, metavar="DIR",
                   help="directory of UI assets to serve at /")
    s.add_argument("--max-sessions", type=int, default=32)
    s.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return args.func(args)
    except ToneMorphError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
