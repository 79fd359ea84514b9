"""mispron command line: calibrate, detect, evaluate, summarize, fixture, stft.

Exit codes: 0 success, 1 usage error, 2 data or I/O error, 3 remote-service failure.
stdout carries only the JSON payload (or a table for ``summarize``); diagnostics
go to stderr as one JSON object per line.
"""
from __future__ import annotations

import argparse
import functools
import json
import sys
from pathlib import Path

from . import audio
from .calibration import CalibrationModel
from .clone_provider import CloneRequest, fetch_clone_remote
from .corpus import UtterancePair, load_manifest
from .detector import DecisionStrategy, detect_utterance
from .distance import NormalizationStrategy
from .errors import CloneNotFound, DataError, RemoteFailure
from .fixture import generate_corpus
from .metrics import (
    ClassMetrics,
    ClassReport,
    DistanceSummary,
    format_classification_table,
    format_summary_table,
    stft_magnitude,
    write_stft_csv,
)
from .pipeline import calibrate_manifest, dumps_report, evaluate_manifest
from .textgrid import read_textgrid

EXIT_USAGE, EXIT_DATA, EXIT_REMOTE = 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        _diag("error", "UsageError", message)
        sys.exit(EXIT_USAGE)


def _diag(level: str, kind: str, message: str) -> None:
    print(json.dumps({"level": level, "type": kind, "message": message}), file=sys.stderr)


def _emit(payload: str, out: str | None) -> None:
    if out:
        Path(out).write_text(payload, encoding="utf-8")
    else:
        sys.stdout.write(payload)


def _remote_fetcher(args):
    if not getattr(args, "endpoint", None):
        return None
    return functools.partial(
        _fetch_remote, endpoint=args.endpoint, timeout=args.timeout, retries=args.retries
    )


def _fetch_remote(req, endpoint, timeout, retries):
    return fetch_clone_remote(endpoint, req, timeout=timeout, retries=retries)


# --- commands ---

def cmd_calibrate(args) -> int:
    manifest = load_manifest(args.manifest)
    model, warnings = calibrate_manifest(
        manifest, args.alpha, args.percentile, NormalizationStrategy(args.normalization),
        jobs=args.jobs, remote=_remote_fetcher(args),
    )
    for w in warnings:
        _diag("warning", "Calibration", w)
    model.save(args.out)
    summary = {
        "model": str(args.out),
        "pool_sizes": {"correct": len(model.pool_correct), "incorrect": len(model.pool_incorrect)},
        "tau_global": model.tau_global,
        "tau_correct": model.tau_correct,
        "tau_incorrect": model.tau_incorrect,
        "kde_bandwidths": {"correct": model.kde_bandwidth_correct, "incorrect": model.kde_bandwidth_incorrect},
    }
    print(json.dumps(summary, indent=2, sort_keys=True))
    return 0


def cmd_detect(args) -> int:
    model = CalibrationModel.load(args.model)
    real_audio = audio.read_wav(args.real_wav)
    real_grid = read_textgrid(args.real_textgrid)
    uid = args.utterance_id or Path(args.real_wav).stem
    if args.clone_wav:
        clone_audio = audio.read_wav(args.clone_wav)
        clone_grid = read_textgrid(args.clone_textgrid) if args.clone_textgrid else None
    elif args.endpoint:
        pair = UtterancePair(uid, real_audio, real_grid, real_audio)
        res = fetch_clone_remote(
            args.endpoint, CloneRequest(uid, pair.transcript(), args.voice_id, real_audio),
            timeout=args.timeout, retries=args.retries,
        )
        clone_audio, clone_grid = res.audio, res.alignment
    else:
        raise CloneNotFound("no --clone-wav given and no --endpoint configured")
    pair = UtterancePair(uid, real_audio, real_grid, clone_audio, clone_grid)
    verdicts, warnings = detect_utterance(pair, model, DecisionStrategy(args.decision))
    for w in warnings:
        _diag("warning", "Detect", w)
    payload = {
        "version": "1.0",
        "utterance_id": uid,
        "strategy": args.decision,
        "verdicts": [v.to_dict() for v in verdicts],
        "warnings": warnings,
    }
    _emit(json.dumps(payload, indent=2, sort_keys=True) + "\n", args.json_out)
    return 0


def cmd_evaluate(args) -> int:
    model = CalibrationModel.load(args.model)
    report = evaluate_manifest(
        model, load_manifest(args.manifest), DecisionStrategy(args.decision),
        args.ambiguous_as, args.group_by, jobs=args.jobs, remote=_remote_fetcher(args),
    )
    for w in report["warnings"]:
        _diag("warning", "Evaluate", w)
    _emit(dumps_report(report), args.report_out)
    return 0


def cmd_summarize(args) -> int:
    try:
        report = json.loads(Path(args.report).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DataError(f"report is not JSON: {exc}") from None
    name = args.dataset or report.get("speaker", "")
    out = []
    if report.get("classes"):
        cr = ClassReport(
            tuple(ClassMetrics(c["label"], c["precision"], c["recall"], c["f1"], c["support"]) for c in report["classes"]),
            report["accuracy"],
            tuple(tuple(r) for r in report["confusion"]),
        )
        out.append(format_classification_table(cr, name))
    sums = [DistanceSummary(**s) for s in report.get("distance_summaries", [])]
    if sums:
        out.append(format_summary_table(sums, name))
    print("\n\n".join(out))
    return 0


def cmd_fixture(args) -> int:
    manifest = generate_corpus(
        args.out_dir, args.seed, args.n_utterances, args.words_per_utt, args.misp_rate, args.holdout, args.speaker
    )
    n_bad = sum(lab == "incorrect" for e in manifest.entries for _, lab in e.word_labels)
    n_words = sum(len(e.word_labels) for e in manifest.entries)
    print(json.dumps({"out_dir": str(args.out_dir), "utterances": len(manifest.entries),
                      "words": n_words, "incorrect": n_bad}, sort_keys=True))
    return 0


def cmd_stft(args) -> int:
    a = audio.read_wav(args.wav)
    if args.start is not None or args.end is not None:
        a = audio.slice(a, args.start or 0.0, args.end if args.end is not None else a.duration)
    write_stft_csv(stft_magnitude(a, args.frame, args.hop), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="mispron", description="Word-level mispronunciation detection against a voice clone.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def remote_opts(sp):
        sp.add_argument("--endpoint", help="remote TTS clone service URL")
        sp.add_argument("--timeout", type=float, default=30.0)
        sp.add_argument("--retries", type=int, default=3)

    def decision_opt(sp):
        sp.add_argument("--decision", choices=[s.value for s in DecisionStrategy], default="global")

    c = sub.add_parser("calibrate", help="build a model file from a labeled manifest")
    c.add_argument("--manifest", required=True)
    c.add_argument("--alpha", type=float, default=0.1)
    c.add_argument("--percentile", type=float, default=90.0)
    c.add_argument("--normalization", choices=[s.value for s in NormalizationStrategy], default="peak-amplitude")
    c.add_argument("--out", required=True)
    c.add_argument("--jobs", type=int, default=1)
    remote_opts(c)
    c.set_defaults(func=cmd_calibrate)

    d = sub.add_parser("detect", help="label the words of one utterance")
    d.add_argument("--model", required=True)
    d.add_argument("--real-wav", required=True)
    d.add_argument("--real-textgrid", required=True)
    d.add_argument("--clone-wav")
    d.add_argument("--clone-textgrid")
    d.add_argument("--utterance-id")
    d.add_argument("--voice-id", default="")
    d.add_argument("--json-out")
    decision_opt(d)
    remote_opts(d)
    d.set_defaults(func=cmd_detect)

    e = sub.add_parser("evaluate", help="score a labeled manifest against a model")
    e.add_argument("--model", required=True)
    e.add_argument("--manifest", required=True)
    e.add_argument("--ambiguous-as", choices=["incorrect", "correct", "drop"], default="incorrect")
    e.add_argument("--group-by", choices=["outcome", "truth"], default="outcome")
    e.add_argument("--report-out")
    e.add_argument("--jobs", type=int, default=1)
    decision_opt(e)
    remote_opts(e)
    e.set_defaults(func=cmd_evaluate)

    s = sub.add_parser("summarize", help="print classification and distance tables from a report")
    s.add_argument("--report", required=True)
    s.add_argument("--dataset")
    s.set_defaults(func=cmd_summarize)

    f = sub.add_parser("fixture", help="generate a deterministic synthetic corpus")
    f.add_argument("--seed", type=int, default=42)
    f.add_argument("--out-dir", required=True)
    f.add_argument("--n-utterances", type=int, default=10)
    f.add_argument("--words-per-utt", type=int, default=5)
    f.add_argument("--misp-rate", type=float, default=0.4)
    f.add_argument("--holdout", type=int, default=0, help="last N utterances go to manifest_evaluate.json")
    f.add_argument("--speaker", default="SYN")
    f.set_defaults(func=cmd_fixture)

    t = sub.add_parser("stft", help="export an STFT magnitude CSV for a wav (or a span of it)")
    t.add_argument("--wav", required=True)
    t.add_argument("--start", type=float)
    t.add_argument("--end", type=float)
    t.add_argument("--frame", type=float, default=0.025)
    t.add_argument("--hop", type=float, default=0.010)
    t.add_argument("--out", required=True)
    t.set_defaults(func=cmd_stft)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except RemoteFailure as exc:
        _diag("error", type(exc).__name__, str(exc))
        return EXIT_REMOTE
    except (DataError, OSError, ValueError) as exc:
        _diag("error", type(exc).__name__, str(exc))
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
