"""Command-line driver.

Subcommands::

    cocktail extract  WAV... [--speaker ID]         MFCC lines
    cocktail enroll   MFCC_FILE [--speaker ID]      voiceprint records
    cocktail mix      WAV WAV... --out OUT.wav      equal-gain (or --gains) mix
    cocktail decide   PROBE.wav --manifest M        verdict JSON
    cocktail evaluate [--manifest M] --out R.json   error report + plot table
    cocktail synth    --out DIR                     synthetic corpus on disk

Exit status is 0 on success, 1 on invalid input or usage, 2 on I/O errors.
Results go to ``--out`` or standard output, diagnostics to standard error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import config as cfg
from .config import Config
from .corpus import (
    SPLITS,
    SlotLayout,
    TrialSpec,
    error_curve,
    export_report,
    generate_synthetic_corpus,
    load_manifest,
    run_trials,
    write_manifest,
)
from .decision import GroupMember, SpeakerGroup, identify
from .errors import ValidationError
from .mfcc import MfccExtractor, format_mfcc_line, read_mfcc_lines
from .signal import CONTENT_DEPTH, load_wav, mix, write_wav
from .voiceprint import enroll, format_voiceprint


class _Parser(argparse.ArgumentParser):
    """argparse with usage errors mapped to exit status 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _int_list(text: str) -> list[int]:
    try:
        if ".." in text:
            lo, hi = text.split("..")
            return list(range(int(lo), int(hi) + 1))
        return [int(x) for x in text.split(",") if x]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected integers like 3,4,5 or 2..8, got {text!r}") from exc


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _common_flags() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("pipeline parameters")
    g.add_argument("--frame-ms", type=float, default=cfg.DEFAULT_FRAME_MS, help="analysis frame length in ms (default %(default)s)")
    g.add_argument("--hop-ms", type=float, default=cfg.DEFAULT_HOP_MS, help="frame hop in ms (default %(default)s)")
    g.add_argument("--filters", type=int, default=cfg.DEFAULT_NUM_FILTERS, help="mel filters (default %(default)s)")
    g.add_argument("--window", choices=cfg.WINDOWS, default=cfg.DEFAULT_WINDOW, help="frame window (default %(default)s)")
    g.add_argument("--log-base", type=float, default=cfg.DEFAULT_LOG_BASE, help="log base of mel energies (default %(default)s)")
    g.add_argument("--skip-c0", action="store_true", default=cfg.DEFAULT_SKIP_C0, help="use C1..C13 instead of C0..C12")
    g.add_argument("--sigma-floor", type=float, default=cfg.DEFAULT_SIGMA_FLOOR, help="smallest voiceprint sigma (default %(default)s)")
    g.add_argument("--band-c", type=float, default=cfg.DEFAULT_BAND_C, help="band half-width in sigmas (default %(default)s)")
    g.add_argument("--tau", type=float, default=cfg.DEFAULT_TAU, help="inclusion tolerance (default %(default)s)")
    g.add_argument("--ek-mode", choices=cfg.EK_MODES, default=cfg.DEFAULT_EK_MODE, help="E_k variant (default %(default)s)")
    g.add_argument("--seed", type=int, default=cfg.DEFAULT_SEED, help="random seed (default %(default)s)")
    g.add_argument("--out", help="output path (standard output when omitted, where allowed)")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common_flags()
    parser = _Parser(prog="cocktail", description="Speaker inclusion and identification among simultaneous talkers.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("extract", parents=[common], help="WAV files to MFCC lines")
    p.add_argument("wavs", nargs="+")
    p.add_argument("--speaker", default="", help="speaker label for the source ids")

    p = sub.add_parser("enroll", parents=[common], help="MFCC lines to voiceprint records")
    p.add_argument("mfcc_file")
    p.add_argument("--speaker", help="enroll only lines of this speaker")

    p = sub.add_parser("mix", parents=[common], help="mix WAV files into one")
    p.add_argument("wavs", nargs="+")
    p.add_argument("--gains", type=_float_list, help="comma-separated gains, one per input")

    p = sub.add_parser("decide", parents=[common], help="inclusion and identification for one probe")
    p.add_argument("probe")
    p.add_argument("--manifest", required=True, help="enrollment manifest describing the group")
    p.add_argument("--speakers", help="comma-separated subset of the manifest's speakers")
    p.add_argument("--enrollment", type=int, help="enroll on the first N slots (default: all)")

    p = sub.add_parser("evaluate", parents=[common], help="seeded trials and error report")
    p.add_argument("--manifest", help="corpus manifest (default: synthetic corpus from --seed)")
    p.add_argument("--group-sizes", type=_int_list, default=[3, 4, 5])
    p.add_argument("--splits", default=",".join(SPLITS), help="comma-separated subset of %s" % (SPLITS,))
    p.add_argument("--trials", type=int, default=200, help="trials per condition (default %(default)s)")
    p.add_argument("--enrollment", type=int, default=cfg.DEFAULT_ENROLLMENT_SIZE)
    p.add_argument("--outsiders", action="store_true", help="probe every odd trial with a non-member")
    p.add_argument("--curve", type=_int_list, help="enrollment sizes for the error curve, e.g. 2..8")
    _corpus_flags(p)

    p = sub.add_parser("synth", parents=[common], help="write a synthetic corpus (WAVs + manifest)")
    _corpus_flags(p)
    return parser


def _corpus_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("synthetic corpus")
    g.add_argument("--num-speakers", type=int, default=5)
    g.add_argument("--sentences", type=int, default=cfg.DEFAULT_SENTENCES_PER_SPEAKER)
    g.add_argument("--pairs", type=int, default=cfg.DEFAULT_SAME_TEXT_PAIRS, help="same-text pairs per speaker")
    g.add_argument("--depth", type=float, default=CONTENT_DEPTH, help="content depth (default %(default)s)")


def config_from_args(args: argparse.Namespace) -> Config:
    return Config(
        frame_ms=args.frame_ms,
        hop_ms=args.hop_ms,
        num_filters=args.filters,
        window=args.window,
        log_base=args.log_base,
        skip_c0=args.skip_c0,
        sigma_floor=args.sigma_floor,
        band_c=args.band_c,
        tau=args.tau,
        ek_mode=args.ek_mode,
        seed=args.seed,
    )


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _extract(args, config) -> None:
    ex = MfccExtractor(config)
    lines = [format_mfcc_line(ex(load_wav(path), args.speaker, Path(path).stem)) for path in args.wavs]
    _emit("\n".join(lines) + "\n", args.out)


def _enroll(args, config) -> None:
    by_speaker: dict[str, list] = {}
    for v in read_mfcc_lines(args.mfcc_file):
        by_speaker.setdefault(v.speaker, []).append(v)
    if args.speaker is not None:
        by_speaker = {args.speaker: by_speaker.get(args.speaker, [])}
    if not by_speaker:
        raise ValidationError(f"{args.mfcc_file} has no MFCC lines")
    records = [format_voiceprint(enroll(sid, vs, config.sigma_floor)) for sid, vs in sorted(by_speaker.items())]
    _emit("\n".join(records) + "\n", args.out)


def _mix(args, config) -> None:
    if not args.out:
        raise ValidationError("mix needs --out for the mixed WAV")
    mixed, clipped = mix([load_wav(p) for p in args.wavs], args.gains, report_clip=True)
    write_wav(args.out, mixed)
    if clipped:
        print(f"warning: {clipped} samples clipped", file=sys.stderr)


def _decide(args, config) -> None:
    manifest = load_manifest(args.manifest)
    layout = SlotLayout(manifest)
    speakers = sorted(manifest.speakers)
    if args.speakers:
        wanted = [s for s in args.speakers.split(",") if s]
        unknown = sorted(set(wanted) - set(speakers))
        if unknown:
            raise ValidationError(f"speakers {unknown} are not in {args.manifest}")
        speakers = sorted(set(wanted))
    n = layout.n_slots if args.enrollment is None else args.enrollment
    if not 2 <= n <= layout.n_slots:
        raise ValidationError(f"--enrollment must be between 2 and {layout.n_slots}, got {n}")
    members = []
    for sid in speakers:
        entries = layout.first[sid][:n]
        members.append(GroupMember(sid, tuple(manifest.load(e) for e in entries), tuple(e.sentence_id for e in entries)))
    extractor = MfccExtractor(config)
    group = SpeakerGroup.build(members, config, extractor)
    probe = extractor(load_wav(args.probe), "", Path(args.probe).stem)
    verdict = identify(probe, group, config, probe_id=str(args.probe))
    _emit(verdict.to_json() + "\n", args.out)


def _corpus(args, config):
    return generate_synthetic_corpus(
        config.seed, args.num_speakers, args.sentences, args.pairs, content_depth=args.depth
    )


def _evaluate(args, config) -> None:
    if not args.out:
        raise ValidationError("evaluate needs --out for the report")
    splits = tuple(s for s in args.splits.split(",") if s)
    spec = TrialSpec(
        group_sizes=tuple(args.group_sizes),
        splits=splits,
        trials_per_condition=args.trials,
        rng_seed=config.seed,
        include_outsider_probes=args.outsiders,
        enrollment_size=args.enrollment,
    )
    if args.manifest:
        manifest, waveforms = load_manifest(args.manifest), None
    else:
        corpus = _corpus(args, config)
        manifest, waveforms = corpus.manifest, corpus.waveforms
    cache: dict = {}
    report = run_trials(manifest, spec, config, waveforms, cache)
    if args.curve:
        report.curve = error_curve(manifest, spec, args.curve, config, waveforms, cache)
    json_path, plot = export_report(report, args.out)
    print(f"wrote {json_path} and {plot}", file=sys.stderr)


def _synth(args, config) -> None:
    if not args.out:
        raise ValidationError("synth needs --out for the corpus directory")
    corpus = _corpus(args, config)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    entries = []
    for e in corpus.manifest.entries:
        name = f"{e.speaker_id}_{e.sentence_id}.wav"
        write_wav(out / name, corpus.waveform(e))
        entries.append(type(e)(e.speaker_id, e.sentence_id, e.text_id, name))
    write_manifest(type(corpus.manifest)(tuple(entries), str(out)), out / "manifest.csv")
    print(f"wrote {len(entries)} recordings to {out}", file=sys.stderr)


_COMMANDS = {
    "extract": _extract,
    "enroll": _enroll,
    "mix": _mix,
    "decide": _decide,
    "evaluate": _evaluate,
    "synth": _synth,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        config = config_from_args(args)
        _COMMANDS[args.command](args, config)
    except ValidationError as exc:
        print(f"cocktail {args.command}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"cocktail {args.command}: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
