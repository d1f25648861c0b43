"""Corpora and the evaluation harness.

A manifest lists recordings as ``speaker_id, sentence_id, text_id, source``
lines. ``source`` is a WAV path (relative to the manifest) or a ``synth:``
spec that re-renders a synthetic sentence on demand. Each speaker's lines,
in file order, define that speaker's sentence slots (a repeated text is a
retake of its slot, not a new slot). Enrollment mixtures are aligned by
slot, so slot k of every speaker should be comparable material.

Trials sample a group, enroll every member on the same slots, build the
group's mixture models and run :func:`~cocktail.decision.identify` on a
probe that either repeats an enrolled text (same-text) or reads a text
nobody enrolled (distinct-text).
"""

from __future__ import annotations

import csv
import io
import json
import os
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from .config import (
    DEFAULT_CONFIG,
    DEFAULT_DURATION_S,
    DEFAULT_ENROLLMENT_SIZE,
    DEFAULT_SAME_TEXT_PAIRS,
    DEFAULT_SAMPLE_RATE,
    DEFAULT_SENTENCES_PER_SPEAKER,
    Config,
)
from .decision import GroupMember, SpeakerGroup, identify
from .errors import ValidationError
from .mfcc import MfccExtractor
from .signal import CONTENT_DEPTH, SpeakerProfile, Waveform, load_wav, synth_speaker

SPLITS = ("same-text", "distinct-text")
SYNTH_PREFIX = "synth:"
MIN_SENTENCES = 3


# --------------------------------------------------------------------------
# Manifests


@dataclass(frozen=True)
class ManifestEntry:
    speaker_id: str
    sentence_id: str
    text_id: str
    source: str


def format_synth_source(
    profile: SpeakerProfile,
    sentence_seed: int,
    take: int = 0,
    duration: float = DEFAULT_DURATION_S,
    sample_rate: int = DEFAULT_SAMPLE_RATE,
    content_depth: float = CONTENT_DEPTH,
) -> str:
    formants = "|".join(f"{c!r}:{g!r}" for c, g in profile.formant_gains)
    return (
        f"{SYNTH_PREFIX}f0={profile.fundamental_hz!r};formants={formants};jitter={profile.jitter_seed};"
        f"seed={sentence_seed};take={take};dur={duration!r};sr={sample_rate};depth={content_depth!r}"
    )


def parse_synth_source(source: str, speaker_id: str) -> tuple[SpeakerProfile, dict]:
    """Profile plus ``synth_speaker`` keyword arguments from a ``synth:`` spec."""
    if not source.startswith(SYNTH_PREFIX):
        raise ValidationError(f"not a synth source: {source!r}")
    try:
        fields_ = dict(item.split("=", 1) for item in source[len(SYNTH_PREFIX) :].split(";") if item)
        formants = tuple(tuple(float(x) for x in pair.split(":")) for pair in fields_["formants"].split("|"))
        profile = SpeakerProfile(speaker_id, float(fields_["f0"]), formants, int(fields_.get("jitter", 0)))
        kwargs = {
            "sentence_seed": int(fields_["seed"]),
            "take": int(fields_.get("take", 0)),
            "duration": float(fields_.get("dur", DEFAULT_DURATION_S)),
            "sample_rate": int(fields_.get("sr", DEFAULT_SAMPLE_RATE)),
            "content_depth": float(fields_.get("depth", CONTENT_DEPTH)),
        }
    except (KeyError, ValueError) as exc:
        raise ValidationError(f"malformed synth source {source!r}: {exc}") from exc
    return profile, kwargs


@dataclass(frozen=True)
class Manifest:
    entries: tuple[ManifestEntry, ...]
    base_dir: str = "."

    def __post_init__(self) -> None:
        object.__setattr__(self, "entries", tuple(self.entries))
        problems = validate_entries(self.entries)
        if problems:
            raise ValidationError("invalid manifest:\n  " + "\n  ".join(problems))

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def speakers(self) -> list[str]:
        return list(dict.fromkeys(e.speaker_id for e in self.entries))

    def sentences(self, speaker_id: str) -> list[ManifestEntry]:
        return [e for e in self.entries if e.speaker_id == speaker_id]

    def resolve(self, entry: ManifestEntry) -> str:
        return entry.source if entry.source.startswith(SYNTH_PREFIX) else os.path.join(self.base_dir, entry.source)

    def load(self, entry: ManifestEntry) -> Waveform:
        if entry.source.startswith(SYNTH_PREFIX):
            profile, kwargs = parse_synth_source(entry.source, entry.speaker_id)
            return synth_speaker(profile, **kwargs)
        return load_wav(self.resolve(entry))

    def to_text(self) -> str:
        buf = io.StringIO()
        buf.write("# speaker_id,sentence_id,text_id,source\n")
        for e in self.entries:
            buf.write(f"{e.speaker_id},{e.sentence_id},{e.text_id},{e.source}\n")
        return buf.getvalue()


def validate_entries(entries, base_dir: str | None = None) -> list[str]:
    problems = []
    if not entries:
        return ["manifest has no entries"]
    seen = set()
    counts: dict[str, int] = {}
    for e in entries:
        key = (e.speaker_id, e.sentence_id)
        if key in seen:
            problems.append(f"duplicate (speaker, sentence) {key}")
        seen.add(key)
        counts[e.speaker_id] = counts.get(e.speaker_id, 0) + 1
        for name in ("speaker_id", "sentence_id", "text_id", "source"):
            value = getattr(e, name)
            if not value or (name != "source" and any(ch.isspace() or ch in ",:" for ch in value)):
                problems.append(f"bad {name} {value!r} for {key}")
        if base_dir is not None and not e.source.startswith(SYNTH_PREFIX):
            path = os.path.join(base_dir, e.source)
            if not os.path.isfile(path):
                problems.append(f"missing file {path}")
    for spk, n in counts.items():
        if n < MIN_SENTENCES:
            problems.append(f"speaker {spk} has {n} sentences, need >= {MIN_SENTENCES}")
    return problems


def parse_manifest(text: str, base_dir: str = ".", check_files: bool = True) -> Manifest:
    entries = []
    problems = []
    rows = (line for line in text.splitlines() if line.strip() and not line.lstrip().startswith("#"))
    for lineno, row in enumerate(csv.reader(rows), start=1):
        row = [c.strip() for c in row]
        if len(row) != 4:
            problems.append(f"record {lineno}: expected 4 fields, got {len(row)}")
            continue
        entries.append(ManifestEntry(*row))
    problems += validate_entries(entries, base_dir if check_files else None)
    if problems:
        raise ValidationError("invalid manifest:\n  " + "\n  ".join(problems))
    return Manifest(tuple(entries), base_dir)


def load_manifest(path: str | os.PathLike) -> Manifest:
    """Parse and validate a manifest file, reporting every violation at once."""
    path = Path(path)
    return parse_manifest(path.read_text(encoding="utf-8"), str(path.parent))


def write_manifest(manifest: Manifest, path: str | os.PathLike) -> None:
    Path(path).write_text(manifest.to_text(), encoding="utf-8")


# --------------------------------------------------------------------------
# Synthetic corpus

_FORMANT_RANGES = ((300.0, 850.0), (900.0, 2300.0), (2400.0, 3400.0), (3500.0, 4600.0))
_FORMANT_GAINS = ((1.0, 1.0), (0.4, 0.9), (0.2, 0.5), (0.1, 0.3))
_F0_RANGE = (85.0, 280.0)


@dataclass(frozen=True, eq=False)
class SyntheticCorpus:
    manifest: Manifest
    profiles: dict
    waveforms: dict

    def waveform(self, entry: ManifestEntry) -> Waveform:
        return self.waveforms[(entry.speaker_id, entry.sentence_id)]


def synthetic_profiles(seed: int, num_speakers: int) -> list[SpeakerProfile]:
    """Speakers whose pitch and formants are stratified across typical ranges.

    Each parameter's range is cut into ``num_speakers`` strata and every
    speaker gets one stratum per parameter (independently shuffled), so
    voices stay well apart however many speakers are drawn.
    """
    rng = np.random.default_rng([int(seed), 0xC0C7])
    strata = lambda: (rng.permutation(num_speakers) + rng.uniform(0.2, 0.8, num_speakers)) / num_speakers
    lo, hi = np.log(_F0_RANGE[0]), np.log(_F0_RANGE[1])
    f0 = np.exp(lo + (hi - lo) * strata())
    formant_pos = [strata() for _ in _FORMANT_RANGES]
    gains = [rng.uniform(a, b, num_speakers) for a, b in _FORMANT_GAINS]
    jitter = rng.integers(0, 2**31, num_speakers)
    width = len(str(num_speakers))
    profiles = []
    for i in range(num_speakers):
        formants = tuple(
            (round(a + (b - a) * formant_pos[j][i], 3), round(float(gains[j][i]), 4))
            for j, (a, b) in enumerate(_FORMANT_RANGES)
        )
        profiles.append(SpeakerProfile(f"spk{i + 1:0{width}d}", round(float(f0[i]), 3), formants, int(jitter[i])))
    return profiles


def generate_synthetic_corpus(
    seed: int,
    num_speakers: int = 5,
    sentences_per_speaker: int = DEFAULT_SENTENCES_PER_SPEAKER,
    same_text_pairs: int = DEFAULT_SAME_TEXT_PAIRS,
    duration: float = DEFAULT_DURATION_S,
    sample_rate: int = DEFAULT_SAMPLE_RATE,
    content_depth: float = CONTENT_DEPTH,
) -> SyntheticCorpus:
    """Deterministic corpus of synthetic talkers.

    Every speaker records ``sentences_per_speaker`` sentences. The first
    ``2 * same_text_pairs`` are duplicate pairs: two takes of a text whose
    sentence seed is shared by all speakers. The rest are distinct texts,
    each with a seed of its own. With the defaults (10 sentences, one pair)
    that is two duplicate sentences and eight distinct ones per speaker.
    """
    problems = []
    if num_speakers < 3:
        problems.append(f"num_speakers must be >= 3, got {num_speakers}")
    if sentences_per_speaker < MIN_SENTENCES:
        problems.append(f"sentences_per_speaker must be >= {MIN_SENTENCES}, got {sentences_per_speaker}")
    if not 0 <= 2 * same_text_pairs <= sentences_per_speaker:
        problems.append(f"{same_text_pairs} same-text pairs do not fit in {sentences_per_speaker} sentences")
    if problems:
        raise ValidationError("; ".join(problems))

    profiles = synthetic_profiles(seed, num_speakers)
    rng = np.random.default_rng([int(seed), 0x7E47])
    shared_seeds = [int(s) for s in rng.integers(0, 2**31, same_text_pairs)]
    n_distinct = sentences_per_speaker - 2 * same_text_pairs
    distinct_seeds = rng.integers(0, 2**31, (num_speakers, n_distinct))
    width = len(str(sentences_per_speaker - 1))

    entries, waveforms = [], {}
    for i, profile in enumerate(profiles):
        plan = [(f"shared{p}", shared_seeds[p], take) for p in range(same_text_pairs) for take in (0, 1)]
        plan += [(f"{profile.speaker_id}t{j}", int(distinct_seeds[i, j]), 0) for j in range(n_distinct)]
        for k, (text_id, sentence_seed, take) in enumerate(plan):
            sentence_id = f"s{k:0{width}d}"
            source = format_synth_source(profile, sentence_seed, take, duration, sample_rate, content_depth)
            entries.append(ManifestEntry(profile.speaker_id, sentence_id, text_id, source))
            waveforms[(profile.speaker_id, sentence_id)] = synth_speaker(
                profile, sentence_seed, duration, sample_rate, take, content_depth
            )
    return SyntheticCorpus(Manifest(tuple(entries)), {p.speaker_id: p for p in profiles}, waveforms)


# --------------------------------------------------------------------------
# Trials


@dataclass(frozen=True)
class TrialSpec:
    group_sizes: tuple[int, ...] = (3,)
    splits: tuple[str, ...] = SPLITS
    trials_per_condition: int = 200
    rng_seed: int = 0
    include_outsider_probes: bool = False
    enrollment_size: int = DEFAULT_ENROLLMENT_SIZE

    def __post_init__(self) -> None:
        object.__setattr__(self, "group_sizes", tuple(int(g) for g in self.group_sizes))
        object.__setattr__(self, "splits", tuple(self.splits))
        problems = []
        if self.trials_per_condition < 1:
            problems.append(f"trials_per_condition must be >= 1, got {self.trials_per_condition}")
        if not self.group_sizes or any(g < 3 for g in self.group_sizes):
            problems.append(f"group sizes must be >= 3, got {self.group_sizes}")
        if not self.splits or any(s not in SPLITS for s in self.splits):
            problems.append(f"splits must be drawn from {SPLITS}, got {self.splits}")
        if self.enrollment_size < 2:
            problems.append(f"enrollment_size must be >= 2, got {self.enrollment_size}")
        if problems:
            raise ValidationError("; ".join(problems))


@dataclass
class ConditionResult:
    group_size: int
    split: str
    trial_count: int = 0
    member_trials: int = 0
    outsider_trials: int = 0
    inclusion_errors: int = 0
    false_exclusions: int = 0
    false_inclusions: int = 0
    identification_errors: int = 0
    end_to_end_errors: int = 0

    @property
    def inclusion_error_rate(self) -> float:
        """Wrong included flag, over all trials."""
        return self.inclusion_errors / self.trial_count if self.trial_count else 0.0

    @property
    def identification_error_rate(self) -> float:
        """Top-ranked candidate is not the true speaker, over member probes."""
        return self.identification_errors / self.member_trials if self.member_trials else 0.0

    @property
    def end_to_end_error_rate(self) -> float:
        """Wrong final decision (a wrong "none" included), over member probes."""
        return self.end_to_end_errors / self.member_trials if self.member_trials else 0.0

    def to_dict(self) -> dict:
        d = asdict(self)
        d["inclusion_error_rate"] = self.inclusion_error_rate
        d["identification_error_rate"] = self.identification_error_rate
        d["end_to_end_error_rate"] = self.end_to_end_error_rate
        return d


@dataclass
class ErrorReport:
    conditions: list = field(default_factory=list)
    curve: list = field(default_factory=list)
    spec: dict = field(default_factory=dict)
    config: dict = field(default_factory=dict)

    def condition(self, group_size: int, split: str) -> ConditionResult:
        for c in self.conditions:
            if c.group_size == group_size and c.split == split:
                return c
        raise KeyError((group_size, split))

    def to_dict(self) -> dict:
        return {
            "conditions": [c.to_dict() for c in self.conditions],
            "curve": [{"training_size": n, "identification_error_rate": r} for n, r in self.curve],
            "spec": self.spec,
            "config": self.config,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ErrorReport":
        names = set(ConditionResult.__dataclass_fields__)
        conditions = [ConditionResult(**{k: v for k, v in c.items() if k in names}) for c in d["conditions"]]
        curve = [(p["training_size"], p["identification_error_rate"]) for p in d.get("curve", [])]
        return cls(conditions, curve, d.get("spec", {}), d.get("config", {}))


@dataclass(frozen=True)
class TrialRecord:
    """What happened in one trial; handy for debugging and per-trial checks."""

    group_size: int
    split: str
    index: int
    group: tuple[str, ...]
    true_speaker: str
    probe_speaker: str
    probe_sentence: str
    enrollment_sentences: tuple[str, ...]
    member_probe: bool
    included: bool
    candidate: str
    decision: str | None


class SlotLayout:
    """How a manifest's recordings line up across speakers.

    A speaker's slots are their distinct texts in order of first appearance.
    Enrollment uses the first take of each slot, and slot k of one member is
    mixed with slot k of the others. A later recording of a text the speaker
    already read is a retake of that slot.

    * anchor slots: every speaker has a retake. The retake is a same-text
      probe once the slot's first take is enrolled.
    * distinct slots: every speaker's text there is recorded once and by
      nobody else, so holding the slot out keeps its text out of enrollment.
    """

    def __init__(self, manifest: Manifest):
        self.manifest = manifest
        owners: dict[str, set] = {}
        for e in manifest.entries:
            owners.setdefault(e.text_id, set()).add(e.speaker_id)
        self.first: dict[str, list] = {}
        self.retakes: dict[str, dict] = {}
        for spk in manifest.speakers:
            firsts, again, index = [], {}, {}
            for e in manifest.sentences(spk):
                if e.text_id in index:
                    again.setdefault(index[e.text_id], e)
                else:
                    index[e.text_id] = len(firsts)
                    firsts.append(e)
            self.first[spk], self.retakes[spk] = firsts, again
        speakers = manifest.speakers
        self.n_slots = min(len(v) for v in self.first.values())
        self.anchors = [k for k in range(self.n_slots) if all(k in self.retakes[s] for s in speakers)]
        self.distinct = [
            k
            for k in range(self.n_slots)
            if all(k not in self.retakes[s] and owners[self.first[s][k].text_id] == {s} for s in speakers)
        ]

    @property
    def max_enrollment(self) -> int:
        return self.n_slots - (1 if self.distinct else 0)

    def draw(self, rng: np.random.Generator) -> tuple[int | None, int | None, list]:
        """(anchor slot, held-out distinct slot, enrollment order).

        The anchor leads the order, so it is enrolled at every enrollment
        size, and the held-out slot never appears in it. Taking the first n
        of the order gives nested enrollment sets across sizes.
        """
        anchor = self.anchors[int(rng.integers(len(self.anchors)))] if self.anchors else None
        held = self.distinct[int(rng.integers(len(self.distinct)))] if self.distinct else None
        rest = [int(k) for k in rng.permutation(self.n_slots) if k not in (anchor, held)]
        return anchor, held, ([anchor] if anchor is not None else []) + rest

    def probe(self, split: str, speaker: str, anchor: int | None, held: int | None) -> ManifestEntry:
        if split == "same-text":
            return self.retakes[speaker][anchor]
        return self.first[speaker][held]


def _check_feasible(layout: SlotLayout, spec: TrialSpec) -> None:
    problems = []
    n_speakers = len(layout.first)
    need = max(spec.group_sizes) + int(spec.include_outsider_probes)
    if n_speakers < need:
        problems.append(
            f"need {need} speakers for group size {max(spec.group_sizes)}"
            + (" plus outsiders" if spec.include_outsider_probes else "")
            + f", manifest has {n_speakers}"
        )
    if "same-text" in spec.splits and not layout.anchors:
        problems.append("same-text trials need a text that every speaker recorded twice")
    if "distinct-text" in spec.splits and not layout.distinct:
        problems.append("distinct-text trials need a slot whose texts are each recorded once, by one speaker")
    if spec.enrollment_size > layout.max_enrollment:
        problems.append(
            f"{spec.enrollment_size} enrollment sentences requested, the manifest allows at most {layout.max_enrollment}"
        )
    if problems:
        raise ValidationError("; ".join(problems))


def run_trials(
    manifest: Manifest,
    spec: TrialSpec,
    config: Config = DEFAULT_CONFIG,
    waveforms: dict | None = None,
    cache: dict | None = None,
    records: list | None = None,
) -> ErrorReport:
    """Seeded identification trials for every (group size, split) condition.

    Trial t of a group size draws the group, the true speaker and the
    enrollment order from streams seeded by (rng_seed, group size, t). Both
    splits of a trial therefore share one group model and differ only in the
    probe: a retake of an enrolled text (same-text) or a held-out text
    nobody enrolled (distinct-text). With ``include_outsider_probes`` every
    odd trial probes with a speaker from outside the group instead.

    ``waveforms`` may pre-supply recordings keyed by (speaker, sentence);
    others are loaded from the manifest. ``cache`` holds MFCC vectors across
    calls and must only be shared between runs with the same ``config``.
    """
    layout = SlotLayout(manifest)
    _check_feasible(layout, spec)
    waveforms = {} if waveforms is None else dict(waveforms)
    cache = {} if cache is None else cache
    extractor = MfccExtractor(config)
    speakers = sorted(layout.first)

    def wave(entry: ManifestEntry) -> Waveform:
        key = (entry.speaker_id, entry.sentence_id)
        if key not in waveforms:
            waveforms[key] = manifest.load(entry)
        return waveforms[key]

    # A JSON round trip turns tuples into lists, so reports compare equal after export.
    report = ErrorReport(spec=json.loads(json.dumps(asdict(spec))), config=config.as_dict())
    for group_size in spec.group_sizes:
        results = {split: ConditionResult(group_size, split) for split in spec.splits}
        for t in range(spec.trials_per_condition):
            draw = np.random.default_rng([spec.rng_seed, group_size, t])
            group = sorted(draw.choice(speakers, size=group_size, replace=False).tolist())
            true_speaker = group[int(draw.integers(group_size))]
            outsiders = [s for s in speakers if s not in group]
            member_probe = not (spec.include_outsider_probes and t % 2 == 1)
            probe_speaker = true_speaker if member_probe else outsiders[int(draw.integers(len(outsiders)))]

            anchor, held, order = layout.draw(np.random.default_rng([spec.rng_seed, group_size, t, 0x51]))
            enroll_slots = order[: spec.enrollment_size]
            members = []
            for sid in group:
                entries = [layout.first[sid][k] for k in enroll_slots]
                members.append(GroupMember(sid, tuple(wave(e) for e in entries), tuple(e.sentence_id for e in entries)))
            speaker_group = SpeakerGroup.build(members, config, extractor, cache)

            for split in spec.splits:
                result = results[split]
                entry = layout.probe(split, probe_speaker, anchor, held)
                key = ((probe_speaker, entry.sentence_id),)
                if key not in cache:
                    cache[key] = extractor(wave(entry), probe_speaker, entry.sentence_id)
                enrolled = members[group.index(true_speaker)].sentence_ids
                if member_probe and entry.sentence_id in enrolled:
                    raise AssertionError(f"probe {key} leaked into enrollment")
                verdict = identify(cache[key], speaker_group, config)

                result.trial_count += 1
                included = verdict.inclusion.included
                if member_probe:
                    result.member_trials += 1
                    result.identification_errors += verdict.candidate != true_speaker
                    result.end_to_end_errors += verdict.decision != true_speaker
                    if not included:
                        result.inclusion_errors += 1
                        result.false_exclusions += 1
                else:
                    result.outsider_trials += 1
                    if included:
                        result.inclusion_errors += 1
                        result.false_inclusions += 1
                if records is not None:
                    records.append(
                        TrialRecord(
                            group_size, split, t, tuple(group), true_speaker, probe_speaker, entry.sentence_id,
                            tuple(enrolled), member_probe, included, verdict.candidate, verdict.decision,
                        )
                    )
        report.conditions.extend(results[split] for split in spec.splits)
    return report


def error_curve(
    manifest: Manifest,
    spec: TrialSpec,
    training_sizes,
    config: Config = DEFAULT_CONFIG,
    waveforms: dict | None = None,
    cache: dict | None = None,
) -> list[tuple[int, float]]:
    """Identification error pooled over the TrialSpec's conditions, per enrollment size.

    Every size reuses the same trials (groups, probes and enrollment order),
    so a larger size only adds sentences to each model.
    """
    sizes = [int(n) for n in training_sizes]
    if not sizes:
        raise ValidationError("need at least one training size")
    limit = SlotLayout(manifest).max_enrollment
    bad = [n for n in sizes if n < 2 or n > limit]
    if bad:
        raise ValidationError(f"infeasible training sizes {bad}: need 2 <= size <= {limit}")
    cache = {} if cache is None else cache
    curve = []
    for n in sizes:
        rep = run_trials(manifest, replace(spec, enrollment_size=n), config, waveforms, cache)
        errors = sum(c.identification_errors for c in rep.conditions)
        trials = sum(c.member_trials for c in rep.conditions)
        curve.append((n, errors / trials if trials else 0.0))
    return curve


# --------------------------------------------------------------------------
# Reports


def _rate(x: float) -> str:
    return format(x, ".9e")


def plot_table(report: ErrorReport) -> str:
    """Flat table: one row per (group size, split) condition."""
    lines = ["group_size\tsplit\tinclusion_error_rate\tidentification_error_rate"]
    for c in report.conditions:
        lines.append(f"{c.group_size}\t{c.split}\t{_rate(c.inclusion_error_rate)}\t{_rate(c.identification_error_rate)}")
    return "\n".join(lines) + "\n"


def curve_table(report: ErrorReport) -> str:
    lines = ["training_size\tidentification_error_rate"]
    lines += [f"{n}\t{_rate(r)}" for n, r in report.curve]
    return "\n".join(lines) + "\n"


def plot_path(path: str | os.PathLike) -> Path:
    p = Path(path)
    return p.with_name(p.stem + "_plot.tsv")


def export_report(report: ErrorReport, path: str | os.PathLike) -> tuple[Path, Path]:
    """Write the JSON report to ``path`` and the plot table next to it."""
    path = Path(path)
    text = json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n"
    path.write_text(text, encoding="utf-8")
    table = plot_table(report)
    if report.curve:
        table += "\n" + curve_table(report)
    plot = plot_path(path)
    plot.write_text(table, encoding="utf-8")
    return path, plot


def read_report(path: str | os.PathLike) -> ErrorReport:
    return ErrorReport.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
