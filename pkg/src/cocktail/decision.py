"""Deciding whether a probe voice belongs to a group of simultaneous
talkers, and which of them it is.

A :class:`SpeakerGroup` holds every member's solo voiceprint plus voiceprints
of mixed recordings for each proper subset of two or more members and for
the full group. Mixtures are made per enrollment slot: slot k of a subset
mixture is the equal-gain waveform mix of every member's k-th enrollment
recording. Building a group is the expensive phase; queries afterwards only
read it.

The decision combines three comparisons:

* inclusion: the probe's mean distance to the full mixture must not exceed
  the largest member-to-mixture mean distance (plus a tolerance);
* nearest voiceprint: speakers ranked by the offset Manhattan distance E_k;
* reverse logic: a speaker is likelier the farther the probe lies from the
  mixture of everyone else.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Mapping, Sequence

import numpy as np

from .config import DEFAULT_CONFIG, Config
from .errors import ValidationError
from .mfcc import MfccExtractor, MfccVector
from .signal import Waveform, mix
from .voiceprint import (
    Voiceprint,
    band_membership,
    enroll,
    euclidean_distance_vector,
    manhattan_distance_ek,
    mean_distance,
)

Subset = frozenset


@dataclass(frozen=True)
class GroupMember:
    """A speaker's slot-aligned enrollment recordings."""

    speaker_id: str
    waveforms: tuple[Waveform, ...]
    sentence_ids: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "waveforms", tuple(self.waveforms))
        ids = tuple(self.sentence_ids) or tuple(str(i) for i in range(len(self.waveforms)))
        if len(ids) != len(self.waveforms):
            raise ValidationError(f"{self.speaker_id}: {len(ids)} sentence ids for {len(self.waveforms)} waveforms")
        object.__setattr__(self, "sentence_ids", ids)


@dataclass(frozen=True)
class SubsetMixtureModel:
    subset: frozenset
    voiceprint: Voiceprint


@dataclass(frozen=True)
class InclusionVerdict:
    included: bool
    probe_mean: float
    baseline_means: dict
    margin: float


@dataclass(frozen=True)
class IdentificationVerdict:
    decision: str | None
    manhattan_scores: dict
    manhattan_ranks: dict
    reverse_distances: dict
    reverse_ranks: dict
    exclusion_scores: dict
    exclusion_ranks: dict
    combined_ranks: dict
    band_fractions: dict
    inclusion: InclusionVerdict
    probe_id: str = ""
    candidate: str = ""

    def to_record(self) -> dict:
        return {
            "probe": self.probe_id,
            "included": self.inclusion.included,
            "decision": self.decision,
            "candidate": self.candidate,
            "probe_mean": self.inclusion.probe_mean,
            "inclusion_margin": self.inclusion.margin,
            "manhattan_scores": self.manhattan_scores,
            "manhattan_ranks": self.manhattan_ranks,
            "reverse_ranks": self.reverse_ranks,
            "exclusion_ranks": self.exclusion_ranks,
            "combined_ranks": self.combined_ranks,
            "band_fractions": self.band_fractions,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_record(), sort_keys=True)


def _label(subset) -> str:
    return "+".join(sorted(subset))


def enumerate_subsets(speaker_ids: Sequence[str]) -> list[frozenset]:
    """All subsets of size 2..N-1, ordered by size then lexicographically."""
    ids = sorted(speaker_ids)
    if len(set(ids)) != len(ids):
        raise ValidationError(f"speaker ids must be unique, got {list(speaker_ids)}")
    if len(ids) < 3:
        raise ValidationError(f"a group needs at least 3 speakers, got {len(ids)}")
    return [frozenset(c) for size in range(2, len(ids)) for c in combinations(ids, size)]


FeatureCache = dict


def mixture_voiceprint(
    subset,
    members: Mapping[str, GroupMember],
    extractor: Callable[[Waveform], MfccVector] | None = None,
    sigma_floor: float = DEFAULT_CONFIG.sigma_floor,
    cache: FeatureCache | None = None,
) -> SubsetMixtureModel:
    """Voiceprint of the simultaneous-talker recording of ``subset``.

    For each enrollment slot the members' waveforms are mixed at equal gain
    and passed through the MFCC extractor; the slot vectors are then
    enrolled. ``cache`` (keyed by the mixed (speaker, sentence) pairs) lets
    repeated builds over one corpus reuse features. One cache must only ever
    be used with one extractor configuration.
    """
    subset = frozenset(subset)
    if not subset:
        raise ValidationError("cannot model an empty subset")
    missing = sorted(s for s in subset if s not in members or not members[s].waveforms)
    if missing:
        raise ValidationError(f"no enrollment waveforms for {missing}")
    extractor = extractor or MfccExtractor()
    parts = [members[s] for s in sorted(subset)]
    slots = min(len(m.waveforms) for m in parts)
    vectors = []
    for k in range(slots):
        key = tuple((m.speaker_id, m.sentence_ids[k]) for m in parts)
        vec = cache.get(key) if cache is not None else None
        if vec is None:
            vec = extractor(mix([m.waveforms[k] for m in parts]), _label(subset), str(k))
            if cache is not None:
                cache[key] = vec
        vectors.append(vec)
    return SubsetMixtureModel(subset, enroll(_label(subset), vectors, sigma_floor))


@dataclass(frozen=True, eq=False)
class SpeakerGroup:
    """Immutable, fully modelled group of simultaneous speakers."""

    speaker_ids: tuple[str, ...]
    voiceprints: dict
    mixtures: dict = field(repr=False)

    def __post_init__(self) -> None:
        ids = tuple(self.speaker_ids)
        object.__setattr__(self, "speaker_ids", ids)
        needed = [frozenset(ids), *enumerate_subsets(ids)]
        absent = [_label(s) for s in needed if s not in self.mixtures]
        if absent:
            raise ValidationError(f"group is missing mixture models for {absent}")
        if set(self.voiceprints) != set(ids):
            raise ValidationError("need exactly one voiceprint per speaker")

    @property
    def size(self) -> int:
        return len(self.speaker_ids)

    @property
    def full_mixture(self) -> Voiceprint:
        return self.mixtures[frozenset(self.speaker_ids)]

    def model(self, subset) -> Voiceprint:
        """Voiceprint for any non-empty subset; singletons are the solo voiceprints."""
        subset = frozenset(subset)
        if len(subset) == 1:
            return self.voiceprints[next(iter(subset))]
        return self.mixtures[subset]

    @classmethod
    def build(
        cls,
        members: Sequence[GroupMember],
        config: Config = DEFAULT_CONFIG,
        extractor: Callable[[Waveform], MfccVector] | None = None,
        cache: FeatureCache | None = None,
    ) -> "SpeakerGroup":
        by_id = {m.speaker_id: m for m in members}
        if len(by_id) != len(members):
            raise ValidationError("speaker ids in a group must be unique")
        ids = tuple(m.speaker_id for m in members)
        extractor = extractor or MfccExtractor(config)
        solo = {
            sid: mixture_voiceprint([sid], by_id, extractor, config.sigma_floor, cache).voiceprint
            for sid in ids
        }
        mixtures = {}
        for subset in [*enumerate_subsets(ids), frozenset(ids)]:
            mixtures[subset] = mixture_voiceprint(subset, by_id, extractor, config.sigma_floor, cache).voiceprint
        return cls(ids, solo, mixtures)


def inclusion_test(v, group: SpeakerGroup, tau: float = DEFAULT_CONFIG.tau) -> InclusionVerdict:
    """Is ``v`` no farther from the full mixture than the farthest member?"""
    mixture_mu = group.full_mixture.mu
    probe_mean = mean_distance(euclidean_distance_vector(v, mixture_mu))
    baselines = {
        sid: mean_distance(euclidean_distance_vector(group.voiceprints[sid].mu, mixture_mu)) for sid in group.speaker_ids
    }
    margin = probe_mean - max(baselines.values())
    return InclusionVerdict(bool(margin <= tau), probe_mean, baselines, margin)


def _ranks(keys: Mapping[str, tuple]) -> dict:
    """Rank 1 for the smallest key."""
    return {sid: i + 1 for i, sid in enumerate(sorted(keys, key=lambda s: (keys[s], s)))}


def exclusion_scores(v, group: SpeakerGroup) -> dict:
    """How much adding each speaker to a mixture pushes it away from ``v``.

    For speaker W the score averages mean(D(v, S + W)) - mean(D(v, S)) over
    every remainder S not containing W with 1 <= |S| <= N-2, so that both
    S and S + W are modelled (singletons are the solo voiceprints).
    """
    probe = v.coefficients if isinstance(v, MfccVector) else np.asarray(v, dtype=np.float64)
    dist = {}

    def d(subset):
        if subset not in dist:
            dist[subset] = mean_distance(euclidean_distance_vector(probe, group.model(subset).mu))
        return dist[subset]

    scores = {}
    for w in group.speaker_ids:
        others = sorted(set(group.speaker_ids) - {w})
        diffs = [
            d(frozenset(rest) | {w}) - d(frozenset(rest))
            for size in range(1, group.size - 1)
            for rest in combinations(others, size)
        ]
        scores[w] = math.fsum(diffs) / len(diffs)
    return scores


def exclusion_ranking(v, group: SpeakerGroup) -> dict:
    """Rank 1 = least likely to be ``v`` (highest exclusion score)."""
    scores = exclusion_scores(v, group)
    return _ranks({sid: (-s,) for sid, s in scores.items()})


def identify(
    v,
    group: SpeakerGroup,
    config: Config = DEFAULT_CONFIG,
    probe_id: str = "",
) -> IdentificationVerdict:
    """Inclusion test, then rank-sum of nearest-voiceprint and reverse-logic ranks.

    ``candidate`` is the speaker with the smallest combined rank, ties going
    to the lower E_k and then the lexicographically first id. The decision
    is the candidate when the probe is included and None otherwise.
    """
    inclusion = inclusion_test(v, group, config.tau)
    ids = group.speaker_ids
    ek = {sid: manhattan_distance_ek(v, group.voiceprints[sid], config.ek_mode) for sid in ids}
    manhattan_ranks = _ranks({sid: (ek[sid],) for sid in ids})
    everyone = frozenset(ids)
    reverse = {
        sid: mean_distance(euclidean_distance_vector(v, group.model(everyone - {sid}).mu)) for sid in ids
    }
    reverse_ranks = _ranks({sid: (-reverse[sid],) for sid in ids})
    ex_scores = exclusion_scores(v, group)
    ex_ranks = _ranks({sid: (-s,) for sid, s in ex_scores.items()})
    combined = {sid: manhattan_ranks[sid] + reverse_ranks[sid] for sid in ids}
    bands = {sid: band_membership(v, group.voiceprints[sid], config.band_c).fraction for sid in ids}
    candidate = min(ids, key=lambda s: (combined[s], ek[s], s))
    if not probe_id and isinstance(v, MfccVector):
        probe_id = v.source_id
    return IdentificationVerdict(
        decision=candidate if inclusion.included else None,
        manhattan_scores=ek,
        manhattan_ranks=manhattan_ranks,
        reverse_distances=reverse,
        reverse_ranks=reverse_ranks,
        exclusion_scores=ex_scores,
        exclusion_ranks=ex_ranks,
        combined_ranks=combined,
        band_fractions=bands,
        inclusion=inclusion,
        probe_id=probe_id,
        candidate=candidate,
    )
