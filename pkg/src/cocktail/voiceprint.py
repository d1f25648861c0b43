"""Per-speaker Gaussian voiceprints and the distances built on them.

A voiceprint is the per-coefficient mean and standard deviation of a
speaker's sentence vectors. Coefficients are modelled as independent
Gaussians, so the joint likelihood of a probe is a product over the 13
dimensions (a sum in log space).
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp, ndtr

from .config import DEFAULT_BAND_C, DEFAULT_EK_MODE, DEFAULT_SIGMA_FLOOR, EK_MODES, NUM_COEFFS
from .errors import DegeneratePosteriorError, ValidationError
from .mfcc import MfccVector

_LOG_SQRT_2PI = 0.5 * math.log(2 * math.pi)


def _coeffs(x) -> np.ndarray:
    if isinstance(x, MfccVector):
        return x.coefficients
    arr = np.asarray(x, dtype=np.float64).reshape(-1)
    if arr.size != NUM_COEFFS:
        raise ValidationError(f"expected {NUM_COEFFS} coefficients, got {arr.size}")
    return arr


@dataclass(frozen=True, eq=False)
class Voiceprint:
    speaker_id: str
    mu: np.ndarray
    sigma: np.ndarray
    enrollment_count: int

    def __post_init__(self) -> None:
        mu = np.array(self.mu, dtype=np.float64).reshape(-1)
        sigma = np.array(self.sigma, dtype=np.float64).reshape(-1)
        if mu.size != NUM_COEFFS or sigma.size != NUM_COEFFS:
            raise ValidationError(f"mu and sigma need {NUM_COEFFS} values each")
        if not (np.all(np.isfinite(mu)) and np.all(np.isfinite(sigma))) or np.any(sigma <= 0):
            raise ValidationError("mu must be finite and sigma finite and positive")
        if self.enrollment_count < 2:
            raise ValidationError(f"enrollment_count must be >= 2, got {self.enrollment_count}")
        mu.setflags(write=False)
        sigma.setflags(write=False)
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "sigma", sigma)


def enroll(speaker_id: str, sentences, sigma_floor: float = DEFAULT_SIGMA_FLOOR) -> Voiceprint:
    """Mean and population standard deviation (ddof=0) per coefficient.

    ``sigma`` is floored at ``sigma_floor`` so identical sentences still
    give a usable density.
    """
    rows = np.array([_coeffs(s) for s in sentences])
    if rows.shape[0] < 2:
        raise ValidationError(f"enrolling {speaker_id!r} needs at least 2 sentences, got {rows.shape[0]}")
    # Canonical row order keeps the statistics independent of input order.
    rows = rows[np.lexsort(rows.T[::-1])]
    mu = rows.mean(axis=0)
    sigma = np.maximum(rows.std(axis=0, ddof=0), sigma_floor)
    return Voiceprint(speaker_id, mu, sigma, rows.shape[0])


def euclidean_distance_vector(a, b) -> np.ndarray:
    """Per-dimension |a_i - b_i|; a vector, not a scalar distance."""
    return np.abs(_coeffs(a) - _coeffs(b))


def mean_distance(d) -> float:
    """Arithmetic mean of a distance vector, with a correctly rounded sum."""
    d = np.asarray(d, dtype=np.float64)
    if d.size == 0:
        raise ValidationError("cannot average an empty distance vector")
    return math.fsum(d) / d.size


def gaussian_pdf(v, mu, sigma):
    """Normal density with mean ``mu`` and standard deviation ``sigma``."""
    sigma_arr = np.asarray(sigma, dtype=np.float64)
    if np.any(sigma_arr <= 0):
        raise ValidationError(f"sigma must be positive, got {sigma}")
    z = (np.asarray(v, dtype=np.float64) - mu) / sigma_arr
    out = np.exp(-0.5 * z * z) / (math.sqrt(2 * math.pi) * sigma_arr)
    return float(out) if np.ndim(out) == 0 else out


def log_likelihood(x, vp: Voiceprint) -> float:
    """log p(x | speaker) under independent per-coefficient Gaussians."""
    z = (_coeffs(x) - vp.mu) / vp.sigma
    return float(np.sum(-0.5 * z * z - np.log(vp.sigma) - _LOG_SQRT_2PI))


def posterior_from_log_likelihoods(log_likelihoods, priors) -> np.ndarray:
    """Bayes' rule in log space: normalise log p(x|w_i) + log P(w_i)."""
    ll = np.asarray(log_likelihoods, dtype=np.float64)
    pr = np.asarray(priors, dtype=np.float64)
    if ll.shape != pr.shape or ll.ndim != 1 or ll.size == 0:
        raise ValidationError("need one prior per candidate and at least one candidate")
    if np.any(pr < 0) or not math.isclose(float(pr.sum()), 1.0, abs_tol=1e-9):
        raise ValidationError(f"priors must be non-negative and sum to 1, got sum {pr.sum()}")
    with np.errstate(divide="ignore"):
        log_num = ll + np.log(pr)
    if np.any(np.isnan(log_num)) or np.any(log_num == np.inf):
        raise DegeneratePosteriorError("likelihoods are not finite")
    if not np.any(np.isfinite(log_num)):
        raise DegeneratePosteriorError("every candidate has zero likelihood-times-prior")
    post = np.exp(log_num - logsumexp(log_num))
    return post / post.sum()


def posterior(x, voiceprints, priors=None) -> np.ndarray:
    """P(w_i | x) for each voiceprint; uniform priors by default."""
    voiceprints = list(voiceprints)
    if not voiceprints:
        raise ValidationError("posterior needs at least one voiceprint")
    if priors is None:
        priors = np.full(len(voiceprints), 1.0 / len(voiceprints))
    return posterior_from_log_likelihoods([log_likelihood(x, vp) for vp in voiceprints], priors)


def manhattan_distance_ek(x, vp: Voiceprint, mode: str = DEFAULT_EK_MODE) -> float:
    """Offset Manhattan distance between a probe and a voiceprint.

    ``literal``: mean_i |(x_i - mu_i) - sigma_i|, which is zero when the
    probe sits exactly one standard deviation above the mean in every
    dimension. ``sigma-free``: mean_i |x_i - mu_i|.
    """
    diff = _coeffs(x) - vp.mu
    # fsum rounds the sum once, so the result does not depend on summation order.
    if mode == "literal":
        return math.fsum(np.abs(diff - vp.sigma)) / diff.size
    if mode == "sigma-free":
        return math.fsum(np.abs(diff)) / diff.size
    raise ValidationError(f"unknown E_k mode {mode!r}; expected one of {EK_MODES}")


@dataclass(frozen=True, eq=False)
class BandMembership:
    inside: np.ndarray
    overall: bool

    @property
    def fraction(self) -> float:
        return float(np.mean(self.inside))


def band_membership(x, vp: Voiceprint, c: float = DEFAULT_BAND_C) -> BandMembership:
    """Dimension i is inside when |x_i - mu_i| <= c * sigma_i."""
    if c < 0:
        raise ValidationError(f"band multiplier must be >= 0, got {c}")
    inside = np.abs(_coeffs(x) - vp.mu) <= c * vp.sigma
    return BandMembership(inside, bool(np.all(inside)))


def expected_band_coverage(c: float = DEFAULT_BAND_C, dims: int = NUM_COEFFS) -> tuple[float, float]:
    """(per-dimension, all-dimensions) probability that a Gaussian draw lies in mu +- c*sigma."""
    per_dim = float(ndtr(c) - ndtr(-c))
    return per_dim, per_dim**dims


def constellation_coordinates(x) -> tuple[tuple[int, float], ...]:
    """The 13 (dimension index, value) pairs, indices starting at 1."""
    return tuple((i + 1, float(v)) for i, v in enumerate(_coeffs(x)))


def format_constellation(points) -> str:
    return "\n".join(f"{i} {v!r}" for i, v in points) + "\n"


def parse_constellation(text: str) -> tuple[tuple[int, float], ...]:
    pts = []
    for line in text.splitlines():
        if line.strip():
            i, v = line.split()
            pts.append((int(i), float(v)))
    if len(pts) != NUM_COEFFS:
        raise ValidationError(f"a constellation point has {NUM_COEFFS} coordinates, got {len(pts)}")
    return tuple(pts)


# --------------------------------------------------------------------------
# Persistence: one whitespace-separated record per speaker,
#   speaker_id enrollment_count mu_1..mu_13 sigma_1..sigma_13


def format_voiceprint(vp: Voiceprint) -> str:
    values = [format(v, ".17g") for v in (*vp.mu, *vp.sigma)]
    return " ".join([vp.speaker_id, str(vp.enrollment_count), *values])


def parse_voiceprint(line: str) -> Voiceprint:
    parts = line.split()
    if len(parts) != 2 + 2 * NUM_COEFFS:
        raise ValidationError(f"voiceprint record needs {2 + 2 * NUM_COEFFS} fields, got {len(parts)}")
    try:
        count = int(parts[1])
        values = np.array([float(p) for p in parts[2:]])
    except ValueError as exc:
        raise ValidationError(f"malformed voiceprint record {line!r}") from exc
    return Voiceprint(parts[0], values[:NUM_COEFFS], values[NUM_COEFFS:], count)


def write_voiceprints(voiceprints, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for vp in voiceprints:
            fh.write(format_voiceprint(vp) + "\n")


def read_voiceprints(path: str | os.PathLike) -> list[Voiceprint]:
    with open(path, encoding="utf-8") as fh:
        return [parse_voiceprint(line) for line in fh if line.strip() and not line.lstrip().startswith("#")]
