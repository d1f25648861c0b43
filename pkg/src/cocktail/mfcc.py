"""Mel-frequency cepstral coefficients.

The pipeline is frame -> window -> power spectrum -> triangular mel
filterbank -> floored log energies -> cosine transform, and the per-frame
coefficients are averaged into one 13-value vector per sentence.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .config import DEFAULT_CONFIG, NUM_COEFFS, Config
from .errors import ValidationError
from .signal import PowerSpectrum, Waveform, apply_window, frame_blocking, next_pow2, power_frames

MEL_SCALE = 2595.0
MEL_BREAK_HZ = 700.0


def mel_from_hz(f):
    """Mel(f) = 2595 * log10(1 + f/700). Accepts scalars or arrays."""
    f_arr = np.asarray(f, dtype=np.float64)
    if np.any(f_arr < 0):
        raise ValidationError(f"frequency must be >= 0, got {f}")
    out = MEL_SCALE * np.log10(1.0 + f_arr / MEL_BREAK_HZ)
    return float(out) if out.ndim == 0 else out


def hz_from_mel(m):
    """Inverse of :func:`mel_from_hz`."""
    m_arr = np.asarray(m, dtype=np.float64)
    if np.any(m_arr < 0):
        raise ValidationError(f"mel value must be >= 0, got {m}")
    out = MEL_BREAK_HZ * (10.0 ** (m_arr / MEL_SCALE) - 1.0)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True, eq=False)
class MelFilterbank:
    """Triangular filters on a uniform mel grid.

    ``triangles[k]`` is (left, center, right) in Hz and ``weights`` is a
    (num_filters, fft_size/2 + 1) matrix sampled at FFT bin frequencies.
    """

    num_filters: int
    triangles: np.ndarray
    weights: np.ndarray
    sample_rate: int
    fft_size: int
    edges_mel: np.ndarray

    @property
    def num_bins(self) -> int:
        return self.fft_size // 2 + 1


@lru_cache(maxsize=32)
def _cached_filterbank(num_filters, sample_rate, fft_size, f_low, f_high) -> MelFilterbank:
    edges_mel = np.linspace(mel_from_hz(f_low), mel_from_hz(f_high), num_filters + 2)
    edges_hz = hz_from_mel(edges_mel)
    edges_hz[0], edges_hz[-1] = f_low, f_high
    bin_hz = np.arange(fft_size // 2 + 1) * sample_rate / fft_size
    weights = np.zeros((num_filters, bin_hz.size))
    for k in range(num_filters):
        left, center, right = edges_hz[k : k + 3]
        rising = (bin_hz - left) / (center - left)
        falling = (right - bin_hz) / (right - center)
        weights[k] = np.clip(np.minimum(rising, falling), 0.0, None)
    triangles = np.stack([edges_hz[:-2], edges_hz[1:-1], edges_hz[2:]], axis=1)
    for arr in (weights, triangles, edges_mel):
        arr.setflags(write=False)
    return MelFilterbank(num_filters, triangles, weights, sample_rate, fft_size, edges_mel)


def build_filterbank(
    num_filters: int,
    sample_rate: int,
    fft_size: int,
    f_low: float = 0.0,
    f_high: float | None = None,
) -> MelFilterbank:
    """``num_filters`` triangles whose N+2 edges are evenly spaced in mel.

    Triangle k spans edges k, k+1, k+2, so each filter's center is its
    neighbour's edge. Filterbanks are cached and shared read-only.
    """
    if f_high is None:
        f_high = sample_rate / 2.0
    problems = []
    if num_filters < NUM_COEFFS:
        problems.append(f"num_filters must be >= {NUM_COEFFS}, got {num_filters}")
    if sample_rate <= 0:
        problems.append(f"sample_rate must be positive, got {sample_rate}")
    if fft_size < 2 or fft_size % 2:
        problems.append(f"fft_size must be an even integer >= 2, got {fft_size}")
    if not 0 <= f_low < f_high <= sample_rate / 2.0:
        problems.append(f"need 0 <= f_low < f_high <= sample_rate/2, got f_low={f_low}, f_high={f_high}")
    if problems:
        raise ValidationError("; ".join(problems))
    return _cached_filterbank(int(num_filters), int(sample_rate), int(fft_size), float(f_low), float(f_high))


def apply_filterbank(ps, fb: MelFilterbank, floor: float = DEFAULT_CONFIG.energy_floor) -> np.ndarray:
    """Mel energies S_k = sum_b weight_k(b) * power(b), floored at ``floor``.

    ``ps`` may be a :class:`PowerSpectrum`, a bin vector, or a
    (frames, bins) matrix; the result has the matching leading shape.
    """
    power = ps.bins if isinstance(ps, PowerSpectrum) else np.asarray(ps, dtype=np.float64)
    if power.shape[-1] != fb.num_bins:
        raise ValidationError(f"spectrum has {power.shape[-1]} bins, filterbank expects {fb.num_bins}")
    return np.maximum(power @ fb.weights.T, floor)


@lru_cache(maxsize=32)
def _dct_basis(num_filters: int, n_coeffs: int) -> np.ndarray:
    n = np.arange(n_coeffs)[:, None]
    k = np.arange(1, num_filters + 1)[None, :]
    basis = np.cos(np.pi * n * (k - 0.5) / num_filters)
    basis.setflags(write=False)
    return basis


def dct_cepstrum(energies, n_coeffs: int = NUM_COEFFS, log_base: float = 10.0, first: int = 0) -> np.ndarray:
    """C_n = sum_{k=1..N} log(S_k) cos(pi n (k - 0.5) / N) for n = first..first+n_coeffs-1.

    Works on one energy vector or a (frames, N) matrix.
    """
    s = np.asarray(energies, dtype=np.float64)
    num_filters = s.shape[-1]
    if num_filters < first + n_coeffs:
        raise ValidationError(f"{num_filters} filter energies cannot give coefficients {first}..{first + n_coeffs - 1}")
    if np.any(s <= 0) or not np.all(np.isfinite(s)):
        raise ValidationError("mel energies must be finite and strictly positive")
    logs = np.log(s) / np.log(log_base)
    basis = _dct_basis(num_filters, first + n_coeffs)[first:]
    return logs @ basis.T


@dataclass(frozen=True, eq=False)
class MfccVector:
    """Sentence-level 13-coefficient feature vector with its source label."""

    coefficients: np.ndarray
    speaker: str = ""
    sentence: str = ""

    def __post_init__(self) -> None:
        c = np.array(self.coefficients, dtype=np.float64).reshape(-1)
        if c.size != NUM_COEFFS or not np.all(np.isfinite(c)):
            raise ValidationError(f"an MFCC vector needs {NUM_COEFFS} finite values, got {c.size}")
        c.setflags(write=False)
        object.__setattr__(self, "coefficients", c)

    @property
    def source_id(self) -> str:
        return f"{self.speaker}:{self.sentence}"

    def __array__(self, dtype=None, copy=None):
        return self.coefficients if dtype is None else self.coefficients.astype(dtype)


def aggregate_sentence(frames, speaker: str = "", sentence: str = "") -> MfccVector:
    """Per-dimension mean of the frame coefficients."""
    arr = np.asarray(frames, dtype=np.float64)
    if arr.size == 0:
        raise ValidationError("cannot aggregate an empty frame list")
    arr = arr.reshape(-1, arr.shape[-1])
    # Sorting rows first makes the mean bit-identical under frame permutation.
    arr = arr[np.lexsort(arr.T[::-1])]
    return MfccVector(arr.mean(axis=0), speaker, sentence)


class MfccExtractor:
    """Waveform -> sentence MfccVector with a fixed configuration."""

    def __init__(self, config: Config = DEFAULT_CONFIG):
        self.config = config

    def filterbank(self, sample_rate: int) -> MelFilterbank:
        cfg = self.config
        fft_size = next_pow2(int(round(cfg.frame_ms * sample_rate / 1000.0)))
        return build_filterbank(cfg.num_filters, sample_rate, fft_size, cfg.f_low, cfg.f_high)

    def frame_coefficients(self, w: Waveform) -> np.ndarray:
        cfg = self.config
        frames = apply_window(frame_blocking(w, cfg.frame_ms, cfg.hop_ms), cfg.window)
        energies = apply_filterbank(power_frames(frames), self.filterbank(w.sample_rate), cfg.energy_floor)
        return dct_cepstrum(energies, NUM_COEFFS, cfg.log_base, first=int(cfg.skip_c0))

    def __call__(self, w: Waveform, speaker: str = "", sentence: str = "") -> MfccVector:
        return aggregate_sentence(self.frame_coefficients(w), speaker, sentence)


def extract(w: Waveform, config: Config = DEFAULT_CONFIG, speaker: str = "", sentence: str = "") -> MfccVector:
    return MfccExtractor(config)(w, speaker, sentence)


def format_mfcc_line(v: MfccVector) -> str:
    return " ".join([v.source_id] + [format(x, ".17g") for x in v.coefficients])


def parse_mfcc_line(line: str) -> MfccVector:
    parts = line.split()
    if len(parts) != NUM_COEFFS + 1:
        raise ValidationError(f"expected a source id and {NUM_COEFFS} values, got {len(parts)} fields")
    speaker, _, sentence = parts[0].partition(":")
    try:
        values = [float(p) for p in parts[1:]]
    except ValueError as exc:
        raise ValidationError(f"non-numeric coefficient in line {line!r}") from exc
    return MfccVector(values, speaker, sentence)


def write_mfcc_lines(vectors, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for v in vectors:
            fh.write(format_mfcc_line(v) + "\n")


def read_mfcc_lines(path: str | os.PathLike) -> list[MfccVector]:
    with open(path, encoding="utf-8") as fh:
        return [parse_mfcc_line(line) for line in fh if line.strip() and not line.lstrip().startswith("#")]
