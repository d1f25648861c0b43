"""Audio acquisition and the short-time analysis front-end.

Waveforms are float64 arrays in [-1, 1] plus a sample rate. This module
reads and writes 16-bit PCM WAV files, synthesises deterministic stand-in
speakers, mixes simultaneous talkers, and slices a waveform into windowed
frames and power spectra.
"""

from __future__ import annotations

import os
import wave
from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULT_DURATION_S, DEFAULT_FRAME_MS, DEFAULT_HOP_MS, DEFAULT_SAMPLE_RATE, DEFAULT_WINDOW, WINDOWS
from .errors import UnsupportedFormatError, ValidationError, WavFormatError

PCM_SCALE = 32768.0
PEAK_LEVEL = 0.9


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=np.float64)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Waveform:
    """Mono audio: ``samples`` in [-1, 1] at ``sample_rate`` Hz."""

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self) -> None:
        samples = _frozen(self.samples)
        if samples.ndim != 1:
            raise ValidationError(f"samples must be one-dimensional, got shape {samples.shape}")
        if int(self.sample_rate) != self.sample_rate or self.sample_rate <= 0:
            raise ValidationError(f"sample_rate must be a positive integer, got {self.sample_rate}")
        if samples.size and (not np.all(np.isfinite(samples)) or np.max(np.abs(samples)) > 1.0):
            raise ValidationError("samples must be finite and lie in [-1, 1]")
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "sample_rate", int(self.sample_rate))

    def __len__(self) -> int:
        return self.samples.size

    @property
    def duration_seconds(self) -> float:
        return self.samples.size / self.sample_rate

    @classmethod
    def silence(cls, duration: float, sample_rate: int = DEFAULT_SAMPLE_RATE) -> "Waveform":
        return cls(np.zeros(int(round(duration * sample_rate))), sample_rate)


@dataclass(frozen=True)
class SpeakerProfile:
    """Parameters of a synthetic talker.

    ``formant_gains`` holds (center Hz, gain) pairs with strictly increasing
    centers. ``jitter_seed`` drives the per-recording micro-variation that
    makes two takes of the same sentence differ.
    """

    speaker_id: str
    fundamental_hz: float
    formant_gains: tuple[tuple[float, float], ...]
    jitter_seed: int = 0

    def __post_init__(self) -> None:
        pairs = tuple((float(c), float(g)) for c, g in self.formant_gains)
        object.__setattr__(self, "formant_gains", pairs)
        problems = []
        if not self.speaker_id or any(ch.isspace() for ch in self.speaker_id):
            problems.append(f"speaker_id must be non-empty without whitespace, got {self.speaker_id!r}")
        if not 60.0 <= self.fundamental_hz <= 400.0:
            problems.append(f"fundamental_hz must be in [60, 400], got {self.fundamental_hz}")
        if len(pairs) < 3:
            problems.append(f"need at least 3 formants, got {len(pairs)}")
        centers = [c for c, _ in pairs]
        if any(b <= a for a, b in zip(centers, centers[1:])):
            problems.append(f"formant centers must be strictly increasing, got {centers}")
        if any(c <= 0 for c in centers):
            problems.append("formant centers must be positive")
        if any(g < 0 for _, g in pairs):
            problems.append("formant gains must be >= 0")
        if problems:
            raise ValidationError("; ".join(problems))


@dataclass(frozen=True, eq=False)
class FrameSequence:
    """Equal-length blocks cut from a waveform at a fixed hop.

    ``frames`` is a (frame_count, frame_length) array.
    """

    frames: np.ndarray
    frame_length: int
    hop: int
    sample_rate: int

    def __post_init__(self) -> None:
        frames = np.array(self.frames, dtype=np.float64).reshape(-1, self.frame_length)
        frames.setflags(write=False)
        object.__setattr__(self, "frames", frames)
        if self.hop < 1:
            raise ValidationError(f"hop must be >= 1, got {self.hop}")

    def __len__(self) -> int:
        return self.frames.shape[0]


@dataclass(frozen=True, eq=False)
class PowerSpectrum:
    bins: np.ndarray
    bin_width: float
    fft_size: int = field(default=0)

    def __post_init__(self) -> None:
        object.__setattr__(self, "bins", _frozen(self.bins))
        if not self.fft_size:
            object.__setattr__(self, "fft_size", 2 * (self.bins.size - 1))


# --------------------------------------------------------------------------
# WAV I/O


def load_wav(path: str | os.PathLike) -> Waveform:
    """Read a 16-bit PCM mono WAV file; samples are scaled by 1/32768."""
    try:
        with wave.open(os.fspath(path), "rb") as wf:
            channels = wf.getnchannels()
            width = wf.getsampwidth()
            rate = wf.getframerate()
            raw = wf.readframes(wf.getnframes())
    except wave.Error as exc:
        msg = str(exc)
        if "unknown format" in msg:
            raise UnsupportedFormatError(f"{path}: only PCM (format code 1) is supported ({msg})") from exc
        raise WavFormatError(f"{path}: malformed WAV ({msg})") from exc
    except EOFError as exc:
        raise WavFormatError(f"{path}: truncated WAV header") from exc
    if channels != 1:
        raise UnsupportedFormatError(f"{path}: expected mono, got {channels} channels")
    if width != 2:
        raise UnsupportedFormatError(f"{path}: expected 16-bit samples, got {8 * width}-bit")
    if rate <= 0:
        raise WavFormatError(f"{path}: invalid sample rate {rate}")
    if len(raw) % 2:
        raise WavFormatError(f"{path}: odd number of data bytes")
    pcm = np.frombuffer(raw, dtype="<i2")
    return Waveform(pcm.astype(np.float64) / PCM_SCALE, rate)


def write_wav(path: str | os.PathLike, w: Waveform) -> None:
    """Write ``w`` as 16-bit PCM mono, rounding to the nearest code."""
    pcm = np.clip(np.round(w.samples * PCM_SCALE), -32768, 32767).astype("<i2")
    with wave.open(os.fspath(path), "wb") as wf:
        wf.setnchannels(1)
        wf.setsampwidth(2)
        wf.setframerate(w.sample_rate)
        wf.writeframes(pcm.tobytes())


# --------------------------------------------------------------------------
# Synthetic talkers

# Syllable rate of the content trajectory, in segments per second.
_SYLLABLE_RATE = (3.0, 5.0)
# Relative formant excursion driven by sentence content.
CONTENT_DEPTH = 0.12
_SPECTRAL_FLOOR = 0.02
_NOISE_RMS = 0.002


def _formant_bandwidth(center: np.ndarray) -> np.ndarray:
    return 60.0 + 0.08 * center


def _smooth_steps(values: np.ndarray, t_norm: np.ndarray) -> np.ndarray:
    """Raised-cosine interpolation of per-segment ``values`` over t in [0, 1]."""
    k = values.shape[-1]
    pos = np.clip(t_norm * (k - 1), 0.0, k - 1)
    lo = np.floor(pos).astype(int)
    hi = np.minimum(lo + 1, k - 1)
    frac = 0.5 - 0.5 * np.cos(np.pi * (pos - lo))
    return values[..., lo] * (1.0 - frac) + values[..., hi] * frac


def synth_speaker(
    profile: SpeakerProfile,
    sentence_seed: int,
    duration: float = DEFAULT_DURATION_S,
    sample_rate: int = DEFAULT_SAMPLE_RATE,
    take: int = 0,
    content_depth: float | None = None,
) -> Waveform:
    """Render one "sentence" of a synthetic talker.

    The voice is a harmonic complex on ``profile.fundamental_hz`` whose
    harmonic amplitudes follow the profile's formant envelope. The sentence
    seed fixes the content: an intonation contour, a sequence of vowel-like
    formant shifts and a syllabic loudness envelope. Speakers given the same
    sentence seed say "the same text". ``take`` (with the profile's jitter
    seed) only alters micro-variation such as harmonic phases, pitch jitter
    and a low noise floor, so repeated takes of one sentence differ slightly.

    The result is a pure function of its arguments, peak-normalised to 0.9.
    """
    if not duration > 0:
        raise ValidationError(f"duration must be positive, got {duration}")
    if int(sample_rate) != sample_rate or sample_rate <= 0:
        raise ValidationError(f"sample_rate must be a positive integer, got {sample_rate}")
    depth = CONTENT_DEPTH if content_depth is None else float(content_depth)
    if not 0.0 <= depth < 1.0:
        raise ValidationError(f"content_depth must be in [0, 1), got {content_depth}")
    n = int(round(duration * sample_rate))
    if n < 1:
        raise ValidationError("duration too short for a single sample")

    content = np.random.default_rng([int(sentence_seed) & 0xFFFFFFFF, 0x5E7])
    micro = np.random.default_rng([int(profile.jitter_seed) & 0xFFFFFFFF, int(sentence_seed) & 0xFFFFFFFF, int(take), 0x7A4])

    t = np.arange(n) / sample_rate
    t_norm = t / max(t[-1], 1e-12) if n > 1 else t

    # Sentence content: intonation, vowel trajectory, syllabic envelope.
    n_seg = max(2, int(np.ceil(duration * content.uniform(*_SYLLABLE_RATE))) + 1)
    into_depth = content.uniform(0.02, 0.06)
    into_rate = content.uniform(1.0, 3.0)
    into_phase = content.uniform(0.0, 2 * np.pi)
    declination = content.uniform(-0.08, 0.0)
    n_formants = len(profile.formant_gains)
    vowel_shift = 1.0 + depth * content.uniform(-1.0, 1.0, size=(n_formants, n_seg))
    loudness = content.uniform(0.4, 1.0, size=n_seg)

    # Per-take micro-variation.
    jitter = np.cumsum(micro.normal(0.0, 1.0, size=n_seg * 4))
    jitter = 0.004 * (jitter - jitter.mean()) / (np.std(jitter) + 1e-12)
    f0 = profile.fundamental_hz * (
        1.0
        + into_depth * np.sin(2 * np.pi * into_rate * t + into_phase)
        + declination * (t_norm - 0.5)
        + _smooth_steps(jitter, t_norm)
    )
    take_gain = 1.0 + 0.03 * micro.uniform(-1.0, 1.0, size=n_formants)

    nyquist = sample_rate / 2.0
    n_harm = max(1, int(0.95 * nyquist / f0.max()))
    harmonics = np.arange(1, n_harm + 1)[:, None]
    freqs = harmonics * f0[None, :]

    centers = np.array([c for c, _ in profile.formant_gains])[:, None] * _smooth_steps(vowel_shift, t_norm)
    gains = np.array([g for _, g in profile.formant_gains]) * take_gain
    envelope = np.full(freqs.shape, _SPECTRAL_FLOOR)
    for i in range(n_formants):
        half_bw = 0.5 * _formant_bandwidth(centers[i])
        envelope += gains[i] / (1.0 + ((freqs - centers[i]) / half_bw) ** 2)
    # Glottal source roll-off.
    envelope /= harmonics.astype(float)
    envelope[freqs >= nyquist] = 0.0

    phase0 = micro.uniform(0.0, 2 * np.pi, size=(n_harm, 1))
    phase = 2 * np.pi * np.cumsum(f0) / sample_rate
    voiced = np.sum(envelope * np.sin(harmonics * phase[None, :] + phase0), axis=0)
    voiced *= _smooth_steps(loudness, t_norm)
    voiced += _NOISE_RMS * np.max(np.abs(voiced)) * micro.standard_normal(n)

    peak = np.max(np.abs(voiced))
    samples = voiced * (PEAK_LEVEL / peak) if peak > 0 else voiced
    return Waveform(samples, int(sample_rate))


# --------------------------------------------------------------------------
# Mixing


def mix(waveforms, gains=None, *, report_clip: bool = False):
    """Weighted average of simultaneous talkers.

    Shorter inputs are zero-padded to the longest, and the weighted sum is
    divided by the sum of the gains. The average of in-range signals is in
    range, so clipping only guards against rounding; with ``report_clip``
    the function returns ``(waveform, clipped)``.
    """
    waveforms = list(waveforms)
    if not waveforms:
        raise ValidationError("mix needs at least one waveform")
    gains = [1.0] * len(waveforms) if gains is None else [float(g) for g in gains]
    if len(gains) != len(waveforms):
        raise ValidationError(f"got {len(gains)} gains for {len(waveforms)} waveforms")
    if any(g < 0 or not np.isfinite(g) for g in gains):
        raise ValidationError("gains must be finite and non-negative")
    total = sum(gains)
    if total <= 0:
        raise ValidationError("gains must not all be zero")
    rates = {w.sample_rate for w in waveforms}
    if len(rates) != 1:
        raise ValidationError(f"mismatched sample rates {sorted(rates)}; resample first")

    length = max(len(w) for w in waveforms)
    acc = np.zeros(length)
    # Accumulate in a canonical order so permuting the inputs is bit-exact.
    order = sorted(range(len(waveforms)), key=lambda i: (gains[i], waveforms[i].samples.tobytes()))
    for i in order:
        acc[: len(waveforms[i])] += gains[i] * waveforms[i].samples
    acc /= total
    clipped = bool(np.any(np.abs(acc) > 1.0))
    if clipped:
        acc = np.clip(acc, -1.0, 1.0)
    out = Waveform(acc, rates.pop())
    return (out, clipped) if report_clip else out


# --------------------------------------------------------------------------
# Short-time analysis


def ms_to_samples(ms: float, sample_rate: int) -> int:
    return int(round(ms * sample_rate / 1000.0))


def frame_count(n_samples: int, frame_length: int, hop: int) -> int:
    if n_samples < frame_length:
        return 0
    return (n_samples - frame_length) // hop + 1


def frame_blocking(w: Waveform, frame_ms: float = DEFAULT_FRAME_MS, hop_ms: float = DEFAULT_HOP_MS) -> FrameSequence:
    """Cut ``w`` into frames of ``frame_ms`` every ``hop_ms``; a trailing partial frame is dropped."""
    if not hop_ms > 0 or not frame_ms >= hop_ms:
        raise ValidationError(f"need frame_ms >= hop_ms > 0, got frame_ms={frame_ms}, hop_ms={hop_ms}")
    length = ms_to_samples(frame_ms, w.sample_rate)
    hop = ms_to_samples(hop_ms, w.sample_rate)
    if hop < 1:
        raise ValidationError(f"hop of {hop_ms} ms is shorter than one sample")
    count = frame_count(len(w), length, hop)
    if count == 0:
        raise ValidationError(f"waveform of {len(w)} samples is shorter than one {length}-sample frame")
    view = np.lib.stride_tricks.sliding_window_view(w.samples, length)[::hop][:count]
    return FrameSequence(view.copy(), length, hop, w.sample_rate)


def window_coefficients(kind: str, length: int) -> np.ndarray:
    if kind == "rectangular":
        return np.ones(length)
    if kind == "hamming":
        if length == 1:
            return np.ones(1)
        n = np.arange(length)
        return 0.54 - 0.46 * np.cos(2 * np.pi * n / (length - 1))
    raise ValidationError(f"unknown window {kind!r}; expected one of {WINDOWS}")


def apply_window(fs: FrameSequence, kind: str = DEFAULT_WINDOW) -> FrameSequence:
    win = window_coefficients(kind, fs.frame_length)
    return FrameSequence(fs.frames * win[None, :], fs.frame_length, fs.hop, fs.sample_rate)


def next_pow2(n: int) -> int:
    return 1 << max(0, int(n) - 1).bit_length()


def fft_power(frame, sample_rate: float | None = None) -> PowerSpectrum:
    """|DFT|^2 of ``frame`` zero-padded to the next power of two.

    Only bins 0..fft_size/2 are returned. ``bin_width`` is in Hz when a
    sample rate is given, else in cycles per sample.
    """
    x = np.asarray(frame, dtype=np.float64)
    if x.ndim != 1 or x.size == 0:
        raise ValidationError("fft_power needs a non-empty one-dimensional frame")
    size = next_pow2(x.size)
    spec = np.fft.rfft(x, n=size)
    power = spec.real**2 + spec.imag**2
    width = (sample_rate if sample_rate else 1.0) / size
    return PowerSpectrum(power, width, size)


def power_frames(fs: FrameSequence) -> np.ndarray:
    """Row-wise :func:`fft_power` of every frame, as a (frames, bins) array."""
    size = next_pow2(fs.frame_length)
    spec = np.fft.rfft(fs.frames, n=size, axis=1)
    return spec.real**2 + spec.imag**2


def spectrogram(
    w: Waveform,
    frame_ms: float = DEFAULT_FRAME_MS,
    hop_ms: float = DEFAULT_HOP_MS,
    window: str = DEFAULT_WINDOW,
) -> np.ndarray:
    """Power spectrogram, shape (frame_count, fft_size/2 + 1)."""
    return power_frames(apply_window(frame_blocking(w, frame_ms, hop_ms), window))


def export_spectrogram(matrix: np.ndarray, path: str | os.PathLike) -> None:
    """One frame per line, space-separated decimal values."""
    np.savetxt(os.fspath(path), np.atleast_2d(matrix), fmt="%.17g", delimiter=" ")


def load_spectrogram(path: str | os.PathLike) -> np.ndarray:
    return np.atleast_2d(np.loadtxt(os.fspath(path), ndmin=2))
