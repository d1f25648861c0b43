import struct
import wave

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cocktail.errors import UnsupportedFormatError, ValidationError, WavFormatError
from cocktail.signal import (
    FrameSequence,
    SpeakerProfile,
    Waveform,
    apply_window,
    export_spectrogram,
    fft_power,
    frame_blocking,
    frame_count,
    load_spectrogram,
    load_wav,
    mix,
    next_pow2,
    spectrogram,
    synth_speaker,
    window_coefficients,
    write_wav,
)

from oracles import loop_frame_count, naive_dft_power, naive_dft_power_vec

LOW = SpeakerProfile("low", 110.0, ((500.0, 1.0), (1500.0, 0.6), (2500.0, 0.3)), 1)
HIGH = SpeakerProfile("high", 220.0, ((900.0, 1.0), (2300.0, 0.6), (3400.0, 0.3)), 2)
MID = SpeakerProfile("mid", 160.0, ((700.0, 1.0), (1900.0, 0.5), (3000.0, 0.3)), 3)


def test_wav_round_trip_within_one_lsb(tmp_path):
    w = synth_speaker(LOW, 7)
    path = tmp_path / "a.wav"
    write_wav(path, w)
    back = load_wav(path)
    assert back.sample_rate == 16000
    assert len(back) == 16000
    assert np.max(np.abs(back.samples - w.samples)) <= 1 / 32768


def test_wav_zeros_load_exactly(tmp_path):
    path = tmp_path / "z.wav"
    write_wav(path, Waveform.silence(0.5, 8000))
    back = load_wav(path)
    assert len(back) == 4000 and back.sample_rate == 8000
    assert np.all(back.samples == 0.0)


def _raw_wav(path, channels=1, width=2, rate=16000, frames=b"\x00\x00" * 10):
    with wave.open(str(path), "wb") as wf:
        wf.setnchannels(channels)
        wf.setsampwidth(width)
        wf.setframerate(rate)
        wf.writeframes(frames)


def test_wav_rejects_stereo_and_8bit(tmp_path):
    _raw_wav(tmp_path / "s.wav", channels=2, frames=b"\x00" * 40)
    _raw_wav(tmp_path / "b.wav", width=1, frames=b"\x80" * 10)
    with pytest.raises(UnsupportedFormatError, match="mono"):
        load_wav(tmp_path / "s.wav")
    with pytest.raises(UnsupportedFormatError, match="16-bit"):
        load_wav(tmp_path / "b.wav")


def test_wav_rejects_float_format(tmp_path):
    body = b"\x00" * 8
    fmt = struct.pack("<HHIIHH", 3, 1, 16000, 64000, 4, 32)
    data = b"RIFF" + struct.pack("<I", 4 + 8 + len(fmt) + 8 + len(body)) + b"WAVE"
    data += b"fmt " + struct.pack("<I", len(fmt)) + fmt + b"data" + struct.pack("<I", len(body)) + body
    path = tmp_path / "f.wav"
    path.write_bytes(data)
    with pytest.raises(UnsupportedFormatError):
        load_wav(path)


def test_wav_rejects_garbage(tmp_path):
    path = tmp_path / "g.wav"
    path.write_bytes(b"not a wav file at all")
    with pytest.raises(WavFormatError):
        load_wav(path)
    with pytest.raises(OSError):
        load_wav(tmp_path / "missing.wav")


def test_waveform_validation():
    with pytest.raises(ValidationError):
        Waveform(np.array([0.0, 1.5]), 16000)
    with pytest.raises(ValidationError):
        Waveform(np.zeros(4), 0)
    w = Waveform(np.zeros(4), 16000)
    with pytest.raises(ValueError):
        w.samples[0] = 1.0


def test_profile_validation():
    with pytest.raises(ValidationError):
        SpeakerProfile("x", 30.0, ((500.0, 1.0), (1500.0, 1.0), (2500.0, 1.0)))
    with pytest.raises(ValidationError):
        SpeakerProfile("x", 120.0, ((500.0, 1.0), (400.0, 1.0), (2500.0, 1.0)))
    with pytest.raises(ValidationError):
        SpeakerProfile("x", 120.0, ((500.0, 1.0), (1500.0, 1.0)))


def test_synth_length_and_determinism():
    a = synth_speaker(LOW, 3)
    b = synth_speaker(LOW, 3)
    assert len(a) == 16000 and a.sample_rate == 16000
    assert np.array_equal(a.samples, b.samples)
    assert not np.array_equal(a.samples, synth_speaker(LOW, 4).samples)
    # A retake keeps the content but changes micro-variation.
    assert not np.array_equal(a.samples, synth_speaker(LOW, 3, take=1).samples)
    assert np.max(np.abs(a.samples)) == pytest.approx(0.9)


def test_synth_rejects_bad_arguments():
    with pytest.raises(ValidationError):
        synth_speaker(LOW, 1, duration=0)
    with pytest.raises(ValidationError):
        synth_speaker(LOW, 1, content_depth=1.5)


def test_disjoint_profiles_give_distinct_mfcc():
    from cocktail.mfcc import extract
    from cocktail.voiceprint import euclidean_distance_vector, mean_distance

    a = extract(synth_speaker(LOW, 1))
    b = extract(synth_speaker(HIGH, 1))
    assert mean_distance(euclidean_distance_vector(a, b)) > 0.5


def test_mix_identities():
    w = synth_speaker(LOW, 1)
    assert np.array_equal(mix([w, w], [1, 1]).samples, w.samples)
    half = mix([w, Waveform.silence(1.0)], [1, 1])
    assert np.allclose(half.samples, w.samples / 2, atol=1e-15)


def test_mix_permutation_invariant_and_padding():
    ws = [synth_speaker(LOW, 1), synth_speaker(HIGH, 2, duration=0.5), synth_speaker(MID, 3)]
    gains = [1.0, 0.5, 2.0]
    a = mix(ws, gains)
    b = mix([ws[2], ws[0], ws[1]], [gains[2], gains[0], gains[1]])
    assert np.array_equal(a.samples, b.samples)
    assert len(a) == 16000


def test_mix_errors():
    w = synth_speaker(LOW, 1)
    with pytest.raises(ValidationError):
        mix([])
    with pytest.raises(ValidationError):
        mix([w, w], [0, 0])
    with pytest.raises(ValidationError):
        mix([w, Waveform(np.zeros(10), 8000)])
    with pytest.raises(ValidationError):
        mix([w], [1, 2])


def test_mix_keeps_each_fundamental():
    profiles = [LOW, MID, HIGH]
    m = mix([synth_speaker(p, 5, content_depth=0.0) for p in profiles])
    # A long rectangular frame resolves the three harmonic combs.
    frame = m.samples[:8192]
    ps = fft_power(frame, m.sample_rate)
    freqs = np.arange(ps.bins.size) * ps.bin_width
    floor = np.median(ps.bins)
    for p in profiles:
        near = np.abs(freqs - p.fundamental_hz) < 0.1 * p.fundamental_hz
        assert ps.bins[near].max() > 100 * floor, p.speaker_id


def test_frame_blocking_counts_and_starts():
    w = Waveform(np.arange(16000) / 16000.0, 16000)
    fs = frame_blocking(w, 25, 10)
    assert fs.frames.shape == (98, 400)
    assert np.array_equal(fs.frames[:, 0] * 16000, np.arange(0, 98 * 160, 160))
    tiled = frame_blocking(w, 10, 10)
    assert np.array_equal(tiled.frames.reshape(-1), w.samples[: len(tiled) * 160])


def test_frame_blocking_rejects_short_input():
    with pytest.raises(ValidationError):
        frame_blocking(Waveform(np.zeros(100), 16000), 25, 10)
    with pytest.raises(ValidationError):
        frame_blocking(Waveform(np.zeros(1000), 16000), 10, 25)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 5000), st.integers(1, 600), st.integers(1, 600))
def test_frame_count_matches_loop(n, frame, hop):
    if hop > frame:
        hop, frame = frame, hop
    assert frame_count(n, frame, hop) == loop_frame_count(n, frame, hop)


def test_windows():
    fs = FrameSequence(np.ones((2, 400)), 400, 160, 16000)
    assert np.array_equal(apply_window(fs, "rectangular").frames, fs.frames)
    ham = apply_window(fs, "hamming").frames
    assert np.array_equal(ham[0], window_coefficients("hamming", 400))
    coeffs = window_coefficients("hamming", 400)
    assert coeffs[0] == pytest.approx(0.08, abs=1e-15)
    assert coeffs[-1] == pytest.approx(0.08, abs=1e-15)
    with pytest.raises(ValidationError):
        window_coefficients("hann", 10)


def test_next_pow2():
    assert [next_pow2(n) for n in (1, 2, 3, 400, 512, 513)] == [1, 2, 4, 512, 512, 1024]


def test_fft_power_small_frames_match_loop_dft():
    rng = np.random.default_rng(1)
    for length in (1, 5, 16, 37, 64):
        x = rng.standard_normal(length)
        ps = fft_power(x)
        ref = naive_dft_power(x, next_pow2(length))
        assert ps.fft_size == next_pow2(length)
        assert np.max(np.abs(ps.bins - ref)) <= 1e-9 * max(ref.max(), 1e-300)
        # The matrix form used for the larger sweep agrees with the loop form.
        assert np.allclose(naive_dft_power_vec(x, next_pow2(length)), ref, rtol=1e-12, atol=1e-12)


def test_fft_power_random_frames_match_dft_oracle():
    rng = np.random.default_rng(2)
    for _ in range(100):
        length = int(rng.integers(64, 1025))
        x = rng.standard_normal(length)
        ps = fft_power(x)
        ref = naive_dft_power_vec(x, next_pow2(length))
        assert np.max(np.abs(ps.bins - ref)) <= 1e-9 * ref.max()


def test_fft_power_special_inputs():
    assert np.all(fft_power(np.zeros(400)).bins == 0.0)
    n, k = 512, 37
    sine = np.sin(2 * np.pi * k * np.arange(n) / n)
    bins = fft_power(sine).bins
    assert int(np.argmax(bins)) == k
    others = np.delete(bins, k)
    assert others.max() < 1e-9 * bins[k]
    with pytest.raises(ValidationError):
        fft_power(np.zeros((2, 2)))


def test_parseval_rectangular_frames():
    rng = np.random.default_rng(3)
    for length in (64, 100, 400, 1024):
        x = rng.standard_normal(length)
        ps = fft_power(x)
        size = ps.fft_size
        doubled = ps.bins[0] + ps.bins[-1] + 2 * ps.bins[1:-1].sum()
        assert doubled / size == pytest.approx(np.sum(x * x), rel=1e-6)


def test_spectrogram_shape_silence_and_stationary_sine(tmp_path):
    sil = spectrogram(Waveform.silence(1.0))
    assert sil.shape == (98, 257)
    assert np.all(sil == 0.0)
    # 500 Hz repeats every 32 samples, so every 160-sample hop sees the same frame.
    t = np.arange(16000) / 16000
    sine = Waveform(0.5 * np.sin(2 * np.pi * 500 * t), 16000)
    spec = spectrogram(sine)
    assert np.max(np.abs(spec - spec[0])) <= 1e-9 * spec.max()
    export_spectrogram(spec[:3], tmp_path / "s.txt")
    assert np.array_equal(load_spectrogram(tmp_path / "s.txt"), spec[:3])
