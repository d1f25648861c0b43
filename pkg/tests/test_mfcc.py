import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cocktail.config import Config
from cocktail.errors import ValidationError
from cocktail.mfcc import (
    MfccExtractor,
    MfccVector,
    aggregate_sentence,
    apply_filterbank,
    build_filterbank,
    dct_cepstrum,
    extract,
    hz_from_mel,
    mel_from_hz,
    parse_mfcc_line,
    read_mfcc_lines,
    write_mfcc_lines,
)
from cocktail.signal import PowerSpectrum, SpeakerProfile, Waveform, synth_speaker

from oracles import double_loop_dct

PROFILE = SpeakerProfile("p", 130.0, ((600.0, 1.0), (1700.0, 0.5), (2800.0, 0.3)), 9)


def test_mel_anchors():
    assert mel_from_hz(0) == 0.0
    assert mel_from_hz(700) == pytest.approx(781.17, abs=0.01)
    assert mel_from_hz(1000) == pytest.approx(1000.0, abs=0.05)
    assert hz_from_mel(0) == 0.0
    assert hz_from_mel(781.17) == pytest.approx(700.0, abs=0.1)


def test_mel_round_trip_and_monotone():
    f = np.linspace(0, 8000, 2001)
    m = mel_from_hz(f)
    assert np.all(np.diff(m) > 0)
    assert np.allclose(hz_from_mel(m), f, rtol=1e-9, atol=1e-9)
    for x in (100.0, 700.0, 4000.0):
        assert hz_from_mel(mel_from_hz(x)) == pytest.approx(x, rel=1e-9)
    with pytest.raises(ValidationError):
        mel_from_hz(-1)


def test_filterbank_construction():
    fb = build_filterbank(26, 16000, 512)
    assert fb.triangles.shape == (26, 3)
    assert fb.weights.shape == (26, 257)
    steps = np.diff(fb.edges_mel)
    assert np.allclose(steps, steps[0], rtol=1e-12)
    # Every bin strictly inside (f_low, f_high) gets some weight.
    bin_hz = np.arange(257) * 16000 / 512
    inside = (bin_hz > 0) & (bin_hz < 8000)
    assert np.all(fb.weights.sum(axis=0)[inside] > 0)
    assert np.all(fb.weights >= 0) and np.all(fb.weights <= 1)


def test_filterbank_validation_lists_problems():
    with pytest.raises(ValidationError) as exc:
        build_filterbank(10, 16000, 511, f_low=9000)
    msg = str(exc.value)
    assert "num_filters" in msg and "fft_size" in msg and "f_low" in msg


def test_apply_filterbank_floor_flat_and_linearity():
    fb = build_filterbank(26, 16000, 512)
    zero = apply_filterbank(PowerSpectrum(np.zeros(257), 31.25), fb)
    assert np.all(zero == 1e-10)
    flat = apply_filterbank(np.ones(257), fb)
    assert np.allclose(flat, fb.weights.sum(axis=1), rtol=1e-14)
    rng = np.random.default_rng(0)
    p = rng.random(257) + 0.1
    assert np.allclose(apply_filterbank(2 * p, fb), 2 * apply_filterbank(p, fb), rtol=1e-14)
    with pytest.raises(ValidationError):
        apply_filterbank(np.ones(100), fb)


def test_dct_simple_cases():
    assert np.all(dct_cepstrum(np.ones(26)) == 0.0)
    rng = np.random.default_rng(1)
    s = rng.random(26) + 0.01
    assert dct_cepstrum(s)[0] == pytest.approx(np.sum(np.log10(s)), rel=1e-13)
    with pytest.raises(ValidationError):
        dct_cepstrum(np.r_[np.ones(25), 0.0])
    with pytest.raises(ValidationError):
        dct_cepstrum(np.ones(12))


def test_dct_matches_double_loop():
    rng = np.random.default_rng(2)
    energies = 10.0 ** rng.uniform(-10, 6, size=(1000, 26))
    fast = dct_cepstrum(energies)
    for row, got in zip(energies, fast):
        assert np.max(np.abs(got - double_loop_dct(row))) <= 1e-12


def test_dct_skip_c0():
    rng = np.random.default_rng(3)
    s = rng.random(26) + 0.1
    assert np.allclose(dct_cepstrum(s, first=1), double_loop_dct(s, first=1), atol=1e-12)


def test_aggregate_sentence():
    a = np.arange(13.0)
    assert np.array_equal(aggregate_sentence([a]).coefficients, a)
    b = a + 2
    assert np.array_equal(aggregate_sentence([a, b]).coefficients, a + 1)
    assert np.array_equal(aggregate_sentence([a] * 7).coefficients, a)
    with pytest.raises(ValidationError):
        aggregate_sentence(np.empty((0, 13)))


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 40), st.integers(0, 2**32 - 1))
def test_aggregate_permutation_invariant(t, seed):
    rng = np.random.default_rng(seed)
    frames = rng.standard_normal((t, 13)) * 10
    perm = rng.permutation(t)
    assert np.array_equal(aggregate_sentence(frames).coefficients, aggregate_sentence(frames[perm]).coefficients)


def test_pipeline_determinism_and_finiteness():
    w = synth_speaker(PROFILE, 11)
    a, b = extract(w), extract(w)
    assert np.array_equal(a.coefficients, b.coefficients)
    assert a.coefficients.shape == (13,)
    silent = extract(Waveform.silence(1.0))
    assert np.all(np.isfinite(silent.coefficients))
    # Silence sits on the energy floor: C0 = 26 * log10(1e-10), the rest vanish.
    assert silent.coefficients[0] == pytest.approx(-260.0)
    assert np.allclose(silent.coefficients[1:], 0.0, atol=1e-9)


def test_extractor_pipeline_matches_manual_chain():
    from cocktail.signal import spectrogram

    w = synth_speaker(PROFILE, 12)
    spec = spectrogram(w)
    fb = build_filterbank(26, 16000, 512)
    frames = [dct_cepstrum(apply_filterbank(row, fb)) for row in spec]
    manual = np.mean(frames, axis=0)
    assert np.allclose(extract(w).coefficients, manual, rtol=1e-12, atol=1e-12)


def test_extractor_respects_config():
    w = synth_speaker(PROFILE, 13)
    base = MfccExtractor()(w).coefficients
    shifted = MfccExtractor(Config(skip_c0=True))(w).coefficients
    assert np.allclose(shifted[:12], base[1:], rtol=1e-12, atol=1e-12)
    natural = MfccExtractor(Config(log_base=math.e))(w).coefficients
    assert np.allclose(natural, base * math.log(10), rtol=1e-10, atol=1e-10)


def test_mfcc_vector_and_lines(tmp_path):
    with pytest.raises(ValidationError):
        MfccVector(np.ones(12))
    with pytest.raises(ValidationError):
        MfccVector(np.r_[np.ones(12), np.nan])
    rng = np.random.default_rng(4)
    vs = [MfccVector(rng.standard_normal(13), "spk1", f"s{i}") for i in range(3)]
    path = tmp_path / "m.txt"
    write_mfcc_lines(vs, path)
    back = read_mfcc_lines(path)
    assert [v.source_id for v in back] == ["spk1:s0", "spk1:s1", "spk1:s2"]
    for a, b in zip(vs, back):
        assert np.array_equal(a.coefficients, b.coefficients)
    with pytest.raises(ValidationError):
        parse_mfcc_line("x:y 1 2 3")
