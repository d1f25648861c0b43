import json

import pytest

from cocktail import config as cfg
from cocktail.cli import build_parser, config_from_args, main
from cocktail.config import Config
from cocktail.signal import CONTENT_DEPTH, load_wav


@pytest.fixture(scope="module")
def corpus_dir(tmp_path_factory):
    """Four-speaker corpus on disk: three members plus one outsider."""
    out = tmp_path_factory.mktemp("corpus")
    assert main(["synth", "--out", str(out), "--num-speakers", "4", "--seed", "0"]) == 0
    return out


def test_config_defaults_match_module_defaults():
    for command in ("extract", "evaluate", "decide"):
        extra = {"extract": ["x.wav"], "evaluate": [], "decide": ["p.wav", "--manifest", "m.csv"]}[command]
        args = build_parser().parse_args([command, *extra])
        assert config_from_args(args) == Config()
    args = build_parser().parse_args(["synth"])
    assert args.depth == CONTENT_DEPTH and args.sentences == cfg.DEFAULT_SENTENCES_PER_SPEAKER
    assert args.pairs == cfg.DEFAULT_SAME_TEXT_PAIRS


def test_flags_reach_config():
    args = build_parser().parse_args(
        ["extract", "x.wav", "--frame-ms", "30", "--hop-ms", "15", "--filters", "30", "--window", "rectangular",
         "--sigma-floor", "1e-3", "--band-c", "2", "--tau", "0.5", "--ek-mode", "sigma-free", "--seed", "9"]
    )
    c = config_from_args(args)
    assert (c.frame_ms, c.hop_ms, c.num_filters, c.window) == (30, 15, 30, "rectangular")
    assert (c.sigma_floor, c.band_c, c.tau, c.ek_mode, c.seed) == (1e-3, 2, 0.5, "sigma-free", 9)


def test_synth_writes_wavs_and_manifest(corpus_dir):
    assert (corpus_dir / "manifest.csv").is_file()
    assert len(list(corpus_dir.glob("*.wav"))) == 40


def test_extract_gives_thirteen_coefficients(corpus_dir, capsys):
    wav = corpus_dir / "spk1_s2.wav"
    assert main(["extract", str(wav), "--speaker", "spk1"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 1
    fields = lines[0].split()
    assert fields[0] == "spk1:spk1_s2" and len(fields) == 14


def test_extract_enroll_chain(corpus_dir, tmp_path, capsys):
    wavs = [str(corpus_dir / f"spk2_s{k}.wav") for k in range(2, 6)]
    mfcc = tmp_path / "m.txt"
    assert main(["extract", *wavs, "--speaker", "spk2", "--out", str(mfcc)]) == 0
    assert main(["enroll", str(mfcc)]) == 0
    record = capsys.readouterr().out.strip().split()
    assert record[0] == "spk2" and len(record) == 1 + 1 + 26


def test_mix_command(corpus_dir, tmp_path, capsys):
    out = tmp_path / "mix.wav"
    args = ["mix", str(corpus_dir / "spk1_s2.wav"), str(corpus_dir / "spk2_s2.wav"), "--out", str(out)]
    assert main(args) == 0
    assert len(load_wav(out)) == 16000
    weighted = tmp_path / "weighted.wav"
    assert main([*args[:-2], "--gains", "3,1", "--out", str(weighted)]) == 0
    assert load_wav(weighted).samples.tolist() != load_wav(out).samples.tolist()
    assert main([*args[:-2], "--gains", "1,2,3", "--out", str(weighted)]) == 1
    assert main(args[:-2]) == 1
    assert "--out" in capsys.readouterr().err


def test_decide_outsider_gives_none(corpus_dir, capsys):
    manifest = str(corpus_dir / "manifest.csv")
    # spk1 is the outsider. spk4's voice lies between spk1..spk3 and is always
    # included by the mixture test, so it would not make a clean negative.
    members = ["--manifest", manifest, "--speakers", "spk2,spk3,spk4"]
    assert main(["decide", str(corpus_dir / "spk1_s5.wav"), *members]) == 0
    verdict = json.loads(capsys.readouterr().out)
    assert verdict["decision"] is None and verdict["included"] is False
    # The retake of spk2's enrolled shared text is found.
    assert main(["decide", str(corpus_dir / "spk2_s1.wav"), *members]) == 0
    verdict = json.loads(capsys.readouterr().out)
    assert verdict["decision"] == "spk2"


def test_evaluate_is_byte_identical(tmp_path):
    argv = ["evaluate", "--num-speakers", "4", "--group-sizes", "3", "--trials", "4", "--enrollment", "3",
            "--outsiders", "--curve", "2..3"]
    assert main([*argv, "--out", str(tmp_path / "a.json")]) == 0
    assert main([*argv, "--out", str(tmp_path / "b.json")]) == 0
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()
    assert (tmp_path / "a_plot.tsv").read_bytes() == (tmp_path / "b_plot.tsv").read_bytes()
    report = json.loads((tmp_path / "a.json").read_text())
    assert [p["training_size"] for p in report["curve"]] == [2, 3]


def test_evaluate_from_manifest(corpus_dir, tmp_path):
    argv = ["evaluate", "--manifest", str(corpus_dir / "manifest.csv"), "--group-sizes", "3", "--trials", "2",
            "--enrollment", "2", "--splits", "distinct-text", "--out", str(tmp_path / "r.json")]
    assert main(argv) == 0
    report = json.loads((tmp_path / "r.json").read_text())
    assert [c["split"] for c in report["conditions"]] == ["distinct-text"]


def test_exit_codes(corpus_dir, tmp_path, capsys):
    assert main(["bogus"]) == 1
    assert main(["extract", "x.wav", "--no-such-flag"]) == 1
    assert main([]) == 1
    assert main(["extract", str(tmp_path / "missing.wav")]) == 2
    bad = tmp_path / "bad.wav"
    bad.write_bytes(b"junk")
    assert main(["extract", str(bad)]) == 1
    assert main(["extract", str(corpus_dir / "spk1_s2.wav"), "--hop-ms", "0"]) == 1
    assert main(["evaluate", "--num-speakers", "3", "--group-sizes", "4", "--out", str(tmp_path / "r.json")]) == 1
    assert main(["evaluate"]) == 1
    err = capsys.readouterr().err
    assert "usage" in err and "cocktail evaluate" in err
