import csv
import io

import numpy as np
import pytest

from qkdseed.cli import ConfigError, main, parse_config_text, resolve_config
from qkdseed.hashing import ToeplitzSeed, toeplitz_hash


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    import os
    for k in list(os.environ):
        if k.startswith("QKDSEED_"):
            monkeypatch.delenv(k)


def test_entropy_zero_file(tmp_path, capsys):
    path = tmp_path / "zeros.bin"
    path.write_bytes(bytes(1 << 20))
    assert main(["entropy", str(path)]) == 0
    (row,) = rows(capsys.readouterr().out)
    assert float(row["point_per_bit"]) == 0.0
    assert int(row["samples"]) == 8 << 20


def test_entropy_fair_file(tmp_path, capsys):
    path = tmp_path / "fair.bin"
    path.write_bytes(np.random.default_rng(99).integers(0, 256, 1 << 20, dtype=np.uint8).tobytes())
    assert main(["entropy", str(path)]) == 0
    (row,) = rows(capsys.readouterr().out)
    assert float(row["point_per_bit"]) == pytest.approx(1.0, abs=0.01)
    assert float(row["lower_per_bit"]) <= float(row["point_per_bit"])


def test_entropy_exit_codes(tmp_path):
    assert main(["entropy", str(tmp_path / "missing.bin")]) == 2
    small = tmp_path / "small.bin"
    small.write_bytes(b"\x00" * 100)
    assert main(["entropy", str(small), "--symbol-bits", "8"]) == 3


def test_bound_and_compare(capsys):
    assert main(["bound", "--hmin", "70", "--key-len", "50", "--alpha", "10", "--beta", "6"]) == 0
    (row,) = rows(capsys.readouterr().out)
    assert float(row["bound"]) == pytest.approx(7.8125e-3)
    assert main(["compare", "--hmin", "52", "--key-len", "50", "--alpha", "20", "--beta", "10"]) == 0
    (row,) = rows(capsys.readouterr().out)
    assert row["tighter"] == "Alternative"
    assert float(row["theorem1"]) == 1.0


def test_keylen(capsys):
    args = ["keylen", "--hmin", "900", "--leak-ec", "200", "--eps-sec", "1e-9",
            "--eps-cor", "1e-15", "--eps-smooth", "1e-10"]
    assert main(args) == 0
    assert rows(capsys.readouterr().out)[0]["key_len"] == "591"
    assert main(args + ["--alpha", "1000", "--h-avg", "0.931"]) == 0
    assert rows(capsys.readouterr().out)[0]["key_len"] == "522"
    assert main(["keylen", "--hmin", "9", "--leak-ec", "0", "--eps-sec", "1e-9",
                 "--eps-smooth", "1e-9"]) == 5


def test_presets(capsys):
    assert main(["presets"]) == 0
    got = {r["name"]: float(r["h_avg"]) for r in rows(capsys.readouterr().out)}
    assert got == {"IDQ Quantis-PCIe-40M": 0.99, "MATLAB unifrnd": 0.988,
                   "Random.org": 0.931, "Intel DRNG": 0.93}


def test_keyrate_preset(capsys):
    assert main(["keyrate", "--set", "distance=50", "--preset", "Random.org"]) == 0
    (row,) = rows(capsys.readouterr().out)
    assert float(row["h_avg"]) == 0.931 and int(row["key_len"]) > 0
    assert main(["keyrate", "--preset", "coin flips"]) == 5


def test_scan_presets_and_determinism(tmp_path):
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    crit = tmp_path / "crit.csv"
    args = ["scan", "--presets", "--distances", "10,50,100"]
    assert main(args + ["--out", str(out1), "--critical-out", str(crit)]) == 0
    assert main(args + ["--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()
    assert len(rows(out1.read_text())) == 12
    assert len(rows(crit.read_text())) == 3


def test_scan_config_errors(tmp_path, capsys):
    assert main(["scan", "--h-grid", "", "--distances", "10"]) == 5
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("distance = 10\nattenuaton = 0.2\n")
    assert main(["scan", "--config", str(cfg), "--h-grid", "1"]) == 5
    assert "attenuaton" in capsys.readouterr().err


def test_config_file_and_overrides(tmp_path, monkeypatch):
    cfg = tmp_path / "link.cfg"
    cfg.write_text("# link\nattenuation = 0.18\nmu = 0.6  # signal\n\ndark_count=2e-6\n")
    monkeypatch.setenv("QKDSEED_MU", "0.55")
    values = resolve_config(str(cfg), ["dark_count=3e-6"])
    assert values == {"attenuation": 0.18, "mu": 0.55, "dark_count": 3e-6}
    monkeypatch.setenv("QKDSEED_BOGUS", "1")
    with pytest.raises(ConfigError):
        resolve_config(str(cfg), [])


def test_config_parse_errors():
    with pytest.raises(ConfigError):
        parse_config_text("mu 0.5")
    with pytest.raises(ConfigError):
        parse_config_text("mu = half")


def test_missing_config_file(tmp_path):
    assert main(["scan", "--config", str(tmp_path / "none.cfg"), "--h-grid", "1"]) == 2


def test_pa_roundtrip(tmp_path):
    rng = np.random.default_rng(8)
    n, l = 64, 20
    key = rng.integers(0, 2, n, dtype=np.uint8)
    seed_bits = rng.integers(0, 2, n + l - 1, dtype=np.uint8)
    (tmp_path / "key.bin").write_bytes(np.packbits(key).tobytes())
    (tmp_path / "seed.bin").write_bytes(np.packbits(seed_bits).tobytes())
    out = tmp_path / "final.bin"
    assert main(["pa", "--key", str(tmp_path / "key.bin"), "--seed", str(tmp_path / "seed.bin"),
                 "--input-len", str(n), "--output-len", str(l), "--out", str(out)]) == 0
    got = np.unpackbits(np.frombuffer(out.read_bytes(), dtype=np.uint8))[:l]
    assert got.tolist() == toeplitz_hash(ToeplitzSeed(seed_bits, n, l), key).tolist()
    assert main(["pa", "--key", str(tmp_path / "key.bin"), "--seed", str(tmp_path / "seed.bin"),
                 "--input-len", "200", "--output-len", "3"]) == 5


def test_verify_exit_codes(tmp_path, capsys):
    out = tmp_path / "v.csv"
    assert main(["verify", "--single", "--n-max", "4", "--l-max", "2", "--beta", "3",
                 "--strategy", "spike", "--out", str(out)]) == 0
    assert len(rows(out.read_text())) == 1
    assert main(["verify", "--single", "--n-max", "10", "--l-max", "5"]) == 4
    assert main(["verify", "--n-max", "3", "--trials", "3", "--out", str(out)]) == 0
    assert all(r["pass"] == "1" for r in rows(out.read_text()))


def test_verify_default_sweep(tmp_path):
    out = tmp_path / "sweep.csv"
    assert main(["verify", "--out", str(out)]) == 0
    got = rows(out.read_text())
    assert {(int(r["n"]), int(r["l"])) for r in got} == {
        (n, l) for n in range(2, 7) for l in range(1, 4) if l <= n}
