import csv

import pytest

from pcfgcompress import cli
from pcfgcompress.constants import CSV_COLUMNS
from pcfgcompress.fibonacci import fib_string


def test_gen_clean_fib20(tmp_path):
    out = tmp_path / "fib20"
    cli.gen(m=20, out=str(out))
    assert out.read_bytes() == fib_string(20)
    assert len(out.read_bytes()) == 10946


def test_gen_one_flip_and_determinism(tmp_path, capsys):
    first, second = tmp_path / "a", tmp_path / "b"
    cli.gen(m=4, out=str(first), noise="0", ratio=0.2, seed=7)
    cli.gen(m=4, out=str(second), noise=0, ratio=0.2, seed=7)
    assert len(first.read_bytes()) == 5
    assert first.read_bytes() == second.read_bytes()
    assert sum(x != y for x, y in zip(first.read_bytes(), fib_string(4))) == 1
    assert "1 positions altered" in " ".join(capsys.readouterr().out.split())


def test_gen_rejects_unknown_noise(tmp_path):
    with pytest.raises(SystemExit) as e:
        cli.gen(m=4, out=str(tmp_path / "x"), noise="Q")
    assert e.value.code == 1


@pytest.mark.parametrize("method", ["repair", "pcfg-repair"])
def test_compress_decompress_identity(tmp_path, method):
    src, packed, unpacked = tmp_path / "in.bin", tmp_path / "out.pcfg", tmp_path / "back.bin"
    src.write_bytes(b"the quick brown fox jumps over the lazy dog " * 20 + bytes(range(256)))
    cli.compress(method, str(packed), **{"in": str(src)})
    cli.decompress(str(unpacked), **{"in": str(packed)})
    assert unpacked.read_bytes() == src.read_bytes()


def test_fib_g0_on_clean_file(tmp_path):
    src, packed, unpacked = tmp_path / "fib20", tmp_path / "fib20.pcfg", tmp_path / "back"
    cli.gen(m=20, out=str(src))
    cli.compress("fib-g0", str(packed), m=20, **{"in": str(src)})
    assert len(packed.read_bytes()) < 64
    cli.decompress(str(unpacked), **{"in": str(packed)})
    assert unpacked.read_bytes() == fib_string(20)


def test_unary_from_file(tmp_path):
    src, packed, unpacked = tmp_path / "run", tmp_path / "run.pcfg", tmp_path / "back"
    src.write_bytes(b"a" * 5000)
    cli.compress("unary", str(packed), **{"in": str(src)})
    cli.decompress(str(unpacked), **{"in": str(packed)})
    assert unpacked.read_bytes() == b"a" * 5000


def test_fib_gk_on_type0_noise_fails(tmp_path, capsys):
    src = tmp_path / "noisy"
    cli.gen(m=10, out=str(src), noise="0", ratio=0.1, seed=3)
    with pytest.raises(SystemExit) as e:
        cli.compress("fib-gk", str(tmp_path / "out"), m=10, k=1, **{"in": str(src)})
    assert e.value.code != 0
    assert "IllegalLetter" in capsys.readouterr().err


def test_missing_input_fails(tmp_path):
    with pytest.raises(SystemExit) as e:
        cli.decompress(str(tmp_path / "out"), **{"in": str(tmp_path / "absent")})
    assert e.value.code == 1
    with pytest.raises(SystemExit):
        cli.compress("repair", str(tmp_path / "out"))


def test_bench_writes_csv(tmp_path, capsys):
    config = tmp_path / "bench.toml"
    config.write_text(
        "m = 8\n"
        "trials = 2\n"
        'methods = ["repair", "fib-g0"]\n'
        "type0_ratios = [0.0, 0.1]\n"
        "type1_ratios = []\n"
        "typek_ks = []\n"
    )
    out = tmp_path / "bench.csv"
    cli.bench(str(config), str(out), external="no-such-compressor-xyz")
    lines = out.read_text().splitlines()
    assert lines[0] == "# no-such-compressor-xyz: missing"
    rows = list(csv.reader(lines[1:]))
    assert tuple(rows[0]) == CSV_COLUMNS
    assert len(rows) == 1 + 2 * 2 * 3 + 1
    assert "WARNING" in capsys.readouterr().err


def test_bench_rejects_bad_config(tmp_path):
    config = tmp_path / "bench.toml"
    config.write_text("trials = 0\n")
    with pytest.raises(SystemExit) as e:
        cli.bench(str(config), str(tmp_path / "bench.csv"))
    assert e.value.code == 1


def test_unary_from_length_alone(tmp_path):
    packed, unpacked = tmp_path / "run.pcfg", tmp_path / "back"
    cli.compress("unary", str(packed), n=4096)
    cli.decompress(str(unpacked), **{"in": str(packed)})
    assert unpacked.read_bytes() == b"a" * 4096


def test_length_conflicts_are_rejected(tmp_path, capsys):
    src = tmp_path / "run"
    src.write_bytes(b"a" * 10)
    with pytest.raises(SystemExit) as e:
        cli.compress("unary", str(tmp_path / "out"), n=20, **{"in": str(src)})
    assert e.value.code == 1
    with pytest.raises(SystemExit) as e:
        cli.compress("repair", str(tmp_path / "out"), n=20, **{"in": str(src)})
    assert e.value.code == 1
    assert capsys.readouterr().err.count("ConflictingOptions") == 2
    assert not (tmp_path / "out").exists()
