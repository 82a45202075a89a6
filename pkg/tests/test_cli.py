import json
import subprocess
import sys
from pathlib import Path

import pytest

from ietlab.cli import main, parse_observable
from ietlab.errors import ConfigError
from ietlab.io import MANIFEST, RunConfig, read_csv


def _run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def _files(root):
    return sorted(p for p in Path(root).rglob("*") if p.is_file())


def _assert_manifested(root):
    """Every output file is listed in its run manifest and names that manifest."""
    for run in Path(root).iterdir():
        man = json.loads((run / MANIFEST).read_text())
        listed = set(man["files"])
        on_disk = {p.name for p in run.iterdir() if p.name != MANIFEST}
        assert on_disk == listed, f"orphans in {run}: {on_disk - listed}"
        for name in listed:
            text = (run / name).read_text()
            if name.endswith(".csv"):
                assert text.startswith(f"# manifest={MANIFEST} config={man['config_hash']}")
            else:
                assert json.loads(text)["manifest"] == MANIFEST


def test_classify_symmetric(tmp_path, capsys):
    code, out, _ = _run(["--out", str(tmp_path), "classify", "A B C D / D C B A"], capsys)
    assert code == 0
    res = json.loads(out)
    assert res["rotation_class"] is False and res["type_w"] is False
    assert (res["genus"], res["kappa"]) == (2, 1)
    _assert_manifested(tmp_path)


def test_induce_golden_kinds(tmp_path, capsys):
    code, _, _ = _run(["--out", str(tmp_path), "induce", "--fixture", "golden-rotation",
                       "--steps", "60"], capsys)
    assert code == 0
    (csv_path,) = tmp_path.rglob("steps.csv")
    rows = read_csv(csv_path)[1:]
    # all continued-fraction digits of the golden mean are 1: the step type alternates
    assert "".join(r[2] for r in rows) == "bt" * 30
    _assert_manifested(tmp_path)


def test_induce_zorich_blocks(tmp_path, capsys):
    code, out, _ = _run(["--out", str(tmp_path), "induce", "--fixture", "golden-rotation",
                         "--steps", "10", "--zorich"], capsys)
    assert code == 0 and json.loads(out)["blocks"] == [1] * 10


def test_unknown_flag_exit_2(tmp_path, capsys):
    code, _, err = _run(["--out", str(tmp_path), "classify", "A B / B A", "--bogus"], capsys)
    assert code == 2 and "usage" in err
    code, _, err = _run([], capsys)
    assert code == 2 and "usage" in err


def test_config_and_numeric_exit_codes(tmp_path, capsys):
    code, _, err = _run(["--out", str(tmp_path), "induce", "A B / B A", "--lengths", "0,1"], capsys)
    assert code == 2 and json.loads(err.strip().splitlines()[-1])["error"] == "NonPositiveLength"
    code, _, err = _run(["--out", str(tmp_path), "induce", "A B / B A", "--lengths", "1,1"], capsys)
    assert code == 3 and "TieLengths" in err
    code, _, _ = _run(["--out", str(tmp_path), "induce"], capsys)
    assert code == 2


def test_observable_parser():
    assert parse_observable("const:2")(0.5) == 2
    assert parse_observable("bump:1/2,3/5").support is not None
    for bad in ("bump:1", "wave:1", "const:x"):
        with pytest.raises(ConfigError):
            parse_observable(bad)


def test_replay_is_byte_identical(tmp_path, capsys):
    argv = ["correlate", "--fixture", "d4-symmetric", "--kmin", "3", "--kmax", "6", "--mode", "exact"]
    a, b = tmp_path / "a", tmp_path / "b"
    assert _run(["--out", str(a)] + argv, capsys)[0] == 0
    assert _run(["--out", str(b)] + argv, capsys)[0] == 0
    fa, fb = _files(a), _files(b)
    assert [p.relative_to(a) for p in fa] == [p.relative_to(b) for p in fb]
    for x, y in zip(fa, fb):
        assert x.read_bytes() == y.read_bytes()
    _assert_manifested(a)


def test_veech_and_lower_bound_commands(tmp_path, capsys):
    code, _, _ = _run(["--out", str(tmp_path), "veech-freq", "A B C D / D C B A", "--n", "200"], capsys)
    assert code == 0
    (csv_path,) = tmp_path.rglob("veech.csv")
    assert [r[0] for r in read_csv(csv_path)[1:]] == ["1/3", "2/5", "1/7"]
    code, _, err = _run(["--out", str(tmp_path), "lower-bound", "--N", "512"], capsys)
    assert code == 3 and "TooSmallN" in err
    code, out, _ = _run(["--out", str(tmp_path), "lower-bound", "--N", "2048"], capsys)
    assert code == 0 and json.loads(out) == {"ok": True}
    _assert_manifested(tmp_path)


def test_config_hash_stable():
    a = RunConfig("x", {"b": 1, "a": [1, 2]}, 3)
    b = RunConfig("x", {"a": [1, 2], "b": 1}, 3)
    assert a.hash == b.hash and RunConfig.from_json(a.to_json()).hash == a.hash
    assert RunConfig("x", {"b": 2}, 3).hash != a.hash


def test_console_script_entry(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "ietlab.cli", "--out", str(tmp_path), "classify",
                           "A B C / C B A"], capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["rotation_class"] is True
