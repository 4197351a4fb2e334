import csv
import json

import pytest

from bergman_cmcd.cli import main


def _config(tmp_path, disks, degrees, **extra):
    doc = {"domain": [{"cx": str(c), "cy": "0", "r": str(r)} for c, r in disks],
           "degrees": degrees, **extra}
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps(doc))
    return str(p)


def _rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_validate_exit_codes(tmp_path):
    out = str(tmp_path / "o")
    assert main(["validate", "--config", _config(tmp_path, [(0.4, 0.2)], [5]), "--out", out]) == 0
    assert main(["validate", "--config", _config(tmp_path, [(0.3, 0.2), (-0.1, 0.2)], [5]),
                 "--out", out]) == 2
    assert main(["validate", "--config", _config(tmp_path, [(0.9, 0.2)], [5]), "--out", out]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    assert main(["validate", "--config", str(bad), "--out", out]) == 3
    assert main(["validate", "--config", _config(tmp_path, [(0.4, 0.2)], [5], colour="red"),
                 "--out", out]) == 3


def test_bad_thread_env(tmp_path, monkeypatch):
    monkeypatch.setenv("BERGMAN_CMCD_THREADS", "many")
    assert main(["validate", "--config", _config(tmp_path, [(0.4, 0.2)], [5]),
                 "--out", str(tmp_path / "o")]) == 3


def test_orthopoly_annulus(tmp_path):
    out = tmp_path / "o"
    assert main(["orthopoly", "--config", _config(tmp_path, [(0, 0.5)], [5, 10]), "--out", str(out)]) == 0
    rows = _rows(out / "orthopoly_coefficients.csv")
    header = rows[0]
    assert header[0] == "config_hash"
    assert all("[" in h for h in header[1:] if not h.endswith("status"))
    col = header.index("disagreement [abs]")
    assert all(float(r[col]) < 1e-12 for r in rows[1:] if r[col])
    assert len({r[0] for r in rows[1:]}) == 1


def test_orthopoly_regime_tag(tmp_path):
    out = tmp_path / "o"
    assert main(["orthopoly", "--config", _config(tmp_path, [(0.4, 0.2)], [5, 20]),
                 "--out", str(out), "--svg"]) == 0
    rows = _rows(out / "orthopoly_kappa.csv")
    status = {r[1]: r[-1] for r in rows[1:]}
    assert status["5"] == "NotYetAsymptotic"
    assert status["20"] == "ok"
    assert (out / "orthopoly_disagreement.svg").exists()


def test_zeros_deterministic(tmp_path, monkeypatch):
    cfg = _config(tmp_path, [(0.4, 0.2)], [20, 30])
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["zeros", "--config", cfg, "--out", str(a), "--svg"]) == 0
    monkeypatch.setenv("BERGMAN_CMCD_THREADS", "2")
    assert main(["zeros", "--config", cfg, "--out", str(b), "--svg"]) == 0
    for name in ("zeros.csv", "zeros_summary.csv", "zeros.svg"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_kernel_check(tmp_path):
    out = tmp_path / "o"
    assert main(["kernel-check", "--config", _config(tmp_path, [(0.4, 0.2)], [5]),
                 "--out", str(out)]) == 0
    rows = _rows(out / "kernel_check.csv")
    p = rows[0].index("pass")
    assert rows[1:] and all(r[p] == "true" for r in rows[1:])


@pytest.mark.slow
def test_asymptotics_fits(tmp_path):
    out = tmp_path / "o"
    assert main(["asymptotics", "--config", _config(tmp_path, [(0.4, 0.2)], [20, 30, 40]),
                 "--out", str(out)]) == 0
    rows = _rows(out / "asymptotics_fits.csv")
    p = rows[0].index("pass")
    assert all(r[p] == "true" for r in rows[1:])
