import json

import pytest

from bergman_cmcd.config import RunConfig, load, loads
from bergman_cmcd.errors import ConfigError

BASE = {"domain": [{"cx": "0.4", "cy": "0", "r": "0.2"}], "degrees": [10, 20]}


def test_defaults_and_round_trip():
    cfg = RunConfig.from_dict(BASE)
    assert cfg.precision_bits == 256
    assert cfg.family["max_len"] == 14
    assert cfg.contour_radius is None
    again = loads(cfg.dumps())
    assert again.to_dict() == cfg.to_dict()
    assert again.hash == cfg.hash


def test_decimal_strings_kept_verbatim():
    doc = {"domain": [{"cx": "0.10000000000000000001", "cy": "0", "r": "1e-1"}], "degrees": [3]}
    cfg = RunConfig.from_dict(doc)
    assert cfg.to_dict()["domain"][0] == doc["domain"][0]
    assert cfg.domain[0].radius == 0.1


def test_hash_changes_with_content():
    a = RunConfig.from_dict(BASE)
    b = RunConfig.from_dict({**BASE, "degrees": [10, 21]})
    assert len(a.hash) == 16 and a.hash != b.hash
    # key order in the input does not matter
    c = RunConfig.from_dict({"degrees": [10, 20], "domain": BASE["domain"]})
    assert c.hash == a.hash


@pytest.mark.parametrize("doc", [
    {**BASE, "extra": 1},
    {**BASE, "family": {"max_length": 3}},
    {"degrees": [1]},
    {**BASE, "degrees": []},
    {**BASE, "degrees": [0]},
    {**BASE, "degrees": [True]},
    {**BASE, "domain": [{"cx": "a", "cy": "0", "r": "0.1"}]},
    {**BASE, "domain": [{"cx": "inf", "cy": "0", "r": "0.1"}]},
    {**BASE, "domain": [{"cx": "0.1", "r": "0.1"}]},
    {**BASE, "outputs": {"formats": ["png"]}},
    {**BASE, "precision_bits": 10},
    [1, 2],
])
def test_rejects(doc):
    with pytest.raises(ConfigError):
        RunConfig.from_dict(doc)


def test_load_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigError):
        load(bad)
    with pytest.raises(ConfigError):
        load(tmp_path / "missing.json")
    good = tmp_path / "good.json"
    good.write_text(json.dumps(BASE))
    assert load(good).degrees == [10, 20]


def test_shipped_configs_parse():
    import pathlib
    for p in sorted(pathlib.Path(__file__).parent.parent.joinpath("configs").glob("*.json")):
        load(p).build_domain()
