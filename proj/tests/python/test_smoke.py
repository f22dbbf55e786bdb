import json
import os
from pathlib import Path

import numpy as np
import pytest

import hma

SCENARIOS = Path(os.environ.get("HMA_SCENARIO_DIR", Path(__file__).resolve().parents[2] / "scenarios"))


def small_manufactured(amp=0.05):
    return json.dumps({
        "name": "py_manufactured",
        "n": 2,
        "grid": [8, 8, 8, 8],
        "metric": {"family": "flat_kahler"},
        "F": {"manufactured": [{"k": [1, 0, 0, 0], "cos": amp}]},
    })


def test_flat_zero_solution_is_zero():
    p = hma.load_scenario(SCENARIOS / "flat_zero.json")
    r = p.solve()
    assert r["converged"]
    assert abs(r["b"]) < 1e-12
    assert np.max(np.abs(r["phi"])) < 1e-12
    assert r["phi"].shape == tuple(p.shape)


def test_manufactured_recovers_phi_star():
    p = hma.parse_scenario(small_manufactured())
    star = p.phi_star()
    r = p.solve(tol=1e-11)
    assert r["converged"]
    assert abs(r["b"]) < 1e-9
    assert np.max(np.abs(r["phi"] - (star - star.max()))) < 1e-8
    assert np.max(np.abs(p.residual(r["phi"], r["b"]))) < 1e-10


def test_manufacture_matches_F():
    p = hma.parse_scenario(small_manufactured())
    assert np.allclose(p.manufacture(p.phi_star()), p.F, atol=1e-13)


def test_config_error_names_key():
    bad = json.loads(small_manufactured())
    bad["grid"][1] = 7
    with pytest.raises(hma.ConfigError, match=r"grid\[1\]"):
        hma.parse_scenario(json.dumps(bad))


def test_field_round_trip(tmp_path):
    rng = np.random.default_rng(3)
    a = rng.standard_normal((4, 6, 4, 8))
    path = tmp_path / "a.hmaf"
    hma.write_field(path, a)
    assert np.array_equal(hma.read_field(path), a)


def test_gauduchon_conformal_family():
    p = hma.load_scenario(SCENARIOS / "conformal.json")
    r = p.gauduchon()
    assert r["u"].max() == 0.0
    assert r["residual"] < 1e-9


def test_classify_flat():
    c = hma.load_scenario(SCENARIOS / "flat_zero.json").classify()
    assert c["kahler"] and c["balanced"] and c["condition_k12"]


def test_diagnostics_subset():
    p = hma.parse_scenario(small_manufactured())
    r = p.solve()
    out = p.diagnose(r["phi"], r["b"], ["ricci_identity", "lemma1_ratio"])
    assert [c["name"] for c in out] == ["lemma1_ratio", "ricci_identity"]
    assert all(c["pass"] for c in out)


def test_pointwise_sample():
    r = hma.pointwise_sample(n=2, trials=500, seed=5, validation=500)
    assert r["pass"]
    assert r["levels"][0]["violations"] == 0
