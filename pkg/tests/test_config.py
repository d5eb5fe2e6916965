import json

import numpy as np
import pytest

from plap import InvalidConfig, ParseError, ProblemSpec, SolveOptions, SweepOptions, Weight, sweep
from plap.config import DEFAULT_SEED, build_mesh, parse_config
from plap.report import write_csv, write_report


MINIMAL = {
    "domain": {"kind": "interval", "bounds": [0, 1], "resolution": 256},
    "p": 2.0,
    "q": 1.5,
    "weights": {"m": 1, "a": 1, "f": 1},
    "mode": "eigen",
}


def cfg_text(**overrides):
    raw = json.loads(json.dumps(MINIMAL))
    raw.update(overrides)
    return json.dumps(raw)


def test_minimal_config_parses():
    cfg = parse_config(cfg_text())
    assert cfg.mode == "eigen"
    assert cfg.seed == DEFAULT_SEED
    assert cfg.weights["m"].kind == "constant"
    mesh = build_mesh(cfg)
    assert mesh.n_vertices == 257
    assert cfg.echo["output"]["report"] == "eigen_report.json"


def test_eigen_needs_only_m():
    cfg = parse_config(cfg_text(weights={"m": 1}))
    mesh = build_mesh(cfg)
    # a and f default to zero and the defaults are echoed
    assert cfg.weights["a"].sign_summary(mesh) == "zero"
    assert cfg.weights["f"].sign_summary(mesh) == "zero"
    assert cfg.echo["weights"]["a"] == 0.0


def test_q_ordering_rejected():
    with pytest.raises(InvalidConfig) as info:
        parse_config(cfg_text(q=2.5))
    assert str(info.value).startswith("q:")
    with pytest.raises(InvalidConfig):
        parse_config(cfg_text(q=1.0))


def test_unknown_weight_function_named():
    bad = json.loads(cfg_text())
    bad["weights"]["a"] = "wobble(x)"
    with pytest.raises(InvalidConfig) as info:
        parse_config(json.dumps(bad))
    msg = str(info.value)
    assert "weights.a" in msg and "wobble" in msg and "position" in msg


def test_bad_json_is_parse_error():
    with pytest.raises(ParseError):
        parse_config(b"{not json")


def test_field_path_errors():
    cases = [
        ({"domain": {"kind": "disk"}}, "domain.kind"),
        ({"domain": {"kind": "interval", "bounds": [1, 0], "resolution": 8}}, "domain.bounds"),
        ({"domain": {"kind": "interval", "bounds": [0, 1], "resolution": 1}}, "domain.resolution"),
        ({"p": "two"}, "p:"),
        ({"mode": "dance"}, "mode"),
        ({"seed": -3}, "seed"),
        ({"mode_params": 7}, "mode_params"),
        ({"weights": {"a": 1, "f": 1}}, "weights.m"),
        ({"weights": {"m": True, "a": 1, "f": 1}}, "weights.m"),
        ({"weights": {"m": {"kind": "nodal", "values": []}, "a": 1, "f": 1}}, "weights.m.values"),
    ]
    for overrides, needle in cases:
        with pytest.raises(InvalidConfig) as info:
            parse_config(cfg_text(**overrides))
        assert needle in str(info.value), (overrides, str(info.value))


def test_missing_nodal_file(tmp_path):
    raw = json.loads(cfg_text())
    raw["weights"]["f"] = {"kind": "nodal", "path": "absent.json"}
    with pytest.raises(InvalidConfig) as info:
        parse_config(json.dumps(raw), base_dir=str(tmp_path))
    assert "does not exist" in str(info.value)


def test_nodal_file_roundtrip(tmp_path):
    values = list(np.linspace(-1, 1, 9))
    (tmp_path / "w.json").write_text(json.dumps(values))
    raw = json.loads(cfg_text(domain={"kind": "interval", "bounds": [0, 1], "resolution": 8}))
    raw["weights"]["m"] = {"kind": "nodal", "path": "w.json", "gamma": 3.0}
    cfg = parse_config(json.dumps(raw), base_dir=str(tmp_path))
    mesh = build_mesh(cfg)
    np.testing.assert_allclose(cfg.weights["m"].values(mesh), values)
    assert cfg.weights["m"].declared_gamma == 3.0


def test_rectangle_domain_and_expression_weight():
    raw = json.loads(cfg_text())
    raw["domain"] = {"kind": "rectangle", "bounds": [0, 1, 0, 2], "resolution": [4, 6]}
    raw["weights"]["a"] = "x * y - 0.5"
    cfg = parse_config(json.dumps(raw))
    mesh = build_mesh(cfg)
    assert mesh.n_vertices == 5 * 7
    assert cfg.weights["a"].sign_summary(mesh) == "indefinite"


def _tiny_map(seed):
    mesh = build_mesh(parse_config(cfg_text(domain={"kind": "interval", "bounds": [0, 1], "resolution": 32})))
    one = Weight.constant(1.0)
    tmpl = ProblemSpec(mesh, 2.0, 1.5, 0.0, 0.0, one, one, one)
    opts = SweepOptions(solve_opts=SolveOptions(t_grid=(1.0,), n_random=2, seed=seed))
    return sweep(tmpl, [2.0], [0.0, 0.4], opts)


def test_csv_rows_and_determinism(tmp_path):
    m1 = _tiny_map(7)
    m2 = _tiny_map(7)
    p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
    write_csv(m1, p1)
    write_csv(m2, p2)
    assert p1.read_bytes() == p2.read_bytes()
    lines = p1.read_text().splitlines()
    # one row per (lam, eta, start): 2 cells x (zero + 2 phi starts + 2 random)
    assert lines[0].startswith("lam,eta,p,q,sign_class")
    assert len(lines) == 1 + 2 * 5
    m3 = _tiny_map(8)
    p3 = tmp_path / "c.csv"
    write_csv(m3, p3)
    assert p1.read_bytes() != p3.read_bytes()  # random starts move with the seed


def test_empty_sweep_header_only(tmp_path):
    mesh = build_mesh(parse_config(cfg_text()))
    one = Weight.constant(1.0)
    tmpl = ProblemSpec(mesh, 2.0, 1.5, 0.0, 0.0, one, one, one)
    region_map = sweep(tmpl, [], [], SweepOptions())
    path = tmp_path / "empty.csv"
    write_csv(region_map, path)
    assert path.read_text() == "lam,eta,p,q,sign_class,residual_norm,sup_norm,energy,predicted_by,consistent\n"


def test_report_is_deterministic_json(tmp_path, pair_p2_256):
    p1, p2 = tmp_path / "r1.json", tmp_path / "r2.json"
    write_report(pair_p2_256, p1, config_echo={"seed": 1})
    write_report(pair_p2_256, p2, config_echo={"seed": 1})
    assert p1.read_bytes() == p2.read_bytes()
    payload = json.loads(p1.read_text())
    assert payload["result"]["lam"] == pytest.approx(pair_p2_256.lam)
    assert payload["config"]["seed"] == 1
