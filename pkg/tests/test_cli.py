import json

import pytest

from xxzdrop.cli import KINDS, main, run, validate, ConfigError


def _run(tmp_path, name, argv):
    out = tmp_path / name
    code = main(argv + ["--out", str(out)])
    summary = json.loads((out / "summary.json").read_text()) if (out / "summary.json").exists() else None
    return code, out, summary


CASES = {
    "build-graph": ["--family", "strip", "--dims", "2", "4"],
    "spectrum": ["--family", "path", "--dims", "8", "--delta", "2", "--particles", "1-3"],
    "droplet-bands": ["--family", "path", "--dims", "16", "--delta", "3", "--particles", "2",
                      "--field", "compensating"],
    "isoperimetric": ["--family", "grid2d", "--dims", "5", "5", "--particles", "4",
                      "--constraint", "bulk"],
    "certify-gap": ["--family", "path", "--dims", "12", "--delta", "12", "--particles", "3",
                    "--k", "2", "--field", "compensating"],
    "ct-verify": ["--family", "path", "--dims", "6", "--delta", "4", "--particles", "2",
                  "--k", "1", "--offsets", "0.5,1.0", "--field", "compensating"],
    "eigenstate-decay": ["--family", "path", "--dims", "12", "--delta", "4", "--particles", "2",
                         "--k", "1", "--field", "compensating", "--count", "3"],
    "projector-decay": ["--family", "path", "--dims", "12", "--delta", "12", "--particles", "3",
                        "--k", "1", "--field", "compensating"],
    "oracle-check": ["--family", "grid2d", "--dims", "2", "3", "--delta", "2"],
}


@pytest.mark.parametrize("kind", KINDS)
def test_every_kind_passes(tmp_path, kind):
    code, out, summary = _run(tmp_path, kind, [kind] + CASES[kind])
    assert code == 0, summary
    assert summary["status"] == "pass" and summary["failures"] == []
    assert len(list(out.iterdir())) >= 2


def test_deterministic_across_runs_and_workers(tmp_path):
    argv = ["ct-verify"] + CASES["ct-verify"]
    _run(tmp_path, "a", argv + ["--workers", "1"])
    _run(tmp_path, "b", argv + ["--workers", "4"])
    _run(tmp_path, "c", argv + ["--workers", "1"])
    for f in sorted(p.name for p in (tmp_path / "a").iterdir()):
        ref = (tmp_path / "a" / f).read_bytes()
        assert (tmp_path / "b" / f).read_bytes() == ref
        assert (tmp_path / "c" / f).read_bytes() == ref


def test_config_file_and_flag_override(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"family": "path", "dims": [6], "delta": 9.0, "particles": 2}))
    code, out, summary = _run(tmp_path, "s", ["spectrum", "--config", str(cfg), "--delta", "3"])
    assert code == 0 and summary["config"]["delta"] == 3.0


@pytest.mark.parametrize("cfg,path", [
    ({"kind": "spectrum", "family": "path", "dims": [4], "particles": 1}, "config.delta"),
    ({"kind": "spectrum", "family": "path", "dims": [4], "particles": 1, "delta": 0.5}, "config.delta"),
    ({"kind": "spectrum", "particles": 1, "delta": 2}, "config.graph"),
    ({"kind": "bogus"}, "config.kind"),
    ({"kind": "build-graph", "family": "path", "dims": [4], "field": "nofile.json"}, "config.field"),
    ({"kind": "build-graph", "family": "path", "dims": [4], "workers": 0}, "config.workers"),
])
def test_validation_names_field(cfg, path):
    with pytest.raises(ConfigError, match=path.replace(".", r"\.")):
        validate(cfg)


def test_config_error_exit_code(tmp_path):
    assert run({"kind": "spectrum", "family": "path", "dims": [4]}) == 2


def test_refused_computation_exit_code(tmp_path):
    code, out, summary = _run(tmp_path, "g", ["certify-gap", "--family", "path", "--dims", "10",
                                              "--delta", "5", "--particles", "3", "--k", "1"])
    assert code == 2 and summary["status"] == "error"


def test_field_file(tmp_path):
    f = tmp_path / "field.json"
    f.write_text("[0, 0.5, 0.5, 0]")
    code, _, summary = _run(tmp_path, "f", ["spectrum", "--family", "path", "--dims", "4",
                                            "--delta", "2", "--particles", "2", "--field", str(f)])
    assert code == 0 and summary["config"]["field"].startswith("file:")
