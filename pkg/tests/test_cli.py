import json

from terraspec.cli import main

CESARO_CFG = {
    "a": {"family": "cesaro_scaled", "params": {"chi": 1.0}},
    "r": {"family": "constant", "params": {"value": 1.0}},
    "s": {"family": "constant", "params": {"value": 1.0}},
    "seed": 42,
    "n_max": 2000,
}


def write_cfg(tmp_path, cfg, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(cfg, indent=2))
    return str(path)


def run(args):
    return main([str(a) for a in args])


class TestClassify:
    def test_cesaro_baseline(self, tmp_path):
        cfg = write_cfg(tmp_path, CESARO_CFG)
        out = tmp_path / "report.json"
        assert run(["classify", "--config", cfg, "--out", out]) == 0
        payload = json.loads(out.read_text())
        assert payload["result"]["norm"] == 1.0
        assert payload["result"]["bounded"] == "yes"
        assert payload["result"]["compact"] == "no"
        assert payload["version"]
        assert len(payload["config_digest"]) == 64

    def test_compact_log_geometric_pair(self, tmp_path):
        cfg = write_cfg(
            tmp_path,
            {
                "a": {"family": "log_reciprocal"},
                "r": {"family": "geometric", "params": {"ratio": 0.5}},
                "s": {"family": "geometric", "params": {"ratio": 0.5}},
                "n_max": 500,
            },
        )
        out = tmp_path / "report.json"
        assert run(["classify", "--config", cfg, "--out", out]) == 0
        assert json.loads(out.read_text())["result"]["compact"] == "yes"

    def test_malformed_family(self, tmp_path):
        cfg = write_cfg(tmp_path, {"a": {"family": "not-a-family"}})
        assert run(["classify", "--config", cfg, "--out", tmp_path / "x.json"]) == 1

    def test_inconclusive_exits_two(self, tmp_path):
        values = [(2.0 + (n % 3)) / n for n in range(1, 1025)]
        cfg = write_cfg(
            tmp_path,
            {"a": {"family": "table", "params": {"values": values}}, "n_max": 1024},
        )
        out = tmp_path / "report.json"
        assert run(["classify", "--config", cfg, "--out", out]) == 2
        assert json.loads(out.read_text())["result"]["bounded"] == "inconclusive"

    def test_missing_config_file(self, tmp_path):
        assert run(["classify", "--config", tmp_path / "nope.json", "--out", tmp_path / "x.json"]) == 1


class TestSpectrumMap:
    def cfg(self, tmp_path, grid):
        return write_cfg(
            tmp_path,
            {
                "a": {"family": "cesaro_scaled", "params": {"chi": 1.0}},
                "s": {"family": "constant", "params": {"value": 1.0}},
                "n_max": 2000,
                "spectrum_map": {"grid": grid},
            },
        )

    def test_three_by_three(self, tmp_path):
        cfg = self.cfg(tmp_path, {"re_range": [-0.2, 1.2], "im_range": [-0.2, 0.2], "resolution": 3})
        out = tmp_path / "grid.csv"
        assert run(["spectrum-map", "--config", cfg, "--out", out]) == 0
        lines = out.read_text().strip().split("\n")
        assert lines[0].startswith("# terraspec")
        assert lines[1] == "re,im,label,alpha,alpha_chi,dist_to_S,a1,a2"
        assert len(lines) == 2 + 9

    def test_node_labels(self, tmp_path):
        cfg = self.cfg(tmp_path, {"re_range": [-0.2, 0.2], "im_range": [-0.2, 0.2], "resolution": 3})
        out = tmp_path / "grid.csv"
        assert run(["spectrum-map", "--config", cfg, "--out", out]) == 0
        rows = [ln.split(",") for ln in out.read_text().strip().split("\n")[2:]]
        by_node = {(float(r[0]), float(r[1])): r[2] for r in rows}
        assert by_node[(0.0, 0.0)] == "continuous_candidate"
        assert by_node[(-0.2, 0.0)] == "resolvent"

    def test_exterior_node_resolvent(self, tmp_path):
        cfg = self.cfg(tmp_path, {"re_range": [1.5, 2.0], "im_range": [-0.1, 0.1], "resolution": 2})
        out = tmp_path / "grid.csv"
        assert run(["spectrum-map", "--config", cfg, "--out", out]) == 0
        rows = [ln.split(",") for ln in out.read_text().strip().split("\n")[2:]]
        assert all(r[2] == "resolvent" for r in rows)

    def test_json_output(self, tmp_path):
        cfg = self.cfg(tmp_path, {"re_range": [-0.2, 0.2], "im_range": [-0.2, 0.2], "resolution": 3})
        out = tmp_path / "grid.json"
        assert run(["spectrum-map", "--config", cfg, "--out", out]) == 0
        payload = json.loads(out.read_text())
        assert len(payload["result"]) == 9
        zero = [r for r in payload["result"] if r["lambda"] == [0.0, 0.0]][0]
        assert zero["label"] == "continuous_candidate"

    def test_degenerate_grid(self, tmp_path):
        cfg = self.cfg(tmp_path, {"re_range": [0, 1], "im_range": [0, 1], "resolution": 1})
        assert run(["spectrum-map", "--config", cfg, "--out", tmp_path / "x.csv"]) == 1

    def test_jobs_flag_same_output(self, tmp_path):
        cfg = self.cfg(tmp_path, {"re_range": [-0.2, 1.2], "im_range": [-0.2, 0.2], "resolution": 5})
        out1 = tmp_path / "serial.csv"
        out2 = tmp_path / "parallel.csv"
        assert run(["spectrum-map", "--config", cfg, "--out", out1]) == 0
        assert run(["spectrum-map", "--config", cfg, "--out", out2, "--jobs", "2"]) == 0
        assert out1.read_bytes() == out2.read_bytes()


class TestPointTest:
    def test_lambda_list(self, tmp_path):
        cfg = write_cfg(
            tmp_path,
            {
                "a": {"family": "cesaro_scaled", "params": {"chi": 1.0}},
                "s": {"family": "constant", "params": {"value": 1.0}},
                "n_max": 2000,
                "point_test": {"lambdas": [[0.4, 0.0], [2.0, 0.0], 0.5]},
            },
        )
        out = tmp_path / "points.json"
        assert run(["point-test", "--config", cfg, "--out", out]) == 0
        results = json.loads(out.read_text())["result"]
        assert [r["label"] for r in results] == ["residual", "resolvent", "residual"]
        assert results[0]["adjoint"] == "yes"
        assert results[1]["adjoint"] == "no"


class TestResolventVerify:
    def test_cesaro_200(self, tmp_path):
        cfg = write_cfg(
            tmp_path,
            {
                "a": {"family": "cesaro_scaled", "params": {"chi": 1.0}},
                "resolvent_verify": {"lambda": [2.0, 0.0], "n": 200, "tol": 1e-10},
            },
        )
        out = tmp_path / "resolvent.json"
        assert run(["resolvent-verify", "--config", cfg, "--out", out]) == 0
        payload = json.loads(out.read_text())["result"]
        assert payload["passed"] is True
        assert payload["max_residual"] <= 1e-10

    def test_lambda_in_S_is_config_error(self, tmp_path):
        cfg = write_cfg(
            tmp_path,
            {
                "a": {"family": "cesaro_scaled", "params": {"chi": 1.0}},
                "resolvent_verify": {"lambda": [1.0, 0.0], "n": 50},
            },
        )
        assert run(["resolvent-verify", "--config", cfg, "--out", tmp_path / "x.json"]) == 1


class TestProductBand:
    def test_bounded_band(self, tmp_path):
        cfg = write_cfg(
            tmp_path,
            {
                "a": {"family": "cesaro_scaled", "params": {"chi": 1.0}},
                "product_band": {"lambda": [2.0, 0.0], "n_range": [128, 8192]},
            },
        )
        out = tmp_path / "band.json"
        csv_out = tmp_path / "band.csv"
        assert run(["product-band", "--config", cfg, "--out", out, "--csv", csv_out]) == 0
        payload = json.loads(out.read_text())["result"]
        assert payload["verdict"] == "bounded_band"
        lines = csv_out.read_text().strip().split("\n")
        assert lines[1] == "n,ratio"
        assert len(lines) == 2 + len(payload["ratios"])

    def test_perturbed_exponent_fails(self, tmp_path):
        cfg = write_cfg(
            tmp_path,
            {
                "a": {"family": "cesaro_scaled", "params": {"chi": 1.0}},
                "product_band": {"lambda": [2.0, 0.0], "n_range": [128, 8192], "exponent": 0.55},
            },
        )
        assert run(["product-band", "--config", cfg, "--out", tmp_path / "x.json"]) == 3


class TestIdealCommands:
    def test_qnorm_from_user_values(self, tmp_path):
        cfg = write_cfg(
            tmp_path,
            {
                "a": {"family": "cesaro_scaled", "params": {"chi": 1.0}},
                "r": {"family": "constant", "params": {"value": 1.0}},
                "ideal_qnorm": {"snumbers": [2.0, 0.0, 0.0]},
            },
        )
        out = tmp_path / "qnorm.json"
        assert run(["ideal-qnorm", "--config", cfg, "--out", out]) == 0
        payload = json.loads(out.read_text())["result"]
        assert payload["value"] == 2.0
        assert payload["qnorm_normalized"] == "yes"

    def test_axioms_clean(self, tmp_path):
        cfg = write_cfg(
            tmp_path,
            {
                "a": {"family": "cesaro_scaled", "params": {"chi": 1.0}},
                "r": {"family": "constant", "params": {"value": 1.0}},
                "seed": 77,
                "ideal_axioms": {"trials": 25, "dim": 6},
            },
        )
        out = tmp_path / "axioms.json"
        assert run(["ideal-axioms", "--config", cfg, "--out", out]) == 0
        payload = json.loads(out.read_text())
        assert payload["result"]["total_violations"] == 0
        assert payload["seed"] == 77


class TestDeterminism:
    def test_byte_identical_reruns(self, tmp_path):
        cfg = write_cfg(tmp_path, CESARO_CFG)
        for command, extra in [
            ("classify", {}),
            ("ideal-axioms", {"ideal_axioms": {"trials": 10, "dim": 5}}),
        ]:
            full = dict(CESARO_CFG)
            full.update(extra)
            cfg = write_cfg(tmp_path, full, name=f"{command}.json")
            out1 = tmp_path / f"{command}-1.json"
            out2 = tmp_path / f"{command}-2.json"
            assert run([command, "--config", cfg, "--out", out1]) == 0
            assert run([command, "--config", cfg, "--out", out2]) == 0
            assert out1.read_bytes() == out2.read_bytes()

    def test_env_seed_override(self, tmp_path, monkeypatch):
        cfg = write_cfg(tmp_path, dict(CESARO_CFG, ideal_axioms={"trials": 5, "dim": 4}))
        out = tmp_path / "axioms.json"
        monkeypatch.setenv("TERRASPEC_SEED", "12345")
        assert run(["ideal-axioms", "--config", cfg, "--out", out]) == 0
        assert json.loads(out.read_text())["seed"] == 12345
