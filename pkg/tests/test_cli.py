"""CLI: document validation, output formats, manifests, exit codes."""

import json
import math

import numpy as np
import pytest

from harmonicq import cli
from harmonicq.networks import BOLTZMANN


def write_doc(tmp_path, name, payload):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return str(path)


def rc_document(units="si", **overrides):
    circuit = {
        "r1": 1e8,
        "r2": 1e8,
        "c": 1e-10,
        "c1": 6.8e-10,
        "c2": 4.2e-10,
        "t1": 88.0,
        "t2": 296.0,
    }
    circuit.update(overrides)
    return {"rc_circuit": circuit, "units": units, "seed": 7}


def network_document():
    return {
        "network": {
            "masses": [1.0, 2.0, 0.7],
            "frequencies": [1.1, 0.9, 1.3],
            "coupling": [[0.0, -0.4, 0.0], [-0.4, 0.0, -0.3], [0.0, -0.3, 0.0]],
            "gammas": [0.8, 0.0, 1.2],
            "temperatures": [1.0, 1.0, 1.0],
            "subnetwork": [1],
            "observable": "kinetic",
        },
        "units": "reduced",
        "seed": 3,
    }


class TestDocumentValidation:
    def test_unknown_top_level_key(self, tmp_path):
        path = write_doc(tmp_path, "bad.json", {"vg": {"lambdas": [1.0]}, "units": "si", "extra": 1})
        code = cli.main(["vg-density", "--spec", path, "--out", str(tmp_path / "o.csv"), "--grid", "1:2:3"])
        assert code == cli.EXIT_CONFIG

    def test_unknown_section_key(self, tmp_path):
        doc = rc_document()
        doc["rc_circuit"]["bogus"] = 1.0
        path = write_doc(tmp_path, "bad.json", doc)
        assert cli.main(["rc", "--spec", path, "--out", str(tmp_path / "o.json")]) == cli.EXIT_CONFIG

    def test_missing_units(self, tmp_path):
        path = write_doc(tmp_path, "bad.json", {"vg": {"lambdas": [1.0]}})
        assert (
            cli.main(["vg-density", "--spec", path, "--out", str(tmp_path / "o.csv"), "--grid", "1:2:3"])
            == cli.EXIT_CONFIG
        )

    def test_units_flag_contradiction(self, tmp_path):
        path = write_doc(tmp_path, "rc.json", rc_document(units="si"))
        code = cli.main(
            ["rc", "--spec", path, "--out", str(tmp_path / "o.json"), "--units", "reduced"]
        )
        assert code == cli.EXIT_CONFIG

    def test_invalid_physical_values(self, tmp_path):
        path = write_doc(tmp_path, "rc.json", rc_document(r1=-1.0))
        assert cli.main(["rc", "--spec", path, "--out", str(tmp_path / "o.json")]) == cli.EXIT_CONFIG

    def test_trivial_selection_rejected(self, tmp_path):
        doc = network_document()
        doc["network"]["coupling"] = [[0.0, 0.0, 0.0]] * 3
        path = write_doc(tmp_path, "net.json", doc)
        assert cli.main(["network", "--spec", path, "--out", str(tmp_path / "o.json")]) == cli.EXIT_CONFIG


class TestVgDensity:
    def test_laplace_column(self, tmp_path):
        path = write_doc(tmp_path, "vg.json", {"vg": {"lambdas": [1.0, 1.0]}, "units": "reduced"})
        out = tmp_path / "density.csv"
        code = cli.main(["vg-density", "--spec", path, "--out", str(out), "--grid=-4:4:17"])
        assert code == cli.EXIT_OK
        header = out.read_text().splitlines()[0]
        assert header.startswith("# ")
        data = np.loadtxt(out, delimiter=",")
        assert np.allclose(data[:, 1], np.exp(-np.abs(data[:, 0])) / 2.0, rtol=1e-10)
        manifest = json.loads((tmp_path / "density.csv.manifest.json").read_text())
        assert manifest["command"] == "vg-density"
        assert manifest["written_files"] == [str(out)]

    def test_matrix_pair_input(self, tmp_path):
        doc = {
            "vg": {"l": [[0.5, 0.0], [0.0, 0.5]], "m": [[1.0, 0.0], [0.0, 1.0]]},
            "units": "reduced",
        }
        path = write_doc(tmp_path, "vg.json", doc)
        out = tmp_path / "d.csv"
        assert cli.main(["vg-density", "--spec", path, "--out", str(out), "--grid", "0:2:5"]) == cli.EXIT_OK

    def test_one_dim_grid_through_origin_fails(self, tmp_path):
        path = write_doc(tmp_path, "vg.json", {"vg": {"lambdas": [1.0]}, "units": "reduced"})
        code = cli.main(
            ["vg-density", "--spec", path, "--out", str(tmp_path / "d.csv"), "--grid=-1:1:3"]
        )
        assert code == cli.EXIT_NUMERICAL

    def test_full_roundtrip_precision(self, tmp_path):
        path = write_doc(tmp_path, "vg.json", {"vg": {"lambdas": [0.7, 1.9]}, "units": "reduced"})
        out = tmp_path / "d.csv"
        cli.main(["vg-density", "--spec", path, "--out", str(out), "--grid", "0:1:3"])
        from harmonicq.vargamma import VarianceGammaLaw

        data = np.loadtxt(out, delimiter=",")
        law = VarianceGammaLaw([0.7, 1.9])
        assert data[1, 1] == law.density(data[1, 0])


class TestRcCommand:
    def test_equilibrium_report(self, tmp_path):
        path = write_doc(tmp_path, "rc.json", rc_document(t1=296.0, t2=296.0))
        out = tmp_path / "rc.json.out"
        assert cli.main(["rc", "--spec", path, "--out", str(out)]) == cli.EXIT_OK
        report = json.loads(out.read_text())
        kbt = BOLTZMANN * 296.0
        assert report["lambda_minus"] == pytest.approx(kbt, rel=1e-12)
        assert report["lambda_plus"] == pytest.approx(kbt, rel=1e-12)
        assert report["spectral_abscissa"] < -12.0
        assert report["controllable"] is True

    def test_nonequilibrium_lambda_and_curves(self, tmp_path):
        path = write_doc(tmp_path, "rc.json", rc_document())
        out = tmp_path / "rc.out"
        code = cli.main(
            [
                "rc",
                "--spec",
                path,
                "--out",
                str(out),
                "--grid=-10:10:41",
                "--count",
                "20000",
                "--t",
                "0.2",
            ]
        )
        assert code == cli.EXIT_OK
        report = json.loads(out.read_text())
        assert report["big_lambda"] == pytest.approx(1.0 / 6.5, rel=1e-12)
        assert report["mc"]["ks_distance"] <= 0.02
        curve = np.loadtxt(f"{out}.density.csv", delimiter=",")
        assert curve.shape == (41, 2)
        hist = np.loadtxt(f"{out}.hist.csv", delimiter=",")
        assert hist.shape[1] == 3

    def test_count_without_t(self, tmp_path):
        path = write_doc(tmp_path, "rc.json", rc_document())
        code = cli.main(["rc", "--spec", path, "--out", str(tmp_path / "o"), "--count", "10"])
        assert code == cli.EXIT_CONFIG


class TestNetworkCommand:
    def test_equilibrium_report(self, tmp_path):
        path = write_doc(tmp_path, "net.json", network_document())
        out = tmp_path / "net.out"
        assert cli.main(["network", "--spec", path, "--out", str(out)]) == cli.EXIT_OK
        report = json.loads(out.read_text())
        assert np.allclose(report["kinetic_lambdas"], 1.0, rtol=1e-10)
        assert report["theta_schur"] > 0.0
        assert report["total_lambda_max_schur"] == pytest.approx(
            max(report["total_lambdas"]), rel=1e-8
        )
        assert report["kinetic_rate_slope"] == pytest.approx(1.0, rel=1e-10)


class TestLdpCommand:
    def test_scan_csv(self, tmp_path):
        doc = {
            "rc_circuit": {
                "r1": 1.0,
                "r2": 1.0,
                "c": 0.2,
                "c1": 0.7,
                "c2": 0.7,
                "t1": 1.0,
                "t2": 1.0,
            },
            "units": "reduced",
            "seed": 5,
        }
        path = write_doc(tmp_path, "iso.json", doc)
        out = tmp_path / "ldp.csv"
        code = cli.main(
            [
                "ldp",
                "--spec",
                path,
                "--out",
                str(out),
                "--grid",
                "1:2",
                "--t-list",
                "2,4",
                "--count",
                "100000",
            ]
        )
        assert code == cli.EXIT_OK
        data = np.loadtxt(out, delimiter=",")
        assert data.shape == (2, 8)
        assert np.allclose(data[:, 6], -1.0)
        assert np.all(data[:, 3] <= 0.0)

    def test_requires_model_document(self, tmp_path):
        path = write_doc(tmp_path, "vg.json", {"vg": {"lambdas": [1.0]}, "units": "reduced"})
        code = cli.main(
            ["ldp", "--spec", path, "--out", str(tmp_path / "o.csv"), "--grid", "1:2", "--t-list", "1"]
        )
        assert code == cli.EXIT_CONFIG


class TestSelftest:
    def test_clean_pass(self, capsys):
        assert cli.main(["selftest"]) == cli.EXIT_OK
        lines = [l for l in capsys.readouterr().out.splitlines() if l.startswith("selftest:")]
        assert len(lines) == 7
        assert all(" ok " in line for line in lines)

    def test_tightened_tolerances_fail(self, capsys):
        code = cli.main(["selftest", "--tolerance-scale", "1e-9"])
        assert code in (cli.EXIT_NUMERICAL, cli.EXIT_STATISTICAL)
        assert code != cli.EXIT_OK
