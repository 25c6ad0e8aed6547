import json

import numpy as np
import pytest

from wpclust import ProjPoint, RatProjPoint, Weights, adjusted_rand_index
from wpclust.cli import main
from wpclust.io import (
    MalformedInputError,
    dumps_stable,
    load_labels,
    load_matrix,
    load_points,
    save_points,
)


class TestPointIO:
    def test_json_roundtrip_complex(self, tmp_path):
        w = Weights((2, 1))
        pts = [ProjPoint(w, [1 + 2j, 3]), ProjPoint(w, [0.5, -1j])]
        path = str(tmp_path / "pts.json")
        save_points(path, w, pts)
        kind, w2, loaded = load_points(path)
        assert kind == "complex"
        assert w2 == w
        for a, b in zip(pts, loaded):
            assert np.array_equal(a.coords, b.coords)

    def test_json_roundtrip_rational(self, tmp_path):
        w = Weights((2, 4, 6, 10))
        pts = [RatProjPoint(w, (1, -2, 3, 4)), RatProjPoint(w, (0, 0, 0, 5))]
        path = str(tmp_path / "pts.json")
        save_points(path, w, pts)
        kind, _, loaded = load_points(path)
        assert kind == "rational"
        assert [p.coords for p in loaded] == [(1, -2, 3, 4), (0, 0, 0, 5)]

    def test_csv_roundtrip_complex(self, tmp_path):
        w = Weights((2, 1))
        pts = [ProjPoint(w, [1 + 2j, 3 - 0.25j])]
        path = str(tmp_path / "pts.csv")
        save_points(path, w, pts)
        kind, w2, loaded = load_points(path)
        assert kind == "complex" and w2 == w
        assert np.array_equal(loaded[0].coords, pts[0].coords)

    def test_csv_roundtrip_rational(self, tmp_path):
        w = Weights((2, 3))
        path = str(tmp_path / "pts.csv")
        save_points(path, w, [RatProjPoint(w, (4, -8))])
        kind, _, loaded = load_points(path)
        assert kind == "rational"
        assert loaded[0].coords == (4, -8)

    def test_malformed_reports_context(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("# weights: 2 1\n1.0,2.0,3.0\n")
        with pytest.raises(MalformedInputError) as err:
            load_points(str(path))
        assert "line 2" in str(err.value)

    def test_missing_header(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("1,2\n")
        with pytest.raises(MalformedInputError):
            load_points(str(path))

    def test_bad_json_reported(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        with pytest.raises(MalformedInputError):
            load_points(str(path))


class TestStableJson:
    def test_seventeen_digits(self):
        text = dumps_stable({"x": 0.1})
        assert "0.10000000000000001" in text

    def test_sorted_and_deterministic(self):
        a = dumps_stable({"b": 1, "a": [1.5, {"z": True, "y": None}]})
        b = dumps_stable({"a": [1.5, {"y": None, "z": True}], "b": 1})
        assert a == b
        json.loads(a)  # stays valid JSON


class TestCli:
    def run(self, *argv):
        return main(list(argv))

    def test_gen_matrix_cluster_pipeline(self, tmp_path):
        pts = str(tmp_path / "pts.json")
        labels = str(tmp_path / "labels.csv")
        mat = str(tmp_path / "m.json")
        dendro = str(tmp_path / "d.json")
        part = str(tmp_path / "part.csv")
        nwk = str(tmp_path / "t.nwk")
        assert self.run(
            "gen", "--space", "2,1", "--clusters", "3", "--per-cluster", "8",
            "--spread", "0.01", "--seed", "7", "--out", pts, "--labels-out", labels,
        ) == 0
        assert self.run(
            "matrix", "--in", pts, "--out", mat, "--metric", "chord",
        ) == 0
        assert self.run(
            "cluster", "--in", mat, "--out", dendro, "--linkage", "single",
            "--cut-k", "3", "--partition-out", part, "--newick", nwk,
        ) == 0
        truth = load_labels(labels)
        got = load_labels(part)
        assert adjusted_rand_index(got, truth) == 1.0
        assert open(nwk).read().strip().endswith(";")
        m = load_matrix(mat)
        assert m.n == 24

    def test_matrix_thread_invariance(self, tmp_path):
        # same invocation target: only --threads varies, outputs identical
        pts = str(tmp_path / "pts.json")
        mat = str(tmp_path / "m.json")
        self.run("gen", "--space", "2,1", "--clusters", "2", "--per-cluster", "5",
                 "--spread", "0.05", "--seed", "1", "--out", pts)
        self.run("matrix", "--in", pts, "--out", mat, "--metric", "dissimilarity",
                 "--threads", "1")
        serial = open(mat).read()
        self.run("matrix", "--in", pts, "--out", mat, "--metric", "dissimilarity",
                 "--threads", "4")
        assert open(mat).read() == serial

    def test_dist_identical_points(self, tmp_path, capsys):
        pts = str(tmp_path / "pts.json")
        w = Weights((2, 1))
        p = ProjPoint(w, [1 + 1j, 2])
        save_points(pts, w, [p, p])
        assert self.run("dist", "--in", pts, "--i", "0", "--j", "1",
                        "--metric", "finsler", "--segments", "4", "--iters", "20",
                        "--multistarts", "1") == 0
        out = capsys.readouterr().out.strip()
        assert float(out.splitlines()[-1]) <= 1e-8

    def test_cut_command(self, tmp_path):
        pts = str(tmp_path / "pts.json")
        mat = str(tmp_path / "m.json")
        dendro = str(tmp_path / "d.json")
        part = str(tmp_path / "p.csv")
        self.run("gen", "--space", "2,1", "--clusters", "2", "--per-cluster", "6",
                 "--spread", "0.01", "--seed", "3", "--out", pts)
        self.run("matrix", "--in", pts, "--out", mat, "--metric", "chord")
        self.run("cluster", "--in", mat, "--out", dendro, "--linkage", "average")
        assert self.run("cut", "--in", dendro, "--k", "2", "--out", part) == 0
        assert len(set(load_labels(part))) == 2

    def test_normalize_and_height(self, tmp_path, capsys):
        pts = str(tmp_path / "r.json")
        out = str(tmp_path / "n.json")
        w = Weights((2, 3))
        save_points(pts, w, [RatProjPoint(w, (4, 8)), RatProjPoint(w, (12, 8))])
        assert self.run("normalize", "--mode", "rational", "--in", pts, "--out", out) == 0
        _, _, normed = load_points(out)
        assert [p.coords for p in normed] == [(1, 1), (3, 1)]
        capsys.readouterr()
        assert self.run("height", "--in", out) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines[0] == "index,height"
        assert lines[1] == "0,1"

    def test_pca_command(self, tmp_path):
        pts = str(tmp_path / "pts.json")
        out = str(tmp_path / "pca.json")
        self.run("gen", "--space", "2,4,6,10", "--clusters", "2", "--per-cluster", "6",
                 "--spread", "0.1", "--seed", "4", "--out", pts)
        assert self.run("pca", "--in", pts, "--k", "2", "--out", out) == 0
        obj = json.load(open(out))
        assert len(obj["eigenvalues"]) == 4
        assert len(obj["components"]) == 2

    def test_scan_triangle_command(self, tmp_path):
        pts = str(tmp_path / "pts.json")
        rep = str(tmp_path / "scan.json")
        self.run("gen", "--space", "2,1", "--clusters", "2", "--per-cluster", "4",
                 "--spread", "0.2", "--seed", "5", "--out", pts)
        assert self.run("scan-triangle", "--in", pts, "--out", rep,
                        "--metric", "chord", "--trials", "50", "--seed", "1") == 0
        obj = json.load(open(rep))
        assert obj["trials"] == 50
        assert "max_ratio" in obj and "violations" in obj

    def test_bench_counts(self, tmp_path):
        out = str(tmp_path / "bench.json")
        assert self.run("bench", "--metrics", "chord,finsler", "--n", "50",
                        "--seed", "2", "--out", out, "--segments", "4",
                        "--iters", "15", "--multistarts", "1") == 0
        obj = json.load(open(out))
        for name in ("chord", "finsler"):
            assert obj["metrics"][name]["evaluations"] == 1225
            assert obj["metrics"][name]["seconds"] >= 0.0
        assert "chord|finsler" in obj["agreement"]

    def test_gen_moduli(self, tmp_path):
        pts = str(tmp_path / "mod.json")
        assert self.run("gen", "--moduli-count", "25", "--height-bound", "2",
                        "--seed", "6", "--out", pts) == 0
        kind, w, loaded = load_points(pts)
        assert kind == "rational"
        assert w == Weights((2, 4, 6, 10))
        assert len(loaded) == 25

    def test_metric_kind_mismatch_is_usage_error(self, tmp_path):
        pts = str(tmp_path / "r.json")
        w = Weights((2, 3))
        save_points(pts, w, [RatProjPoint(w, (1, 1)), RatProjPoint(w, (1, 2))])
        assert self.run("dist", "--in", pts, "--i", "0", "--j", "1",
                        "--metric", "finsler") == 2

    def test_missing_file_is_computation_error(self, tmp_path):
        assert self.run("matrix", "--in", str(tmp_path / "nope.json"),
                        "--out", str(tmp_path / "m.json"), "--metric", "chord") == 1

    def test_identical_invocations_bitwise_identical(self, tmp_path):
        out = str(tmp_path / "a.json")
        argv = ["gen", "--space", "2,1", "--clusters", "2", "--per-cluster", "4",
                "--spread", "0.05", "--seed", "9", "--out", out]
        self.run(*argv)
        first = open(out).read()
        self.run(*argv)
        assert open(out).read() == first
