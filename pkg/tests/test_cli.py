import shlex
import subprocess
import sys

import numpy as np
import pytest

from viewplan.cli import main
from viewplan.io import read_ppm, read_report, write_ppm
from viewplan.renderer import ColorImage

INITIAL4 = "r_000,r_001,r_002,r_003"


def run(argv):
    return main([str(a) for a in argv])


def report_value(path, key):
    return dict(read_report(path))[key]


@pytest.fixture
def fx(fixture_paths):
    return {
        "transforms": str(fixture_paths["transforms"]),
        "embeddings": str(fixture_paths["embeddings"]),
        "round_template": str(fixture_paths["rounds"][0]).replace("round1", "round{round}"),
    }


class TestSelect:
    def test_fvs_and_greedy_pixel_agree(self, fx, tmp_path):
        a, b = tmp_path / "a.txt", tmp_path / "b.txt"
        base = ["select", "--transforms", fx["transforms"], "--initial", INITIAL4,
                "--count", 4, "--seed", 3, "--out"]
        assert run(base[:-1] + ["--strategy", "fvs", "--out", a]) == 0
        assert run(base[:-1] + ["--strategy", "greedy-pixel", "--out", b]) == 0
        assert report_value(a, "roster") == report_value(b, "roster")

    def test_semantic_strategy_requires_embeddings(self, fx, tmp_path):
        out = tmp_path / "r.txt"
        code = run(["select", "--transforms", fx["transforms"], "--initial", INITIAL4,
                    "--strategy", "greedy-semantic", "--count", 4, "--out", out])
        assert code == 2

    def test_report_flags_reproduce_run(self, fx, tmp_path):
        out1, out2 = tmp_path / "r1.txt", tmp_path / "r2.txt"
        assert run(["select", "--transforms", fx["transforms"], "--embeddings", fx["embeddings"],
                    "--initial", INITIAL4, "--strategy", "s-then-p", "--count", 6,
                    "--seed", 11, "--out", out1]) == 0
        flags = shlex.split(report_value(out1, "flags"))
        assert run(["select", *flags, "--out", out2]) == 0
        assert out1.read_bytes() == out2.read_bytes()

    def test_unknown_initial_id(self, fx, tmp_path):
        code = run(["select", "--transforms", fx["transforms"], "--initial", "r_999",
                    "--strategy", "fvs", "--count", 2, "--out", tmp_path / "r.txt"])
        assert code == 2

    def test_missing_file_is_input_error(self, tmp_path):
        code = run(["select", "--transforms", tmp_path / "nope.json", "--initial", "a",
                    "--strategy", "fvs", "--count", 1, "--out", tmp_path / "r.txt"])
        assert code == 2


class TestActiveLoop:
    def test_setting_one_roster(self, fx, tmp_path):
        out = tmp_path / "loop.txt"
        assert run(["active-loop", "--schedule", "4,4,4", "--transforms", fx["transforms"],
                    "--round-embeddings", fx["round_template"], "--initial", INITIAL4,
                    "--strategy", "p-then-s", "--seed", 2, "--out", out]) == 0
        roster = report_value(out, "roster").split()
        assert len(roster) == 20
        assert len(set(roster)) == 20

    def test_setting_two_roster(self, fx, tmp_path):
        out = tmp_path / "loop2.txt"
        assert run(["active-loop", "--schedule", "2,2,4", "--transforms", fx["transforms"],
                    "--initial", "r_000,r_001", "--strategy", "fvs", "--seed", 2,
                    "--out", out]) == 0
        roster = report_value(out, "roster").split()
        assert len(roster) == 10

    def test_schedule_mismatch_is_input_error(self, fx, tmp_path):
        code = run(["active-loop", "--schedule", "3,4,4", "--transforms", fx["transforms"],
                    "--initial", INITIAL4, "--strategy", "fvs", "--out", tmp_path / "r.txt"])
        assert code == 2

    def test_bad_schedule_string(self, fx, tmp_path):
        code = run(["active-loop", "--schedule", "4,4", "--transforms", fx["transforms"],
                    "--initial", INITIAL4, "--strategy", "fvs", "--out", tmp_path / "r.txt"])
        assert code == 2

    def test_report_flags_reproduce_run(self, fx, tmp_path):
        out1, out2 = tmp_path / "l1.txt", tmp_path / "l2.txt"
        assert run(["active-loop", "--schedule", "2,2,2", "--transforms", fx["transforms"],
                    "--round-embeddings", fx["round_template"], "--initial", "r_000,r_001",
                    "--strategy", "weighted", "--lambda", "0.1", "--seed", 9,
                    "--out", out1]) == 0
        flags = shlex.split(report_value(out1, "flags"))
        assert run(["active-loop", *flags, "--out", out2]) == 0
        assert out1.read_bytes() == out2.read_bytes()


class TestOracle:
    def test_ratio_reported(self, fx, tmp_path):
        out = tmp_path / "oracle.txt"
        assert run(["oracle", "--transforms", fx["transforms"], "--initial", INITIAL4,
                    "--count", 3, "--out", out]) == 0
        pairs = dict(read_report(out))
        ratio = float(pairs["ratio"])
        assert 0.5 <= ratio <= 1.0
        assert float(pairs["delta-star"]) >= float(pairs["greedy-delta-tilde"])

    def test_flags_reproduce(self, fx, tmp_path):
        out1, out2 = tmp_path / "o1.txt", tmp_path / "o2.txt"
        assert run(["oracle", "--transforms", fx["transforms"], "--initial", INITIAL4,
                    "--count", 2, "--metric", "squared", "--out", out1]) == 0
        flags = shlex.split(report_value(out1, "flags"))
        assert run(["oracle", *flags, "--out", out2]) == 0
        assert out1.read_bytes() == out2.read_bytes()


class TestVerifyCommands:
    def test_lemma1_small_pass(self, tmp_path):
        out = tmp_path / "l1.txt"
        code = run(["verify-lemma1", "--pairs", 6, "--ray-samples", 20000, "--quad", 16,
                    "--seed", 4, "--tol", 0.05, "--out", out])
        assert code == 0
        assert report_value(out, "status") == "pass"

    def test_lemma1_unreachable_tolerance_fails(self, tmp_path):
        out = tmp_path / "l1f.txt"
        code = run(["verify-lemma1", "--pairs", 6, "--ray-samples", 2000, "--quad", 8,
                    "--seed", 4, "--tol", 1e-12, "--out", out])
        assert code == 1
        assert report_value(out, "status") == "fail"

    def test_lemma2_pass(self, tmp_path):
        out = tmp_path / "l2.txt"
        code = run(["verify-lemma2", "--instances", 40, "--pool", 10, "--count", 3,
                    "--seed", 9, "--out", out])
        assert code == 0
        assert float(report_value(out, "min-ratio")) >= 0.5

    def test_lemma3_pass(self, tmp_path):
        out = tmp_path / "l3.txt"
        code = run(["verify-lemma3", "--scene", "gradient", "--pairs", 20, "--seed", 6,
                    "--out", out])
        assert code == 0
        assert float(report_value(out, "max-ratio")) <= float(report_value(out, "bound"))


class TestRender:
    def test_render_writes_readable_ppm(self, fx, tmp_path):
        out = tmp_path / "img.ppm"
        assert run(["render", "--scene", "gradient", "--pose-index", 0,
                    "--transforms", fx["transforms"], "--size", "16x12",
                    "--samples", 16, "--out", out]) == 0
        img = read_ppm(out)
        assert (img.width, img.height) == (16, 12)

    def test_bad_size_or_index(self, fx, tmp_path):
        assert run(["render", "--scene", "ball", "--pose-index", 0, "--transforms",
                    fx["transforms"], "--size", "16", "--out", tmp_path / "x.ppm"]) == 2
        assert run(["render", "--scene", "ball", "--pose-index", 500, "--transforms",
                    fx["transforms"], "--size", "8x8", "--out", tmp_path / "x.ppm"]) == 2


class TestLosses:
    def test_table_values(self, fx, tmp_path):
        a = ColorImage.from_array(np.zeros((1, 1, 3)))
        b = ColorImage.from_array(np.full((1, 1, 3), 51.0 / 255.0))
        write_ppm(a, tmp_path / "r_000.ppm")
        write_ppm(b, tmp_path / "r_001.ppm")
        out = tmp_path / "losses.csv"
        code = run(["losses", "--images", f"{tmp_path}/r_000.ppm,{tmp_path}/r_001.ppm",
                    "--embeddings", fx["embeddings"], "--pairs", "r_000:r_001", "--out", out])
        assert code == 0
        rows = out.read_text().strip().splitlines()
        assert rows[0] == "metric,id_a,id_b,value"
        table = {}
        for line in rows[1:]:
            metric, ia, ib, value = line.split(",")
            table[metric] = float(value)
        d = 51.0 / 255.0
        assert table["l_micro_pairwise"] == pytest.approx(np.sqrt(3 * d * d), rel=1e-12)
        assert table["l_nerf"] == pytest.approx(3 * d * d, rel=1e-12)
        assert table["l_micro_variance"] == pytest.approx(((d / 2) ** 2), rel=1e-12)
        assert table["l_macro"] > 0.0

    def test_unknown_pair_id(self, tmp_path):
        img = ColorImage.from_array(np.zeros((1, 1, 3)))
        write_ppm(img, tmp_path / "a.ppm")
        code = run(["losses", "--images", f"{tmp_path}/a.ppm", "--pairs", "a:b",
                    "--out", tmp_path / "l.csv"])
        assert code == 2


class TestEntrypoint:
    def test_module_invocation(self, fx, tmp_path):
        out = tmp_path / "cli.txt"
        proc = subprocess.run(
            [sys.executable, "-m", "viewplan.cli", "verify-lemma2", "--instances", "5",
             "--pool", "8", "--count", "2", "--seed", "1", "--out", str(out)],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0
        assert out.exists()

    def test_missing_subcommand_exits_2(self):
        proc = subprocess.run(
            [sys.executable, "-m", "viewplan.cli"], capture_output=True, text=True
        )
        assert proc.returncode == 2
