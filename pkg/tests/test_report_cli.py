"""Reports, emission determinism, CLI surface and exit codes."""
import json
import pathlib
import subprocess
import sys

import pytest

from fraclie import PipelineConfig, emit, run_pipeline
from conftest import DEMOS, TELE_POW_GEN, ZK_SRC

NO_SYMMETRY_SRC = "alpha a; space x; dep u; Dt^a(u) = Dx(u) + x*u^3 + u^2 + u^4;"


def run_cli(*args, cwd=None):
    return subprocess.run([sys.executable, "-m", "fraclie.cli", *args],
                          capture_output=True, text=True, cwd=cwd or str(DEMOS.parent))


class TestReport:
    def test_json_schema_keys(self, zk):
        r = run_pipeline(ZK_SRC)
        payload = json.loads(emit(r, "json"))
        assert payload["schema"] == 1
        assert set(payload) == {"schema", "system", "determining", "assumptions",
                                "basis", "reductions", "checks"}
        assert payload["basis"]["dimension"] == 3
        assert len(payload["basis"]["generators"]) == 3
        assert all(g["residuals_zero"] for g in payload["basis"]["generators"])

    def test_json_byte_identical_across_runs(self):
        r1 = run_pipeline(ZK_SRC, PipelineConfig(reduce=True))
        r2 = run_pipeline(ZK_SRC, PipelineConfig(reduce=True))
        assert emit(r1, "json") == emit(r2, "json")

    def test_empty_basis_serializes(self):
        r = run_pipeline(NO_SYMMETRY_SRC)
        payload = json.loads(emit(r, "json"))
        assert payload["basis"]["generators"] == []

    def test_same_report_emitted_twice_is_identical(self):
        r = run_pipeline(ZK_SRC)
        assert emit(r, "json") == emit(r, "json")
        assert emit(r, "latex") == emit(r, "latex")

    def test_text_contains_sections(self):
        r = run_pipeline(ZK_SRC)
        text = emit(r, "text").decode()
        for section in ("== system ==", "== determining system", "== basis",
                        "elapsed:"):
            assert section in text

    def test_latex_standalone(self):
        r = run_pipeline(ZK_SRC)
        tex = emit(r, "latex").decode()
        assert tex.startswith("\\documentclass")
        assert tex.rstrip().endswith("\\end{document}")

    def test_reductions_present(self):
        r = run_pipeline(ZK_SRC, PipelineConfig(reduce=True))
        kinds = sorted(red["type"] for red in r.reductions)
        assert kinds == ["scaling", "translation", "translation"]

    def test_verify_generator_check(self, tele_pow):
        src = (DEMOS / "telegraph_power.fpde").read_text()
        r = run_pipeline(src, PipelineConfig(verify_generator_text=TELE_POW_GEN))
        assert r.checks["verify_generator"]["ok"] is True

    def test_oracle_check(self):
        r = run_pipeline(ZK_SRC, PipelineConfig(oracle_check=True))
        assert r.checks["oracle"]["pass"] is True
        assert r.checks["oracle"]["worst_abs_error"] < 1e-8

    def test_custom_h_templates(self):
        r = run_pipeline(ZK_SRC, PipelineConfig(h_templates=("t^(a-1)", "1")))
        assert r.basis.dimension == 3


class TestCli:
    def test_analyze_zk_exit_zero(self):
        out = run_cli("analyze", "demos/zk.fpde", "--emit", "json")
        assert out.returncode == 0, out.stderr
        payload = json.loads(out.stdout)
        assert payload["basis"]["dimension"] == 3

    def test_exit_two_on_trivial_basis(self, tmp_path):
        f = tmp_path / "nosym.fpde"
        f.write_text(NO_SYMMETRY_SRC)
        out = run_cli("analyze", str(f))
        assert out.returncode == 2, out.stdout + out.stderr

    def test_exit_one_on_error(self, tmp_path):
        f = tmp_path / "bad.fpde"
        f.write_text("alpha a; space x; dep u; Dt^a(u) = ;")
        out = run_cli("analyze", str(f))
        assert out.returncode == 1
        assert "error" in out.stderr

    def test_exit_one_on_missing_file(self):
        out = run_cli("analyze", "no-such-file.fpde")
        assert out.returncode == 1

    def test_verify_generator_flag(self):
        out = run_cli("analyze", "demos/telegraph_power.fpde",
                      "--verify-generator", "demos/telegraph_power.gen",
                      "--emit", "json")
        assert out.returncode == 0, out.stderr
        payload = json.loads(out.stdout)
        assert payload["checks"]["verify_generator"]["ok"] is True

    def test_reduce_flag_and_branch(self):
        out = run_cli("analyze", "demos/hs.fpde", "--reduce", "--branch", "zero",
                      "--emit", "json")
        assert out.returncode == 0, out.stderr
        payload = json.loads(out.stdout)
        assert any(r["type"] == "scaling" for r in payload["reductions"])

    def test_deterministic_json_output(self):
        out1 = run_cli("analyze", "demos/zk.fpde", "--emit", "json")
        out2 = run_cli("analyze", "demos/zk.fpde", "--emit", "json")
        assert out1.stdout == out2.stdout
