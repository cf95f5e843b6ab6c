"""CLI commands, report schema, exit codes, determinism."""

import json
import os

from bbsolve.cli import (Options, analyze, cmd_classify, cmd_residues,
                         cmd_selftest, cmd_series, main, render_json)
from minischema import validate

SCHEMA = json.load(open(os.path.join(os.path.dirname(__file__), "..", "src",
                                     "bbsolve", "schemas",
                                     "analysis_report.schema.json")))


class TestAnalyze:
    def test_exit_codes(self):
        _rep, code = analyze("y'' = 6*y^2", Options(no_classify=True))
        assert code == 0
        _rep, code = analyze("y'' = y^4")
        assert code == 2
        _rep, code = analyze("y'' = 4*y^3 + 1/y")
        assert code == 2

    def test_schema_validation(self):
        for text in ("y'' = 6*y^2", "y'' = y^4", "y'' = 4*y^3 + 1/y",
                     "y''' = y", "P: p^2 - 4*q^3 + 4*q ; k=1"):
            rep, _ = analyze(text)
            validate(rep, SCHEMA)

    def test_report_carries_assumption_notes(self):
        rep, _ = analyze("y'' = 6*y^2", Options(no_classify=True))
        assert any("irreducibility" in a for a in rep["assumptions"])
        rep, _ = analyze("P: p^2 - 4*q^3 + 4*q ; k=1", Options(no_classify=True))
        assert any("genus-0" in a for a in rep["assumptions"])

    def test_squarefree_warning(self):
        rep, _ = analyze("P: p^2 - 2*p*q + q^2 ; k=1", Options(no_classify=True))
        assert any("squarefree" in w for w in rep["warnings"])

    def test_every_numeric_value_carries_error(self):
        rep, _ = analyze("y'' = 4*y^3", Options(no_classify=True))
        for s in rep["series"]:
            for cj in s["coeffs"]:
                assert ("rat" in cj) or ("err" in cj) or ("free" in cj)

    def test_deterministic_json(self):
        a, _ = analyze("y'' = 6*y^2 - 2")
        b, _ = analyze("y'' = 6*y^2 - 2")
        assert render_json(a) == render_json(b)


class TestCommands:
    def test_series_pinned_vs_free(self):
        out, code = cmd_series("y'' = 6*y^2", Options(c=0, N=12, fmt="json"))
        data = json.loads(out)
        assert code == 0
        germ = data["series"][0]
        assert germ["resonance"] == "pinned"
        # c = 0 gives the exact monomial: all tail coefficients zero
        assert all(c == {"rat": "0"} or c == {"rat": "1"} for c in germ["coeffs"])
        out, _ = cmd_series("y'' = 6*y^2", Options(c=None, fmt="json"))
        data = json.loads(out)
        assert data["series"][0]["resonance"] == "free"
        assert data["series"][0]["coeffs"][-1] == {"free": True}

    def test_series_first_order(self):
        out, _ = cmd_series("y' = y^2", Options(fmt="json"))
        data = json.loads(out)
        germ = data["series"][0]
        assert germ["n"] == 1 and germ["resonance"] == "none"
        assert germ["coeffs"][0] == {"rat": "-1"}

    def test_residues_table(self):
        out, _ = cmd_residues("y'' = 4*y^3 + 1/y", Options(fmt="json"))
        data = json.loads(out)
        assert data["exact"] is False
        places = {r["place"]: r for r in data["residues"]}
        assert places["infinity"]["value"] == {"rat": "-1"}
        assert places["q=0"]["value"] == {"rat": "1"}

    def test_classify_command(self):
        out, code = cmd_classify("y' = y^2", Options(fmt="json"))
        data = json.loads(out)
        assert data["classification"]["label"] == "rational"
        assert code == 0

    def test_selftest_passes(self):
        out, code = cmd_selftest(Options())
        assert code == 0
        assert all(line.startswith("PASS") for line in out.splitlines())


class TestMain:
    def test_main_text(self, capsys):
        code = main(["analyze", "y'' = y^4", "--no-classify"])
        out = capsys.readouterr().out
        assert "kappa=4" in out.replace(" ", "") or "kappa 4" in out
        assert code == 0   # no classification -> no screening verdict exit code

    def test_main_json_exit2(self, capsys):
        code = main(["analyze", "y'' = y^4", "--format", "json"])
        data = json.loads(capsys.readouterr().out)
        assert data["classification"]["label"] == "entire_only"
        assert code == 2

    def test_main_error_path(self, capsys):
        code = main(["analyze", "y'' = sin(y)"])
        assert code == 1
        assert "error" in capsys.readouterr().err

    def test_env_precision(self, capsys, monkeypatch):
        monkeypatch.setenv("BBSOLVE_PRECISION", "192")
        code = main(["analyze", "y'' = y^4", "--format", "json", "--no-classify"])
        data = json.loads(capsys.readouterr().out)
        assert data["settings"]["precision_bits"] == 192
        monkeypatch.setenv("BBSOLVE_PRECISION", "192")
        code = main(["analyze", "y'' = y^4", "--format", "json",
                     "--no-classify", "--precision", "320"])
        data = json.loads(capsys.readouterr().out)
        assert data["settings"]["precision_bits"] == 320


class TestDepthDefaults:
    def test_large_kappa_reaches_residue_term(self):
        # kappa far above any admissible order: the default depth must still
        # expose the q^-1 coefficient for the residue table
        rep, code = analyze("y' = y^20", Options(no_classify=True))
        assert rep["branches"][0]["residue"] == {"rat": "0"}
        rep, code = analyze("P: p^3 - q^22 ; k=2", Options(no_classify=True))
        assert rep["branches"][0]["residue"] == {"rat": "0"}

    def test_series_deepen_for_large_N(self):
        out, _ = cmd_series("P: p^2 - 4*q^3 + 4*q ; k=1",
                            Options(N=40, fmt="json"))
        data = json.loads(out)
        assert len(data["series"][0]["coeffs"]) == 41
