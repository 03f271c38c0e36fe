import json

import numpy as np
import pytest
from click.testing import CliRunner

from csinterlace.cli import main
from csinterlace.interlace import SparseSpectrum


@pytest.fixture
def runner():
    return CliRunner()


class TestBuildInterlace:
    def test_stdout_json(self, runner):
        result = runner.invoke(main, ["build-interlace", "--scheme", "noncoherent"])
        assert result.exit_code == 0, result.output
        payload = json.loads(result.output)
        spectrum = SparseSpectrum.from_json_dict(payload)
        assert spectrum.indices.size == 120
        assert spectrum.grid_size == 1092

    def test_file_output_with_manifest(self, runner, tmp_path):
        out = tmp_path / "interlace.json"
        result = runner.invoke(
            main,
            ["build-interlace", "--scheme", "coherent", "--bits", "2",
             "--value", "3", "--out", str(out)],
        )
        assert result.exit_code == 0, result.output
        assert out.exists()
        manifest = json.loads((tmp_path / "interlace.json.manifest.json").read_text())
        assert manifest["command"] == "build-interlace"
        assert manifest["params"]["value"] == 3

    def test_zc_scheme(self, runner):
        result = runner.invoke(main, ["build-interlace", "--scheme", "zc", "--seq-index", "3"])
        assert result.exit_code == 0
        payload = json.loads(result.output)
        values = [complex(re, im) for _, (re, im) in payload["entries"]]
        assert np.allclose(np.abs(values), 1.0)


class TestMetricSweeps:
    def test_eval_papr_coherent(self, runner, tmp_path):
        out = tmp_path / "papr.csv"
        result = runner.invoke(main, ["eval-papr", "--scheme", "coherent", "--out", str(out)])
        assert result.exit_code == 0, result.output
        lines = out.read_text().strip().splitlines()
        assert lines[0] == "scheme,seq_index,selector,papr_db,cm_db"
        assert len(lines) == 17  # header + 16 payload combinations
        worst = max(float(line.split(",")[3]) for line in lines[1:])
        assert worst <= 10 * np.log10(2.0) + 1e-6

    def test_eval_cm_cycling(self, runner, tmp_path):
        out = tmp_path / "cm.csv"
        result = runner.invoke(main, ["eval-cm", "--scheme", "cycling", "--out", str(out)])
        assert result.exit_code == 0, result.output
        assert len(out.read_text().strip().splitlines()) == 31

    def test_eval_xcorr_reference(self, runner, tmp_path):
        out = tmp_path / "xc.csv"
        ccdf_out = tmp_path / "xc_ccdf.csv"
        result = runner.invoke(
            main,
            ["eval-xcorr", "--set", "reference-c", "--out", str(out),
             "--ccdf-out", str(ccdf_out)],
        )
        assert result.exit_code == 0, result.output
        rows = out.read_text().strip().splitlines()[1:]
        rhos = [float(r.split(",")[2]) for r in rows]
        assert len(rhos) == 30 * 29
        assert max(rhos) <= 0.715
        assert ccdf_out.exists()


class TestEnumerateAndSearch:
    def test_enumerate_small(self, runner, tmp_path):
        out = tmp_path / "lib.json"
        result = runner.invoke(main, ["enumerate-gcps", "--length", "3", "--out", str(out)])
        assert result.exit_code == 0, result.output
        payload = json.loads(out.read_text())
        assert payload["count"] == 4

    def test_search_with_seed_file(self, runner, tmp_path):
        lib = tmp_path / "lib.json"
        runner.invoke(main, ["enumerate-gcps", "--length", "4", "--out", str(lib)])
        out = tmp_path / "sets.json"
        result = runner.invoke(
            main,
            ["search-sets", "--beta", "1.0", "--u", "16", "--k", "3",
             "--seed-file", str(lib), "--out", str(out)],
        )
        assert result.exit_code == 0, result.output
        payload = json.loads(out.read_text())
        assert payload["admitted"] == 3
        assert payload["verified"] is True
        assert payload["max_xcorr"]["first"] <= 1.0


class TestSimulateLink:
    def test_small_run(self, runner, tmp_path):
        out = tmp_path / "link.csv"
        result = runner.invoke(
            main,
            ["simulate-link", "--scheme", "single-rb-noncoherent", "--channel", "flat",
             "--snr-from", "0", "--snr-to", "2", "--snr-step", "2",
             "--trials", "200", "--calibration-trials", "3000", "--out", str(out)],
        )
        assert result.exit_code == 0, result.output
        lines = out.read_text().strip().splitlines()
        assert len(lines) == 3
        assert (tmp_path / "link.csv.manifest.json").exists()


class TestImportSequences:
    def test_valid_symbol_strings(self, runner, tmp_path):
        src = tmp_path / "seqs.json"
        src.write_text(json.dumps({"sequences": ["++ij", "+-+-"]}))
        out = tmp_path / "registered.json"
        result = runner.invoke(main, ["import-sequences", str(src), "--out", str(out)])
        assert result.exit_code == 0, result.output
        payload = json.loads(out.read_text())
        assert payload["count"] == 2 and payload["length"] == 4

    def test_complex_array_form(self, runner, tmp_path):
        src = tmp_path / "seqs.json"
        src.write_text(json.dumps({"sequences": [[[1.0, 0.0], [0.0, -1.0]]]}))
        out = tmp_path / "registered.json"
        result = runner.invoke(main, ["import-sequences", str(src), "--out", str(out)])
        assert result.exit_code == 0, result.output

    def test_empty_list_rejected(self, runner, tmp_path):
        src = tmp_path / "seqs.json"
        src.write_text(json.dumps({"sequences": []}))
        result = runner.invoke(main, ["import-sequences", str(src), "--out", str(tmp_path / "o.json")])
        assert result.exit_code != 0
        assert "empty" in result.output

    def test_zero_element_rejected(self, runner, tmp_path):
        src = tmp_path / "seqs.json"
        src.write_text(json.dumps({"sequences": [[[0.0, 0.0], [1.0, 0.0]]]}))
        result = runner.invoke(main, ["import-sequences", str(src), "--out", str(tmp_path / "o.json")])
        assert result.exit_code != 0
        assert "not unimodular" in result.output

    def test_malformed_json_reports_line(self, runner, tmp_path):
        src = tmp_path / "seqs.json"
        src.write_text('{"sequences": [\n  "++",\n  broken\n]}')
        result = runner.invoke(main, ["import-sequences", str(src), "--out", str(tmp_path / "o.json")])
        assert result.exit_code != 0
        assert "line 3" in result.output

    def test_mixed_lengths_rejected(self, runner, tmp_path):
        src = tmp_path / "seqs.json"
        src.write_text(json.dumps({"sequences": ["++", "+++"]}))
        result = runner.invoke(main, ["import-sequences", str(src), "--out", str(tmp_path / "o.json")])
        assert result.exit_code != 0
        assert "length" in result.output


class TestReproduce:
    def test_xcorr_pipeline_passes_checks(self, runner, tmp_path):
        result = runner.invoke(main, ["reproduce", "xcorr", "--out-dir", str(tmp_path)])
        assert result.exit_code == 0, result.output
        assert "embedded checks passed" in result.output
        assert (tmp_path / "xcorr_zc.csv").exists()

    def test_papr_pipeline_deterministic(self, runner, tmp_path):
        first_dir = tmp_path / "a"
        second_dir = tmp_path / "b"
        for out_dir in (first_dir, second_dir):
            result = runner.invoke(main, ["reproduce", "papr", "--out-dir", str(out_dir)])
            assert result.exit_code == 0, result.output
        assert (first_dir / "papr.csv").read_bytes() == (second_dir / "papr.csv").read_bytes()
