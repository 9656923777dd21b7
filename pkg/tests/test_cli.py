import json

import numpy as np
import pytest

from softber import channel, cli, sem
from softber.errors import InvalidParameterError, TraceFormatError, TraceParseError
from softber.randomness import RoleStreams


class TestParsers:
    def test_sweep_inclusive(self):
        assert cli.parse_sweep("0:8:2") == [0.0, 2.0, 4.0, 6.0, 8.0]
        assert cli.parse_sweep("1:1:1") == [1.0]
        assert cli.parse_sweep("0:1:0.4") == pytest.approx([0.0, 0.4, 0.8])

    def test_sweep_rejects_garbage(self):
        for bad in ("0:8", "a:b:c", "0:8:-1", "8:0:1"):
            with pytest.raises(InvalidParameterError):
                cli.parse_sweep(bad)

    def test_grid(self):
        assert cli.parse_grid("-3:3:11") == (-3.0, 3.0, 11)
        with pytest.raises(InvalidParameterError):
            cli.parse_grid("3:-3:11")
        with pytest.raises(InvalidParameterError):
            cli.parse_grid("0:1")


class TestIngest:
    def test_unlabeled(self, tmp_path):
        path = tmp_path / "trace.csv"
        path.write_text("# a comment\n0.5\n-1.25\n2.0\n-0.125\n")
        observations, labels = cli.ingest_observations(path)
        assert observations.n == 4
        assert labels is None

    def test_labeled(self, tmp_path):
        path = tmp_path / "trace.csv"
        path.write_text("0.5,1\n-1.25,-1\n2.0,1\n-0.125,-1\n")
        observations, labels = cli.ingest_observations(path)
        assert observations.n == 4
        assert list(labels) == [1, -1, 1, -1]

    def test_parse_error_names_line(self, tmp_path):
        path = tmp_path / "trace.csv"
        path.write_text("0.5\nabc\n1.0\n-1.0\n")
        with pytest.raises(TraceParseError, match="2"):
            cli.ingest_observations(path)

    def test_bad_bit_rejected(self, tmp_path):
        path = tmp_path / "trace.csv"
        path.write_text("0.5,2\n")
        with pytest.raises(TraceParseError):
            cli.ingest_observations(path)

    def test_mixed_rows_rejected(self, tmp_path):
        path = tmp_path / "trace.csv"
        path.write_text("0.5,1\n-1.25\n")
        with pytest.raises(TraceFormatError):
            cli.ingest_observations(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(InvalidParameterError, match="nope.csv"):
            cli.ingest_observations(tmp_path / "nope.csv")


class TestRoundTrip:
    def test_export_then_ingest_reproduces_estimate(self, tmp_path):
        seed = 31
        config = channel.CdmaConfig(snr_db=6.0, n_bits=500)
        streams = RoleStreams.from_seed(seed)
        trace = channel.simulate(config, streams)
        in_memory = sem.run(
            sem.ObservationSet(trace.statistics),
            RoleStreams.from_seed(seed).em_classify,
        )

        path = tmp_path / "trace.csv"
        cli.write_trace_csv(trace, str(path))
        observations, labels = cli.ingest_observations(path)
        assert np.array_equal(observations.values, trace.statistics)
        assert np.array_equal(labels, trace.true_bits)
        from_file = sem.run(observations, RoleStreams.from_seed(seed).em_classify)
        assert from_file.ber == in_memory.ber

    def test_report_json_round_trip(self, tmp_path):
        streams = RoleStreams.from_seed(8)
        config = channel.CdmaConfig(snr_db=6.0, n_bits=300)
        trace = channel.simulate(config, streams)
        report = sem.run(sem.ObservationSet(trace.statistics), streams.em_classify, seed=8)
        path = tmp_path / "report.json"
        cli.emit_report(report, str(path), mode="unsupervised")
        payload = json.loads(path.read_text())
        assert payload["mode"] == "unsupervised"
        assert payload["ber"] == report.ber
        assert payload["seed"] == 8
        assert len(payload["trace"]) == len(report.trace)

    def test_missing_directory_errors_with_path(self, tmp_path):
        streams = RoleStreams.from_seed(8)
        config = channel.CdmaConfig(snr_db=6.0, n_bits=300)
        trace = channel.simulate(config, streams)
        report = sem.run(sem.ObservationSet(trace.statistics), streams.em_classify)
        bad = tmp_path / "no_such_dir" / "report.json"
        with pytest.raises(OSError, match="no_such_dir"):
            cli.emit_report(report, str(bad))


def _run_main(argv):
    code = cli.main(argv)
    assert code == 0


class TestMain:
    def test_theory_sweep_matches_direct_evaluation(self, tmp_path):
        out = tmp_path / "sweep.csv"
        _run_main([
            "--mode", "theory", "--snr-sweep", "0:8:2", "--n", "100",
            "--seed", "5", "--output", str(out),
        ])
        rows = [
            line.split(",") for line in out.read_text().splitlines()
            if not line.startswith("#")
        ]
        assert len(rows) == 5
        for row in rows:
            snr_db = float(row[0])
            expected = channel.theoretical_bep(channel.CdmaConfig(snr_db=snr_db, n_bits=100))
            assert float(row[2]) == expected

    def test_sweep_rerun_is_byte_identical(self, tmp_path):
        args = ["--mode", "unsupervised", "--snr-sweep", "4:8:2", "--n", "200", "--seed", "9"]
        out1 = tmp_path / "a.csv"
        out2 = tmp_path / "b.csv"
        _run_main(args + ["--output", str(out1)])
        _run_main(args + ["--output", str(out2)])
        assert out1.read_bytes() == out2.read_bytes()

    def test_unsupervised_single_point_report(self, tmp_path):
        out = tmp_path / "report.json"
        _run_main([
            "--mode", "unsupervised", "--snr-db", "6", "--n", "300",
            "--seed", "3", "--output", str(out),
        ])
        payload = json.loads(out.read_text())
        assert payload["mode"] == "unsupervised"
        assert 0.0 <= payload["ber"] <= 1.0
        assert payload["seed"] == 3
        assert payload["generator"] == "pcg64-boxmuller"
        assert payload["config"]["cdma"]["snr_db"] == 6.0

    def test_supervised_and_mc_from_file(self, tmp_path):
        config = channel.CdmaConfig(snr_db=6.0, n_bits=400)
        trace = channel.simulate(config, RoleStreams.from_seed(12))
        trace_path = tmp_path / "trace.csv"
        cli.write_trace_csv(trace, str(trace_path))

        sup_path = tmp_path / "sup.json"
        _run_main([
            "--mode", "supervised", "--input", str(trace_path),
            "--seed", "12", "--output", str(sup_path),
        ])
        assert 0.0 <= json.loads(sup_path.read_text())["ber"] <= 1.0

        mc_path = tmp_path / "mc.json"
        _run_main([
            "--mode", "mc", "--input", str(trace_path),
            "--seed", "12", "--output", str(mc_path),
        ])
        assert json.loads(mc_path.read_text())["ber"] == channel.mc_ber(trace)

    def test_supervised_requires_labels(self, tmp_path):
        path = tmp_path / "trace.csv"
        path.write_text("0.5\n-1.25\n2.0\n-0.125\n")
        code = cli.main(["--mode", "supervised", "--input", str(path), "--output",
                         str(tmp_path / "r.json")])
        assert code == 2

    def test_pdf_dump_writes_density_files(self, tmp_path):
        out = tmp_path / "densities.json"
        _run_main([
            "--mode", "pdf-dump", "--snr-db", "8", "--n", "300", "--seed", "2",
            "--grid=-3:3:101", "--output", str(out),
        ])
        for suffix in ("_plus.csv", "_minus.csv"):
            data_path = tmp_path / f"densities{suffix}"
            lines = [l for l in data_path.read_text().splitlines() if not l.startswith("#")]
            assert len(lines) == 101
            xs = np.array([float(l.split(",")[0]) for l in lines])
            ys = np.array([float(l.split(",")[1]) for l in lines])
            assert xs[0] == -3.0 and xs[-1] == 3.0
            assert np.all(ys >= 0)
        assert json.loads(out.read_text())["mode"] == "pdf-dump"

    def test_dump_trace_flag(self, tmp_path):
        trace_out = tmp_path / "dump.csv"
        _run_main([
            "--mode", "mc", "--snr-db", "6", "--n", "50", "--seed", "4",
            "--output", str(tmp_path / "mc.json"), "--dump-trace", str(trace_out),
        ])
        observations, labels = cli.ingest_observations(trace_out)
        assert observations.n == 50
        assert labels is not None

    def test_input_with_sweep_rejected(self, tmp_path):
        path = tmp_path / "trace.csv"
        path.write_text("0.5\n-1.25\n2.0\n-0.125\n")
        code = cli.main(["--input", str(path), "--snr-sweep", "0:4:2"])
        assert code == 2


class TestPresets:
    def test_expected_presets_exist(self):
        assert set(cli.PRESETS) == {"fig3", "fig4", "fig5", "fig6", "fig7"}
        assert cli.PRESETS["fig5"]["n"] == 10_000
        assert cli.PRESETS["fig5"]["snr_sweep"] == "0:8:2"
        assert cli.PRESETS["fig6"]["pi_plus"] == 0.75
        assert cli.PRESETS["fig7"]["n"] == 1_000
        assert cli.PRESETS["fig7"]["snr_sweep"] == "0:16:2"

    def test_flag_overrides_preset(self):
        parser = cli.build_parser()
        config = cli.config_from_args(parser.parse_args(["--preset", "fig3", "--n", "50"]))
        assert config.mode == "pdf-dump"
        assert config.cdma.n_bits == 50
        assert config.cdma.snr_db == 0.0
