import json
import re
import subprocess

import pytest

from gdlab import cli


def main(*argv):
    return cli.main(list(argv))


class TestParsing:
    def test_help_lists_flags_and_exits_cleanly(self, capsys):
        with pytest.raises(SystemExit) as exc:
            cli.build_parser().parse_args(["run", "--help"])
        assert exc.value.code == 0
        text = capsys.readouterr().out
        for flag in (
            "--game",
            "--sigma",
            "--algo",
            "--alpha",
            "--gamma",
            "--iters",
            "--seed",
            "--init",
            "--out",
            "--format",
        ):
            assert flag in text

    def test_every_advertised_flag_is_accepted(self, capsys, tmp_path):
        with pytest.raises(SystemExit):
            cli.build_parser().parse_args(["sweep", "--help"])
        text = capsys.readouterr().out
        flags = set(re.findall(r"--[a-z]+", text))
        flags.discard("--help")
        values = {
            "--game": "n",
            "--sigma": "0.05",
            "--algo": "gd",
            "--alpha": "0.01",
            "--gamma": "0.01",
            "--iters": "250",
            "--runs": "2",
            "--seed": "1",
            "--init": "0.5,0.5",
            "--out": str(tmp_path / "o.csv"),
            "--format": "csv",
        }
        assert flags <= set(values)
        argv = ["sweep"]
        for f in sorted(flags):
            argv += [f, values[f]]
        assert main(*argv) == 0

    def test_unknown_flag_is_usage_error(self, capsys):
        assert main("run", "--frobnicate") == 1

    def test_unknown_subcommand_is_usage_error(self, capsys):
        assert main("frobnicate") == 1

    def test_bad_init_is_usage_error(self, capsys):
        assert main("run", "--init", "one,two") == 1
        assert main("run", "--init", "1,2,3") == 1

    def test_bad_sigma_is_usage_error(self, capsys):
        assert main("run", "--game", "msigma", "--sigma", "0.5", "--iters", "50") == 1


class TestRunCommand:
    def test_single_trajectory_csv(self, tmp_path):
        out = tmp_path / "traj.csv"
        code = main(
            "run", "--game", "n", "--algo", "gd", "--init", "1,0",
            "--iters", "100", "--out", str(out),
        )
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "step,x,y,l1,l2,xi_norm"
        assert len(lines) == 102
        assert lines[1].split(",")[0] == "0"

    def test_all_algorithms_concatenated(self, tmp_path):
        out = tmp_path / "all.csv"
        code = main(
            "run", "--game", "n", "--algo", "all", "--init", "1,0",
            "--iters", "40", "--out", str(out),
        )
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "algo,step,x,y,l1,l2,xi_norm"
        assert len(lines) == 1 + 10 * 41
        algos = {line.split(",")[0] for line in lines[1:]}
        assert algos == {"gd", "agd", "eg", "omd", "sga", "co", "cgd", "la", "lola", "sos"}

    def test_json_outcome(self, tmp_path):
        out = tmp_path / "run.json"
        code = main(
            "run", "--game", "n", "--algo", "gd", "--iters", "300",
            "--seed", "7", "--format", "json", "--out", str(out),
        )
        assert code == 0
        payload = json.loads(out.read_text())
        assert payload[0]["algo"] == "gd"
        assert payload[0]["outcome"] == "cycle"

    def test_byte_identical_reruns(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        argv = ["run", "--game", "m", "--algo", "sga", "--iters", "200", "--seed", "4"]
        assert main(*argv, "--out", str(a)) == 0
        assert main(*argv, "--out", str(b)) == 0
        assert a.read_bytes() == b.read_bytes()


class TestSweepCommand:
    def test_csv_plus_summary(self, tmp_path, capsys):
        out = tmp_path / "sweep.csv"
        code = main(
            "sweep", "--game", "n", "--algo", "gd", "--runs", "20",
            "--iters", "300", "--seed", "5", "--out", str(out),
        )
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "algo,run,seed,outcome,iters_used,max_norm,final_x,final_y"
        assert len(lines) == 21
        summary = json.loads(capsys.readouterr().out)
        assert summary["outcomes"]["gd"]["cycle"] == 20

    def test_json_format(self, tmp_path):
        out = tmp_path / "sweep.json"
        code = main(
            "sweep", "--game", "n", "--algo", "gd", "--runs", "10",
            "--iters", "300", "--format", "json", "--out", str(out),
        )
        assert code == 0
        summary = json.loads(out.read_text())
        assert summary["runs"] == 10
        assert sum(summary["outcomes"]["gd"].values()) == 10

    def test_thread_env_does_not_change_output(self, tmp_path, monkeypatch):
        argv = [
            "sweep", "--game", "m", "--algo", "omd", "--runs", "12",
            "--iters", "300", "--seed", "8",
        ]
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        monkeypatch.setenv("GDL_THREADS", "1")
        assert main(*argv, "--out", str(a)) == 0
        monkeypatch.setenv("GDL_THREADS", "3")
        assert main(*argv, "--out", str(b)) == 0
        assert a.read_bytes() == b.read_bytes()


class TestCertifyCommand:
    def test_market_certificate_json(self, tmp_path):
        out = tmp_path / "cert.json"
        assert main("certify", "--game", "m", "--out", str(out)) == 0
        payload = json.loads(out.read_text())
        assert payload["real_root_count"] == 1
        assert payload["conclusion"] is True

    def test_unsupported_game_is_computation_error(self, capsys):
        assert main("certify", "--game", "convex") == 2


class TestClassifyCommand:
    def test_strict_max_report(self, tmp_path):
        out = tmp_path / "cls.json"
        assert main("classify", "--game", "n", "--init", "0,0", "--out", str(out)) == 0
        payload = json.loads(out.read_text())
        assert payload["critical_class"] == "strict_max"
        assert payload["definiteness"]["neg_definite"] is True
        assert payload["xi_norm"] == 0.0

    def test_noncritical_report(self, tmp_path):
        out = tmp_path / "cls.json"
        assert main("classify", "--game", "n", "--init", "1,1", "--out", str(out)) == 0
        payload = json.loads(out.read_text())
        assert payload["critical_class"] == "not_critical"


class TestSelfTest:
    def test_selftest_passes(self, capsys):
        assert main("selftest") == 0
        text = capsys.readouterr().out
        assert "FAIL" not in text
        assert text.count("ok") >= 4


class TestConsoleScript:
    def test_entry_point_help(self):
        proc = subprocess.run(["gdlab", "--help"], capture_output=True, text=True)
        assert proc.returncode == 0
        assert "selftest" in proc.stdout
