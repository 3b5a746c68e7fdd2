import subprocess

import pytest

from gdfigures.cli import main
from gdfigures.render import CsvFormatError, FigureSpec, read_trajectories, render

SINGLE_HEADER = "step,x,y,l1,l2,xi_norm"


def write_csv(path, rows, header=SINGLE_HEADER):
    path.write_text("\n".join([header] + rows) + "\n", encoding="utf-8")


def synthetic_rows(n=50, label=None):
    rows = []
    for k in range(n):
        x = 1.0 + 0.01 * k
        y = -1.0 + 0.01 * k
        prefix = f"{label}," if label else ""
        rows.append(f"{prefix}{k},{x},{y},0.0,0.0,1.0")
    return rows


class TestReader:
    def test_single_trajectory(self, tmp_path):
        f = tmp_path / "t.csv"
        write_csv(f, synthetic_rows(10))
        series = read_trajectories(str(f))
        assert len(series) == 1
        label, xs, ys = series[0]
        assert label == "trajectory"
        assert len(xs) == len(ys) == 10

    def test_labeled_trajectories_keep_order(self, tmp_path):
        f = tmp_path / "t.csv"
        rows = synthetic_rows(5, "beta") + synthetic_rows(5, "alpha")
        write_csv(f, rows, header="algo," + SINGLE_HEADER)
        series = read_trajectories(str(f))
        assert [s[0] for s in series] == ["beta", "alpha"]

    def test_empty_file_rejected(self, tmp_path):
        f = tmp_path / "t.csv"
        f.write_text("", encoding="utf-8")
        with pytest.raises(CsvFormatError):
            read_trajectories(str(f))

    def test_header_only_rejected(self, tmp_path):
        f = tmp_path / "t.csv"
        write_csv(f, [])
        with pytest.raises(CsvFormatError):
            read_trajectories(str(f))

    def test_malformed_row_reports_number(self, tmp_path):
        f = tmp_path / "t.csv"
        write_csv(f, ["0,1.0,2.0,0,0,1", "1,not_a_number,2.0,0,0,1"])
        with pytest.raises(CsvFormatError) as exc:
            read_trajectories(str(f))
        assert exc.value.row == 3
        assert "row 3" in str(exc.value)

    def test_wrong_field_count_reports_number(self, tmp_path):
        f = tmp_path / "t.csv"
        write_csv(f, ["0,1.0,2.0,0,0"])
        with pytest.raises(CsvFormatError) as exc:
            read_trajectories(str(f))
        assert exc.value.row == 2

    def test_non_finite_rows_are_dropped(self, tmp_path):
        f = tmp_path / "t.csv"
        write_csv(f, ["0,1.0,2.0,0,0,1", "1,nan,inf,0,0,1", "2,1.5,2.5,0,0,1"])
        (_, xs, ys), = read_trajectories(str(f))
        assert xs == [1.0, 1.5]
        assert ys == [2.0, 2.5]


class TestRender:
    def test_single_panel(self, tmp_path):
        f = tmp_path / "t.csv"
        write_csv(f, synthetic_rows(30))
        out = tmp_path / "fig.png"
        result = render(FigureSpec(str(f), str(out)))
        assert out.exists() and out.stat().st_size > 0
        assert len(result.panels) == 1

    def test_panels_match_algorithms(self, tmp_path):
        f = tmp_path / "t.csv"
        rows = []
        for name in ("one", "two", "three"):
            rows += synthetic_rows(20, name)
        write_csv(f, rows, header="algo," + SINGLE_HEADER)
        out = tmp_path / "fig.png"
        result = render(FigureSpec(str(f), str(out), grid=(1, 3)))
        assert [p.label for p in result.panels] == ["one", "two", "three"]
        assert (result.rows, result.cols) == (1, 3)

    def test_grid_too_small_rejected(self, tmp_path):
        f = tmp_path / "t.csv"
        rows = synthetic_rows(5, "a") + synthetic_rows(5, "b")
        write_csv(f, rows, header="algo," + SINGLE_HEADER)
        with pytest.raises(ValueError):
            render(FigureSpec(str(f), str(tmp_path / "x.png"), grid=(1, 1)))

    def test_axes_contain_all_points(self, tmp_path):
        f = tmp_path / "t.csv"
        write_csv(f, synthetic_rows(40))
        result = render(FigureSpec(str(f), str(tmp_path / "fig.png")))
        panel = result.panels[0]
        assert all(abs(v) <= panel.bound for v in panel.xs + panel.ys)

    def test_renderer_does_not_modify_input(self, tmp_path):
        f = tmp_path / "t.csv"
        write_csv(f, synthetic_rows(10))
        before = f.read_bytes()
        render(FigureSpec(str(f), str(tmp_path / "fig.png")))
        assert f.read_bytes() == before

    def test_deterministic_output(self, tmp_path):
        f = tmp_path / "t.csv"
        write_csv(f, synthetic_rows(30))
        a, b = tmp_path / "a.png", tmp_path / "b.png"
        render(FigureSpec(str(f), str(a)))
        render(FigureSpec(str(f), str(b)))
        assert a.read_bytes() == b.read_bytes()


class TestCli:
    def test_usage_errors(self):
        assert main(["--input", "x.csv"]) == 1  # --out missing
        assert main(["--input", "x.csv", "--out", "y.png", "--grid", "2by5"]) == 1

    def test_missing_file_is_data_error(self, tmp_path):
        assert main(["--input", str(tmp_path / "no.csv"), "--out", str(tmp_path / "o.png")]) == 2

    def test_empty_csv_is_data_error(self, tmp_path):
        f = tmp_path / "t.csv"
        f.write_text("", encoding="utf-8")
        assert main(["--input", str(f), "--out", str(tmp_path / "o.png")]) == 2

    def test_render_via_cli(self, tmp_path, capsys):
        f = tmp_path / "t.csv"
        write_csv(f, synthetic_rows(10))
        out = tmp_path / "o.png"
        assert main(["--input", str(f), "--out", str(out)]) == 0
        assert out.exists()
        assert "1 panel(s)" in capsys.readouterr().out


@pytest.fixture(scope="module")
def sweep_csv(tmp_path_factory):
    path = tmp_path_factory.mktemp("sweep") / "zero_sum_all.csv"
    proc = subprocess.run(
        [
            "gdlab", "run", "--game", "n", "--algo", "all",
            "--iters", "3000", "--seed", "42", "--out", str(path),
        ],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr
    return path


class TestAcceptanceCriterion11:
    """Ten-panel figure from a full zero-sum sweep of every algorithm."""

    def test_ten_bounded_orbit_panels(self, tmp_path, sweep_csv):
        out = tmp_path / "zero_sum.png"
        result = render(FigureSpec(str(sweep_csv), str(out), grid=(2, 5)))
        assert out.exists() and out.stat().st_size > 0
        assert len(result.panels) == 10
        assert [p.label for p in result.panels] == [
            "gd", "agd", "eg", "omd", "sga", "co", "cgd", "la", "lola", "sos",
        ]
        for panel in result.panels:
            # full trajectories survived the finite filter: bounded orbits
            assert len(panel.xs) == 3001
            assert all(abs(v) <= panel.bound for v in panel.xs + panel.ys)
            # the orbit circles the origin rather than collapsing onto it
            assert max(abs(v) for v in panel.xs[-200:]) > 0.05
