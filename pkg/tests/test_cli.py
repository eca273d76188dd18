import subprocess
import sys

import pytest

from wavekin import cli
from wavekin.storage import read_snapshot, read_timeseries


def run_main(capsys, *args):
    code = cli.main(list(args))
    out = capsys.readouterr()
    return code, out.out, out.err


class TestCommands:
    def test_compare_exact(self, capsys):
        code, out, _ = run_main(capsys, "compare", "--set", "N=6")
        assert code == 0 and "PASS" in out

    def test_compare_zero_input(self, capsys):
        code, out, _ = run_main(capsys, "compare", "--set", "N=4", "--set", "ic.kind=zero")
        assert code == 0 and "0.000e+00" in out

    def test_compare_circular_only_reports(self, capsys):
        code, out, _ = run_main(capsys, "compare", "--set", "N=6", "--set", "conv_mode=circular")
        assert code == 0 and "measured" in out

    def test_compare_failure_exit(self, capsys, monkeypatch):
        real = cli.apply_K_fast

        def skewed(c, plan):
            out = real(c, plan)
            out.coeffs[0, 0] += 1.0
            return out

        monkeypatch.setattr(cli, "apply_K_fast", skewed)
        code, _, err = run_main(capsys, "compare", "--set", "N=4")
        assert code == cli.EXIT_CHECK and "differ" in err

    def test_quadcheck(self, capsys):
        code, out, _ = run_main(capsys, "quadcheck", "--set", "N=8")
        assert code == 0 and "FAIL" not in out and "G1(0,0,0) 3D" in out

    def test_quadcheck_3d(self, capsys):
        code, out, _ = run_main(capsys, "quadcheck", "--set", "dimension=3", "--set", "N_s=32", "--set", "N=4")
        assert code == 0 and "design 32: degree 7" in out

    def test_stationary(self, capsys, tmp_path):
        code, out, _ = run_main(capsys, "stationary", "--set", "N=8", "--set", f"output={tmp_path}")
        assert code == 0 and "K1" in out
        assert (tmp_path / "stationary.csv").exists()

    def test_evolve(self, capsys, tmp_path):
        code, out, _ = run_main(
            capsys, "evolve", "--set", "N=8", "--set", "S=2", "--set", "t_end=0.2",
            "--set", "ic.kind=gaussian", "--set", "ic.T=0.5", "--set", f"output={tmp_path}",
        )
        assert code == 0 and out.count("t=") == 3
        assert len(read_timeseries(tmp_path / "timeseries.csv")) == 3
        head, _ = read_snapshot(tmp_path / "snapshots" / "snap_00002.wkes")
        assert head.t == pytest.approx(0.2)

    @pytest.mark.parametrize(
        "ic",
        [
            ["ic.kind=two_gaussians", "ic.center1=0.5,0", "ic.center2=-0.5,0", "ic.T1=0.3", "ic.T2=0.3"],
            ["ic.kind=kz", "ic.eps=1"],
            ["ic.kind=bi_maxwellian"],
            ["ic.kind=delta_ring", "S=0.33"],
        ],
    )
    def test_initial_conditions(self, ic):
        cfg = cli.load_config(None, ["N=8", *ic])
        f = cli.initial_field(cfg, cli.grid_from_config(cfg))
        assert f.values.max() > 0

    def test_bench(self, capsys, tmp_path):
        code, out, _ = run_main(capsys, "bench", "--set", "bench.N=4,8", "--set", f"output={tmp_path}")
        assert code == 0
        lines = (tmp_path / "bench.csv").read_text().splitlines()
        assert len(lines) == 3 and "time_K1" in lines[0]


class TestExitCodes:
    def test_validation(self, capsys):
        code, _, err = run_main(capsys, "stationary", "--set", "N=7")
        assert code == cli.EXIT_VALIDATION and "even" in err

    def test_unknown_key(self, capsys):
        assert run_main(capsys, "compare", "--set", "speed=3")[0] == cli.EXIT_VALIDATION

    def test_unknown_ic(self, capsys, tmp_path):
        code = run_main(capsys, "evolve", "--set", "ic.kind=nope", "--set", f"output={tmp_path}")[0]
        assert code == cli.EXIT_VALIDATION

    def test_missing_design(self, capsys):
        code, _, err = run_main(capsys, "compare", "--set", "dimension=3", "--set", "N=4", "--set", "N_s=7")
        assert code == cli.EXIT_VALIDATION and "available sizes" in err

    def test_numeric(self, capsys, tmp_path):
        code, _, err = run_main(
            capsys, "evolve", "--set", "N=8", "--set", "S=2", "--set", "ic.kind=gaussian",
            "--set", "ic.rho=1e120", "--set", "t_end=0.3", "--set", f"output={tmp_path}",
        )
        assert code == cli.EXIT_NUMERIC and "last good t=" in err

    def test_config_file(self, capsys, tmp_path):
        p = tmp_path / "c.cfg"
        p.write_text("N = 4\ndimension = 3\n")
        code, out, _ = run_main(capsys, "compare", "--config", str(p))
        assert code == 0 and "d=3" in out


def test_console_entry():
    res = subprocess.run([sys.executable, "-m", "wavekin.cli", "compare", "--set", "N=4"], capture_output=True, text=True)
    assert res.returncode == 0 and "PASS" in res.stdout
