import csv
import io

import pytest

from ecsqkd import cli
from ecsqkd.gains import Basis, EcsVariant, GainSet, gains


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = cli.main(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def parse_rate(text):
    return {
        k.strip(): v.strip()
        for k, v in (line.split(":", 1) for line in text.splitlines() if not line.startswith("#"))
    }


def test_rate_defaults_at_500km():
    code, out, _ = run("rate", "--L", "500")
    assert code == 0
    fields = parse_rate(out)
    assert list(fields) == list(cli.CSV_HEADER)
    assert float(fields["R"]) > 0


def test_rate_beyond_range_is_zero():
    code, out, _ = run("rate", "--L", "2000", "--optimize")
    assert code == 0
    assert float(parse_rate(out)["R"]) == 0.0


def test_rate_writes_csv_row(tmp_path):
    target = tmp_path / "point.csv"
    code, _, _ = run("rate", "--L", "300", "--out", str(target))
    assert code == 0
    rows = list(csv.reader(target.open()))
    assert tuple(rows[0]) == cli.CSV_HEADER and len(rows) == 2


def test_malformed_config(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("# comment\nmu = abc\n")
    code, _, err = run("rate", "--config", str(cfg))
    assert code == 2
    assert "'mu'" in err


def test_unknown_config_key(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("wavelength = 1550\n")
    code, _, err = run("rate", "--config", str(cfg))
    assert code == 2 and "wavelength" in err


def test_invalid_parameter_value():
    code, _, err = run("rate", "--pd", "2")
    assert code == 2 and "p_d" in err


def test_missing_config_file(tmp_path):
    assert run("rate", "--config", str(tmp_path / "missing.cfg"))[0] == 3


def test_precedence(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("mu = 0.02\nL = 100\ned = 0.05  # misaligned\n")
    config = cli.build_config(cli.parse_config_text(cfg.read_text()), {"L": 200.0, "mu": None})
    assert (config.mu, config.L, config.ed, config.f) == (0.02, 200.0, 0.05, 1.1)


def test_sweep_csv_format():
    code, out, _ = run("sweep", "--L-start", "0", "--L-stop", "1100", "--L-step", "275")
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert ",".join(rows[0]) == "L_km,mu_opt,p_x_opt,Q_Z,E_Z,E_X,E_ph,Delta,R,R_plob"
    distances = [float(r[0]) for r in rows[1:]]
    assert distances == [0, 275, 550, 825, 1100]
    for row in rows[1:]:
        for cell in row:
            if cell not in ("nan", "inf"):
                mantissa = cell.split("e")[0].lstrip("-").replace(".", "")
                assert len(mantissa) == 10
        values = dict(zip(rows[0], row))
        assert float(values["R"]) >= 0
        for key in ("Q_Z", "E_Z", "E_X", "E_ph", "Delta"):
            assert 0 <= float(values[key]) <= 1


def test_sweep_deterministic():
    argv = ("sweep", "--L-start", "100", "--L-stop", "700", "--L-step", "200", "--F2", "0.95",
            "--epsilon", "1e-9", "--mode", "imperfect")
    assert run(*argv)[1] == run(*argv)[1]


def test_empty_grid():
    assert run("sweep", "--L-start", "500", "--L-stop", "100")[0] == 2


def test_unwritable_output(tmp_path):
    target = tmp_path / "missing_dir" / "out.csv"
    assert run("sweep", "--L-stop", "50", "--out", str(target))[0] == 3


def test_finite_command():
    code, out, _ = run("finite", "--L-start", "200", "--L-stop", "200", "--N", "1e12")
    assert code == 0
    row = dict(zip(*list(csv.reader(io.StringIO(out)))))
    assert float(row["R"]) > 0 and 0 < float(row["p_x_opt"]) < 0.5


SMALL_GRID = {"mus": (0.05, 0.3), "etas": (0.01, 0.3), "pds": (0.0, 1e-7)}


def test_validate_passes():
    out = io.StringIO()
    assert cli.cmd_validate(cli.RunConfig(), out, grid=SMALL_GRID) == 0
    assert "PASS" in out.getvalue()


def test_validate_names_broken_formula():
    def broken(basis, variant, mu, eta, p_d):
        g = gains(basis, variant, mu, eta, p_d)
        if Basis(basis) is Basis.X and EcsVariant(variant) is EcsVariant.PSI_MINUS:
            # mislabelled outputs for one (variant, basis) pair
            return GainSet(g.q_error, g.q_correct, g.basis, g.variant)
        return g

    out = io.StringIO()
    assert cli.cmd_validate(cli.RunConfig(), out, analytic=broken, grid=SMALL_GRID) == 1
    report = out.getvalue()
    assert "FAIL" in report and "PsiMinus X" in report
    assert "PhiMinus X" not in report.split("FAIL")[1]


def test_validate_zero_dark_counts():
    out = io.StringIO()
    # Psi sources anti-correlate the Z bits, so their "error" gain is the signal.
    grid = {"pds": (0.0,), "bases": (Basis.Z,), "variants": (EcsVariant.PHI_MINUS, EcsVariant.PHI_PLUS)}
    assert cli.cmd_validate(cli.RunConfig(), out, grid=grid) == 0
    rows = list(csv.DictReader(io.StringIO(out.getvalue().split("PASS")[0])))
    assert len(rows) == 32
    assert all(float(r["analytic_QE"]) <= 1e-10 and float(r["oracle_QE"]) <= 1e-10 for r in rows)


def test_validate_report_to_file(tmp_path):
    target = tmp_path / "report.csv"
    code, out, _ = run("validate", "--out", str(target))
    assert code == 0
    assert out.startswith("PASS")
    assert len(target.read_text().splitlines()) == 385


def test_module_entry_point():
    import subprocess
    import sys

    res = subprocess.run([sys.executable, "-m", "ecsqkd", "rate", "--L", "100"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0 and "R_plob" in res.stdout


@pytest.mark.parametrize("argv", [["nonsense"], ["rate", "--mode", "magic"]])
def test_bad_arguments(argv):
    assert run(*argv)[0] == 2
