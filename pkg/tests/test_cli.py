import csv
import json

import pytest
from click.testing import CliRunner

from qsle.cli import cli_dispatch, main
from qsle.interface import load_table, validate_report
from qsle.linkpatterns import enumerate_patterns
from qsle.purevectors import cached_table


def run(*args):
    return CliRunner().invoke(main, list(args))


@pytest.mark.parametrize("n,dim", [(0, 1), (1, 0), (2, 1), (6, 5), (10, 42)])
def test_dims(n, dim):
    res = run("dims", "--n", str(n))
    assert res.exit_code == 0
    assert res.output.splitlines()[0] == str(dim)


def test_dualcheck_passes():
    res = run("dualcheck", "--n", "4")
    assert res.exit_code == 0
    assert "FAIL" not in res.output


def test_zeval_perco():
    res = run("zeval", "--model", "perco", "--points", "-1,0,1,2")
    obj = json.loads(res.output)
    assert obj["Z"] == 1.0 and obj["pde_residuals"] == [0.0] * 4


def test_zeval_ising_one_pair():
    obj = json.loads(run("zeval", "--model", "ising", "--points", "0,2").output)
    assert obj["Z"] == pytest.approx(0.5)
    assert obj["grad_log_Z"] == pytest.approx([0.5, -0.5])


@pytest.mark.parametrize(
    "argv",
    [
        ["zeval", "--model", "ising", "--points", "1,0"],
        ["zeval", "--model", "ising", "--points", "0,1,2"],
        ["zeval", "--model", "potts", "--points", "0,1"],
        ["dims"],
        ["sample", "--model", "ising", "--kappa", "4", "--points", "-1,1"],
        ["sample", "--model", "perco", "--points", "-0.2,0.2"],
        ["martingale", "--model", "gff", "--points", "-1,1", "--j", "3"],
    ],
)
def test_usage_errors_exit_two(argv):
    assert cli_dispatch(argv) == 2


def test_cascade_failure_exits_one():
    assert cli_dispatch(["cascadecheck", "--model", "gff", "--n-max", "2", "--configs", "2"]) == 1


def test_cascade_ising_passes():
    assert cli_dispatch(["cascadecheck", "--model", "ising", "--n-max", "2", "--configs", "3"]) == 0


def test_bvisit_order_prints_vector():
    res = run("bvisit", "--n", "1", "--order", "+")
    assert res.exit_code == 0
    obj = json.loads(res.output.splitlines()[0])
    # a right visit puts the triplet on the right of the doublet
    assert obj["dims"] == [2, 3]


def test_report_written(tmp_path):
    res = run("symcheck", "--n", "3", "--out", str(tmp_path))
    assert res.exit_code == 0
    obj = json.loads((tmp_path / "symcheck_report.json").read_text())
    assert obj["passed"] and validate_report(obj) == []
    assert obj["assertions"]


def test_purevec_saves_loadable_table(tmp_path):
    res = run("purevec", "--n", "3", "--out", str(tmp_path))
    assert res.exit_code == 0
    table = load_table(tmp_path / "table")
    for a in enumerate_patterns(3):
        assert table[a] == cached_table(3)[a]


def test_sample_outputs(tmp_path):
    res = run(
        "sample", "--model", "ising", "--points", "-2,-1,1,2", "--dt", "1e-3",
        "--paths", "2", "--order", "2,1,4,3", "--out", str(tmp_path),
    )
    assert res.exit_code == 0, res.output
    with open(tmp_path / "curves.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert set(rows[0]) == {"curve_id", "step", "t", "re", "im"}
    assert {int(r["curve_id"]) for r in rows} == set(range(8))
    starts = {int(r["curve_id"]): float(r["re"]) for r in rows if r["step"] == "0"}
    assert starts == {0: -2.0, 1: -1.0, 2: 1.0, 3: 2.0, 4: -2.0, 5: -1.0, 6: 1.0, 7: 2.0}
    meta = json.loads((tmp_path / "run.json").read_text())
    assert meta["order"] == [2, 1, 4, 3]
    assert meta["cfg"]["kappa"] == 3


def test_sample_is_reproducible(tmp_path):
    args = ["sample", "--model", "gff", "--points", "-1,1", "--dt", "1e-3", "--seed", "5"]
    run(*args, "--out", str(tmp_path / "a"))
    run(*args, "--out", str(tmp_path / "b"))
    assert (tmp_path / "a" / "curves.csv").read_bytes() == (tmp_path / "b" / "curves.csv").read_bytes()


def test_martingale_perco(tmp_path):
    res = run("martingale", "--model", "perco", "--points", "-1,1", "--paths", "20", "--dt", "1e-3", "--out", str(tmp_path))
    assert res.exit_code == 0
    obj = json.loads((tmp_path / "martingale_perco_report.json").read_text())
    assert validate_report(obj) == []
