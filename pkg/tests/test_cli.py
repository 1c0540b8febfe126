import json
import re

import numpy as np
import pytest

from gmfkit.cli import CliError, main, parse_bundle, parse_matrix
from gmfkit.hset import Indicator, Linear


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def run(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out
    report = json.loads(out) if out.strip().startswith("{") else None
    return code, report


# ---------------------------------------------------------------------------
# parsing


def test_parse_matrix_roundtrip(tmp_path):
    p = write(tmp_path, "m.csv", "1,2\n3,4\n")
    M = parse_matrix(p)
    assert np.allclose(M, [[1, 2], [3, 4]])


def test_parse_matrix_ragged(tmp_path):
    p = write(tmp_path, "m.csv", "1,2\n3\n")
    with pytest.raises(CliError):
        parse_matrix(p)


def test_parse_matrix_nan(tmp_path):
    p = write(tmp_path, "m.csv", "1,nan\n2,3\n")
    with pytest.raises(CliError):
        parse_matrix(p)


def test_parse_matrix_symmetrize_warns(tmp_path, capsys):
    p = write(tmp_path, "m.csv", "1,2\n2.5,1\n")
    M = parse_matrix(p, symmetrize=True)
    assert np.allclose(M, M.T)
    assert "symmetrized" in capsys.readouterr().err


def test_parse_bundle_variants(tmp_path):
    lin = write(
        tmp_path,
        "lin.json",
        '{"A": [[0.0, 0.0]], "B": [[0.0]], '
        '"h": {"kind": "linear", "U": [[0.5, 0.0], [0.0, 0.5]]}}',
    )
    prob = parse_bundle(lin)
    assert isinstance(prob.h, Linear)
    ind = write(
        tmp_path,
        "ind.json",
        '{"A": [[0.0, 0.0]], "B": [[0.0]], '
        '"h": {"kind": "indicator", '
        '"set": {"kind": "trace_ball", "r": 1.0, "n": 2}}}',
    )
    prob = parse_bundle(ind)
    assert isinstance(prob.h, Indicator)


def test_parse_bundle_unknown_tag(tmp_path):
    p = write(
        tmp_path,
        "bad.json",
        '{"A": [[0.0]], "B": [[0.0]], "h": {"kind": "mystery"}}',
    )
    with pytest.raises(CliError):
        parse_bundle(p)


# ---------------------------------------------------------------------------
# subcommands


def test_eval_gmf_scalar_example(tmp_path, capsys):
    x = write(tmp_path, "x.csv", "1\n")
    v = write(tmp_path, "v.csv", "2\n")
    code, rep = run(
        capsys, ["eval-gmf", "--A", "zero", "--B", "zero", "--X", x, "--V", v]
    )
    assert code == 0
    assert rep["outputs"]["value"] == 0.25


def test_kyfan_example(tmp_path, capsys):
    x = write(tmp_path, "x.csv", "3,0,0\n0,4,0\n0,0,0\n")
    code, rep = run(capsys, ["kyfan", "--p", "1", "--k", "2", "--X", x])
    assert code == 0
    assert rep["outputs"]["value"] == 7


def test_cq_report_example(tmp_path, capsys):
    bundle = write(
        tmp_path,
        "b.json",
        json.dumps(
            {
                "A": [[1.0, 0.0], [0.0, 0.0]],
                "B": [[1.0], [0.0]],
                "h": {
                    "kind": "indicator",
                    "set": {
                        "kind": "hull",
                        "points": [
                            [[0.0, 0.0], [0.0, 0.0]],
                            [[1.0, 0.0], [0.0, 0.0]],
                        ],
                    },
                },
            }
        ),
    )
    code, rep = run(capsys, ["cq-report", "--bundle", bundle])
    assert code == 0
    assert rep["outputs"]["ccq"] == "fails"
    assert rep["outputs"]["bpcq"] == "holds"


def test_eval_p_nuclear(tmp_path, capsys):
    bundle = write(
        tmp_path,
        "nuc.json",
        '{"A": [[0.0, 0.0]], "B": [[0.0]], '
        '"h": {"kind": "linear", "U": [[0.5, 0.0], [0.0, 0.5]]}}',
    )
    x = write(tmp_path, "x.csv", "3\n4\n")
    code, rep = run(capsys, ["eval-p", "--bundle", bundle, "--X", x])
    assert code == 0
    assert rep["outputs"]["value"] == pytest.approx(5.0, rel=1e-6)


def test_solve_command(tmp_path, capsys):
    bundle = write(
        tmp_path,
        "comp.json",
        json.dumps(
            {
                "target": [[1.0, 2.0], [2.0, 4.0]],
                "mask": [[1, 1], [1, 1]],
                "lam": 0.5,
            }
        ),
    )
    code, rep = run(capsys, ["solve", "--bundle", bundle])
    assert code == 0
    assert rep["outputs"]["status"] == "Converged"
    assert rep["outputs"]["min_eig_V"] > 0


def test_oracle_compare(tmp_path, capsys):
    x = write(tmp_path, "x.csv", "1\n-1\n")
    v = write(tmp_path, "v.csv", "2,0\n0,3\n")
    code, rep = run(capsys, ["oracle-compare", "--X", x, "--V", v])
    assert code == 0
    assert rep["outputs"]["agree"] is True


# ---------------------------------------------------------------------------
# exit codes and report contract


def test_missing_file_exits_one(capsys):
    assert main(["eval-p", "--bundle", "/no/such.json", "--X", "/no/x.csv"]) == 1


def test_missing_required_flag_exits_one(capsys):
    assert main(["eval-p"]) == 1


def test_undecided_exit_code(tmp_path, capsys):
    # a hull with an indefinite vertex makes the report abstain
    bundle = write(
        tmp_path,
        "b.json",
        json.dumps(
            {
                "A": [[0.0, 0.0]],
                "B": [[0.0]],
                "h": {
                    "kind": "indicator",
                    "set": {
                        "kind": "hull",
                        "points": [
                            [[1.0, 0.0], [0.0, -1.0]],
                            [[0.0, 1.0], [1.0, 0.0]],
                        ],
                    },
                },
            }
        ),
    )
    code, rep = run(capsys, ["cq-report", "--bundle", bundle])
    assert code == 2


def test_determinism_excluding_wall_time(tmp_path, capsys):
    bundle = write(
        tmp_path,
        "nuc.json",
        '{"A": [[0.0, 0.0]], "B": [[0.0]], '
        '"h": {"kind": "linear", "U": [[0.5, 0.0], [0.0, 0.5]]}}',
    )
    x = write(tmp_path, "x.csv", "1\n2\n")
    texts = []
    for _ in range(2):
        main(["eval-p", "--bundle", bundle, "--X", x, "--seed", "3"])
        out = capsys.readouterr().out
        texts.append(re.sub(r'"wall_time_s": [^\n]+', '"wall_time_s": 0', out))
    assert texts[0] == texts[1]


def test_seventeen_digit_output(tmp_path, capsys):
    x = write(tmp_path, "x.csv", "1\n")
    v = write(tmp_path, "v.csv", "3\n")
    main(["eval-gmf", "--X", x, "--V", v])
    out = capsys.readouterr().out
    # 1/6 must carry the full 17 significant digits
    assert "0.16666666666666666" in out


def test_out_flag_writes_file(tmp_path, capsys):
    x = write(tmp_path, "x.csv", "1\n")
    v = write(tmp_path, "v.csv", "2\n")
    dest = str(tmp_path / "report.json")
    code = main(["eval-gmf", "--X", x, "--V", v, "--out", dest])
    assert code == 0
    rep = json.loads(open(dest).read())
    assert rep["outputs"]["value"] == 0.25
