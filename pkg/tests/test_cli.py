import json

import pytest

from leekh.cli import REPORT_FIELDS, compile_where, InputError, main

from conftest import TREFOIL_RIGHT


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_compute_json_schema(capsys):
    code, out, _ = run(capsys, "compute", "--input", "braid:strands=2 1 1 1", "--format", "json")
    data = json.loads(out)
    assert code == 0
    assert list(data) == list(REPORT_FIELDS)
    assert (data["s"], data["s_min"], data["s_max"], data["sigma"], data["width"]) == (2, 1, 3, 2, 2)


def test_compute_pd_has_no_signature(capsys):
    code, out, _ = run(capsys, "compute", "--input", f"pd:{TREFOIL_RIGHT}", "--format", "json")
    data = json.loads(out)
    assert code == 0 and data["s"] == 2 and data["sigma"] is None


def test_compute_by_name(capsys):
    code, out, _ = run(capsys, "compute", "--input", "name:10_139", "--format", "tsv",
                       "--invariants", "s")
    header, row = out.strip().splitlines()
    assert code == 0 and header.split("\t")[:2] == ["name", "s"]
    assert row.split("\t")[:2] == ["10_139", "8"]


@pytest.mark.parametrize("argv, code", [
    (["compute", "--input", "pd:X(1,2,3"], 2),
    (["compute", "--input", "name:no_such_knot"], 2),
    (["compute", "--input", "braid:strands=2 3"], 2),
    (["compute", "--input", "foo"], 2),
    (["compute", "--input", "name:3_1", "--cap", "4"], 3),
    (["compute", "--input", "name:3_1", "--invariants", "tau"], 2),
])
def test_exit_codes(capsys, argv, code):
    assert run(capsys, *argv)[0] == code


def test_table_filter(capsys, tmp_path):
    p = tmp_path / "t.csv"
    p.write_text("name,crossings,pd,braid,sigma_ref,s_ref\n"
                 f'3_1,3,"{TREFOIL_RIGHT}",strands=2 1 1 1,2,2\n')
    code, out, _ = run(capsys, "table", "--data", str(p), "--where", "s == sigma")
    assert code == 0 and "1 rows, 0 mismatches" in out
    p.write_text("name,crossings,pd,braid,sigma_ref,s_ref\n"
                 f'3_1,3,"{TREFOIL_RIGHT}",strands=2 1 1 1,2,4\n')
    code, out, _ = run(capsys, "table", "--data", str(p))
    assert code == 4 and "MISMATCH" in out


def test_where_is_restricted():
    pred = compile_where("abs(s) > abs(sigma) and crossings <= 10")
    assert pred({"s": 4, "sigma": 2, "crossings": 9})
    assert not pred({"s": 4, "sigma": None, "crossings": 9})
    for bad in ("__import__('os')", "s.real", "[s]", "s if s else 1"):
        with pytest.raises(InputError):
            compile_where(bad)


def test_verify(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "minmax,mirror", "--samples", "3",
                       "--seed", "1")
    assert code == 0 and out.count("PASS") == 4
    assert run(capsys, "verify", "--suite", "nope")[0] == 2


def test_movie_commands(capsys, tmp_path):
    code, out, _ = run(capsys, "movie", "trefoil_unknot.movie", "--format", "json")
    data = json.loads(out)
    assert code == 0
    assert data["euler_characteristic"] == -2 and data["filtered_degree"] == -2
    assert data["nonzero"] and data["lee_isomorphism"] and data["s_bound"] == 2
    code, out, _ = run(capsys, "movie", "sphere.movie")
    assert code == 0 and "warning" in out
    bad = tmp_path / "bad.movie"
    bad.write_text(f"diagram pd:{TREFOIL_RIGHT}\nR1- crossing=1\n")
    assert run(capsys, "movie", str(bad))[0] == 6
    bad.write_text("spin arc=1\n")
    assert run(capsys, "movie", str(bad), "--input", "pd:")[0] == 6


def test_json_is_stable(capsys):
    outs = []
    for _ in range(2):
        _, out, _ = run(capsys, "compute", "--input", "name:4_1", "--format", "json")
        data = json.loads(out)
        data.pop("runtime_ms")
        outs.append(data)
    assert outs[0] == outs[1]
