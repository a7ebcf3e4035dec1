import json
import os
import tempfile

import pytest

from coadjoint.atlas import (
    AtlasError,
    load_atlas,
    named_fingerprint,
    row_expectations,
    run_suite,
    verify_row,
)
from coadjoint.liealg import classical_algebra, fingerprint
from coadjoint.qlinalg import SampleConfig

CFG = SampleConfig(seed=17, height=5, rounds=8)


def _row(rows, table, label):
    for r in rows:
        if (r.table, r.label) == (table, label):
            return r
    raise KeyError((table, label))


def test_load_shapes():
    rows = load_atlas(cfg=CFG)
    assert len(rows) >= 30
    labels1 = {r.label for r in rows if r.table == 1}
    assert {"1", "2a", "3b", "7a", "8a", "9b"} <= labels1
    labels2 = {r.label for r in rows if r.table == 2}
    assert {"1e", "1o", "2", "3", "4", "5", "6"} <= labels2


def test_row_3b_expectations():
    rows = load_atlas(cfg=CFG)
    exp = row_expectations(_row(rows, 1, "3b"), {}, CFG)
    assert exp["size"] == 9            # B4
    assert exp["dim_v"] == 25
    assert exp["dim_v_mod_g"] == 3
    assert exp["stab_name"] == "G2"
    assert exp["ind"] == 5


def test_row_t2_4_expectations():
    rows = load_atlas(cfg=CFG)
    exp = row_expectations(_row(rows, 2, "4"), {}, CFG)
    assert exp["size"] == 6 and exp["dim_v"] == 14
    assert exp["dim_v_mod_g"] == 1 and exp["ind"] == 3
    assert exp["stab_fp"] == fingerprint(classical_algebra("sl", 3), CFG)


def test_row_8a_m0_expectations():
    rows = load_atlas(cfg=CFG)
    exp = row_expectations(_row(rows, 1, "8a"), {"m": 0}, CFG)
    assert exp["dim_v"] == 32 and exp["dim_v_mod_g"] == 1 and exp["ind"] == 6
    assert exp["stab_name"] == "sl(6)"


def test_parse_error_carries_line_number():
    with tempfile.NamedTemporaryFile("w", suffix=".tbl", delete=False) as fh:
        fh.write("[1/x]\nfamily = so\n\nbroken line without equals\n")
        path = fh.name
    try:
        with pytest.raises(AtlasError) as err:
            load_atlas(path, CFG)
        assert "line 4" in str(err.value)
    finally:
        os.unlink(path)


def test_arithmetic_violation_is_load_failure():
    record = """
[1/bad]
family = so
size = 5
module = phi1
dim_v = 5
dim_v_mod_g = 3
stab = so(4)
ind = 3
fa = +
"""
    with tempfile.NamedTemporaryFile("w", suffix=".tbl", delete=False) as fh:
        fh.write(record)
        path = fh.name
    try:
        with pytest.raises(AtlasError) as err:
            load_atlas(path, CFG)
        assert "dim V" in str(err.value)
    finally:
        os.unlink(path)


def test_named_fingerprints():
    assert named_fingerprint("G2", CFG).dim == 14
    assert named_fingerprint("G2+G2", CFG).dim == 28
    assert named_fingerprint("3*sl(2)", CFG).dim == 9
    assert named_fingerprint("ab(4)", CFG).index == 4
    fp = named_fingerprint("sphs(1)", CFG)
    assert fp.dim == 6 and fp.index == 2 and fp.center_dim == 1
    with pytest.raises(AtlasError):
        named_fingerprint("E8", CFG)


def test_verify_row_deterministic():
    rows = load_atlas(cfg=CFG)
    row = _row(rows, 2, "2")
    r1 = verify_row(row, {"n": 2}, CFG)
    r2 = verify_row(row, {"n": 2}, CFG)
    assert [c.computed for c in r1.checks] == [c.computed for c in r2.checks]
    assert r1.passed


def test_verify_row_dim_bound_skips():
    rows = load_atlas(cfg=CFG)
    rep = verify_row(_row(rows, 1, "9b"), {"m": 2}, CFG, max_dim=100)
    assert rep.skipped and not rep.checks


def test_empty_selection_passes():
    suite = run_suite(tables=(1,), row_label="no-such-row", cfg=CFG)
    assert suite.reports == [] and suite.passed


def test_suite_json_roundtrip():
    suite = run_suite(tables=(2,), row_label="4", cfg=CFG)
    payload = suite.as_dict()
    text = json.dumps(payload)
    back = json.loads(text)
    assert back["pass"] is True
    assert back["rows"][0]["checks"][0]["check"] == "dim V"


def test_cli_exit_codes():
    from coadjoint.cli import main

    assert main(["verify", "--table", "2", "--row", "4"]) == 0
    assert main(["verify", "--table", "3"]) == 2
    assert main(["index", "--family", "sp", "--size", "4"]) == 0
    assert main(["index", "--family", "sp", "--size", "4",
                 "--module", "phi1"]) == 0


def test_verify_row_validate_flag():
    rows = load_atlas(cfg=CFG)
    rep = verify_row(_row(rows, 2, "1o"), {"n": 1, "m": 1}, CFG, validate=True)
    assert rep.passed
    assert any(c.check == "jacobi+rep property" for c in rep.checks)


def test_cli_invariants_and_report(tmp_path):
    from coadjoint.cli import main

    assert main(["invariants", "--family", "sp", "--size", "2",
                 "--module", "phi1", "--cap", "4"]) == 0
    out = tmp_path / "report.json"
    assert main(["verify", "--table", "2", "--row", "5",
                 "--out", str(out)]) == 0
    assert main(["report", str(out)]) == 0
    assert main(["report", str(out), "--format", "json"]) == 0
