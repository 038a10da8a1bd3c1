import csv
import io
import json

import pytest

from zeta5.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_form_zeta5(capsys):
    code, out, _ = run(capsys, "form", "--r", "0,0,0,0,0")
    data = json.loads(out)
    assert code == 0
    assert data["result"]["form"]["c5"] == "1/1"
    assert data["result"]["preview"].startswith("1.0369277551")
    assert data["seed"] == 0 and data["findings"] == []


def test_form_engine_only_note(capsys):
    _, out, _ = run(capsys, "form", "--r", "1,0,0,0,0")
    res = json.loads(out)["result"]
    assert res["lemma_note"] == "Lemma not applicable: composition [1,4]"
    assert res["coverage"] == "engine-only"
    assert [res["form"][k] for k in ("c0", "c2", "c3", "c4", "c5")] == ["-1/1", "1/1", "-1/1", "1/1", "0/1"]


def test_form_lemma_note(capsys):
    _, out, _ = run(capsys, "form", "--r", "5,4,3,2,1")
    assert json.loads(out)["result"]["lemma_note"] == "Lemma 2.1"


def test_form_lemma_mismatch_is_a_finding_with_exit_zero(capsys):
    code, out, _ = run(capsys, "form", "--r", "4,4,2,1,1")
    data = json.loads(out)
    assert code == 0
    assert data["findings"][0]["suspect_terms"] == [4]


@pytest.mark.parametrize("bad", ["1,2", "a,b,c,d,e", "1,2,3,4,-5"])
def test_form_usage_error(capsys, bad):
    with pytest.raises(SystemExit) as exc:
        main(["form", "--r", bad])
    assert exc.value.code != 0


def test_linform_n0_and_n3(capsys):
    _, out, _ = run(capsys, "linform", "--n", "0")
    r0 = json.loads(out)["result"]
    assert (r0["d"], r0["a"], r0["b"], r0["c"], r0["e"]) == ("1", "0", "0", "0", "0")
    _, out, _ = run(capsys, "linform", "--n", "3")
    r3 = json.loads(out)["result"]
    assert r3["integrality"] == "ok" and r3["max_bits"] > 0 and r3["ln_abs_d_over_n"] > 0


def test_linform_capacity(capsys):
    code, _, err = run(capsys, "linform", "--n", "13")
    assert code == 2 and "ceiling" in err


def test_linform_csv_is_rfc4180(capsys):
    _, out, _ = run(capsys, "linform", "--n-max", "3", "--format", "csv")
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0][:7] == ["n", "a", "b", "c", "d", "e", "lcm"]
    assert rows[0][-1] == "seed"
    assert len(rows) == 5
    assert out.endswith("\r\n")


def test_linform_monte_carlo_uses_seed(capsys):
    _, a, _ = run(capsys, "linform", "--n", "1", "--mc-samples", "20000", "--seed", "5")
    _, b, _ = run(capsys, "linform", "--n", "1", "--mc-samples", "20000", "--seed", "5")
    assert a == b
    data = json.loads(a)
    assert data["seed"] == 5 and data["result"]["monte_carlo"]["contains_oriented"]


def test_audit_n4(capsys):
    code, out, _ = run(capsys, "audit", "--n", "4", "--eps", "1e-2")
    t = json.loads(out)["result"]
    assert code == 0
    assert all(d["verdict"] != "undecidable" for d in t["decisions"])


def test_audit_low_precision_hint(capsys):
    _, out, _ = run(capsys, "audit", "--n", "4", "--eps", "1e-2", "--prec", "64")
    t = json.loads(out)["result"]
    assert any(d["verdict"] == "undecidable" for d in t["decisions"])
    assert any("--prec" in note for note in t["notes"])


def test_audit_n0(capsys):
    _, out, _ = run(capsys, "audit", "--n", "0")
    assert json.loads(out)["result"]["case"] == "alpha_zero"


def test_audit_threads_identical(capsys):
    _, one, _ = run(capsys, "audit", "--n-max", "3", "--threads", "1")
    _, two, _ = run(capsys, "audit", "--n-max", "3", "--threads", "2")
    assert one == two


def test_bounds(capsys):
    code, out, _ = run(capsys, "bounds", "--n-max", "4")
    data = json.loads(out)
    assert code == 0
    checks = {c["check"]: c["pass"] for c in data["result"]["printed_value_checks"]}
    assert checks["G(1/2+1/200) == 0.006586252353140625"]
    assert {f["n"] for f in data["findings"]} == {1, 3}


def test_scan_lcm(capsys):
    _, out, _ = run(capsys, "scan-lcm", "--max", "200")
    res = json.loads(out)["result"]
    assert res["argmax_pi_lnn_over_n"] == 113
    _, out, _ = run(capsys, "scan-lcm", "--max", "200", "--format", "csv")
    assert out.splitlines()[0] == "n,pi_n,ln_lcm_over_n,pi_lnn_over_n,seed"


def test_constants_prec_flag_and_env(capsys, monkeypatch):
    _, out, _ = run(capsys, "constants", "--prec", "128")
    data = json.loads(out)
    assert data["precision_bits"] == 128
    assert set(data["result"]["table"]) == {"precision_bits", "zeta2", "zeta3", "zeta4", "zeta5"}
    monkeypatch.setenv("ZETA5_PREC", "96")
    _, out, _ = run(capsys, "constants")
    assert json.loads(out)["precision_bits"] == 96
    _, out, _ = run(capsys, "constants", "--prec", "160")
    assert json.loads(out)["precision_bits"] == 160


def test_precision_floor(capsys):
    with pytest.raises(SystemExit):
        main(["constants", "--prec", "32"])


def test_verify_lemmas_small(capsys):
    code, out, _ = run(capsys, "verify-lemmas", "--max-entry", "3", "--terms", "3000")
    data = json.loads(out)
    assert code == 0
    assert data["result"]["oracle"]["agree"] == data["result"]["oracle"]["vectors"]
    assert all(f["lemma"] == "Lemma 2.5" for f in data["findings"])


def test_output_file(tmp_path, capsys):
    target = tmp_path / "forms.json"
    code, out, _ = run(capsys, "linform", "--n", "2", "--output", str(target))
    assert code == 0 and out == ""
    assert json.loads(target.read_text(encoding="utf-8"))["result"]["n"] == 2


def test_repeat_runs_identical_bytes(capsys):
    _, a, _ = run(capsys, "bounds", "--n-max", "2")
    _, b, _ = run(capsys, "bounds", "--n-max", "2")
    assert a == b
