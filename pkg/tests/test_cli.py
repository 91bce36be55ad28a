import json
import subprocess
import sys

import pytest

from seriesgroup.cli import main
from seriesgroup.embed import Chain


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def pair_file(tmp_path, capsys):
    x = tmp_path / "x.json"
    xy = tmp_path / "xy.json"
    assert run(capsys, "new-chain", "--order", "8", "--base", "e1", "--name", "X", "--out", str(x))[0] == 0
    assert run(capsys, "step-free-product", "--chain", str(x), "--partner", "Y=X", "--out", str(xy))[0] == 0
    return xy


def test_new_chain_mobius(capsys):
    code, out, _ = run(capsys, "new-chain", "--order", "12", "--base", "e1", "--name", "X")
    assert code == 0
    chain = Chain.loads(out)
    assert [str(c) for c in chain.generator("X").coeffs] == ["1"] * 12


def test_certify_trivial_input(capsys, pair_file):
    code, out, _ = run(capsys, "certify", "--chain", str(pair_file), "--word", "X X^-1")
    assert code == 0
    cert = json.loads(out)
    assert cert["verdict"] == "Inconclusive" and "trivial input" in cert["note"]
    code, _, _ = run(capsys, "certify", "--chain", str(pair_file), "--word", "X X^-1", "--require-nontrivial")
    assert code == 1


def test_surface_relator(capsys, tmp_path):
    s = tmp_path / "s.json"
    assert run(capsys, "surface", "--genus", "2", "--order", "8", "--out", str(s))[0] == 0
    code, out, _ = run(capsys, "certify", "--chain", str(s), "--word", "[A,B][B',A']")
    cert = json.loads(out)
    assert code == 0 and cert["verdict"] == "Inconclusive"
    assert "trivial by construction" in cert["note"]
    code, out, _ = run(capsys, "eval", "--chain", str(s), "--word", "[A,B][B',A']")
    assert all(c == [] for c in json.loads(out)["series"]["coeffs"])


def test_certify_batch_parallel_matches_serial(capsys, pair_file):
    words = ["[X,Y]", "X Y^2", "Y^-1 X^3", "X^2 Y X^-1"]
    args = ["certify", "--chain", str(pair_file), "--mode", "sampled", "--seed", "3"]
    for w in words:
        args += ["--word", w]
    _, serial, _ = run(capsys, *args)
    _, parallel, _ = run(capsys, *args, "--jobs", "2")
    assert serial == parallel
    assert all(c["verdict"] == "Nontrivial" for c in json.loads(serial))


@pytest.mark.parametrize(
    "argv, fragment",
    [
        (["certify", "--word", "Z"], "unknown generator"),
        (["certify", "--word", "X^"], "expected"),
        (["log", "--series", "nope"], "cannot read series"),
    ],
)
def test_usage_errors(capsys, pair_file, argv, fragment):
    code, _, err = run(capsys, *argv, "--chain", str(pair_file))
    assert code == 2
    if fragment:
        assert fragment in err


def test_missing_chain_file(capsys, tmp_path):
    code, _, err = run(capsys, "show", "--chain", str(tmp_path / "missing.json"))
    assert code == 2 and "cannot read chain" in err


def test_argparse_usage_exit():
    with pytest.raises(SystemExit) as info:
        main(["certify", "--mode", "weird"])
    assert info.value.code == 2


def test_odd_genus_rejected(capsys):
    code, _, err = run(capsys, "surface", "--genus", "3")
    assert code == 2 and "even genus" in err


def test_blowup_exit(capsys, pair_file):
    code, _, err = run(capsys, "certify", "--chain", str(pair_file), "--word", "[X,Y]", "--max-terms", "2")
    assert code == 3 and "blowup" in err


def test_order_mismatch_exit(capsys, pair_file, tmp_path):
    data = json.loads(pair_file.read_text())
    data["order"] = 5
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(data))
    code, _, err = run(capsys, "show", "--chain", str(bad))
    assert code == 2 and "order" in err


def test_bp_commands(capsys, pair_file):
    code, out, _ = run(capsys, "bp-independence", "--chain", str(pair_file), "--word", "X", "--word", "Y",
                       "--n-max", "3", "-B", "9")
    rep = json.loads(out)
    assert code == 0 and rep["witness_n"] == 1 and len(rep["entries"]) == 100
    code, out, _ = run(capsys, "bp-separation", "--chain", str(pair_file), "--word", "X", "--word", "Y",
                       "--g", "Y", "--g", "X", "--g", "Y", "--n-max", "2", "-B", "5", "--table")
    assert code == 0 and "witness n = 1" in out
    code, _, err = run(capsys, "bp-independence", "--chain", str(pair_file), "--word", "X", "--word", "X^2")
    assert code == 2 and "commute" in err


def test_exp_log_flow(capsys):
    assert run(capsys, "exp", "--field", "e1", "--order", "4", "--text")[1] == "r + r^2 + r^3 + r^4 + r^5 + O(r^6)\n"
    assert run(capsys, "log", "--coeffs", "1,1,1", "--text")[1] == "e1\n"
    assert run(capsys, "flow", "--coeffs", "1,1,1", "--alpha", "s0", "--text")[1] == (
        "r + (s0)*r^2 + (s0^2)*r^3 + (s0^3)*r^4 + O(r^5)\n"
    )


def test_step_amalgam_and_ext(capsys, pair_file, tmp_path):
    am = tmp_path / "am.json"
    code, _, _ = run(capsys, "step-amalgam", "--chain", str(pair_file), "--partner", "X", "--partner", "Y",
                     "--u", "[X,Y]", "--out", str(am))
    assert code == 0
    assert Chain.loads(am.read_text()).names == ["X", "Y", "X'", "Y'"]
    ext = tmp_path / "ext.json"
    code, _, _ = run(capsys, "step-ext", "--chain", str(pair_file), "--u", "X Y", "--name", "T", "--out", str(ext))
    assert code == 0
    code, out, _ = run(capsys, "eval", "--chain", str(ext), "--word", "[T, X Y]")
    assert all(c == [] for c in json.loads(out)["series"]["coeffs"])


def test_show_roundtrip(capsys, pair_file):
    chain = Chain.loads(pair_file.read_text())
    _, shown, _ = run(capsys, "show", "--chain", str(pair_file))
    assert shown == Chain.loads(chain.dumps()).show() == chain.show()


def test_logged_commands_replay(capsys, tmp_path):
    def session(d):
        d.mkdir()
        run(capsys, "new-chain", "--order", "6", "--base", "e1 + 1/2*e2", "--name", "A", "--out", str(d / "a.json"))
        run(capsys, "step-free-product", "--chain", str(d / "a.json"), "--partner", "B=A", "--out", str(d / "b.json"))
        run(capsys, "step-ext", "--chain", str(d / "b.json"), "--u", "[A,B]", "--name", "T", "--out", str(d / "c.json"))
        return (d / "c.json").read_bytes()

    assert session(tmp_path / "one") == session(tmp_path / "two")


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "seriesgroup", "exp", "--field", "e2", "--order", "3", "--text"],
                          capture_output=True, text=True, check=True)
    assert proc.stdout == "r + r^3 + O(r^5)\n"
