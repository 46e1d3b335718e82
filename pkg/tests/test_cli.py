import io
import json
import subprocess
import sys
from pathlib import Path

from conftest import EX2, EX3
from quantpat.cli import main

GOLDEN = Path(__file__).parent / "golden" / "nested_pair.deriv.json"
ASYMMETRIC = r"(\<x,<u,y>>. a) <c, (\<x,<z,w>>. x) a>"


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out)
    return code, out.getvalue()


def test_normalize_identity():
    code, text = run("normalize", "-e", r"(\z.z) x")
    assert code == 0
    assert text.splitlines() == ["b (\\z. z) x", "e z[z/x]", "FINAL x", "COUNTERS 1 1 0"]


def test_normalize_variable():
    assert run("normalize", "-e", "x") == (0, "FINAL x\nCOUNTERS 0 0 0\n")


def test_normalize_budget():
    code, text = run("normalize", "-e", "Omega", "--max-steps", "10")
    assert code == 2 and "BUDGET EXCEEDED" in text


def test_parse_errors_exit_1(capsys):
    assert run("normalize", "-e", r"\<x,x>. x")[0] == 1
    assert run("verify", "-e", "(x")[0] == 1
    assert "error" in capsys.readouterr().err


def test_macros_off_keeps_names():
    assert run("normalize", "-e", "I x", "--macros", "off")[1] == "FINAL I x\nCOUNTERS 0 0 0\n"


def test_classify():
    assert run("classify", "-e", "z[<z,w>/x Omega]") == (0, "PureCanonical size 2\n")
    assert run("classify", "-e", "<x,I> w") == (0, "HeadClash\n")


def test_check_golden():
    code, text = run("check", "-f", str(GOLDEN), "--system", "e")
    assert code == 0 and text.splitlines() == ["OK", "TIGHT", "INDICES 4 6 2 0"]


def test_check_golden_in_system_u():
    code, text = run("check", "-f", str(GOLDEN), "--system", "u")
    assert code == 3 and text.startswith("VIOLATION")


def test_check_corrupted_index(tmp_path):
    doc = json.loads(GOLDEN.read_text())
    doc["premises"][0]["indices"][1] += 1
    bad = tmp_path / "bad.deriv.json"
    bad.write_text(json.dumps(doc))
    code, text = run("check", "-f", str(bad))
    assert code == 3 and "rule violation at [" in text


def test_check_format_error(tmp_path):
    bad = tmp_path / "bad.deriv.json"
    bad.write_text("[]")
    assert run("check", "-f", str(bad))[0] == 1


def test_synthesize_then_check(tmp_path):
    out = tmp_path / "ex3.deriv.json"
    assert run("synthesize", "-e", EX3, "--out", str(out))[0] == 0
    code, text = run("check", "-f", str(out))
    assert code == 0 and text.splitlines()[-1] == "INDICES 3 4 1 1"
    out_u = tmp_path / "ex3u.deriv.json"
    assert run("synthesize", "-e", EX3, "--system", "u", "--out", str(out_u))[0] == 0
    code, text = run("check", "-f", str(out_u), "--system", "u")
    assert code == 0 and text.splitlines()[-1].startswith("SIZE ")


def test_synthesize_divergent():
    assert run("synthesize", "-e", "Omega", "--max-steps", "20")[0] == 2


def test_verify_lines():
    assert run("verify", "-e", EX2) == (0, "SYNTH 4 6 2 0 | OBS 4 6 2 0 | MATCH yes\n")
    assert run("verify", "-e", EX3) == (0, "SYNTH 3 4 1 1 | OBS 3 4 1 1 | MATCH yes\n")
    assert run("verify", "-e", "x") == (0, "SYNTH 0 0 0 0 | OBS 0 0 0 0 | MATCH yes\n")
    assert run("verify", "-e", "Omega", "--max-steps", "20")[0] == 2


def test_verify_alternative_reading_mismatch():
    code, text = run("verify", "-e", ASYMMETRIC, "--pair-e-reading", "paper")
    assert code == 4 and text.endswith("MATCH no\n")


def test_full_probe():
    code, text = run("normalize", "-e", r"(\x. x) ((\y. y) z)", "--strategy", "full-probe")
    assert code == 0 and text.splitlines()[-1] == "JOINABLE yes" and len(text.splitlines()) == 3


def test_fuzz_is_reproducible():
    a = run("fuzz", "--seed", "3", "--count", "60")
    b = run("fuzz", "--seed", "3", "--count", "60")
    assert a == b and a[0] == 0
    assert "terms 60" in a[1] and "pass exact" in a[1]


def test_fuzz_injected_fault():
    code, text = run("fuzz", "--count", "20", "--pair-e-reading", "paper", "-e", ASYMMETRIC)
    assert code == 4
    assert "FAIL" in text and "MINIMIZED" in text


def test_fuzz_writes_out(tmp_path):
    out = tmp_path / "stats.txt"
    code, text = run("fuzz", "--count", "10", "--out", str(out))
    assert code == 0 and out.read_text() == text


def test_bad_config():
    assert run("fuzz", "--size", "0")[0] == 1
    assert run("normalize")[0] == 1


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "quantpat", "verify", "-e", EX2],
                       capture_output=True, text=True, check=False)
    assert r.returncode == 0 and "MATCH yes" in r.stdout
