from __future__ import annotations

import json
import math
import shutil
import subprocess
from pathlib import Path

import pytest

from grexpand.cli import main
from grexpand.endo import DirectSumEndo, MatrixEndo, PowerEndo, RestrictionEndo
from grexpand.systemfile import SystemFileError, parse_builtin, parse_system

SYSTEMS = Path(__file__).resolve().parent.parent / "systems"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def report(capsys, *argv):
    code, out, _ = run(capsys, *argv)
    return code, json.loads(out)


# -- system files ----------------------------------------------------------------

def test_minimal_file_loads():
    s = parse_system('[group]\nmoduli = [4]\n[endomorphism]\nkind = "matrix"\nmatrix = [[1]]\n')
    assert isinstance(s.phi, MatrixEndo) and s.spec.moduli == (4,)


def test_builtin_string():
    assert parse_builtin("bernoulli_bilateral(moduli=[2])") == {"kind": "bernoulli_bilateral", "moduli": [2]}
    assert parse_builtin("example_4_3") == {"kind": "example_4_3"}
    s = parse_system('[endomorphism]\nbuiltin = "bernoulli_bilateral(moduli=[2])"\n')
    assert s.phi.is_automorphism and s.spec.modulus_at(-7) == 2


def test_example_4_3_builtin():
    s = parse_system('[endomorphism]\nbuiltin = "example_4_3"\n')
    assert s.spec.modulus_at(-1) == 0 and s.spec.modulus_at(0) == 2


def test_ill_defined_error_carries_condition():
    text = '[group]\nmoduli = [4, 2]\n[endomorphism]\nkind = "matrix"\nmatrix = [[1, 1], [0, 1]]\n'
    with pytest.raises(SystemFileError) as err:
        parse_system(text)
    assert "[endomorphism]" in str(err.value) and "m_i | m_j*A_ij: 4 | 2*1 fails" in str(err.value)


def test_parse_error_reports_line():
    with pytest.raises(SystemFileError, match="line 2"):
        parse_system('[group]\nmoduli = [4 4]\n[endomorphism]\n')


def test_nested_descriptors():
    text = '''
[endomorphism]
kind = "direct_sum"
parts = [{builtin = "bernoulli_unilateral(moduli=[2])"}, {builtin = "bernoulli_unilateral(moduli=[3])"}]
'''
    assert isinstance(parse_system(text).phi, DirectSumEndo)
    text = '''
[endomorphism]
kind = "power"
n = 2
of = {builtin = "bernoulli_bilateral(moduli=[2])"}
'''
    assert isinstance(parse_system(text).phi, PowerEndo)
    text = '''
[endomorphism]
kind = "restriction"
of = {builtin = "bernoulli_unilateral(moduli=[8])"}
divisors = {core = [4, 2], right = [1]}
'''
    s = parse_system(text)
    assert isinstance(s.phi, RestrictionEndo) and s.spec.modulus_at(0) == 2


def test_quotient_and_compose_descriptors():
    text = '''
[group]
moduli = [2, 4]
[endomorphism]
kind = "quotient"
by = [[0, 2]]
of = {kind = "compose", parts = [{kind = "matrix", matrix = [[1, 1], [2, 1]]}, {kind = "matrix", matrix = [[1, 0], [0, 3]]}]}
'''
    s = parse_system(text)
    assert s.spec.order == 4


def test_unknown_kind_and_subgroup():
    with pytest.raises(SystemFileError, match="unknown kind"):
        parse_system('[endomorphism]\nkind = "rotation"\n')
    s = parse_system('[endomorphism]\nbuiltin = "bernoulli_unilateral(moduli=[2])"\n'
                     '[[subgroups]]\nname = "S0"\ncopy = 0\n')
    with pytest.raises(SystemFileError, match="unknown subgroup"):
        s.subgroup("S1")


def test_family_elements_and_patterns():
    s = parse_system('''
[endomorphism]
builtin = "bernoulli_unilateral(moduli=[4])"
[[subgroups]]
name = "S"
generators = [[[0, 1], [2, 2]]]
[[patterns]]
name = "D"
value = 2
''')
    assert s.subgroup("S").order == 4 and "D" in s.patterns


# -- commands --------------------------------------------------------------------

def test_entropy_command(capsys):
    code, rep = report(capsys, "entropy", "--system", SYSTEMS / "z3_unilateral.toml",
                       "--subgroup", "S0", "--nmax", 12)
    assert code == 0 and rep["schema_version"] == 1
    res = rep["results"]
    assert res["classification"] == "exact_geometric" and res["ratio"] == 3
    assert res["entropy"] == round(math.log(3), 12)


def test_entropy_csv(capsys):
    code, out, _ = run(capsys, "entropy", "--system", SYSTEMS / "z3_unilateral.toml", "--format", "csv")
    lines = out.strip().splitlines()
    assert code == 0 and lines[0] == "n,order,log_order,ratio"
    assert lines[2].split(",")[1:2] == ["9"] and lines[2].endswith(",3")


def test_check_generator_bilateral(capsys):
    code, rep = report(capsys, "check-generator", "--system", SYSTEMS / "z2_bilateral.toml",
                       "--subgroup", "S0", "--window", 8, "--ncap", 64)
    assert code == 0 and rep["results"]["positive"] and rep["results"]["mode"] == "family"
    code, rep = report(capsys, "check-generator", "--system", SYSTEMS / "z2_bilateral.toml",
                       "--subgroup", "S0", "--side", "forward")
    assert code == 1 and rep["results"]["failures"][0] == -1


def test_certify_reports_total_entropy(capsys):
    code, rep = report(capsys, "certify", "--system", SYSTEMS / "z3_unilateral.toml", "--window", 5)
    assert code == 0 and rep["results"]["entropy"]["total"] and rep["results"]["entropy"]["ratio"] == 3


def test_dualize_and_annihilator(capsys):
    code, rep = report(capsys, "dualize", "--system", SYSTEMS / "z4_times_z2.toml")
    assert code == 0 and set(rep["results"]["subgroups"]) == {"H", "T"}
    code, rep = report(capsys, "annihilator", "--system", SYSTEMS / "z4_times_z2.toml", "--subgroup", "T")
    assert code == 0 and rep["results"]["annihilator"]["order"] == 4


def test_audit_epi_commands(capsys):
    code, rep = report(capsys, "audit-epi", "--system", SYSTEMS / "z2_unilateral.toml")
    assert code == 0 and rep["results"]["finding"] == "NotSurjective" and rep["results"]["target"] == 0
    code, rep = report(capsys, "audit-epi", "--system", SYSTEMS / "z2_bilateral.toml", "--subgroup", "S0")
    assert rep["results"]["finding"] == "GeneratorFails" and rep["results"]["target"] == -1
    code, rep = report(capsys, "audit-epi", "--system", SYSTEMS / "integer_tail.toml")
    assert rep["results"]["finding"] == "NonTorsionAmbient"


def test_lemma41_command(capsys):
    code, rep = report(capsys, "lemma41", "--system", SYSTEMS / "z4_times_z2.toml", "--subgroup", "H")
    assert code == 0 and rep["results"]["report"]["holds"]


def test_lemma41_rejects_non_surjective(capsys, tmp_path):
    p = tmp_path / "s.toml"
    p.write_text('[group]\nmoduli = [4]\n[endomorphism]\nkind = "matrix"\nmatrix = [[2]]\n'
                 '[[subgroups]]\nname = "G"\ngenerators = [[1]]\n')
    code, out, err = run(capsys, "lemma41", "--system", p)
    assert code == 2 and json.loads(err)["error"] == "NotEpimorphism"


def test_scan_commands(capsys):
    code, rep = report(capsys, "scan", "--system", SYSTEMS / "z4_times_z2.toml")
    assert code == 0 and rep["results"]["minimal"][0]["order"] == 4
    code, rep = report(capsys, "scan", "--system", SYSTEMS / "z8_patterns.toml", "--window", 5)
    assert code == 0 and rep["results"]["restriction"]["verdict"] == "consistent at window 5"


def test_verify_command(capsys):
    code, rep = report(capsys, "verify", "--suite", "prop-2.10,thm-4.2")
    assert code == 0 and [s["suite"] for s in rep["results"]["suites"]] == ["power", "epi-audit"]
    code, out, _ = run(capsys, "verify", "--suite", "epi-audit", "--format", "csv")
    assert out.splitlines() == ["suite,passed,cases,failures", "epi-audit,1,3,0"]


def test_error_exit_codes(capsys):
    code, _, err = run(capsys, "entropy", "--system", SYSTEMS / "z3_unilateral.toml", "--subgroup", "nope")
    assert code == 2 and "unknown subgroup" in err
    assert run(capsys, "entropy")[0] == 2
    assert run(capsys, "verify", "--suite", "no-such-suite")[0] == 2
    assert run(capsys, "bogus")[0] == 2
    assert run(capsys, "dualize", "--system", SYSTEMS / "z2_bilateral.toml")[0] == 2


def test_cap_env_var(capsys, monkeypatch):
    monkeypatch.setenv("GREXPAND_CAP", "4")
    code, _, err = run(capsys, "scan", "--system", SYSTEMS / "z4_times_z2.toml")
    assert code == 2 and "CapExceeded" in err


def test_reports_are_deterministic(capsys):
    args = ("scan", "--system", SYSTEMS / "z8_patterns.toml", "--window", 4)
    _, a, err_a = run(capsys, *args)
    _, b, _ = run(capsys, *args)
    assert a == b and "timing_seconds" in err_a and "timing" not in a


@pytest.mark.skipif(shutil.which("grexpand") is None, reason="console script not installed")
def test_console_script():
    proc = subprocess.run(["grexpand", "entropy", "--system", str(SYSTEMS / "z3_unilateral.toml")],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["results"]["ratio"] == 3
