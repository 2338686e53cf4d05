from indetdyn.cli import main
from indetdyn.discrepancies import audit, discrepancies


def test_exactly_three_printed_values_disagree():
    claims = audit()
    bad = discrepancies(claims)
    assert sorted(c.key for c in bad) == ["composition_degree", "example1_lambda", "example2_lambda_pn"]
    assert all(c.correction and c.oracle for c in bad)
    assert all(c.oracle for c in claims if c.agree)


def test_confirmed_claims_cover_printed_matrices():
    keys = {c.key for c in audit() if c.agree}
    assert {"example1_matrix", "example2_matrix", "example2_lambda_I", "example3_degree"} <= keys


def test_verify_command_prints_table_and_ledger(capsys):
    assert main(["verify"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert sum(line.startswith("[PASS]") for line in out) == 15
    notes = [line for line in out if line.startswith("discrepancy:")]
    assert len(notes) == 3 and all("correction" in n and "oracle" in n for n in notes)
