"""End-to-end checks of the jointspec command line: exit codes, report shape, determinism.

Usage: test_cli.py <jointspec binary> <fixtures dir>
"""

import json
import os
import subprocess
import sys
import tempfile

BIN, FIX = sys.argv[1], sys.argv[2]
failures = []


def run(*args):
    p = subprocess.run([BIN, *args], capture_output=True, text=True, timeout=300)
    return p.returncode, p.stdout, p.stderr


def check(name, cond, extra=""):
    print(("ok   " if cond else "FAIL ") + name + (f" ({extra})" if extra and not cond else ""))
    if not cond:
        failures.append(name)


def fixture(name):
    return os.path.join(FIX, name + ".json")


with tempfile.TemporaryDirectory() as tmp:
    # verify on the dihedral pair at closed-form tolerance
    rc, out, err = run("verify", "-i", fixture("dihedral_pi_3"), "--tol", "1e-8")
    check("verify dihedral exits 0", rc == 0, err)
    if rc == 0:
        rep = json.loads(out)
        v = rep["verification"]
        check("report carries schema version", rep["schema_version"] == 1)
        check("verify dihedral all pass", v["all_pass"] and v["hypotheses_hold"])
        check("verify dihedral residuals <= 1e-8", all(r["residual"] <= 1e-8 for r in v["relations"]))

    # non-normal inputs are refused
    rc, out, err = run("verify", "-i", fixture("nonnormal_counterexample"))
    check("verify non-normal exits 3", rc == 3, err)
    check("refusal explains itself on stderr", "blow-up" in err or "normal" in err)

    rc, out, err = run("demo-blowup")
    check("demo-blowup exits 3", rc == 3)
    if out:
        d = json.loads(out)
        check("demo-blowup exponent near -1", d["blow_up"] and abs(d["exponent"] + 1.0) <= 0.05, d.get("exponent"))

    # analyze writes to a file
    path = os.path.join(tmp, "analysis.json")
    rc, out, err = run("analyze", "-i", fixture("diagonal_lines"), "-o", path)
    check("analyze diagonal lines exits 0", rc == 0 and os.path.exists(path), err)

    # plot on the zero tuple: empty spectrum, header only
    csv = os.path.join(tmp, "zero.csv")
    rc, out, err = run("plot", "-i", fixture("zero_tuple"), "-o", csv)
    check("plot zero tuple exits 0", rc == 0, err)
    if rc == 0:
        with open(csv) as f:
            lines = f.read().strip().splitlines()
        check("plot zero tuple is header only", lines == ["x1_re,x1_im,x2_re,x2_im"], lines[:3])

    # input and usage errors
    bad = os.path.join(tmp, "bad.json")
    with open(bad, "w") as f:
        f.write("{ not json")
    check("malformed JSON exits 2", run("verify", "-i", bad)[0] == 2)
    check("missing file exits 2", run("verify", "-i", os.path.join(tmp, "nope.json"))[0] == 2)
    check("too few samples exits 2", run("verify", "-i", fixture("dihedral_pi_3"), "--samples", "3")[0] == 2)
    check("unknown subcommand exits 2", run("frobnicate")[0] == 2)

    # Coxeter pipeline
    rc, out, err = run("coxeter-check", "-i", fixture("coxeter_dihedral_m3"))
    check("coxeter m=3 exits 0", rc == 0, err)
    if rc == 0:
        d = json.loads(out)
        dim_rho = len(d["representation"]["generators"][0])
        check("coxeter m=3 recovers dim L = dim rho", d["rigidity"]["dim_L"] == dim_rho == 3, d["rigidity"]["dim_L"])
    check("duplicated irrep exits 1", run("coxeter-check", "-i", fixture("coxeter_duplicated_irrep"))[0] == 1)
    check("extra sheet exits 1", run("coxeter-check", "-i", fixture("coxeter_extra_sheet"))[0] == 1)
    check("inconsistent angle exits 2", run("coxeter-check", "-i", fixture("coxeter_inconsistent_angle"))[0] == 2)

    # determinism
    for args in (["verify", "-i", fixture("dihedral_pi_3")], ["coxeter-check", "-i", fixture("coxeter_type_a3")]):
        a, b = run(*args), run(*args)
        check("deterministic " + args[0], a == b)

if failures:
    print(f"{len(failures)} CLI checks failed")
    sys.exit(1)
print("all CLI checks passed")
