"""Drive the command line end to end on generated problem files.

Writes a problem JSON (a q-commuting nilpotent pair), runs all four
subcommands, and prints each report's check table.  Also shows exit code 1
on a failed precondition (a tuple that violates its declared relations)
and exit code 2 on a malformed file.
"""

import json
import subprocess
import sys
import tempfile
from pathlib import Path

import numpy as np

from fockmodel import PolyIdealSpec
from fockmodel.problem_io import Problem, save_problem
from fockmodel.sampling import conjugated_tuple, haar_unitary, q_commuting_nilpotent_tuple


def run(*args):
    cmd = [sys.executable, "-m", "fockmodel.cli", *map(str, args)]
    proc = subprocess.run(cmd, capture_output=True, text=True)
    print(f"$ fockmodel {' '.join(map(str, args))}   -> exit {proc.returncode}")
    return proc.returncode


def show_checks(path):
    report = json.loads(Path(path).read_text())
    for c in report["checks"]:
        flag = "ok " if c["pass"] else "FAIL"
        print(f"   [{flag}] {c['name']:<12} residual {c['residual']:.2e}  "
              f"(tol {c['tolerance']:.0e})")


def main():
    tmp = Path(tempfile.mkdtemp(prefix="fockmodel_demo_"))
    q = np.exp(1j * np.pi / 3)
    rng = np.random.default_rng(3)
    mats = q_commuting_nilpotent_tuple(rng, q, 0.5)
    spec = PolyIdealSpec(n=2, kind="q_commutative", q=q)

    prob = tmp / "pair.json"
    save_problem(prob, Problem(n=2, m=mats[0].shape[0], degree=5,
                               mats=mats, ideal=spec))

    for sub in ("analyze", "charfn", "model"):
        out = tmp / f"{sub}.json"
        assert run(sub, "--problem", prob, "--out", out) == 0
        show_checks(out)

    u = haar_unitary(mats[0].shape[0], rng)
    prob_b = tmp / "pair_rotated.json"
    rotated = conjugated_tuple(mats, u)
    save_problem(prob_b, Problem(n=2, m=rotated[0].shape[0], degree=5,
                                 mats=rotated, ideal=spec))
    ufile = tmp / "u.json"
    ufile.write_text(json.dumps({"matrix": [[[z.real, z.imag] for z in row]
                                            for row in u]}))
    out = tmp / "equiv.json"
    assert run("equiv", "--problem", prob, "--problem-b", prob_b,
               "--unitary", ufile, "--out", out) == 0
    show_checks(out)

    # failure modes: relation violation -> 1, malformed file -> 2
    bad = tmp / "violates.json"
    save_problem(bad, Problem(n=2, m=2, degree=5,
                              mats=[np.eye(2) * 0.4, np.eye(2) * 0.4], ideal=spec))
    assert run("analyze", "--problem", bad, "--out", tmp / "bad.json") == 1

    (tmp / "broken.json").write_text('{"n": "two"}')
    assert run("analyze", "--problem", tmp / "broken.json",
               "--out", tmp / "x.json") == 2

    print(f"\nreports left in {tmp}")


if __name__ == "__main__":
    main()
