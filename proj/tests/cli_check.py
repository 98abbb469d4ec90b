"""Runs the CLI, validates every JSON document against its schema and checks
exit codes and byte-identical reruns."""

import argparse
import filecmp
import json
import subprocess
import sys
import tempfile
from pathlib import Path

import jsonschema

ap = argparse.ArgumentParser()
ap.add_argument("--cli", required=True)
ap.add_argument("--root", required=True)
ap.add_argument("--group", choices=["fast", "split", "demo"], default="fast")
args = ap.parse_args()

root = Path(args.root)
schemas = {p.name.split(".")[0]: json.loads(p.read_text()) for p in (root / "schemas").glob("*.schema.json")}
scenario = str(root / "scenarios" / "default.json")
failures = []


def run(cmd, schema, code, out=None):
    full = [args.cli, "--out", out or tempfile.mkdtemp()] + cmd
    p = subprocess.run(full, capture_output=True, text=True)
    label = " ".join(cmd)
    if p.returncode != code:
        failures.append(f"{label}: exit {p.returncode}, expected {code}\n{p.stdout}{p.stderr}")
        return None
    try:
        doc = json.loads(p.stdout)
        jsonschema.validate(doc, schemas[schema])
    except (json.JSONDecodeError, jsonschema.ValidationError) as e:
        failures.append(f"{label}: {e}")
        return None
    print(f"ok  {label}")
    return doc


def same_dirs(a, b, label):
    cmp = filecmp.dircmp(a, b)
    if cmp.left_only or cmp.right_only or cmp.diff_files:
        failures.append(f"{label}: reruns differ {cmp.diff_files} {cmp.left_only} {cmp.right_only}")
    else:
        for f in cmp.common_files:
            if not filecmp.cmp(Path(a) / f, Path(b) / f, shallow=False):
                failures.append(f"{label}: {f} differs between reruns")


if args.group == "fast":
    run(["theta", "--q", "2", "--k", "2", "--z", "0.5,0.3", "--z", "1e6,1"], "theta", 0)
    run(["theta", "--q", "3", "--k", "1.5", "--z", "0.7", "--check-growth", "200"], "theta", 0)
    run(["fourier", "--z", "0.1,0.2", "--z", "-1,0.49"], "fourier", 0)
    run(["fourier", "--z", "0,0.7"], "error", 2)
    d = run(["qlaplace", "--k", "2", "--q", "2", "--direction", "0", "--f", "monomial:1", "--T", "0.1,0.02"], "qlaplace", 0)
    if d is not None:
        # L(u)(T) = c_1 T: the value must be a real multiple of T
        v = complex(*d["value"]) / complex(0.1, 0.02)
        if abs(v.imag) > 1e-10 * abs(v):
            failures.append(f"qlaplace monomial:1 is not proportional to T: {v}")
    run(["qlaplace", "--k", "1", "--q", "2", "--direction", "1", "--f", "pole:0.6,0", "--T", "0.1,0.1"], "qlaplace", 0)
    run(["qlaplace", "--k", "1", "--q", "2", "--f", "nosuch", "--T", "0.1"], "error", 2)
    g = run(["geometry", "--scenario", scenario], "geometry", 0)
    if g is not None and (g["partition"]["I1"] != [0, 2] or g["partition"]["I2"] != [1, 3]):
        failures.append(f"geometry: unexpected partition {g['partition']}")
    run(["geometry", "--scenario", str(root / "scenarios" / "missing.json")], "error", 2)
    run(["hypotheses", "--spec", str(root / "scenarios" / "equation.json")], "hypotheses", 0)
    h = run(["hypotheses", "--spec", str(root / "scenarios" / "equation_bad_h1.json")], "hypotheses", 1)
    if h is not None and not any(v["clause"].startswith("H1") for v in h["violations"]):
        failures.append("hypotheses: planted H1 defect not named")
    run(["nosuch"], "error", 2)
    run(["fit", "--kind", "q_gevrey", "--k", "2", "--planted-A", "2", "--planted-C", "3", "--noise", "0.05"], "fit", 0)
    run(["fit", "--kind", "nosuch", "--planted-A", "2", "--planted-C", "3"], "error", 2)
    with tempfile.TemporaryDirectory() as a, tempfile.TemporaryDirectory() as b:
        for out in (a, b):
            run(["--emit-plot-data", "diff", "--scenario", scenario], "diff", 0, out)
            run(["--seed", "7", "fit", "--planted-A", "1.5", "--planted-C", "2", "--noise", "0.05"], "fit", 0, out)
        same_dirs(a, b, "diff/fit")
        t = next(Path(a).glob("planted_table.csv"))
        run(["fit", "--table", str(t)], "fit", 0)
        header = (Path(a) / "rate_p0.csv").read_text().splitlines()[0]
        if header != "j,abs_eps_t,norm":
            failures.append(f"rate table header {header}")
elif args.group == "split":
    with tempfile.TemporaryDirectory() as a:
        s = run(["split", "--scenario", scenario, "--t", "0.3,0.006", "--n-max", "5"], "split", 0, a)
        for f in ("psi.csv", "glue.csv", "coefficients.csv", "certification.json", "remainders_one.csv", "remainders_two.csv"):
            if not (Path(a) / f).exists():
                failures.append(f"split: missing {f}")
else:
    d = run(["demo", "--scenario", scenario], "demo", 0)
    if d is not None and not d["passed"]:
        failures.append("demo did not pass")

for f in failures:
    print("FAIL", f)
sys.exit(1 if failures else 0)
