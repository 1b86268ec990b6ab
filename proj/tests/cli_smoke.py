"""End-to-end checks of the embamp command line: exit codes, files, determinism."""

import csv
import filecmp
import json
import subprocess
import sys
import tempfile
from pathlib import Path

EXE = sys.argv[1]
failures = []


def check(cond, what):
    print(("ok   " if cond else "FAIL ") + what)
    if not cond:
        failures.append(what)


def embamp(*args):
    return subprocess.run([EXE, *map(str, args)], capture_output=True, text=True)


def rows(path):
    with open(path) as f:
        first = f.readline()
        assert first.startswith("# schema_version"), path
        return list(csv.DictReader(f))


def write_config(path, **extra):
    path.write_text(json.dumps({"schema_version": 1, **extra}))
    return path


with tempfile.TemporaryDirectory() as tmp:
    tmp = Path(tmp)
    ea = write_config(tmp / "ea.json")
    cdr = write_config(tmp / "cdr.json", protocol="cdr")

    r = embamp("run", ea, "--out", tmp / "ea1")
    check(r.returncode == 0, "run: default ea exits 0")
    for name in ("trajectory.csv", "report.csv", "summary.json"):
        check((tmp / "ea1" / name).is_file(), f"run: writes {name}")
    s_ea = json.loads((tmp / "ea1" / "summary.json").read_text())
    check(0.5 < s_ea["fidelity"] < 1.0, "run: fidelity in (0.5, 1)")
    for key in ("d2_final", "nines", "dead_time", "max_n_readout", "constraint_margins"):
        check(key in s_ea, f"run: summary has {key}")
    header = (tmp / "ea1" / "trajectory.csv").read_text().splitlines()[1].split(",")
    check(header[:5] == ["t_s", "branch", "n_readout", "n_snail", "n_output"], "run: trajectory column order")

    embamp("run", ea, "--out", tmp / "ea2")
    check(all(filecmp.cmp(tmp / "ea1" / n, tmp / "ea2" / n, shallow=False)
              for n in ("trajectory.csv", "report.csv", "summary.json")), "run: repeated runs are byte-identical")

    r = embamp("run", cdr, "--out", tmp / "cdr")
    check(r.returncode == 0, "run: cdr exits 0")
    s_cdr = json.loads((tmp / "cdr" / "summary.json").read_text())
    check(s_ea["d2_final"] >= s_cdr["d2_final"], "run: ea d2 >= cdr d2 at the default budgets")

    r = embamp("run", write_config(tmp / "sq.json", ea={"squeeze_db": 12}, budgets={"n_tot": 1}), "--out", tmp / "x")
    check(r.returncode == 2, "run: exhausted photon budget exits 2")
    r = embamp("run", write_config(tmp / "chi.json", device={"chi": -3}), "--out", tmp / "x")
    check(r.returncode == 1 and "device.chi" in r.stderr, "run: negative chi exits 1 naming device.chi")
    r = embamp("run", write_config(tmp / "khi.json", device={"khi": 3}), "--out", tmp / "x")
    check(r.returncode == 1 and "device.khi" in r.stderr, "run: unknown key exits 1")
    r = embamp("run", tmp / "missing.json")
    check(r.returncode == 1, "run: missing config exits 1")

    r = embamp("sweep", ea, "--out", tmp / "sw", "--ntot", "1:20:3:log", "--time", "0.1:3:3:log", "--jobs", 2)
    check(r.returncode == 0, "sweep: 3x3 grid exits 0")
    c = rows(tmp / "sw" / "contours.csv")
    check(sum(x["protocol"] == "ea" for x in c) == 9 and sum(x["protocol"] == "cdr" for x in c) == 9,
          "sweep: 9 rows per protocol")
    check(list(c[0].keys()) == ["protocol", "n_tot", "T_us", "d2", "fidelity", "nines"], "sweep: contour columns")
    dead = [x for x in c if x["protocol"] == "ea" and float(x["T_us"]) < 0.3]
    check(dead and all(abs(float(x["nines"]) - 0.301) < 2e-3 for x in dead), "sweep: ea dead zone at 0.301 nines")
    check((tmp / "sw" / "breakeven.csv").is_file(), "sweep: writes breakeven.csv")
    r = embamp("sweep", ea, "--out", tmp / "sw", "--ntot", "1:20")
    check(r.returncode == 64, "sweep: malformed axis exits 64")

    r = embamp("optimize", ea, "--out", tmp / "opt", "--budget", 50)
    check(r.returncode == 0, "optimize: exits 0")
    h = rows(tmp / "opt" / "history.csv")
    check(0 < len(h) <= 50, "optimize: history has at most 50 rows")
    t = json.loads((tmp / "opt" / "theta_star.json").read_text())
    check(abs(t["objective"] - t["prefactor"] * t["d2"]) <= 1e-9 * t["d2"], "optimize: weights (1,0) give d2 times prefactor")
    check(t["objective"] >= t["baseline_objective"], "optimize: theta* beats the baseline")

    r = embamp("freqplan", "--n", 3, "--band", "4:8", "--guard", 50, "--out", tmp / "fp")
    plan = json.loads((tmp / "fp" / "plan.json").read_text())
    check(r.returncode == 0 and plan["collisions"] == [], "freqplan: n=3 in 4-8 GHz is clean")
    r = embamp("freqplan", "--check", "4.0,6.0,7.5", "--out", tmp / "fp")
    check(r.returncode == 0, "freqplan: {4.0, 6.0, 7.5} GHz passes the check")
    r = embamp("freqplan", "--n", 6, "--band", "4:5", "--out", tmp / "fp")
    check(r.returncode == 3 and "bandwidth bound" in r.stderr, "freqplan: n=6 in 4-5 GHz exits 3 with the bound")
    r = embamp("freqplan", "--band", "oops", "--out", tmp / "fp")
    check(r.returncode == 64, "freqplan: malformed band exits 64")
    r = embamp("bogus")
    check(r.returncode == 64, "unknown subcommand exits 64")

if failures:
    print(f"{len(failures)} failed")
    sys.exit(1)
