#!/usr/bin/env python3
"""End-to-end checks of the rankpref command-line tool.

Usage: cli_test.py PATH_TO_RANKPREF
"""

import pathlib
import random
import re
import subprocess
import sys
import tempfile

BIN = sys.argv[1]
failures = []


def run(*args):
    return subprocess.run([BIN, *map(str, args)], capture_output=True, text=True)


def check(name, cond, detail=""):
    print(("ok    " if cond else "FAIL  ") + name + (f"  ({detail})" if detail and not cond else ""))
    if not cond:
        failures.append(name)


def make_fixture(path):
    rng = random.Random(3)
    lines = []
    for u in range(1, 81):
        taste = rng.uniform(-1, 1)
        items = rng.sample(range(1, 41), 18)
        # Guarantee every user has a 5, a 1 and a few other levels.
        for k, it in enumerate(items):
            if k < 5:
                r = [5, 1, 2, 3, 4][k]
            else:
                r = min(5, max(1, round(3 + taste + (it % 5 - 2) * 0.6 + rng.gauss(0, 0.7))))
            lines.append(f"{u}::{100 + it}::{r}::97830{u:04d}")
    path.write_text("\n".join(lines) + "\n")


with tempfile.TemporaryDirectory() as tmp:
    tmp = pathlib.Path(tmp)
    data = tmp / "ratings.dat"
    make_fixture(data)

    r = run("stats", "--dataset", data)
    check("stats exit 0", r.returncode == 0, r.stderr)
    check("stats users", re.search(r"users\s+80\n", r.stdout) is not None, r.stdout)
    check("stats items", re.search(r"items\s+40\n", r.stdout) is not None, r.stdout)
    check("stats entries", re.search(r"entries\s+1,440\n", r.stdout) is not None, r.stdout)
    check("stats sparsity", "sparsity    55.00%" in r.stdout, r.stdout)
    check("stats components", re.search(r"components\s+1\n", r.stdout) is not None, r.stdout)

    empty = tmp / "empty.dat"
    empty.write_text("")
    r = run("stats", "--dataset", empty)
    check("empty file exits 2", r.returncode == 2, str(r.returncode))
    check("empty file says no entries", "no entries" in r.stderr, r.stderr)

    bad = tmp / "bad.dat"
    bad.write_text("1::10::5::0\n1::11::9::0\n")
    r = run("stats", "--dataset", bad)
    check("out-of-scale rating exits 2 with line", r.returncode == 2 and "line 2" in r.stderr, r.stderr)

    model = tmp / "sc.model"
    r = run("fit", "--dataset", data, "--methods", "sc", "--out-model", model)
    check("fit sc exit 0", r.returncode == 0, r.stderr)
    check("fit sc converged", "converged yes" in r.stdout, r.stdout)
    check("model file header", model.read_text().startswith("rankpref-consistency 1\nkind shift\n"))

    r = run("predict", "--model", model, "--user", 0, "--item", 3)
    check("predict by index", r.returncode == 0 and float(r.stdout) == float(r.stdout), r.stderr)
    r2 = run("predict", "--model", model, "--dataset", data, "--user", 1, "--item",
             data.read_text().split("\n")[3].split("::")[1])
    check("predict by external id", r2.returncode == 0 and r2.stdout == r.stdout, r2.stdout + r2.stderr)
    r = run("predict", "--model", model, "--user", 999, "--item", 0)
    check("predict out of range exits 1", r.returncode == 1, str(r.returncode))

    svd_model = tmp / "svd.model"
    r = run("fit", "--dataset", data, "--methods", "svd", "--svd-fractions", 0.3, "--out-model", svd_model)
    check("fit svd", r.returncode == 0 and "rank 12" in r.stdout, r.stdout + r.stderr)
    r = run("predict", "--model", svd_model, "--user", 2, "--item", 5, "--clamp")
    check("predict svd clamped", r.returncode == 0 and 1.0 <= float(r.stdout) <= 5.0, r.stdout + r.stderr)

    r = run("fit", "--dataset", data, "--methods", "uc", "--max-iter", 1)
    check("non-convergence exits 3", r.returncode == 3, str(r.returncode))

    csv_a = tmp / "a.csv"
    r = run("experiment", "--dataset", data, "--methods", "uc,sc", "--out-csv", csv_a)
    check("experiment uc,sc exit 0", r.returncode == 0, r.stderr)
    rows = csv_a.read_text().splitlines()
    check("uc,sc gives 8 rows", len(rows) == 9, str(len(rows)))
    check("csv header", rows[0] == "dataset,method,r_hi,r_lo,n_pairs,discordant,concordant,ties,skipped,kendall_tau,rmse_withheld")

    csv_b, csv_c, svg = tmp / "b.csv", tmp / "c.csv", tmp / "b.svg"
    r1 = run("experiment", "--dataset", data, "--seed", 9, "--out-csv", csv_b, "--out-svg", svg)
    r2 = run("experiment", "--dataset", data, "--seed", 9, "--out-csv", csv_c)
    check("default methods give 20 rows", len(csv_b.read_text().splitlines()) == 21)
    check("byte-identical csv", csv_b.read_bytes() == csv_c.read_bytes())
    check("identical stdout", r1.stdout == r2.stdout)
    check("svg written", svg.read_text().startswith("<svg"))

    r = run("experiment", "--dataset", data, "--gaps", "5,6")
    check("invalid gap exits 1", r.returncode == 1, str(r.returncode))
    check("invalid gap message", "outside scale" in r.stderr, r.stderr)
    r = run("experiment", "--dataset", data, "--methods", "glocalk")
    check("unknown method exits 1", r.returncode == 1, str(r.returncode))

    cfg = tmp / "exp.cfg"
    cfg.write_text(f"dataset = ratings.dat\nmethods = sc,svd\nsvd_fractions = 0.5\n"
                   f"gaps = 5,1;5,4\nseed = 9\nout_csv = cfg.csv\n")
    r = run("experiment", "--config", cfg)
    cfg_rows = (tmp / "cfg.csv").read_text().splitlines()
    check("config experiment", r.returncode == 0 and len(cfg_rows) == 5, r.stderr)
    sc_default = [l for l in csv_b.read_text().splitlines() if ",SC,5,1," in l]
    sc_cfg = [l for l in cfg_rows if ",SC,5,1," in l]
    check("same seed, same SC cell", sc_default == sc_cfg, f"{sc_default} vs {sc_cfg}")

    for method in ("uc", "sc"):
        r = run("audit", method, "--trials", 1000)
        check(f"audit {method}", r.returncode == 0 and " 0 violations in 1000 trials" in r.stdout,
              r.stdout + r.stderr)
    r = run("audit", "svd", "--fraction", 0.3, "--trials", 1000)
    check("audit svd reports a count", r.returncode == 0 and "violations in 1000 trials" in r.stdout,
          r.stdout + r.stderr)

    r = run("frobnicate")
    check("unknown subcommand exits 1", r.returncode == 1, str(r.returncode))
    r = run("stats")
    check("missing --dataset exits 1", r.returncode == 1, str(r.returncode))

print(f"{len(failures)} failure(s)")
sys.exit(1 if failures else 0)
