#!/usr/bin/env python3
"""Extract the MovieLens-100k ratings into the generic CSV format.

The GroupLens servers are not always reachable, but the RecBole wheel on PyPI
ships an atomic copy of ML-100k (``recbole/dataset_example/ml-100k``). This
script downloads that wheel with pip and converts ``ml-100k.inter`` to
``user_id,item_id,rating``.

Usage: fetch_ml100k.py [OUTPUT_CSV]   (default: data/ml-100k.csv)
"""

import csv
import io
import pathlib
import subprocess
import sys
import tempfile
import zipfile

INTER = "recbole/dataset_example/ml-100k/ml-100k.inter"


def main() -> int:
    out = pathlib.Path(sys.argv[1] if len(sys.argv) > 1 else "data/ml-100k.csv")
    if out.exists():
        print(f"{out} already present")
        return 0
    with tempfile.TemporaryDirectory() as tmp:
        subprocess.run(
            [sys.executable, "-m", "pip", "download", "--no-deps", "--quiet",
             "-d", tmp, "recbole==1.2.1"],
            check=True,
        )
        wheel = next(pathlib.Path(tmp).glob("recbole-*.whl"))
        with zipfile.ZipFile(wheel) as zf:
            raw = zf.read(INTER).decode("utf-8")

    reader = csv.reader(io.StringIO(raw), delimiter="\t")
    next(reader)  # user_id:token item_id:token rating:float timestamp:float
    out.parent.mkdir(parents=True, exist_ok=True)
    rows = 0
    with out.open("w", newline="\n") as fh:
        fh.write("user_id,item_id,rating\n")
        for rec in reader:
            if not rec:
                continue
            fh.write(f"{rec[0]},{rec[1]},{int(float(rec[2]))}\n")
            rows += 1
    print(f"wrote {rows} ratings to {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
