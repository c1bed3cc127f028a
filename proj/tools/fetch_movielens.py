#!/usr/bin/env python3
"""Fetch a 100K-rating MovieLens table and write it in u.data layout.

The ratings come from the ``dslabs::movielens`` table that ships inside the
``rdatasets`` wheel (671 users, 9066 movies, 100004 ratings, 0.5-5 stars).
Output rows are ``user<TAB>item<TAB>rating<TAB>timestamp``.
"""
import argparse
import pathlib
import subprocess
import sys
import tempfile
import zipfile

import pandas as pd

MEMBER = "rdatasets/_data/dslabs/movielens.pkl.compress"


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--out", default=str(pathlib.Path(__file__).resolve().parents[1] / "data" / "movielens_100k.tsv"))
    args = parser.parse_args()

    with tempfile.TemporaryDirectory() as tmp:
        subprocess.run([sys.executable, "-m", "pip", "download", "--no-deps", "-q", "-d", tmp, "rdatasets==0.2.10"],
                       check=True)
        wheel = next(pathlib.Path(tmp).glob("rdatasets-*.whl"))
        with zipfile.ZipFile(wheel) as zf:
            blob = pathlib.Path(tmp) / "movielens.pkl.xz"
            blob.write_bytes(zf.read(MEMBER))
        df = pd.read_pickle(blob, compression="xz")

    out = pathlib.Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    df = df[["userId", "movieId", "rating", "timestamp"]]
    with out.open("w") as fh:
        for row in df.itertuples(index=False):
            fh.write(f"{row.userId}\t{row.movieId}\t{row.rating:g}\t{row.timestamp}\n")
    print(f"wrote {len(df)} ratings to {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
