#!/usr/bin/env python3
"""Vendor curve fixtures for the acceptance suite from the LMFDB.

For each requested curve this script downloads the generators of the adelic
Galois image (column ``adelic_gens`` of ``ec_curvedata``, matrices at level
``adelic_level``), reduces them modulo the supplied m0, and appends one
curve record per line to the output JSONL file:

    {"label": ..., "m0": ..., "adelic_index": ..., "generators": [...]}

m0 is an *input*: it is the level of the m-adic image, which this toolkit
never computes (the upstream pipeline that produces curve records owns that
step).  For 1944.c1 the value m0 = 12 is well known and used as a default;
for any other curve pass ``--curve LABEL:M0``.

Reducing the adelic generators mod m0 yields generators of the mod-m0 image
because reduction GL2(Zhat) -> GL2(Z/m0) is surjective on closed subgroups
topologically generated by the listed matrices, and m0 divides the adelic
level.

Usage:
    python3 tools/fetch_fixtures.py                # the two default curves
    python3 tools/fetch_fixtures.py --curve 123.a1:24:12
    python3 tools/fetch_fixtures.py --out tests/fixtures/curves.jsonl

Requires network access to https://www.lmfdb.org.
"""

import argparse
import datetime
import json
import pathlib
import sys
import urllib.parse
import urllib.request

API = "https://www.lmfdb.org/api/ec_curvedata/"
DEFAULT_CURVES = ["232544.f1", "1944.c1:12"]
KNOWN_M0 = {"1944.c1": 12}


def fetch_curve(label):
    query = urllib.parse.urlencode(
        {
            "lmfdb_label": label,
            "_format": "json",
            "_fields": "lmfdb_label,adelic_level,adelic_index,adelic_gens",
        }
    )
    with urllib.request.urlopen(f"{API}?{query}", timeout=60) as resp:
        payload = json.load(resp)
    rows = payload.get("data", [])
    if not rows:
        raise SystemExit(f"{label}: not found in ec_curvedata")
    row = rows[0]
    for field in ("adelic_level", "adelic_gens"):
        if row.get(field) is None:
            raise SystemExit(f"{label}: LMFDB record lacks {field}")
    return row


def reduce_generators(gens, level, m0):
    if level % m0 != 0:
        raise SystemExit(
            f"m0={m0} does not divide the adelic level {level}; "
            "check the supplied m0"
        )
    reduced, seen = [], set()
    for g in gens:
        # adelic_gens rows are flat [a, b, c, d] or nested [[a, b], [c, d]]
        flat = [x for row in g for x in row] if isinstance(g[0], list) else g
        mat = [
            [flat[0] % m0, flat[1] % m0],
            [flat[2] % m0, flat[3] % m0],
        ]
        key = tuple(mat[0] + mat[1])
        if key not in seen:
            seen.add(key)
            reduced.append(mat)
    return reduced


def parse_curve_arg(arg):
    parts = arg.split(":")
    label = parts[0]
    m0 = int(parts[1]) if len(parts) > 1 else KNOWN_M0.get(label)
    index = int(parts[2]) if len(parts) > 2 else None
    if m0 is None:
        raise SystemExit(
            f"{label}: no m0 supplied and none on record; "
            "use --curve LABEL:M0"
        )
    return label, m0, index


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument(
        "--curve",
        action="append",
        default=None,
        metavar="LABEL[:M0[:INDEX]]",
        help="curve to fetch; repeatable (default: the two example curves)",
    )
    ap.add_argument(
        "--out",
        default="tests/fixtures/curves.jsonl",
        help="output JSONL path (default %(default)s)",
    )
    args = ap.parse_args()

    out_path = pathlib.Path(args.out)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    records, provenance = [], []
    for arg in args.curve or DEFAULT_CURVES:
        label, m0, index = parse_curve_arg(arg)
        row = fetch_curve(label)
        record = {
            "label": label,
            "m0": m0,
            "adelic_index": row.get("adelic_index", index),
            "generators": reduce_generators(
                row["adelic_gens"], row["adelic_level"], m0
            ),
        }
        if record["adelic_index"] is None:
            del record["adelic_index"]
        records.append(record)
        provenance.append(
            f"{label}: adelic_gens at level {row['adelic_level']} from "
            f"{API}, reduced mod m0={m0}"
        )
        print(f"fetched {label}: {len(record['generators'])} generators "
              f"mod {m0}")

    with out_path.open("w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record, sort_keys=True) + "\n")
    stamp = datetime.date.today().isoformat()
    with (out_path.parent / "PROVENANCE").open("w", encoding="utf-8") as fh:
        fh.write(f"retrieved {stamp}\n")
        for line in provenance:
            fh.write(line + "\n")
    print(f"wrote {out_path} ({len(records)} records)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
