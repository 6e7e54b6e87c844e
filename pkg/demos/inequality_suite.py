"""Seeded inequality suites: proof-chain margins and empirical constants across resolutions."""
import numpy as np

from nematiclab import Grid, run_suite

for M in (16, 32):
    records = run_suite(Grid(3, M), range(10))
    print(f"M={M}: {len(records)} records, all passed: {all(r.passed for r in records)}")
    for name in sorted({r.name for r in records}):
        ratios = [r.lhs / r.rhs for r in records if r.name == name]
        print(f"   {name:22s} worst lhs/rhs {max(ratios):.4e}")
