#!/usr/bin/env python3
"""Write both reference branches over [0.01, 1.0] to CSV for plotting.

Usage: python3 demos/branch_sweep_csv.py [out_dir]
"""
import csv
import pathlib
import sys

from crossfield.pole_finder import trace_branch

out = pathlib.Path(sys.argv[1] if len(sys.argv) > 1 else ".")
out.mkdir(parents=True, exist_ok=True)

for binding, level in ((-6.4, 2), (-2.8, 1)):
    traj = trace_branch(binding, 0.01, 1.0, landau_index=level)
    path = out / f"branch_eb{binding:g}.csv"
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["efield", "re_e", "im_e", "precision"])
        for p in traj.points:
            w.writerow([f"{p.efield:.6f}", repr(p.pole.real), repr(p.pole.imag), p.root.precision])
    print(f"{path}: {len(traj)} rows")
