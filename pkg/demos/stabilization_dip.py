#!/usr/bin/env python3
"""Follow the resonance below the Landau level at 5 for a binding of -6.4 and
locate the field where its width collapses.

Run with ``python3 demos/stabilization_dip.py`` (about 10 s).
"""
import time

import numpy as np

from crossfield.pole_finder import detect_stabilization, lifetime_curve, trace_branch

binding = -6.4
t0 = time.perf_counter()
traj = trace_branch(binding, 0.05, 0.35, landau_index=2)
print(f"traced {len(traj)} fields in {time.perf_counter() - t0:.1f} s")

fields, tau, re_e = lifetime_curve(traj)
print(f"{'F':>7} {'Re E':>10} {'tau':>10}")
for i in np.linspace(0, len(fields) - 1, 12).astype(int):
    print(f"{fields[i]:7.3f} {re_e[i]:10.5f} {tau[i]:10.3e}")

for ev in detect_stabilization(traj):
    # below_resolution means tau is only a lower bound
    bound = "lower bound" if ev.below_resolution else "estimate"
    print(f"\nevent at F* = {ev.efield_star:.5f}, E* = {ev.pole_star.real:.5f}")
    print(f"dip depth {ev.dip_depth_decades:.1f} decades, tau ({bound}) = {ev.tau_scaled:.2e}")
