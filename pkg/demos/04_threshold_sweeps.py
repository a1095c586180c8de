"""Efficiency across the isotropic and off-line families at d = 3.

Isotropic states become distillable just above fidelity 1/3. Off-line states
stay at or below 1/3 for every p, yet FIMAX still distills them above a
fidelity near 0.25.

Run: python3 demos/04_threshold_sweeps.py
"""

from stabdistill.cli import SweepConfig, sweep_rows

for family in ("isotropic", "offline"):
    _, rows = sweep_rows(SweepConfig(family, 3, 0.0, 1.0, 0.005))
    wins = [r for r in rows if r[6] > 0]
    first = min(wins, key=lambda r: r[3])
    print(f"{family:9s}: first distillable p={first[2]:.3f} F={first[3]:.5f} "
          f"({first[5]} rounds, efficiency {first[6]:.3e})")
    for r in rows[::40]:
        print(f"    p={r[2]:.3f} F={r[3]:.4f} reached={r[4]!s:5s} rounds={r[5]:3d} eff={r[6]:.3e}")
