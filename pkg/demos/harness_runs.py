"""Driving experiments through the harness, as the command line does.

Each run takes a validated configuration, returns a report with rows, fits,
checks and provenance, and serializes to CSV.
"""

from wavepacket_lab.harness.config import make_config
from wavepacket_lab.harness.experiments import run

cfg = make_config("overlap-scan", {"lambda": [64, 128], "eps0": [0.25], "n_pairs": 200})
rep = run(cfg)
print(f"{rep.experiment}: {len(rep.rows)} rows, passed={rep.passed}")
for name, fit in rep.fits.items():
    print(f"  fit {name}: slope {fit.slope:.3f} over {fit.n_points} points")
print("  provenance:", {k: rep.provenance[k] for k in ("seed", "config_sha256")})
print(rep.to_csv().splitlines()[0])

rep = run(make_config("strichartz-sweep", {"lambda": [32, 64, 128]}))
print(f"{rep.experiment}: checks {rep.checks}")
