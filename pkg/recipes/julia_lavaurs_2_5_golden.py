"""Julia-Lavaurs set for p/q = 2/5 with the golden-mean phase.

A point escapes at level k when k applications of the Lavaurs map (each
preceded by enough iterates of the polynomial to enter the attracting
petal) bring it out of the escape disk. Escaping pixels fade from white
towards light gray with the level. Everything else is the non-escaping
set, shown in gray with its boundary in black. The critical orbit of the
Lavaurs map stays inside for any budget, which is the footprint of the
virtual Siegel disk.

Default window: centred on the critical point, half-widths 1.35 by 1.2.
This is the slowest figure: about a minute at 600x520 on one core.

    python3 recipes/julia_lavaurs_2_5_golden.py [OUTDIR]
"""
import sys
import time
from pathlib import Path

from premodels.lavaurs import julia_lavaurs_classify, solve_sigma
from premodels.numkit import RotationTarget
from premodels.render import JuliaLavaurs, RenderJob, atlas_for, encode, render

out = Path(sys.argv[1] if len(sys.argv) > 1 else "figures")
out.mkdir(exist_ok=True)

atlas = atlas_for(2, 5)
sigma = solve_sigma(atlas, RotationTarget.golden()).sigma
print("critical point:", julia_lavaurs_classify(atlas, sigma, atlas.parent.critical_point, 200))

job = RenderJob(JuliaLavaurs(2, 5, sigma=sigma), resolution=(600, 520), max_lavaurs=50)
t0 = time.perf_counter()
img = render(job, workers=4)
(out / "julia_lavaurs_2_5_golden.pgm").write_bytes(encode(img))
print(f"julia_lavaurs_2_5_golden.pgm in {time.perf_counter() - t0:.1f}s", img.class_counts())
