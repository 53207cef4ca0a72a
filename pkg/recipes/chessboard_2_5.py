"""Chessboard of the horn map for p/q = 2/5, on the cylinder and pulled back.

A point of the horn map's domain is light when the imaginary part of its
image lies above the phase line and dark when below. The graph (black)
collects the pixels whose image straddles that line, and the outside
(light gray) is where the map is undefined. High in the upper end
everything is light and deep in the lower end everything is dark.

The phase is chosen so that the multiplier at the upper end is
exp(2 pi i golden), the same phase as the Julia-Lavaurs recipe.

Default windows:
  horn coordinates     x in [-0.5, 1.5], y spanning both end constants plus 2.5
  initial coordinates  centred on the critical point, half-widths 1.35 by 1.2

    python3 recipes/chessboard_2_5.py [OUTDIR]
"""
import sys
import time
from pathlib import Path

from premodels.lavaurs import solve_sigma
from premodels.numkit import RotationTarget
from premodels.render import Chessboard, RenderJob, atlas_for, encode, render

out = Path(sys.argv[1] if len(sys.argv) > 1 else "figures")
out.mkdir(exist_ok=True)

sigma = solve_sigma(atlas_for(2, 5), RotationTarget.golden()).sigma
print(f"phase sigma = {sigma:.12f}")

for coords in ("horn", "initial"):
    job = RenderJob(Chessboard(2, 5, coords=coords, sigma=sigma), resolution=(600, 520),
                    palette="rgb")
    t0 = time.perf_counter()
    img = render(job, workers=4)
    name = f"chessboard_2_5_{coords}.ppm"
    (out / name).write_bytes(encode(img))
    print(f"{name} in {time.perf_counter() - t0:.1f}s", img.class_counts())
