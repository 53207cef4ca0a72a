"""Filled Julia set of exp(2 pi i 2/5) z + z^2.

The fixed point at 0 is parabolic with five attracting petals. Pixels are
classified as escaping (white), interior (gray 0xB0), boundary (black: an
interior pixel next to an escaping one) or unknown (0x80, the iteration
budget ran out before a petal was reached).

Default window: centred on the critical point, half-widths 1.35 by 1.2.
The run below uses the fixed window [-1.8, 0.9] x [-1.2, 1.2] instead.

    python3 recipes/julia_2_5.py [OUTDIR]
"""
import sys
import time
from pathlib import Path

from premodels.render import JuliaSet, RenderJob, encode, render

out = Path(sys.argv[1] if len(sys.argv) > 1 else "figures")
out.mkdir(exist_ok=True)

job = RenderJob(JuliaSet(2, 5), window=(-1.8, 0.9, -1.2, 1.2), resolution=(600, 520))
t0 = time.perf_counter()
img = render(job, workers=4)
(out / "julia_2_5.pgm").write_bytes(encode(img))
print(f"julia_2_5.pgm in {time.perf_counter() - t0:.1f}s", img.class_counts())
