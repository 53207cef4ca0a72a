"""Entire-type maps glued from strips, and what their skeletons remember.

Each strip n <= Re z < n+1 carries either the 2-quasiregular map A or the
holomorphic map B. Both send the integers to 0 and the half-integers to 1,
but B has two extra simple zeros above and below the middle of its strip.
In the skeleton (preimage tree of the segment [0, 1]) these become pairs of
ribs on the vertebra at n + 1/2. Reading off which vertebrae carry ribs,
starting from the first one, recovers the bit sequence, so maps built from
different sequences are not equivalent.

Default plot window: strips -3..6, vertical range [-1, 1].

    python3 recipes/strip_skeletons.py [OUTDIR]
"""
import sys
from pathlib import Path

from premodels.render import RenderJob, SkeletonPlot, encode, render
from premodels.strips import (StripSequence, count_zeros, dilatation_estimate,
                              skeleton_from_sequence, skeletons_equivalent, strip_A, strip_B)

out = Path(sys.argv[1] if len(sys.argv) > 1 else "figures")
out.mkdir(exist_ok=True)

print("zeros of B in a box around the first strip:", count_zeros(strip_B, (-0.3, 1.3, -1, 1)))
print("zeros of A in the same box:", count_zeros(strip_A, (-0.3, 1.3, -1, 1)))
print(f"largest dilatation of A on [0,1]x[-2,2]: {dilatation_estimate(strip_A):.4f}")

seq = StripSequence.parse("101:ones")
g = skeleton_from_sequence(seq, (-3, 6))
print("strips carrying ribs:", [n for n, k in g.vertebra_ribs().items() if k])
(out / "skeleton_101.txt").write_text(g.export())

other = StripSequence.parse("100:ones")
for depth in (2, 3):
    print(f"{seq} vs {other} equivalent to depth {depth}:",
          skeletons_equivalent(seq, other, depth))

img = render(RenderJob(SkeletonPlot(seq), resolution=(600, 140), palette="rgb"))
(out / "skeleton_101.ppm").write_bytes(encode(img))
