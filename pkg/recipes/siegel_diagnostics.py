"""Numerical evidence about two Siegel disks with golden rotation number.

First the quadratic polynomial exp(2 pi i golden) z + z^2: its linearizer
series and root-test radius, the boundedness of the critical orbit, and
whether that orbit visits angles in the same circular order as the rigid
rotation. Then the horn map for p/q = 2/5 with the phase that makes its
upper-end multiplier exp(2 pi i golden): its critical orbit should stay at
positive distance from the points where the map is undefined.

A picture of the polynomial's critical orbit over its filled Julia set is
written as well (default window: the critical point +- 1.5).

    python3 recipes/siegel_diagnostics.py [OUTDIR]
"""
import sys
from pathlib import Path

from premodels.lavaurs import make_horn, siegel_orbit_horn, solve_sigma
from premodels.numkit import RotationTarget
from premodels.render import RenderJob, SiegelOrbit, atlas_for, encode, render
from premodels.siegel import boundary_rotation_check, critical_orbit, linearizer

out = Path(sys.argv[1] if len(sys.argv) > 1 else "figures")
out.mkdir(exist_ok=True)
golden = RotationTarget.golden()

for m in (100, 200):
    print(f"linearizer order {m}: radius estimate {linearizer(golden, m).radius_estimate:.4f}")

orbit = critical_orbit(golden, 100_000)
print(f"critical orbit: max |z| = {orbit.max_abs:.4f}, tail min |z| = {orbit.tail_min_abs:.4f}")
for n in (500, 2000, 10_000):
    print(f"circular order matches the rotation for N = {n}:",
          boundary_rotation_check(orbit, golden, n))

atlas = atlas_for(2, 5)
horn = make_horn(atlas, solve_sigma(atlas, golden))
stats = siegel_orbit_horn(horn, 10_000)
print(f"horn-map orbit: Im in [{stats['min_im']:.3f}, {stats['max_im']:.3f}], "
      f"distance to undefined points {stats['min_dist_outside']:.3f}")

img = render(RenderJob(SiegelOrbit(golden), resolution=(600, 520), palette="rgb"), workers=4)
(out / "siegel_golden.ppm").write_bytes(encode(img))
