"""Conformal modulus of the upper annulus for several horn maps.

For each horn map the annulus lies between the full-period box high in the
upper end (all light) and the graph and outside pixels below it. Its
modulus comes from a discrete Dirichlet problem on the chessboard raster.
If the horn maps of the quadratic family near p/q share one universal
model, the moduli should agree. The check also runs the calibration shapes
with known moduli: a flat band and a round annulus, both in log and in
planar coordinates.

    python3 recipes/universality.py [PIXELS_PER_PERIOD]
"""
import math
import sys

from premodels.chessboard import (flat_band_mask, horn_modulus, modulus_estimate,
                                  round_annulus_log_mask, round_annulus_planar_mask)
from premodels.lavaurs import blaschke_atlas, make_horn
from premodels.render import atlas_for

n = int(sys.argv[1]) if len(sys.argv) > 1 else 128

exact = math.log(2.0) / (2 * math.pi)
print(f"flat band 0.5:        {modulus_estimate(flat_band_mask(0.5, 256)):.5f} (exact 0.5)")
print(f"log annulus r=1/2:    {modulus_estimate(round_annulus_log_mask(0.5, 256)):.5f} "
      f"(exact {exact:.5f})")
print(f"planar annulus r=1/2: {modulus_estimate(round_annulus_planar_mask(0.5, 256)):.5f}")

ref = horn_modulus(make_horn(blaschke_atlas()), n=n, workers=4)
print(f"Blaschke model horn map: {ref:.5f}")
for p, q in ((0, 1), (1, 2), (2, 5)):
    m = horn_modulus(make_horn(atlas_for(p, q)), n=n, workers=4)
    print(f"p/q = {p}/{q}: {m:.5f}  ratio {m / ref:.4f}")
