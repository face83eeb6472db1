"""
Leftover hash bounds with a non-uniform seed
============================================

The distance of the extracted key from ideal grows by a factor 2**gap when
the seed falls ``gap`` bits short of uniform. The alternative bound obtained
by bounding collision probabilities directly is much looser.
"""

from qkdseed.bounds import (BoundInputs, SecurityParams, compare_bounds, key_length_budget,
                            theorem1_bound)
from qkdseed.entropy import SeedQuality

hmin, l = 1200.0, 1000.0
print(" gap  theorem1      alternative   tighter")
for gap in (0, 1, 2, 5, 10, 20, 40, 80, 100):
    c = compare_bounds(BoundInputs(hmin, l, SeedQuality(4096, 4096 - gap)))
    print(f"{gap:4d}  {c.theorem1_raw:.4e}  {c.alternative_raw:.4e}  {c.tighter.value}")

# To keep the same distance, the output must shrink by 2 bits per bit of gap...
target = theorem1_bound(BoundInputs(hmin, l))
for gap in (1, 10, 50):
    shorter = theorem1_bound(BoundInputs(hmin, l - 2 * gap, SeedQuality(4096, 4096 - gap)))
    print(f"gap {gap:3d}, output {l - 2 * gap:.0f} bits: distance {shorter:.4e} (uniform seed, {l:.0f} bits: {target:.4e})")

# ...while the secure key length charges the gap once.
sec = SecurityParams(eps_sec=1e-9, eps_cor=1e-15, eps_smooth=1e-10)
for gap in (0, 69, 500):
    b = key_length_budget(10_000, 2_000, sec, SeedQuality(10_000, 10_000 - gap))
    print(f"gap {gap:4d}: PA cost {b.pa_cost:.2f}, EC check {b.ec_verification_cost:.2f},"
          f" key length {b.max_key_len}")
