"""
Toeplitz privacy amplification
==============================

Hash a key with a Toeplitz matrix and check the universal-hashing property
by enumerating the whole family on a small instance.
"""

import itertools

import numpy as np

from qkdseed.hashing import ToeplitzSeed, collision_probability_exhaustive, privacy_amplify

rng = np.random.default_rng(7)
n, l = 32, 12
seed = ToeplitzSeed.random(n, l, rng)
key = rng.integers(0, 2, n, dtype=np.uint8)
print("seed bits  :", "".join(map(str, seed.bits)))
print("key        :", "".join(map(str, key)))
print("final key  :", "".join(map(str, privacy_amplify(key, seed))))

# The matrix is constant along its diagonals
print(seed.matrix()[:4, :8])

# Any two distinct inputs collide under exactly a 2**-l fraction of seeds.
n, l = 5, 3
probs = {collision_probability_exhaustive(n, l, x, y)
         for x, y in itertools.combinations(itertools.product((0, 1), repeat=n), 2)}
print(f"collision probabilities over all pairs (n={n}, l={l}):", probs, "expected", 2 ** -l)
