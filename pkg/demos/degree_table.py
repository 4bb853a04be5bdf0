"""
Signed degrees of self-maps of S^3
==================================

Count preimages of a random regular value with orientation signs and compare
against the expected degree of each map.
"""

import numpy as np

from hopfroots import COLLAPSE3, COVER3, IDENTITY, DegreeConfig, compute_degree, find_preimages, power

cfg = DegreeConfig()

# a_k(z1, z2) multiplies the argument of z1 by k; the degree is k
for k in range(-3, 4):
    print(f"deg a_{k:+d} = {compute_degree(power(k), cfg):+d}")

print("deg identity =", compute_degree(IDENTITY, cfg))
# the double cover composed with the collapse wraps twice
print("deg q3 o p3   =", compute_degree(COLLAPSE3 @ COVER3, cfg))

# individual preimages and their local signs for a_3
y = np.array([np.sqrt(0.5), 0, np.sqrt(0.5), 0])
pre = find_preimages(power(3), y, cfg)
for x, s in zip(pre.points, pre.signs):
    print(np.round(x, 6), "sign", s)
