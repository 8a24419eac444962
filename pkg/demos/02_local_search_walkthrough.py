#!/usr/bin/env python3
"""Watching the local search swap elements between the two cover sides.

The instance is built so that greed alone cannot work: the targets share one
matroid block with the 'addable' elements, and the rank-zero elements sit
inside the addable elements' covering capacity. Covering a target means
evicting an addable element to the polymatroid side, which first requires
recursing on the blocking elements; when the recursion cannot free them, the
run fails with a certificate, the target's rank is zeroed, and a restart
covers it with the polymatroid instead.
"""

from fractions import Fraction

from matalloc import CoreCoverInstance, PartitionMatroid
from matalloc.bitsets import elements
from matalloc.localsearch import solve_cover, verify_certificate
from matalloc.polymatroids import CoveragePoly

# ground: 0 = target, 1 = addable, 2/3 = rank-zero elements inside 1's capacity
# items: 1 covers {3,4}; 2 covers {3}; 3 covers {4}; 0 covers {0,1,2}
poly = CoveragePoly([0b00111, 0b11000, 0b01000, 0b10000], [1] * 5)
matroid = PartitionMatroid(4, [0b0011, 0b1100], [1, 0])
inst = CoreCoverInstance(matroid, poly, b=1)

print("singleton ranks:", [matroid.rank(1 << e) for e in range(4)])
print("singleton f:", [poly.value(1 << e) for e in range(4)])

res = solve_cover(inst, Fraction(1, 10))
print("\noutcome:", "cover" if res.feasible else "infeasible")
print("I_M =", list(elements(res.I_M)), " y =", res.y)
print("restarts:", res.restarts, "| rank-zeroed elements:", list(elements(res.zeroed)))
print("recursion nodes (max per augmentation):", res.max_recursion_nodes)
print("oracle queries:", res.oracle_queries)

for rec in res.certificates:
    cert = rec.certificate
    print(f"\nmid-run certificate against covering element {rec.failed_element} "
          f"with the matroid:")
    print(f"  Z1 = {list(elements(cert.z1))}, Z2 = {list(elements(cert.z2))}")
    rep = verify_certificate(cert, rec.matroid, rec.poly, exhaustive=True)
    for key in ("p1_rank_shields_b0", "p2_rank_deficiency",
                "p3_small_marginals_in_z2", "p4_small_marginals_above_z2"):
        print(f"  {key}: {rep[key]}")
    print("  exhaustive soundness:", rep["exhaustive_sound"])
