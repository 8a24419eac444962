#!/usr/bin/env python3
"""A tour of the reductions between max-min allocation and makespan.

Three stops:
1. Configuration rounding plus the configuration gadget: an unrelated
   max-min instance becomes a makespan instance whose optimum is at most 1,
   and any schedule of makespan mu < 2 translates back to per-player value
   at least 2 - mu.
2. The two-value equivalence: a two-value makespan instance (optimum
   normalized to 1) becomes a two-value max-min instance with optimum at
   least t = w + k*u - 1, and back.
3. The matroid duality reduction: a two-job matroid makespan instance maps
   to a two-resource max-min instance through box caps and duals, with the
   exact per-machine identity p1*y1 + p2*y2 + p1*dual1 + p2*dual2 = 1 + t.
"""

from fractions import Fraction

from matalloc import Item, MakespanInstance, SantaInstance, UniformMatroid
from matalloc.instances import assignment_to_alloc
from matalloc.oracle import brute_opt_makespan, brute_opt_santa
from matalloc.polymatroids import ModularPoly, ScaledRankPoly
from matalloc.reductions import (config_round, matroid_makespan_to_santa,
                                 santa_solution_from_schedule, santa_to_makespan,
                                 schedule_from_matroid_santa, schedule_from_santa_solution,
                                 twovalue_makespan_to_santa)

F = Fraction

print("=== 1. configuration rounding + gadget ===")
santa = SantaInstance(2, [Item(values=(F(1), F(1, 2))), Item(values=(F(1, 2), F(1))),
                          Item(values=(F(1, 2), F(1, 2)))])
rounded, configs = config_round(santa, F(1, 4))
print("configurations per player:", [len(c) for c in configs])
bundle = santa_to_makespan(rounded, configs)
print(f"gadget: {bundle.makespan.num_machines} machines, {len(bundle.jobs)} jobs")
rep = brute_opt_makespan(bundle.makespan)
print("gadget optimum:", rep.value, "(at most 1 by construction)")
alloc, worst = santa_solution_from_schedule(
    bundle, assignment_to_alloc(rep.witness, bundle.makespan.num_machines))
print("translated back: min player value =", worst, ">= 2 - makespan =", 2 - rep.value)

print("\n=== 2. two-value makespan -> max-min and back ===")
mk = MakespanInstance(2, [Item(values=(F(2, 3), F(2, 3))),
                          Item(values=(F(1, 3), None)),
                          Item(values=(F(1, 3), F(1, 3)))])
bundle2 = twovalue_makespan_to_santa(mk)
print(f"u = {bundle2.u}, w = {bundle2.w}, k = {bundle2.k}, t = {bundle2.t}")
sopt = brute_opt_santa(bundle2.santa)
print("gadget max-min optimum:", sopt.value, ">= t")
sched, mu = schedule_from_santa_solution(
    bundle2, assignment_to_alloc(sopt.witness, bundle2.santa.num_players))
print("translated schedule makespan:", mu, "<= 1 + t - min(value, t) =",
      1 + bundle2.t - min(sopt.value, bundle2.t))

print("\n=== 3. matroid duality (two jobs) ===")
mk2 = MakespanInstance(3, [
    Item(value=F(3, 5), polymatroid=ModularPoly([1, 1, 0])),
    Item(value=F(1, 4), polymatroid=ScaledRankPoly(UniformMatroid(3, 2), 2))])
opt = brute_opt_makespan(mk2)
print("source optimum:", opt.value)
bundle3 = matroid_makespan_to_santa(mk2)
print("box caps k:", bundle3.caps_per_item, " t =", bundle3.t)
sopt = brute_opt_santa(bundle3.built)
print("dual max-min optimum:", sopt.value, ">= t")
sched, loads = schedule_from_matroid_santa(bundle3, [tuple(v) for v in sopt.witness])
print("translated loads:", loads, "| per-machine identity verified exactly inside")
