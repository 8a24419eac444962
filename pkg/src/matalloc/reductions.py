"""Constructive reductions between max-min allocation and makespan minimization.

Each reduction is a builder returning a bundle (the constructed instance
plus the gadget wiring) and a back-translation that converts a solution of
the constructed instance into one of the source instance, re-verifying the
advertised bound with exact rationals (violations are hard errors).

Covered here: configuration rounding for unrelated max-min instances, the
configuration gadget to makespan, the two-value equivalences in both
directions, the duality-based reductions between the two-job matroid
makespan problem and the two-resource matroid max-min problem, the
reduction of a restricted matroid max-min instance to core cover
problems, and the objective-guessing loop all of them plug into.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from .bitsets import full_mask
from .instances import (Allocation, CoreCoverInstance, Item, MakespanInstance, SantaInstance,
                        unit_vector)
from .intersection import decompose_in_sum, decompose_merged_basis
from .limits import Caps, DEFAULT_CAPS, ContractViolation, GuessRejected, SizeCapError
from .matching import perfect_matching
from .matroids import InducedMatroid
from .polymatroids import (DualPoly, ModularPoly, PolymatroidOracle, SumPoly, greedy_basis_above,
                           is_basis, member)
from .rounding import (FractionalAssignment, additive_round_santa, round_santa,
                       solve_assignment_lp)

Configuration = dict  # value type -> count; nonzero counts only


def config_total(c: Configuration) -> Fraction:
    return sum((v * k for v, k in c.items()), Fraction(0))


# ---------------------------------------------------------------------------
# Configuration rounding (unrelated max-min)


def _round_value(v: Fraction, eps: Fraction, n: int) -> Fraction:
    if v >= 1:
        return Fraction(1)
    if v < Fraction(1, 1) / ((1 + eps) * n):
        return Fraction(0)
    power = Fraction(1) / (1 + eps)
    while power > v:
        power /= 1 + eps
    return power


def _allowed_counts(eps: Fraction, n: int) -> list[int]:
    allowed = {0}
    power = Fraction(1)
    while power <= n:
        allowed.add(math.floor(power))
        allowed.add(math.ceil(power))
        power *= 1 + eps
    return sorted(c for c in allowed if 0 <= c <= n)


def config_round(inst: SantaInstance, eps: Fraction | float,
                 caps: Caps = DEFAULT_CAPS) -> tuple[SantaInstance, list[list[Configuration]]]:
    """Round values down to powers of 1/(1+eps) (clamping at 1, zeroing below
    1/((1+eps)n)) and enumerate a polynomial per-player configuration family.

    Counts are restricted to floors/ceilings of powers of 1+eps; within each
    of ceil(1/eps^3) value classes, the nonzero counts of a configuration
    must strictly increase as the value decreases.
    """
    eps = Fraction(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    if inst.is_matroid_flavor:
        raise ValueError("configuration rounding applies to classical instances")
    n = len(inst.resources)
    m = inst.num_players
    rounded = SantaInstance(m, [
        Item(values=tuple(_round_value(it.values[i], eps, n) for i in range(m)))
        for it in inst.resources])

    types = sorted({v for it in rounded.resources for v in it.values if v > 0}, reverse=True)
    kappa = math.ceil(1 / eps ** 3)
    klass = {v: idx % kappa for idx, v in enumerate(types)}
    allowed = _allowed_counts(eps, n)

    collection: list[list[Configuration]] = []
    for i in range(m):
        have = {v: sum(1 for it in rounded.resources if it.values[i] == v) for v in types}
        relevant = [v for v in types if have[v] > 0]  # descending
        configs: list[Configuration] = []

        def extend(idx: int, current: Configuration, last_in_class: dict[int, int]) -> None:
            if len(configs) > caps.configs_per_player:
                raise SizeCapError("per-player configuration count exceeds cap")
            if idx == len(relevant):
                configs.append(dict(current))
                return
            v = relevant[idx]
            cls = klass[v]
            for count in allowed:
                if count > have[v]:
                    break
                if count > 0 and cls in last_in_class and last_in_class[cls] >= count > 0 \
                        and last_in_class[cls] > 0:
                    continue  # within a class, nonzero counts must strictly increase
                if count:
                    current[v] = count
                prev = last_in_class.get(cls)
                if count:
                    last_in_class[cls] = count
                extend(idx + 1, current, last_in_class)
                if count:
                    del current[v]
                    if prev is None:
                        del last_in_class[cls]
                    else:
                        last_in_class[cls] = prev

        extend(0, {}, {})
        collection.append(configs)
    return rounded, collection


# ---------------------------------------------------------------------------
# Max-min with configurations -> makespan gadget


@dataclass
class SantaToMakespanBundle:
    source: SantaInstance
    configs: list[list[Configuration]]
    makespan: MakespanInstance
    machines: list[tuple]  # ("config", player, cfg index) | ("resource", resource)
    jobs: list[tuple]      # ("player", i) | ("configjob", i, cfg index, value, copy)

    INF = None


def santa_to_makespan(inst: SantaInstance, configs: Sequence[Sequence[Configuration]]
                      ) -> SantaToMakespanBundle:
    """The configuration gadget: one machine per (player, configuration) and per
    resource; a unit player-job selecting the configuration, and c(v) jobs per
    value type of size v/|c| on the configuration machine and 1 on matching
    resource machines. Configurations of total value below 1 are dropped first.
    """
    if inst.is_matroid_flavor:
        raise ValueError("the configuration gadget applies to classical instances")
    m = inst.num_players
    pruned: list[list[Configuration]] = []
    for i in range(m):
        keep = [c for c in configs[i] if config_total(c) >= 1]
        if not keep:
            raise ContractViolation(f"player {i} has no configuration of value >= 1")
        pruned.append(keep)

    machines: list[tuple] = []
    for i in range(m):
        machines.extend(("config", i, ci) for ci in range(len(pruned[i])))
    machines.extend(("resource", j) for j in range(len(inst.resources)))
    mach_index = {desc: k for k, desc in enumerate(machines)}

    jobs: list[tuple] = []
    rows: list[tuple] = []
    for i in range(m):
        jobs.append(("player", i))
        row = [None] * len(machines)
        for ci in range(len(pruned[i])):
            row[mach_index[("config", i, ci)]] = Fraction(1)
        rows.append(tuple(row))
    for i in range(m):
        for ci, c in enumerate(pruned[i]):
            total = config_total(c)
            for v, count in sorted(c.items(), reverse=True):
                for copy in range(count):
                    jobs.append(("configjob", i, ci, v, copy))
                    row = [None] * len(machines)
                    row[mach_index[("config", i, ci)]] = v / total
                    for j, it in enumerate(inst.resources):
                        if it.values[i] == v:
                            row[mach_index[("resource", j)]] = Fraction(1)
                    rows.append(tuple(row))
    gadget = MakespanInstance(len(machines), [Item(values=r) for r in rows])
    return SantaToMakespanBundle(inst, pruned, gadget, machines, jobs)


def santa_solution_from_schedule(bundle: SantaToMakespanBundle, schedule: Allocation
                                 ) -> tuple[Allocation, Fraction]:
    """Translate a gadget schedule of makespan mu < 2 back to an allocation in
    which every player receives value at least 2 - mu (= 1/alpha for a
    (2 - 1/alpha)-approximate schedule)."""
    inst = bundle.source
    m = inst.num_players
    machine_of = []
    for vec in schedule:
        spots = [k for k, v in enumerate(vec) if v]
        if len(spots) != 1:
            raise ContractViolation("each gadget job must sit on exactly one machine")
        machine_of.append(spots[0])
    loads = [Fraction(0)] * len(bundle.machines)
    for jk, place in enumerate(machine_of):
        s = bundle.makespan.jobs[jk].values[place]
        if s is None:
            raise ContractViolation("gadget schedule uses an infinite-size placement")
        loads[place] += s
    mu = max(loads)
    if mu >= 2:
        raise ContractViolation(f"gadget makespan {mu} >= 2 carries no guarantee")

    selected = {}
    for jk, desc in enumerate(bundle.jobs):
        if desc[0] == "player":
            mdesc = bundle.machines[machine_of[jk]]
            if mdesc[0] != "config" or mdesc[1] != desc[1]:
                raise ContractViolation("player-job placed off its configuration machines")
            selected[desc[1]] = mdesc[2]

    owner: list[int | None] = [None] * len(inst.resources)
    values = [Fraction(0)] * m
    for jk, desc in enumerate(bundle.jobs):
        if desc[0] != "configjob":
            continue
        i, ci = desc[1], desc[2]
        if selected[i] != ci:
            continue
        mdesc = bundle.machines[machine_of[jk]]
        if mdesc[0] == "config":
            continue  # stayed home; contributes nothing
        j = mdesc[1]
        if owner[j] is not None:
            raise ContractViolation("two configuration jobs share a resource machine")
        owner[j] = i
        values[i] += inst.resources[j].values[i]
    bound = 2 - mu
    shortfall = [i for i in range(m) if values[i] < bound]
    if shortfall:
        raise ContractViolation(f"translated value below 2 - makespan for players {shortfall}")
    return [unit_vector(o, m) if o is not None else tuple([0] * m) for o in owner], min(values)


# ---------------------------------------------------------------------------
# Two-value makespan <-> two-value max-min


@dataclass
class TwoValueBundle:
    source: MakespanInstance
    santa: SantaInstance
    u: Fraction
    w: Fraction
    k: int
    t: Fraction
    resource_desc: list[tuple]  # ("big", machine) | ("small", machine, slot)
    player_desc: list[tuple]    # ("machine", i) | ("job", j)


def twovalue_makespan_to_santa(inst: MakespanInstance) -> TwoValueBundle:
    """Gadget for two-value makespan with optimum at most 1: per machine one
    machine-player with a big resource (value w) and k = min(floor(1/u), n)
    small resources (value u); per job a job-player valuing, at w, exactly
    the resources of machines that could host it. Guarantees OPT >= t for
    t = w + k*u - 1.

    Sizes above 1 are treated as infinite (unusable under the normalization).
    """
    if inst.is_matroid_flavor:
        raise ValueError("this direction applies to classical two-value instances")
    n = len(inst.jobs)
    msize = inst.num_machines
    cleaned = []
    for it in inst.jobs:
        cleaned.append(tuple(v if v is not None and v <= 1 else None for v in it.values))
        if all(v is None for v in cleaned[-1]):
            raise GuessRejected("a job fits on no machine at makespan 1")
    sizes = sorted({v for row in cleaned for v in row if v is not None})
    if len(sizes) > 2:
        raise ValueError("not a two-value instance")
    if not sizes:
        raise ValueError("instance has no usable sizes")
    u = sizes[0]
    w = sizes[-1]
    if w <= Fraction(1, 2):
        # two big jobs could share a machine, breaking the one-big-resource
        # encoding; this regime belongs to the additive baseline
        raise ValueError("w <= 1/2: route to the additive baseline instead")
    k = n if u == 0 else min(math.floor(1 / u), n)

    player_desc = [("machine", i) for i in range(msize)] + [("job", j) for j in range(n)]
    resource_desc: list[tuple] = []
    for i in range(msize):
        resource_desc.append(("big", i))
        resource_desc.extend(("small", i, s) for s in range(k))

    def value_for(pdesc, rdesc) -> Fraction:
        if pdesc[0] == "machine":
            i = pdesc[1]
            if rdesc[1] != i:
                return Fraction(0)
            return w if rdesc[0] == "big" else u
        j = pdesc[1]
        i = rdesc[1]
        s = cleaned[j][i]
        if rdesc[0] == "big":
            return w if s == w else Fraction(0)
        return w if s == u else Fraction(0)

    items = [Item(values=tuple(value_for(p, r) for p in player_desc)) for r in resource_desc]
    santa = SantaInstance(len(player_desc), items)
    t = w + k * u - 1
    return TwoValueBundle(MakespanInstance(msize, [Item(values=c) for c in cleaned]),
                          santa, u, w, k, t, resource_desc, player_desc)


def schedule_from_santa_solution(bundle: TwoValueBundle, alloc: Allocation
                                 ) -> tuple[Allocation, Fraction]:
    """Translate a gadget allocation with min player value V > 0 into a schedule
    of makespan at most 1 + t - V (<= 2 - 1/alpha when V >= t/alpha)."""
    inst = bundle.source
    m = inst.num_machines
    nplayers = bundle.santa.num_players
    values = [Fraction(0)] * nplayers
    holder: list[int | None] = [None] * len(bundle.resource_desc)
    for j, vec in enumerate(alloc):
        for pidx in range(nplayers):
            if vec[pidx]:
                if holder[j] is not None:
                    raise ContractViolation("a gadget resource is assigned twice")
                holder[j] = pidx
                values[pidx] += bundle.santa.resources[j].values[pidx]
    vmin = min(values)
    if vmin <= 0:
        raise ContractViolation("some gadget player received nothing; value would be 0")

    # normalize: each job-player keeps exactly one resource (highest value,
    # ties by index); the rest go back to their machine-player
    keep: dict[int, int] = {}
    for j, pidx in enumerate(holder):
        if pidx is None or bundle.player_desc[pidx][0] != "job":
            continue
        jj = bundle.player_desc[pidx][1]
        if jj not in keep:
            keep[jj] = j
        else:
            cur = keep[jj]
            if bundle.santa.resources[j].values[pidx] > bundle.santa.resources[cur].values[pidx]:
                keep[jj] = j

    owner: list[int] = []
    loads = [Fraction(0)] * m
    for j in range(len(inst.jobs)):
        if j not in keep:
            raise ContractViolation("a job-player holds no resource")
        rdesc = bundle.resource_desc[keep[j]]
        machine = rdesc[1]
        s = inst.jobs[j].values[machine]
        if s is None:
            raise ContractViolation("translation placed a job on an infinite machine")
        owner.append(machine)
        loads[machine] += s

    bound = 1 + bundle.t - min(vmin, bundle.t)
    over = [i for i in range(m) if loads[i] > bound]
    if over:
        raise ContractViolation(f"translated makespan exceeds 1 + t - V on machines {over}")
    return [unit_vector(o, m) for o in owner], max(loads) if loads else Fraction(0)


def twovalue_santa_to_makespan(inst: SantaInstance, alpha: Fraction,
                               makespan_solver: Callable[[MakespanInstance], Allocation],
                               caps: Caps = DEFAULT_CAPS) -> tuple[Allocation, str]:
    """Solve a two-value max-min instance with OPT >= 1 to value >= 1/alpha,
    given a (2 - 1/alpha)-approximate two-value makespan solver.

    Three exhaustive cases: small w solves additively through the assignment
    LP; otherwise a perfect matching of players into w-resources suffices;
    otherwise the two-configuration collection {one w} / {ceil(1/u) u's} is
    pushed through the configuration gadget and the supplied solver.
    """
    alpha = Fraction(alpha)
    if alpha < 2:
        raise ValueError("alpha must be at least 2")
    u, w = inst.two_values()
    m = inst.num_players

    if w < 1 / alpha:
        frac = solve_assignment_lp(inst, Fraction(1), caps)
        if frac is None:
            raise GuessRejected("assignment LP infeasible at the guessed optimum")
        owner = additive_round_santa(inst, frac, caps)
        alloc = [unit_vector(o, m) if o is not None else tuple([0] * m) for o in owner]
        _assert_min_value(inst, alloc, 1 / alpha)
        return alloc, "additive"

    adj = [sum(1 << j for j, it in enumerate(inst.resources) if it.values[i] == w)
           for i in range(m)]
    matching = perfect_matching(adj, len(inst.resources))
    if matching is not None:
        alloc = [tuple([0] * m) for _ in inst.resources]
        for i, j in enumerate(matching):
            alloc[j] = unit_vector(i, m)
        _assert_min_value(inst, alloc, 1 / alpha)
        return alloc, "matching"

    if u == 0:
        raise GuessRejected("no matching of w-resources and u = 0: optimum below the guess")
    bscale = math.ceil(1 / u)
    scaled = SantaInstance(m, [
        Item(values=tuple(Fraction(1) if v == w else (Fraction(1, bscale) if v == u else Fraction(0))
                          for v in it.values)) for it in inst.resources])
    configs: list[list[Configuration]] = []
    for i in range(m):
        have_w = sum(1 for it in scaled.resources if it.values[i] == 1)
        have_u = sum(1 for it in scaled.resources if it.values[i] == Fraction(1, bscale))
        mine = []
        if have_w >= 1:
            mine.append({Fraction(1): 1})
        if have_u >= bscale:
            mine.append({Fraction(1, bscale): bscale})
        if not mine:
            raise GuessRejected(f"player {i} can reach neither configuration: optimum below 1")
        configs.append(mine)
    bundle = santa_to_makespan(scaled, configs)
    schedule = makespan_solver(bundle.makespan)
    scaled_alloc, _ = santa_solution_from_schedule(bundle, schedule)
    _assert_min_value(scaled, scaled_alloc, 1 / alpha)
    _assert_min_value(inst, scaled_alloc, 1 / alpha)
    return scaled_alloc, "configuration"


def _assert_min_value(inst: SantaInstance, alloc: Allocation, bound: Fraction) -> None:
    m = inst.num_players
    vals = [Fraction(0)] * m
    for j, vec in enumerate(alloc):
        for i in range(m):
            if vec[i]:
                vals[i] += inst.resources[j].values[i] * vec[i]
    if min(vals) < bound:
        raise ContractViolation(f"translated value {min(vals)} below the bound {bound}")


def solve_twovalue_makespan_via_santa(inst: MakespanInstance, alpha: Fraction,
                                      santa_solver: Callable[[SantaInstance], Allocation],
                                      caps: Caps = DEFAULT_CAPS
                                      ) -> tuple[Allocation, Fraction, str]:
    """Schedule a two-value makespan instance with OPT <= 1 at makespan
    <= 2 - 1/alpha, given an alpha-approximate two-value max-min solver.

    When the large size is at most 1/2, the additive LP baseline already
    reaches 3/2 <= 2 - 1/alpha; otherwise the gadget converts the
    alpha-approximate allocation back into a schedule.
    """
    from .rounding import lst_baseline

    alpha = Fraction(alpha)
    if alpha < 2:
        raise ValueError("alpha must be at least 2")
    try:
        bundle = twovalue_makespan_to_santa(inst)
    except ValueError as exc:
        if "baseline" not in str(exc):
            raise
        alloc, t_star = lst_baseline(inst, caps)
        return alloc, t_star, "baseline"
    santa_alloc = santa_solver(bundle.santa)
    sched, mu = schedule_from_santa_solution(bundle, santa_alloc)
    if mu > 2 - 1 / alpha:
        raise ContractViolation("translated makespan exceeds 2 - 1/alpha")
    return sched, mu, "gadget"


# ---------------------------------------------------------------------------
# Matroid flavors: duality reductions (two jobs / two resources)


@dataclass
class MatroidDualBundle:
    source: SantaInstance | MakespanInstance
    built: SantaInstance | MakespanInstance
    caps_per_item: tuple[int, int]
    capped: tuple[PolymatroidOracle, PolymatroidOracle]
    t: Fraction


def matroid_makespan_to_santa(inst: MakespanInstance) -> MatroidDualBundle:
    """Two-job matroid makespan with OPT <= 1 becomes a two-resource matroid
    max-min instance via box caps at k_j = floor(1/p_j) and duals w.r.t. k_j·E.
    Guarantees OPT' >= t = k1*p1 + k2*p2 - 1."""
    if not inst.is_matroid_flavor or len(inst.jobs) != 2:
        raise ValueError("expected a matroid instance with exactly two jobs")
    n = inst.num_machines
    ks, capped, duals = [], [], []
    for it in inst.jobs:
        p = it.value
        if p <= 0:
            raise ContractViolation("job sizes must be positive")
        if p > 1:
            if it.polymatroid.value(full_mask(n)) > 0:
                raise GuessRejected("a job larger than the makespan bound must be scheduled")
            k = 0
        else:
            k = math.floor(1 / p)
        ks.append(k)
        cp = it.polymatroid.capped(uniform=k, on=full_mask(n))
        if cp.value(full_mask(n)) != it.polymatroid.value(full_mask(n)):
            raise GuessRejected("no basis fits the per-machine box: optimum exceeds 1")
        capped.append(cp)
        duals.append(DualPoly(cp, tuple([k] * n)))
    t = ks[0] * inst.jobs[0].value + ks[1] * inst.jobs[1].value - 1
    santa = SantaInstance(n, [Item(value=inst.jobs[0].value, polymatroid=duals[0]),
                              Item(value=inst.jobs[1].value, polymatroid=duals[1])])
    return MatroidDualBundle(inst, santa, (ks[0], ks[1]), (capped[0], capped[1]), t)


def schedule_from_matroid_santa(bundle: MatroidDualBundle, alloc: Allocation
                                ) -> tuple[Allocation, list[Fraction]]:
    """Undualize y_j(e) = k_j - y̅_j(e); checks the exact per-machine identity
    p1·y1 + p2·y2 + p1·y̅1 + p2·y̅2 = 1 + t and returns the schedule with loads."""
    inst: MakespanInstance = bundle.source
    n = inst.num_machines
    out = []
    for jidx, vec in enumerate(alloc):
        dual = bundle.built.resources[jidx].polymatroid
        if not is_basis(dual, vec):
            raise ContractViolation(f"input vector {jidx} is not a basis of the dual")
        y = tuple(bundle.caps_per_item[jidx] - vec[e] for e in range(n))
        if not is_basis(inst.jobs[jidx].polymatroid, y):
            raise ContractViolation(f"undualized vector {jidx} is not a basis")
        out.append(y)
    p1, p2 = inst.jobs[0].value, inst.jobs[1].value
    expect = 1 + bundle.t
    for e in range(n):
        lhs = (p1 * out[0][e] + p2 * out[1][e]
               + p1 * alloc[0][e] + p2 * alloc[1][e])
        if lhs != expect:
            raise ContractViolation(f"dual load identity fails at machine {e}: {lhs} != {expect}")
    loads = [p1 * out[0][e] + p2 * out[1][e] for e in range(n)]
    return out, loads


def matroid_santa_to_makespan(inst: SantaInstance) -> MatroidDualBundle:
    """Two-resource matroid max-min with values 1 and 1/b (OPT >= 1) becomes a
    two-job matroid makespan instance via caps (1, b) and duals."""
    if not inst.is_matroid_flavor or len(inst.resources) != 2:
        raise ValueError("expected a matroid instance with exactly two resources")
    v1, v2 = inst.resources[0].value, inst.resources[1].value
    if v1 < v2:
        raise ValueError("resources must be ordered with the unit value first")
    if v1 != 1 or v2 <= 0 or (1 / v2).denominator != 1:
        raise ValueError("expected normalized values v1 = 1 and v2 = 1/b for integer b")
    bcap = int(1 / v2)
    n = inst.num_players
    caps_per = (1, bcap)
    capped, duals = [], []
    for it, cap in zip(inst.resources, caps_per):
        cp = it.polymatroid.capped(uniform=cap, on=full_mask(n))
        capped.append(cp)
        duals.append(DualPoly(cp, tuple([cap] * n)))
    built = MakespanInstance(n, [Item(value=Fraction(1), polymatroid=duals[0]),
                                 Item(value=Fraction(1, bcap), polymatroid=duals[1])])
    return MatroidDualBundle(inst, built, caps_per, (capped[0], capped[1]), Fraction(1))


def matroid_santa_from_schedule(bundle: MatroidDualBundle, schedule: Allocation,
                                caps: Caps = DEFAULT_CAPS
                                ) -> tuple[Allocation, list[Fraction]]:
    """Undualize and dominate-extend to bases of the original polymatroids;
    returns the allocation and the per-player values."""
    inst: SantaInstance = bundle.source
    n = inst.num_players
    pre = []
    for jidx, vec in enumerate(schedule):
        dual = bundle.built.jobs[jidx].polymatroid
        if not is_basis(dual, vec):
            raise ContractViolation(f"input vector {jidx} is not a basis of the dual")
        y = tuple(bundle.caps_per_item[jidx] - vec[e] for e in range(n))
        if not is_basis(bundle.capped[jidx], y):
            raise ContractViolation(f"undualized vector {jidx} is not a basis of the capped form")
        pre.append(y)
    v1, v2 = inst.resources[0].value, inst.resources[1].value
    expect = v1 * bundle.caps_per_item[0] + v2 * bundle.caps_per_item[1]
    for e in range(n):
        lhs = (v1 * pre[0][e] + v2 * pre[1][e]
               + v1 * schedule[0][e] + v2 * schedule[1][e])
        if lhs != expect:
            raise ContractViolation(f"dual value identity fails at player {e}")
    out = [tuple(greedy_basis_above(inst.resources[j].polymatroid, pre[j], caps))
           for j in range(2)]
    values = [v1 * out[0][e] + v2 * out[1][e] for e in range(n)]
    return out, values


# ---------------------------------------------------------------------------
# Restricted matroid max-min -> core cover calls


@dataclass
class CoreReduction:
    """Outcome of reduce_to_core: the allocation (per-resource vectors in the
    source instance) plus which path produced it."""

    alloc: Allocation
    case: str
    achieved: Fraction


def _scaled_int_values(values: Sequence[Fraction]) -> tuple[int, list[int]]:
    denom = 1
    for v in values:
        denom = denom * v.denominator // math.gcd(denom, v.denominator)
    return denom, [int(v * denom) for v in values]


def _alloc_from_cover(inst: SantaInstance, idxs: Sequence[int], need: Sequence[int],
                      caps: Caps) -> list[tuple[int, ...]]:
    """Distribute the resources idxs so that player e receives at least need[e]
    units in total; each resource ends on a basis of its polymatroid."""
    polys = [inst.resources[j].polymatroid for j in idxs]
    merged = polys[0] if len(polys) == 1 else SumPoly(polys)
    if not member(merged, need, caps):
        raise ContractViolation("cover demand exceeds the merged polymatroid")
    y = greedy_basis_above(merged, tuple(need), caps)
    return decompose_merged_basis(polys, y, caps)


def reduce_to_core(inst: SantaInstance, alpha: Fraction, guess: Fraction,
                   cover_solver: Callable[[CoreCoverInstance], object],
                   caps: Caps = DEFAULT_CAPS) -> CoreReduction:
    """Solve a restricted matroid max-min instance to value >= guess/alpha
    (two-value flavor) or guess/(2*alpha) (general flavor), through core
    cover calls. cover_solver(CoreCoverInstance) returns an object with
    .feasible, .I_M and .y, or None; infeasibility raises GuessRejected
    so an enclosing guessing loop can lower its guess.

    Two-value dispatch at thresholds guess/alpha: below u, one resource per
    player suffices; between u and w, cover by the matroid of w-coverable
    player sets against the u-value polymatroid; above w, every unit counts
    and the box-saturating vector is rounded through the additive gadget.
    """
    alpha = Fraction(alpha)
    guess = Fraction(guess)
    if not inst.is_matroid_flavor:
        raise ValueError("reduce_to_core expects a matroid-flavor instance")
    if guess <= 0:
        raise ValueError("guess must be positive")
    m = inst.num_players
    everyone = full_mask(m)
    scaled = SantaInstance(m, [Item(value=it.value / guess, polymatroid=it.polymatroid)
                               for it in inst.resources])
    values = sorted({it.value for it in scaled.resources})
    if len(values) > 2:
        return _reduce_general(inst, scaled, alpha, guess, cover_solver, caps)
    u = values[0]
    w = values[-1]

    if u >= 1 / alpha:
        # one resource each suffices
        polys = [it.polymatroid for it in scaled.resources]
        merged = polys[0] if len(polys) == 1 else SumPoly(polys)
        if not member(merged, [1] * m, caps):
            raise GuessRejected("not every player can receive a resource")
        alloc = _alloc_from_cover(inst, range(len(polys)), [1] * m, caps)
        return CoreReduction(alloc, "one-each", guess * u)

    w_idx = [j for j, it in enumerate(scaled.resources) if it.value == w]
    u_idx = [j for j, it in enumerate(scaled.resources) if it.value == u]
    if w >= 1 / alpha:
        # matroid of w-coverable player sets vs the u polymatroid
        w_sum = SumPoly([scaled.resources[j].polymatroid for j in w_idx])
        # worthless resources cannot help a player reach the bound; a zero u
        # forces every player onto the matroid side
        u_sum = (SumPoly([scaled.resources[j].polymatroid for j in u_idx])
                 if u_idx and u > 0 else ModularPoly([0] * m))
        b = 1 if u == 0 else math.ceil(1 / (alpha * u))
        core = CoreCoverInstance(InducedMatroid(w_sum), u_sum, b)
        res = cover_solver(core)
        if res is None or not getattr(res, "feasible", False):
            raise GuessRejected("core cover solver found no cover at the guessed level")
        i_m, y = res.I_M, res.y
        alloc: list = [tuple([0] * m) for _ in inst.resources]
        if i_m:
            need = [1 if (i_m >> e) & 1 else 0 for e in range(m)]
            for j, piece in zip(w_idx, _alloc_from_cover(inst, w_idx, need, caps)):
                alloc[j] = piece
        if u_idx:
            for j, piece in zip(u_idx, _alloc_from_cover(inst, u_idx, list(y), caps)):
                alloc[j] = piece
        _assert_matroid_min_value(inst, alloc, guess / alpha)
        return CoreReduction(alloc, "core-cover", guess / alpha)

    # every value is small: saturate the unit-split polymatroid and round
    scale, ints = _scaled_int_values([it.value for it in scaled.resources])
    copies: list[PolymatroidOracle] = []
    copy_owner: list[int] = []
    for j, it in enumerate(scaled.resources):
        for _ in range(ints[j]):
            copies.append(it.polymatroid)
            copy_owner.append(j)
    split = SumPoly(copies)
    lo, hi = 0, split.value(everyone) // max(m, 1)
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if member(split, [mid] * m, caps):
            lo = mid
        else:
            hi = mid - 1
    if lo < scale:
        raise GuessRejected("the unit-split polymatroid cannot reach the guessed level")
    roomy = caps.override(expand=4 * caps.expand)
    pieces = decompose_in_sum(copies, tuple([lo] * m), roomy)
    frac_x: list[tuple[Fraction, ...]] = []
    for j, it in enumerate(scaled.resources):
        mine = [pieces[c] for c in range(len(copies)) if copy_owner[c] == j]
        frac_x.append(tuple(sum(Fraction(p[e]) for p in mine) / ints[j] for e in range(m)))
    frac = FractionalAssignment(Fraction(lo, scale), frac_x)
    alloc = round_santa(scaled, frac, caps)
    _assert_matroid_min_value(inst, alloc, guess / alpha)
    return CoreReduction(alloc, "round", guess / alpha)


def _reduce_general(inst: SantaInstance, scaled: SantaInstance, alpha: Fraction,
                    guess: Fraction, cover_solver, caps: Caps) -> CoreReduction:
    """Heavy/light split at 1/(2*alpha): heavy resources cover through the
    induced matroid, light ones through the value-weighted polymatroid sum,
    rounded additively; the combined value is >= guess/(2*alpha)."""
    m = inst.num_players
    threshold = 1 / (2 * alpha)
    heavy = [j for j, it in enumerate(scaled.resources) if it.value >= threshold]
    light = [j for j, it in enumerate(scaled.resources) if it.value < threshold]
    if not heavy:
        raise GuessRejected("no heavy resources at the guessed level")
    heavy_sum = SumPoly([scaled.resources[j].polymatroid for j in heavy])
    scale, ints = _scaled_int_values([scaled.resources[j].value for j in light] or [Fraction(1)])
    copies, copy_owner = [], []
    for pos, j in enumerate(light):
        for _ in range(ints[pos]):
            copies.append(scaled.resources[j].polymatroid)
            copy_owner.append(j)
    light_sum = SumPoly(copies) if copies else ModularPoly([0] * m)
    b = math.ceil(scale / alpha)
    core = CoreCoverInstance(InducedMatroid(heavy_sum), light_sum, b)
    res = cover_solver(core)
    if res is None or not getattr(res, "feasible", False):
        raise GuessRejected("core cover solver found no cover at the guessed level")
    i_m, y = res.I_M, res.y
    alloc: list = [tuple([0] * m) for _ in inst.resources]
    if i_m:
        need = [1 if (i_m >> e) & 1 else 0 for e in range(m)]
        for j, piece in zip(heavy, _alloc_from_cover(inst, heavy, need, caps)):
            alloc[j] = piece
    if copies and any(y):
        pieces = decompose_in_sum(copies, tuple(y), caps.override(expand=4 * caps.expand))
        light_scaled = SantaInstance(m, [Item(value=scaled.resources[j].value,
                                              polymatroid=scaled.resources[j].polymatroid)
                                         for j in light])
        frac_x = []
        for pos, j in enumerate(light):
            mine = [pieces[c] for c in range(len(copies)) if copy_owner[c] == j]
            frac_x.append(tuple(sum(Fraction(p[e]) for p in mine) / ints[pos]
                                for e in range(m)))
        light_cover = sum(1 for e in range(m) if y[e] >= b)
        if light_cover:
            rounded = round_santa(light_scaled, FractionalAssignment(Fraction(b, scale), frac_x),
                                  caps)
            for j, piece in zip(light, rounded):
                alloc[j] = piece
    _assert_matroid_min_value(inst, alloc, guess / (2 * alpha))
    return CoreReduction(alloc, "heavy-light", guess / (2 * alpha))


def _assert_matroid_min_value(inst: SantaInstance, alloc: Allocation, bound: Fraction) -> None:
    m = inst.num_players
    vals = [Fraction(0)] * m
    for j, vec in enumerate(alloc):
        for e in range(m):
            vals[e] += inst.resources[j].value * vec[e]
    if min(vals) < bound:
        raise ContractViolation(f"assembled value {min(vals)} below the bound {bound}")


# ---------------------------------------------------------------------------
# Objective guessing


def santa_guess_grid(inst: SantaInstance, caps: Caps = DEFAULT_CAPS) -> list[Fraction]:
    """Achievable per-player values: subset sums of any player's value column."""
    sums: set[Fraction] = set()
    m = inst.num_players
    for i in range(m):
        mine = {Fraction(0)}
        for it in inst.resources:
            v = it.value * it.polymatroid.value(1 << i) if it.polymatroid is not None \
                else it.values[i]
            if v:
                mine |= {s + v for s in mine}
                if len(mine) > caps.guess_grid:
                    raise SizeCapError("guess grid exceeds cap")
        sums |= mine
    return sorted(s for s in sums if s > 0)


def guess_loop(solver: Callable[[Fraction], object], grid: Sequence[Fraction]
               ) -> tuple[Fraction | None, object | None]:
    """Binary search for the largest guess the solver accepts.

    solver(T) returns a solution or None/raises GuessRejected; the solver
    contract is monotone (success at T implies success below T). Returns
    (best guess, its solution), or (None, None) if everything fails.
    """
    lo, hi = 0, len(grid) - 1
    best: tuple[Fraction | None, object | None] = (None, None)
    while lo <= hi:
        mid = (lo + hi) // 2
        try:
            sol = solver(grid[mid])
        except GuessRejected:
            sol = None
        if sol is None:
            hi = mid - 1
        else:
            best = (grid[mid], sol)
            lo = mid + 1
    return best
