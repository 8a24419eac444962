"""Assignment-LP solving and additive rounding.

round_santa turns a fractional assignment of value T into an integral one
losing at most the largest resource value; round_makespan turns one of
load T into an integral schedule gaining at most the largest job size.
Both build a bipartite gadget (left vertex per item, right vertex per
entity/item pair, consecutive-item carry edges) whose degree constraints
come from a floor/ceiling remainder recursion, and extract the integral
solution as a maximum common vector of two polymatroids on the edges.

The LP itself is solved exactly (rational simplex), so every additive
guarantee is checked with exact comparisons.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import ceil, floor

from .bitsets import bits, full_mask, size
from .instances import Item, MakespanInstance, SantaInstance
from .intersection import max_common_independent
from .limits import Caps, DEFAULT_CAPS, ContractViolation, SizeCapError
from .matching import perfect_matching
from .polymatroids import (CoveragePoly, ModularPoly, PolymatroidOracle, greedy_basis_above,
                           member)
from .simplex import feasible_point


@dataclass
class FractionalAssignment:
    """x[j][i]: fraction of item j on entity i, feasible for the assignment LP
    with threshold T."""

    T: Fraction
    x: list[tuple[Fraction, ...]]


def item_value_poly(inst, j: int) -> tuple[Fraction, PolymatroidOracle]:
    """The (value, polymatroid) view of item j.

    Matroid items carry their polymatroid; classical restricted items embed
    as a rank-one coverage polymatroid over the eligible entities.
    """
    it = inst.items[j]
    m = inst.num_entities
    if it.polymatroid is not None:
        return it.value, it.polymatroid
    is_makespan = isinstance(inst, MakespanInstance)
    if is_makespan:
        eligible = [i for i in range(m) if it.values[i] is not None]
        vals = {it.values[i] for i in eligible}
    else:
        eligible = [i for i in range(m) if it.values[i] > 0]
        vals = {it.values[i] for i in eligible}
    if len(vals) > 1:
        raise ContractViolation(f"item {j} is not restricted: distinct values {sorted(vals)}")
    v = vals.pop() if vals else Fraction(0)
    covers = [1 if i in eligible else 0 for i in range(m)]
    return v, CoveragePoly(covers, [1])


def solve_assignment_lp(inst, T: Fraction, caps: Caps = DEFAULT_CAPS
                        ) -> FractionalAssignment | None:
    """Feasible rational point of the assignment LP at threshold T, or None.

    Santa: per-player value >= T, each x_j fractionally a basis of its
    polymatroid (classical items: assigned exactly once). Makespan: loads
    <= T, eligibility requires p_ij <= T.
    """
    T = Fraction(T)
    m = inst.num_entities
    is_makespan = isinstance(inst, MakespanInstance)
    var_of: dict[tuple[int, int], int] = {}
    coef: list[list[tuple[int, Fraction]]] = [[] for _ in range(m)]  # per entity
    constraints: list[tuple[dict[int, Fraction], str, Fraction]] = []

    def poly_view(j: int, it: Item) -> bool:
        if it.polymatroid is not None:
            return True
        if is_makespan:
            return False
        return len({v for v in it.values if v > 0}) <= 1

    for j, it in enumerate(inst.items):
        if poly_view(j, it):
            value, p = item_value_poly(inst, j)
            if is_makespan and value > T and p.value(full_mask(m)) > 0:
                return None
            supp = [i for i in range(m) if p.value(1 << i) > 0]
            for i in supp:
                var_of[(j, i)] = len(var_of)
            smask = sum(1 << i for i in supp)
            sub = smask
            while sub:
                row = {var_of[(j, i)]: Fraction(1) for i in bits(sub)}
                if sub == smask:
                    constraints.append((row, "==", Fraction(p.value(full_mask(m)))))
                else:
                    constraints.append((row, "<=", Fraction(p.value(sub))))
                sub = (sub - 1) & smask
            for i in supp:
                coef[i].append((var_of[(j, i)], value))
        else:
            if is_makespan:
                eligible = [i for i in range(m) if it.values[i] is not None and it.values[i] <= T]
                if not eligible:
                    return None
            else:
                eligible = list(range(m))
            for i in eligible:
                var_of[(j, i)] = len(var_of)
            constraints.append(({var_of[(j, i)]: Fraction(1) for i in eligible}, "==", Fraction(1)))
            for i in eligible:
                v = it.values[i]
                if v:
                    coef[i].append((var_of[(j, i)], v))

    if len(var_of) > caps.lp_vars:
        raise SizeCapError(f"assignment LP has {len(var_of)} variables, cap {caps.lp_vars}")
    sense = "<=" if is_makespan else ">="
    for i in range(m):
        constraints.append((dict(coef[i]), sense, T))

    point = feasible_point(len(var_of), constraints)
    if point is None:
        return None
    x = [tuple(point[var_of[(j, i)]] if (j, i) in var_of else Fraction(0) for i in range(m))
         for j in range(len(inst.items))]
    return FractionalAssignment(T, x)


# ---------------------------------------------------------------------------
# Gadget rounding


def _degree_chain(xs: list[Fraction], mode: str) -> tuple[list[int], list[Fraction]]:
    """Per-entity degree recursion along the positive columns.

    mode "floor": d_k = floor(R + x_k), remainder carried to the next vertex.
    mode "ceil":  d_k = ceil(x_k - R), surplus carried from the previous one.
    """
    degrees: list[int] = []
    remainders: list[Fraction] = []
    r = Fraction(0)
    for k, xv in enumerate(xs):
        if mode == "floor":
            d = floor(r + xv)
            r = r + xv - d
        else:
            d = ceil(xv - r) if k else ceil(xv)
            r = d - (xv - r) if k else d - xv
        degrees.append(d)
        remainders.append(r)
        if not (0 <= r < 1):
            raise ContractViolation("remainder left [0, 1): fractional input is malformed")
    return degrees, remainders


def _gadget_round(inst, frac: FractionalAssignment, mode: str,
                  caps: Caps = DEFAULT_CAPS) -> list[tuple[int, ...]]:
    m = inst.num_entities
    n = len(inst.items)
    vp = [item_value_poly(inst, j) for j in range(n)]
    order = sorted(range(n), key=lambda j: (-vp[j][0], j))

    # per entity: positive columns of the sorted sequence and their degrees
    slots: list[tuple[int, int, int]] = []  # (sorted position, entity, chain index)
    slot_caps: list[int] = []
    degree: dict[tuple[int, int], int] = {}
    for i in range(m):
        pos = [k for k, j in enumerate(order) if frac.x[j][i] > 0]
        xs = [frac.x[order[k]][i] for k in pos]
        degs, _ = _degree_chain(xs, mode)
        for t in range(len(pos)):
            degree[(i, t)] = degs[t]
        for t, k in enumerate(pos):
            j = order[k]
            fii = vp[j][1].value(1 << i)
            diag_cap = min(degs[t], fii)
            if diag_cap > 0:
                slots.append((k, i, t))
                slot_caps.append(diag_cap)
            # carry edge: leftovers flow to the next chain vertex (floor mode)
            # or surplus is borrowed from the previous one (ceil mode)
            adj = t + 1 if mode == "floor" else t - 1
            if 0 <= adj < len(pos):
                carry_cap = min(degs[adj], fii)
                if carry_cap > 0:
                    slots.append((k, i, adj))
                    slot_caps.append(carry_cap)

    copies: list[int] = []  # copy index -> slot index
    for s, c in enumerate(slot_caps):
        copies.extend([s] * c)
    if len(copies) > 4 * caps.expand:
        raise SizeCapError(f"rounding gadget needs {len(copies)} copies, cap {4 * caps.expand}")

    def aggregate(mask: int):
        per_item: dict[int, list[int]] = {}
        per_vertex: dict[tuple[int, int], int] = {}
        for idx in bits(mask):
            k, i, t = slots[copies[idx]]
            per_item.setdefault(k, [0] * m)[i] += 1
            per_vertex[(i, t)] = per_vertex.get((i, t), 0) + 1
        return per_item, per_vertex

    memo_l: dict[int, bool] = {}
    memo_r: dict[int, bool] = {}

    def indep_left(mask: int) -> bool:
        hit = memo_l.get(mask)
        if hit is None:
            per_item, _ = aggregate(mask)
            hit = memo_l[mask] = all(member(vp[order[k]][1], vec, caps)
                                     for k, vec in per_item.items())
        return hit

    def indep_right(mask: int) -> bool:
        hit = memo_r.get(mask)
        if hit is None:
            _, per_vertex = aggregate(mask)
            hit = memo_r[mask] = all(c <= degree[(i, t)] for (i, t), c in per_vertex.items())
        return hit

    best = max_common_independent(len(copies), indep_left, indep_right)
    if mode == "floor":
        target = sum(degree.values())
        what = "degree constraints"
    else:
        target = sum(vp[j][1].value(full_mask(m)) for j in range(n))
        what = "left bases"
    if size(best) != target:
        raise ContractViolation(
            f"gadget rounding fell short of saturating its {what} "
            f"({size(best)} of {target}); the fractional input is not LP-feasible")

    per_item, _ = aggregate(best)
    alloc = [tuple([0] * m) for _ in range(n)]
    for k, vec in per_item.items():
        alloc[order[k]] = tuple(vec)
    return alloc


def round_santa(inst: SantaInstance, frac: FractionalAssignment,
                caps: Caps = DEFAULT_CAPS, extend: bool = True) -> list[tuple[int, ...]]:
    """Integral allocation with every player value at least T - max_j v_j.

    The fractional input must satisfy the assignment LP at frac.T. Values
    are processed in decreasing order with a zero-value item appended
    internally (and stripped from the output).
    """
    pad = SantaInstance(inst.num_players,
                        inst.resources + [Item(value=Fraction(0),
                                               polymatroid=ModularPoly([0] * inst.num_players))])
    pfrac = FractionalAssignment(frac.T, list(frac.x) + [tuple([Fraction(0)] * inst.num_players)])
    alloc = _gadget_round(pad, pfrac, "floor", caps)[:-1]
    vmax = max((item_value_poly(inst, j)[0] for j in range(len(inst.resources))),
               default=Fraction(0))
    vals = _player_values(inst, alloc)
    # per-player guarantee: lose at most v_max against one's own fractional
    # value (at least T - v_max when the input satisfies the LP at T)
    fvals = [sum(item_value_poly(inst, j)[0] * frac.x[j][i] for j in range(len(inst.resources)))
             for i in range(inst.num_players)]
    shortfall = [i for i in range(inst.num_players)
                 if vals[i] < min(frac.T, fvals[i]) - vmax]
    if shortfall:
        raise ContractViolation(f"rounding guarantee violated for players {shortfall}")
    if extend:
        alloc = [tuple(greedy_basis_above(item_value_poly(inst, j)[1], vec, caps))
                 for j, vec in enumerate(alloc)]
    return alloc


def round_makespan(inst: MakespanInstance, frac: FractionalAssignment,
                   caps: Caps = DEFAULT_CAPS) -> list[tuple[int, ...]]:
    """Integral schedule (a basis per job) with every load at most T + max_j p_j."""
    pad = MakespanInstance(inst.num_machines,
                           inst.jobs + [Item(value=Fraction(0),
                                             polymatroid=ModularPoly([0] * inst.num_machines))])
    pfrac = FractionalAssignment(frac.T, list(frac.x) + [tuple([Fraction(0)] * inst.num_machines)])
    alloc = _gadget_round(pad, pfrac, "ceil", caps)[:-1]
    pmax = max((item_value_poly(inst, j)[0] for j in range(len(inst.jobs))), default=Fraction(0))
    loads = _loads(inst, alloc)
    floads = [sum(item_value_poly(inst, j)[0] * frac.x[j][i] for j in range(len(inst.jobs)))
              for i in range(inst.num_machines)]
    over = [i for i in range(inst.num_machines)
            if loads[i] > max(frac.T, floads[i]) + pmax]
    if over:
        raise ContractViolation(f"rounding guarantee violated for machines {over}")
    return alloc


def _player_values(inst: SantaInstance, alloc) -> list[Fraction]:
    vals = [Fraction(0)] * inst.num_players
    for j, vec in enumerate(alloc):
        v = item_value_poly(inst, j)[0]
        for i in range(inst.num_players):
            vals[i] += v * vec[i]
    return vals


def _loads(inst: MakespanInstance, alloc) -> list[Fraction]:
    loads = [Fraction(0)] * inst.num_machines
    for j, vec in enumerate(alloc):
        v = item_value_poly(inst, j)[0]
        for i in range(inst.num_machines):
            loads[i] += v * vec[i]
    return loads


# ---------------------------------------------------------------------------
# Classical additive roundings on top of the LP


def additive_round_santa(inst: SantaInstance, frac: FractionalAssignment,
                         caps: Caps = DEFAULT_CAPS) -> list[int | None]:
    """Unrelated classical max-min rounding: every player loses at most one
    fractionally assigned resource, so the value stays above T - v_max."""
    m, n = inst.num_players, len(inst.resources)
    owner: list[int | None] = [None] * n
    frac_res: list[list[int]] = []
    for j in range(n):
        support = [i for i in range(m) if frac.x[j][i] > 0]
        whole = [i for i in support if frac.x[j][i] == 1]
        if whole:
            owner[j] = whole[0]
        elif support:
            frac_res.append(j)
    vmax = max((v for it in inst.resources for v in it.values), default=Fraction(0))

    base = [Fraction(0)] * m
    for j, i in enumerate(owner):
        if i is not None:
            base[i] += inst.resources[j].values[i]

    best: list = [None, None]

    def rec(k: int, vals) -> None:
        if k == len(frac_res):
            worst = min(vals)
            if best[0] is None or worst > best[0]:
                best[0] = worst
                best[1] = [owner_frac[j] for j in frac_res]
            return
        j = frac_res[k]
        for i in range(m):
            if frac.x[j][i] > 0:
                owner_frac[j] = i
                nv = list(vals)
                nv[i] += inst.resources[j].values[i]
                rec(k + 1, nv)

    owner_frac: dict[int, int] = {}
    rec(0, base)
    if best[0] is None:
        best[0] = min(base)
        best[1] = []
    if best[0] < frac.T - vmax:
        raise ContractViolation("additive rounding guarantee violated")
    for j, i in zip(frac_res, best[1]):
        owner[j] = i
    return owner


def lst_round_unrelated(inst: MakespanInstance, frac: FractionalAssignment
                        ) -> list[int]:
    """Classical unrelated-machines rounding: integral part assigned directly,
    fractional jobs matched to distinct machines along the fractional support."""
    m, n = inst.num_machines, len(inst.jobs)
    owner: list[int | None] = [None] * n
    fractional: list[int] = []
    for j in range(n):
        whole = [i for i in range(m) if frac.x[j][i] == 1]
        if whole:
            owner[j] = whole[0]
        else:
            fractional.append(j)
    adj = [sum(1 << i for i in range(m) if frac.x[j][i] > 0) for j in fractional]
    matching = perfect_matching(adj, m)
    if matching is None:
        raise ContractViolation(
            "fractional support admits no perfect matching; not a basic LP point")
    for j, i in zip(fractional, matching):
        owner[j] = i
    return owner  # type: ignore[return-value]


def makespan_guess_grid(inst: MakespanInstance, caps: Caps = DEFAULT_CAPS) -> list[Fraction]:
    """Achievable-load grid: per machine, all subset sums of its finite sizes."""
    sums: set[Fraction] = set()
    m = inst.num_machines
    for i in range(m):
        machine_sums = {Fraction(0)}
        for it in inst.jobs:
            v = it.value if it.polymatroid is not None else it.values[i]
            if v is None:
                continue
            machine_sums |= {s + v for s in machine_sums}
            if len(machine_sums) > caps.guess_grid:
                raise SizeCapError("guess grid exceeds cap")
        sums |= machine_sums
    return sorted(sums)


def lst_baseline(inst: MakespanInstance, caps: Caps = DEFAULT_CAPS
                 ) -> tuple[list[tuple[int, ...]], Fraction]:
    """Assignment-LP guessing plus additive rounding: makespan <= T* + p_max
    where T* is the smallest LP-feasible guess on the achievable-load grid."""
    grid = makespan_guess_grid(inst, caps)
    lo, hi = 0, len(grid) - 1
    best: tuple[Fraction, FractionalAssignment] | None = None
    while lo <= hi:
        mid = (lo + hi) // 2
        frac = solve_assignment_lp(inst, grid[mid], caps)
        if frac is None:
            lo = mid + 1
        else:
            best = (grid[mid], frac)
            hi = mid - 1
    if best is None:
        raise ContractViolation("no feasible guess: some job fits on no machine")
    t_star, frac = best
    restricted = inst.is_matroid_flavor or all(
        len({v for v in it.values if v is not None}) <= 1 for it in inst.jobs)
    if restricted:
        alloc = round_makespan(inst, frac, caps)
    else:
        owner = lst_round_unrelated(inst, frac)
        alloc = [tuple(1 if i == o else 0 for i in range(inst.num_machines)) for o in owner]
        loads = [Fraction(0)] * inst.num_machines
        pmax = Fraction(0)
        for j, o in enumerate(owner):
            loads[o] += inst.jobs[j].values[o]
            pmax = max(pmax, max(v for v in inst.jobs[j].values if v is not None))
        if max(loads) > t_star + pmax:
            raise ContractViolation("unrelated rounding guarantee violated")
    return alloc, t_star
