"""Brute-force ground-truth solvers and axiom validators.

Everything here is exhaustive enumeration under explicit caps: exceeding a
cap is an error, never silent sampling. These are the independent oracles
the algorithmic modules are measured against.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .bitsets import full_mask, size, submasks
from .limits import Caps, DEFAULT_CAPS, SizeCapError
from .matroids import MatroidOracle
from .polymatroids import PolymatroidOracle, member, saturation_slack


@dataclass
class OptReport:
    value: Fraction | float
    witness: object
    search_space: int
    elapsed: float


def enumerate_bases(p: PolymatroidOracle, caps: Caps = DEFAULT_CAPS) -> list[tuple[int, ...]]:
    """All bases of an integer polymatroid (vectors x in P with x(E) = f(E))."""
    n = p.n
    target = p.value(full_mask(n))
    out: list[tuple[int, ...]] = []
    vec = [0] * n

    def rec(e: int, total: int) -> None:
        if e == n:
            if total == target:
                out.append(tuple(vec))
            return
        cap = min(p.value(1 << e), target - total)
        for v in range(cap, -1, -1):
            vec[e] = v
            if member(p, vec[: e + 1] + [0] * (n - e - 1), caps):
                rec(e + 1, total + v)
            if len(out) > caps.basis_enum:
                raise SizeCapError("basis enumeration exceeded cap")
        vec[e] = 0

    rec(0, 0)
    return out


def brute_opt_santa(instance, caps: Caps = DEFAULT_CAPS) -> OptReport:
    """Exact max-min value by exhaustive enumeration (classical or matroid flavor)."""
    start = time.monotonic()
    if instance.is_matroid_flavor:
        value, witness, space = _brute_matroid(instance, maximize_min=True)
    else:
        value, witness, space = _brute_classical_santa(instance, caps)
    return OptReport(value, witness, space, time.monotonic() - start)


def brute_opt_makespan(instance, caps: Caps = DEFAULT_CAPS) -> OptReport:
    """Exact min-max load by exhaustive enumeration (classical or matroid flavor)."""
    start = time.monotonic()
    if instance.is_matroid_flavor:
        value, witness, space = _brute_matroid(instance, maximize_min=False)
    else:
        value, witness, space = _brute_classical_makespan(instance, caps)
    return OptReport(value, witness, space, time.monotonic() - start)


def _brute_classical_santa(instance, caps: Caps):
    m = instance.num_entities
    items = instance.items
    n = len(items)
    space = m ** n
    if space > caps.assignments:
        raise SizeCapError(f"assignment space {space} exceeds cap {caps.assignments}")
    loads = [Fraction(0)] * m
    best = [None, None]

    def rec(j: int) -> None:
        if j == n:
            val = min(loads)
            if best[0] is None or val > best[0]:
                best[0] = val
                best[1] = None
            return
        for i in range(m):
            v = items[j].values[i]
            loads[i] += v
            rec(j + 1)
            loads[i] -= v

    # track witness with a second pass once the optimum is known (cheap at desk scale)
    choice = [0] * n

    def rec_w(j: int) -> bool:
        if j == n:
            return min(loads) == best[0]
        for i in range(m):
            v = items[j].values[i]
            loads[i] += v
            choice[j] = i
            if rec_w(j + 1):
                loads[i] -= v
                return True
            loads[i] -= v
        return False

    rec(0)
    rec_w(0)
    return best[0], list(choice), space


def _brute_classical_makespan(instance, caps: Caps):
    m = instance.num_entities
    items = instance.items
    n = len(items)
    allowed = [[i for i in range(m) if it.values[i] is not None] for it in items]
    space = 1
    for a in allowed:
        if not a:
            return math.inf, None, 0
        space *= len(a)
        if space > caps.assignments:
            raise SizeCapError(f"assignment space exceeds cap {caps.assignments}")
    loads = [Fraction(0)] * m
    best: list = [None, None]

    def rec(j: int) -> None:
        if best[0] is not None and max(loads) >= best[0] and j < n:
            # the partial max only grows; prune
            if max(loads) > best[0]:
                return
        if j == n:
            val = max(loads)
            if best[0] is None or val < best[0]:
                best[0] = val
                best[1] = None
            return
        for i in allowed[j]:
            v = items[j].values[i]
            loads[i] += v
            rec(j + 1)
            loads[i] -= v

    choice = [0] * n

    def rec_w(j: int) -> bool:
        if j == n:
            return max(loads) == best[0]
        for i in allowed[j]:
            v = items[j].values[i]
            loads[i] += v
            choice[j] = i
            if max(loads) <= best[0] and rec_w(j + 1):
                loads[i] -= v
                return True
            loads[i] -= v
        return False

    rec(0)
    rec_w(0)
    return best[0], list(choice), space


def _brute_matroid(instance, maximize_min: bool):
    m = instance.num_entities
    items = instance.items
    bases_per_item = []
    space = 1
    for it in items:
        bases = enumerate_bases(it.polymatroid)
        bases_per_item.append(bases)
        space *= max(len(bases), 1)
        if space > DEFAULT_CAPS.basis_enum:
            raise SizeCapError("matroid brute force: basis product exceeds cap")
        if not bases:
            return (Fraction(0) if maximize_min else math.inf), None, space
    loads = [Fraction(0)] * m
    best: list = [None, None]

    def rec(j: int) -> None:
        if j == len(items):
            val = min(loads) if maximize_min else max(loads)
            if best[0] is None or (val > best[0] if maximize_min else val < best[0]):
                best[0] = val
                best[1] = [list(b) for b in chosen]
            return
        for b in bases_per_item[j]:
            for i in range(m):
                loads[i] += items[j].value * b[i]
            chosen.append(b)
            rec(j + 1)
            chosen.pop()
            for i in range(m):
                loads[i] -= items[j].value * b[i]

    chosen: list = []
    rec(0)
    return best[0], best[1], space


def brute_max_cover_b(matroid: MatroidOracle, poly: PolymatroidOracle,
                      caps: Caps = DEFAULT_CAPS) -> int | float:
    """Largest b for which some independent I_M and y in P cover every element
    (i in I_M or y(i) >= b); math.inf when the matroid alone can cover E."""
    n = matroid.n
    if n > caps.sfm_ground:
        raise SizeCapError(f"ground set {n} exceeds cap {caps.sfm_ground}")
    best: int | float = 0
    for im in range(1 << n):
        if not matroid.is_independent(im):
            continue
        rest = full_mask(n) ^ im
        if rest == 0:
            return math.inf
        b = None
        for s in submasks(rest):
            if s == 0:
                continue
            q = poly.value(s) // size(s)
            if b is None or q < b:
                b = q
        if b > best:
            best = b
    return best


def cover_exists(matroid: MatroidOracle, poly: PolymatroidOracle, b: int,
                 caps: Caps = DEFAULT_CAPS) -> bool:
    return brute_max_cover_b(matroid, poly, caps) >= b


def exists_strong_cover(matroid: MatroidOracle, poly: PolymatroidOracle, ground: int,
                        b0: int, level: Fraction, min_b0_hits: Fraction,
                        caps: Caps = DEFAULT_CAPS) -> bool:
    """Exhaustive check used against certificates: is there I*_M ∪ I*_P ⊇ E \\ B0
    with I*_M independent, level·1_{I*_P} in P, and |B0 ∩ I*_M| >= min_b0_hits?"""
    if size(ground) > 16:
        raise SizeCapError("exhaustive soundness check capped at 16 elements")
    others = ground & ~b0
    for ip in submasks(ground):
        vec = [level if (ip >> e) & 1 else Fraction(0) for e in range(poly.n)]
        if not member(poly, vec, caps):
            continue
        base = others & ~ip
        if not matroid.is_independent(base):
            continue
        hits = matroid.rank(base | b0) - size(base)
        if hits >= min_b0_hits:
            return True
    return False


def check_axioms(oracle, caps: Caps = DEFAULT_CAPS, seed: int = 0,
                 augmentation_samples: int = 20) -> dict:
    """Exhaustive matroid/polymatroid axiom verification for n <= 12.

    Polymatroids additionally get the augmentation property spot-checked on
    sampled member pairs. Returns {"ok": bool, "violations": [...]}.
    """
    import random

    n = oracle.n
    if n > 12:
        raise SizeCapError("axiom check capped at n = 12")
    violations: list[str] = []
    if isinstance(oracle, MatroidOracle):
        f = oracle.rank
        if f(0) != 0:
            violations.append("r(empty) != 0")
        for x in range(1 << n):
            for i in range(n):
                if (x >> i) & 1:
                    continue
                step = f(x | (1 << i)) - f(x)
                if step < 0 or step > 1:
                    violations.append(f"unit increase fails at X={x:#x}, i={i}")
    elif isinstance(oracle, PolymatroidOracle):
        f = oracle.value
        if f(0) != 0:
            violations.append("f(empty) != 0")
        for x in range(1 << n):
            v = f(x)
            if not isinstance(v, int):
                violations.append(f"non-integer value at X={x:#x}")
            for i in range(n):
                if (x >> i) & 1:
                    continue
                if f(x | (1 << i)) < v:
                    violations.append(f"monotonicity fails at X={x:#x}, i={i}")
    else:
        raise TypeError("expected a matroid or polymatroid oracle")

    for x in range(1 << n):
        for i in range(n):
            if (x >> i) & 1:
                continue
            for j in range(i + 1, n):
                if (x >> j) & 1:
                    continue
                lhs = f(x | (1 << i)) + f(x | (1 << j))
                rhs = f(x | (1 << i) | (1 << j)) + f(x)
                if lhs < rhs:
                    violations.append(f"submodularity fails at X={x:#x}, i={i}, j={j}")

    if isinstance(oracle, PolymatroidOracle) and not violations:
        rng = random.Random(seed)
        for _ in range(augmentation_samples):
            x = _random_member(oracle, rng, caps)
            y = _random_member(oracle, rng, caps)
            if sum(x) > sum(y):
                x, y = y, x
            if sum(x) == sum(y):
                continue
            ok = any(member(oracle, _plus_one(x, e), caps) for e in range(n))
            if not ok:
                violations.append(f"augmentation fails between {x} and {y}")
    return {"ok": not violations, "violations": violations}


def _plus_one(x: Sequence[int], e: int) -> list[int]:
    out = list(x)
    out[e] += 1
    return out


def _random_member(p: PolymatroidOracle, rng, caps: Caps) -> list[int]:
    x = [0] * p.n
    for e in rng.sample(range(p.n), p.n):
        slack = saturation_slack(p, x, e, caps)
        if slack > 0:
            x[e] += rng.randint(0, slack)
    return x
