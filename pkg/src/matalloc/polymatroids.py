"""Integer polymatroid value oracles and their derived operations.

A polymatroid is {x in Z>=0^E : x(S) <= f(S) for all S} for a monotone
submodular integer f with f(empty) = 0. Concrete families: modular,
weighted coverage, scaled matroid rank, explicit table. Derived forms:
sums, box caps, marginals above a set or vector, and duals. On top of
the oracles: brute-force submodular minimization, membership, greedy
basis extension, and the box-capped marginal f(Y | b*X).
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Sequence

from . import stats
from .bitsets import bits, check_subset, elements, full_mask, size, submasks, vec_sum, vec_support
from .limits import Caps, DEFAULT_CAPS, SizeCapError


class PolymatroidOracle:
    """Value oracle f: 2^E -> Z>=0, monotone submodular, f(empty) = 0."""

    def __init__(self, n: int):
        if n < 0:
            raise ValueError("ground set size must be nonnegative")
        self.n = n
        self._memo: dict[int, int] = {}
        self._capped_cache: dict[tuple, "CappedPoly"] = {}

    def value(self, mask: int) -> int:
        check_subset(mask, self.n)
        stats.bump("poly_value")
        hit = self._memo.get(mask)
        if hit is None:
            hit = self._memo[mask] = self._value(mask)
        return hit

    def _value(self, mask: int) -> int:
        raise NotImplementedError

    def marginal(self, add: int, base: int) -> int:
        """f(Y | X) = f(Y ∪ X) − f(X)."""
        return self.value(add | base) - self.value(base)

    def capped(self, caps: Sequence[int | None] | None = None, *, uniform: int | None = None,
               on: int | None = None) -> "CappedPoly":
        """Box-capped polymatroid, cached per cap pattern.

        Either pass a full caps vector, or uniform=h with on=mask to cap the
        elements of mask at h.
        """
        if caps is None:
            caps = tuple(uniform if (on >> e) & 1 else None for e in range(self.n))
        else:
            caps = tuple(caps)
        cached = self._capped_cache.get(caps)
        if cached is None:
            cached = self._capped_cache[caps] = CappedPoly(self, caps)
        return cached


class ModularPoly(PolymatroidOracle):
    def __init__(self, weights: Sequence[int]):
        super().__init__(len(weights))
        if any(w < 0 for w in weights):
            raise ValueError("modular weights must be nonnegative")
        self.weights = tuple(weights)

    def _value(self, mask: int) -> int:
        return sum(self.weights[e] for e in bits(mask))


class CoveragePoly(PolymatroidOracle):
    """f(S) = total weight of universe items covered by the sets of S.

    covers[e] is a bitmask over the item universe; item_weights indexed by item.
    """

    def __init__(self, covers: Sequence[int], item_weights: Sequence[int]):
        super().__init__(len(covers))
        if any(w < 0 for w in item_weights):
            raise ValueError("item weights must be nonnegative")
        self.covers = tuple(covers)
        self.item_weights = tuple(item_weights)

    def _value(self, mask: int) -> int:
        covered = 0
        for e in bits(mask):
            covered |= self.covers[e]
        return sum(self.item_weights[i] for i in bits(covered))


class ScaledRankPoly(PolymatroidOracle):
    """f(S) = scale * r(S) for a matroid rank function r."""

    def __init__(self, matroid, scale: int):
        super().__init__(matroid.n)
        if scale < 0:
            raise ValueError("scale must be nonnegative")
        self.matroid = matroid
        self.scale = scale

    def _value(self, mask: int) -> int:
        return self.scale * self.matroid.rank(mask)


class ExplicitPoly(PolymatroidOracle):
    def __init__(self, n: int, table: Sequence[int]):
        super().__init__(n)
        if len(table) != 1 << n:
            raise ValueError("value table must have 2^n entries")
        self.table = tuple(table)

    def _value(self, mask: int) -> int:
        return self.table[mask]


class SumPoly(PolymatroidOracle):
    """f(S) = sum of the parts; the polymatroid sum (Minkowski sum of the parts)."""

    def __init__(self, parts: Sequence[PolymatroidOracle]):
        if not parts:
            raise ValueError("sum of no polymatroids")
        n = parts[0].n
        if any(p.n != n for p in parts):
            raise ValueError("sum parts must share the ground set")
        super().__init__(n)
        flat: list[PolymatroidOracle] = []
        for p in parts:
            flat.extend(p.parts if isinstance(p, SumPoly) else [p])
        self.parts = tuple(flat)

    def _value(self, mask: int) -> int:
        return sum(p.value(mask) for p in self.parts)


class CappedPoly(PolymatroidOracle):
    """f'(S) = min_{T ⊆ S} f(S \\ T) + c(T), the box restriction y(i) <= c(i).

    Evaluated by the recursion f'(S) = min(f(S), min_{i in S, c(i) finite}
    f'(S − i) + c(i)); nested caps merge elementwise.
    """

    def __init__(self, inner: PolymatroidOracle, caps: Sequence[int | None]):
        super().__init__(inner.n)
        caps = tuple(caps)
        if len(caps) != inner.n:
            raise ValueError("one cap per element required (None for unbounded)")
        if any(c is not None and c < 0 for c in caps):
            raise ValueError("caps must be nonnegative")
        if isinstance(inner, CappedPoly):
            caps = tuple(_min_cap(a, b) for a, b in zip(caps, inner.caps))
            inner = inner.inner
        self.inner = inner
        self.caps = caps
        self.capset = sum(1 << e for e, c in enumerate(caps) if c is not None)

    def _value(self, mask: int) -> int:
        best = self.inner.value(mask)
        for e in bits(mask & self.capset):
            cand = self.value(mask ^ (1 << e)) + self.caps[e]
            if cand < best:
                best = cand
        return best


def _min_cap(a: int | None, b: int | None) -> int | None:
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


class MarginalPoly(PolymatroidOracle):
    """f'(S) = f(S ∪ X) − f(X): contraction of the set X (elements of X drop out)."""

    def __init__(self, inner: PolymatroidOracle, base_mask: int):
        super().__init__(inner.n)
        check_subset(base_mask, inner.n)
        if isinstance(inner, MarginalPoly):
            base_mask |= inner.base_mask
            inner = inner.inner
        self.inner = inner
        self.base_mask = base_mask
        self._fx = None

    def _value(self, mask: int) -> int:
        if self._fx is None:
            self._fx = self.inner.value(self.base_mask)
        return self.inner.value(mask | self.base_mask) - self._fx


class VectorContractedPoly(PolymatroidOracle):
    """Marginal above a vector y in P: f'(S) = min_{U ⊇ S} f(U) − y(U)."""

    def __init__(self, inner: PolymatroidOracle, base: Sequence[int]):
        super().__init__(inner.n)
        if len(base) != inner.n:
            raise ValueError("base vector length mismatch")
        if not member(inner, base):
            raise ValueError("base vector must belong to the polymatroid")
        self.inner = inner
        self.base = tuple(base)

    def _value(self, mask: int) -> int:
        best = self.inner.value(mask) - vec_sum(self.base, mask)
        for e in range(self.n):
            bit = 1 << e
            if mask & bit:
                continue
            cand = self.value(mask | bit)
            if cand < best:
                best = cand
        return best


class DualPoly(PolymatroidOracle):
    """g(S) = z(S) + f(E \\ S) − f(E) for a vector z dominating the polymatroid."""

    def __init__(self, inner: PolymatroidOracle, z: Sequence[int]):
        super().__init__(inner.n)
        if len(z) != inner.n:
            raise ValueError("dominating vector length mismatch")
        self.inner = inner
        self.z = tuple(z)
        self._fe = None

    def _value(self, mask: int) -> int:
        if self._fe is None:
            self._fe = self.inner.value(full_mask(self.n))
        comp = full_mask(self.n) & ~mask
        return vec_sum(self.z, mask) + self.inner.value(comp) - self._fe


def dual_polymatroid(p: PolymatroidOracle, z: Sequence[int]) -> DualPoly:
    """Dual of p with respect to z; z must dominate every member of p
    (checked in the axiom suites, not at construction)."""
    return DualPoly(p, z)


def capped_marginal(p: PolymatroidOracle, add: int, h: int, base: int) -> int:
    """f(Y | h·X): marginal of Y above X in the polymatroid with entries of X capped at h.

    Extended to overlapping arguments by f(Y | h·X) = f(Y \\ X | h·X).
    """
    add &= ~base
    cp = p.capped(uniform=h, on=base)
    return cp.value(add | base) - cp.value(base)


def sfm_min(fn: Callable[[int], int], n: int, caps: Caps = DEFAULT_CAPS,
            restrict: int | None = None) -> tuple[int, int]:
    """Brute-force submodular function minimization over subsets of the ground set.

    Returns (minimizer, minimum); ties broken by the lexicographically
    smallest subset (as a sorted index tuple). restrict limits the search
    to submasks of the given set.
    """
    domain = full_mask(n) if restrict is None else restrict
    if size(domain) > caps.sfm_ground:
        raise SizeCapError(f"SFM ground set of size {size(domain)} exceeds cap {caps.sfm_ground}")
    best_mask, best_val = 0, fn(0)
    for sub in submasks(domain):
        v = fn(sub)
        if v < best_val or (v == best_val and elements(sub) < elements(best_mask)):
            best_mask, best_val = sub, v
    return best_mask, best_val


def member(p: PolymatroidOracle, x: Sequence[int | Fraction], caps: Caps = DEFAULT_CAPS) -> bool:
    """x in P iff min_S f(S) − x(S) >= 0.

    Monotonicity lets the search restrict to subsets of the support of x.
    Accepts integer or rational vectors (rational for scaled box tests).
    """
    if any(v < 0 for v in x):
        raise ValueError("membership is defined for nonnegative vectors")
    supp = vec_support(x)
    check_subset(supp, p.n)
    _, mn = sfm_min(lambda s: p.value(s) - vec_sum(x, s), p.n, caps, restrict=supp)
    return mn >= 0


def saturation_slack(p: PolymatroidOracle, x: Sequence[int], e: int,
                     caps: Caps = DEFAULT_CAPS) -> int:
    """max t with x + t·1_e in P, i.e. min_{S ∋ e} f(S) − x(S)."""
    if p.n > caps.sfm_ground:
        raise SizeCapError(f"ground set of size {p.n} exceeds cap {caps.sfm_ground}")
    bit = 1 << e
    rest = full_mask(p.n) ^ bit
    best = None
    for sub in submasks(rest):
        s = sub | bit
        v = p.value(s) - vec_sum(x, s)
        if best is None or v < best:
            best = v
    return best


def greedy_basis_above(p: PolymatroidOracle, x: Sequence[int],
                       caps: Caps = DEFAULT_CAPS) -> tuple[int, ...]:
    """Raise x to a basis (y >= x, y in P, y(E) = f(E)), elements in index order."""
    if not member(p, x, caps):
        raise ValueError("greedy extension requires a member of the polymatroid")
    y = list(x)
    for e in range(p.n):
        y[e] += saturation_slack(p, y, e, caps)
    return tuple(y)


def is_basis(p: PolymatroidOracle, x: Sequence[int], caps: Caps = DEFAULT_CAPS) -> bool:
    return member(p, x, caps) and sum(x) == p.value(full_mask(p.n))
