"""Matroid rank oracles.

Concrete families (uniform, partition, graphic, transversal, explicit
table) plus derived forms (contraction, element zeroing, union, and the
matroid induced by an integer polymatroid). All oracles are immutable
after construction and memoize rank queries per instance.
"""

from __future__ import annotations

from typing import Sequence

from . import stats
from .bitsets import bits, check_subset, full_mask, size, submasks
from .matching import max_bipartite_matching


class MatroidOracle:
    """Rank oracle r: 2^E -> Z>=0 with the matroid axioms."""

    def __init__(self, n: int):
        if n < 0:
            raise ValueError("ground set size must be nonnegative")
        self.n = n
        self._memo: dict[int, int] = {}

    def rank(self, mask: int) -> int:
        check_subset(mask, self.n)
        stats.bump("matroid_rank")
        hit = self._memo.get(mask)
        if hit is None:
            hit = self._memo[mask] = self._rank(mask)
        return hit

    def _rank(self, mask: int) -> int:
        raise NotImplementedError

    def is_independent(self, mask: int) -> bool:
        return self.rank(mask) == size(mask)

    def rank_marginal(self, add: int, base: int) -> int:
        """r(Y | X) = r(Y ∪ X) − r(X), defined for any Y (overlap allowed)."""
        return self.rank(add | base) - self.rank(base)

    def contract(self, cmask: int) -> "MatroidOracle":
        if cmask == 0:
            return self
        return ContractedMatroid(self, cmask)

    def zero_out(self, removed: int) -> "MatroidOracle":
        if removed == 0:
            return self
        return ZeroedMatroid(self, removed)


class UniformMatroid(MatroidOracle):
    """r(X) = min(|X|, k). Rank n-1 over n elements is the gap-instance matroid."""

    def __init__(self, n: int, k: int):
        super().__init__(n)
        self.k = k

    def _rank(self, mask: int) -> int:
        return min(size(mask), self.k)


class FreeMatroid(UniformMatroid):
    def __init__(self, n: int):
        super().__init__(n, n)


class PartitionMatroid(MatroidOracle):
    """At most caps[i] elements from blocks[i]; blocks must partition E."""

    def __init__(self, n: int, blocks: Sequence[int], caps: Sequence[int]):
        super().__init__(n)
        if len(blocks) != len(caps):
            raise ValueError("one capacity per block required")
        union = 0
        for b in blocks:
            if b & union:
                raise ValueError("partition blocks overlap")
            union |= b
        if union != full_mask(n):
            raise ValueError("partition blocks must cover the ground set")
        self.blocks = tuple(blocks)
        self.caps = tuple(caps)

    def _rank(self, mask: int) -> int:
        return sum(min(size(mask & b), c) for b, c in zip(self.blocks, self.caps))


class GraphicMatroid(MatroidOracle):
    """Elements are edges of a multigraph; rank = |V touched| − #components."""

    def __init__(self, num_vertices: int, edges: Sequence[tuple[int, int]]):
        super().__init__(len(edges))
        for u, v in edges:
            if not (0 <= u < num_vertices and 0 <= v < num_vertices):
                raise ValueError(f"edge ({u},{v}) out of vertex range")
        self.num_vertices = num_vertices
        self.edges = tuple(tuple(e) for e in edges)

    def _rank(self, mask: int) -> int:
        parent = list(range(self.num_vertices))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        r = 0
        for e in bits(mask):
            u, v = self.edges[e]
            ru, rv = find(u), find(v)
            if ru != rv:
                parent[ru] = rv
                r += 1
        return r


class TransversalMatroid(MatroidOracle):
    """adjacency[e] is a bitmask of right-side vertices e may be matched to."""

    def __init__(self, adjacency: Sequence[int], num_right: int):
        super().__init__(len(adjacency))
        self.adjacency = tuple(adjacency)
        self.num_right = num_right

    def _rank(self, mask: int) -> int:
        adj = [self.adjacency[e] for e in bits(mask)]
        matched, _ = max_bipartite_matching(adj, self.num_right)
        return matched


class ExplicitMatroid(MatroidOracle):
    """Rank read off a full table indexed by subset bitmask."""

    def __init__(self, n: int, table: Sequence[int]):
        super().__init__(n)
        if len(table) != 1 << n:
            raise ValueError("rank table must have 2^n entries")
        self.table = tuple(table)

    def _rank(self, mask: int) -> int:
        return self.table[mask]


class ContractedMatroid(MatroidOracle):
    """M / C with r'(Y) = r(Y ∪ C) − r(C); ground indices unchanged."""

    def __init__(self, inner: MatroidOracle, cmask: int):
        super().__init__(inner.n)
        check_subset(cmask, inner.n)
        if isinstance(inner, ContractedMatroid):
            cmask |= inner.cmask
            inner = inner.inner
        self.inner = inner
        self.cmask = cmask
        self._rc = None

    def _rank(self, mask: int) -> int:
        if self._rc is None:
            self._rc = self.inner.rank(self.cmask)
        return self.inner.rank(mask | self.cmask) - self._rc


class ZeroedMatroid(MatroidOracle):
    """r'(X) = r(X \\ removed): removed elements become loops (rank 0)."""

    def __init__(self, inner: MatroidOracle, removed: int):
        super().__init__(inner.n)
        check_subset(removed, inner.n)
        if isinstance(inner, ZeroedMatroid):
            removed |= inner.removed
            inner = inner.inner
        self.inner = inner
        self.removed = removed

    def _rank(self, mask: int) -> int:
        return self.inner.rank(mask & ~self.removed)


class UnionMatroid(MatroidOracle):
    """Matroid union: r(X) = min_{Y ⊆ X} |X \\ Y| + Σ_i r_i(Y), by enumeration."""

    def __init__(self, parts: Sequence[MatroidOracle]):
        if not parts:
            raise ValueError("union of no matroids")
        n = parts[0].n
        if any(p.n != n for p in parts):
            raise ValueError("union parts must share the ground set")
        super().__init__(n)
        self.parts = tuple(parts)

    def _rank(self, mask: int) -> int:
        best = None
        for sub in submasks(mask):
            val = size(mask ^ sub) + sum(p.rank(sub) for p in self.parts)
            if best is None or val < best:
                best = val
        return best


class InducedMatroid(MatroidOracle):
    """Matroid induced by an integer polymatroid f.

    X is independent iff min_{S ⊆ X} f(S) − |S| >= 0; equivalently the rank
    is the unit-capped evaluation r(X) = min_{T ⊆ X} f(X \\ T) + |T|.
    """

    def __init__(self, poly):
        super().__init__(poly.n)
        self.poly = poly

    def _rank(self, mask: int) -> int:
        # min(f(X), min_i r(X - i) + 1) unrolls the capped-evaluation minimum
        best = self.poly.value(mask)
        for e in bits(mask):
            if best <= 0:
                break
            best = min(best, self.rank(mask ^ (1 << e)) + 1)
        return best


def matroid_add_greedy(m: MatroidOracle, start: int, candidates: Sequence[int]) -> int:
    """Scan candidates in the given order, adding each that keeps the set independent.

    start must be independent; returns the final independent set mask.
    """
    if not m.is_independent(start):
        raise ValueError("greedy extension requires an independent starting set")
    cur = start
    r = m.rank(cur)
    for c in candidates:
        bit = 1 << c
        if cur & bit:
            continue
        if m.rank(cur | bit) == r + 1:
            cur |= bit
            r += 1
    return cur
