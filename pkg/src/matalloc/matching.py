"""Maximum bipartite matching by augmenting paths (Kuhn's algorithm).

Left vertices are list indices, right vertices are bit positions of the
adjacency masks. Deterministic: left vertices processed in index order,
right candidates in ascending bit order.
"""

from __future__ import annotations

from typing import Sequence

from .bitsets import bits


def max_bipartite_matching(adj: Sequence[int], num_right: int) -> tuple[int, list[int | None]]:
    """Return (matching size, match_left) with match_left[i] the matched right vertex or None."""
    match_right: list[int | None] = [None] * num_right
    match_left: list[int | None] = [None] * len(adj)

    def try_augment(u: int, seen: set[int]) -> bool:
        for v in bits(adj[u]):
            if v in seen:
                continue
            seen.add(v)
            if match_right[v] is None or try_augment(match_right[v], seen):
                match_right[v] = u
                match_left[u] = v
                return True
        return False

    total = 0
    for u in range(len(adj)):
        if try_augment(u, set()):
            total += 1
    return total, match_left


def perfect_matching(adj: Sequence[int], num_right: int) -> list[int] | None:
    """A left-perfect matching, or None if one does not exist."""
    total, match_left = max_bipartite_matching(adj, num_right)
    if total < len(adj):
        return None
    return [v for v in match_left]  # type: ignore[misc]
