"""Global oracle-query counters.

Counts logical queries (memo hits included) so reported figures do not
depend on cache state. Counters are process-global; snapshot/delta around
a solver run to attribute queries to it.
"""

from __future__ import annotations

counters: dict[str, int] = {"matroid_rank": 0, "poly_value": 0}


def bump(name: str) -> None:
    counters[name] = counters.get(name, 0) + 1


def snapshot() -> dict[str, int]:
    return dict(counters)


def delta(before: dict[str, int]) -> dict[str, int]:
    return {k: counters.get(k, 0) - before.get(k, 0) for k in counters}


def total(d: dict[str, int] | None = None) -> int:
    return sum((d or counters).values())
