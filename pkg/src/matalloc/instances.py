"""Problem instances, JSON serialization, generators, and equal-value merging.

Flavors: max-min fair allocation ("santa") and makespan minimization, each
classical (per-entity values/sizes) or matroid (one value per item plus a
polymatroid over the entities; the item is allocated to a basis). Values
are exact rationals encoded as {"num", "den"} pairs; an infinite
processing time encodes as JSON null.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .bitsets import bits, mask_of
from .limits import SchemaError
from .matroids import (ContractedMatroid, ExplicitMatroid, GraphicMatroid, InducedMatroid,
                       MatroidOracle, PartitionMatroid, TransversalMatroid, UniformMatroid,
                       UnionMatroid, ZeroedMatroid)
from .polymatroids import (CappedPoly, CoveragePoly, DualPoly, ExplicitPoly, MarginalPoly,
                           ModularPoly, PolymatroidOracle, ScaledRankPoly, SumPoly,
                           VectorContractedPoly, is_basis, member)


@dataclass
class Item:
    """A resource (santa) or job (makespan).

    Classical flavor: values[i] per entity, None meaning infinite size
    (makespan only). Matroid flavor: a single value plus a polymatroid
    over the entities.
    """

    values: tuple | None = None
    value: Fraction | None = None
    polymatroid: PolymatroidOracle | None = None

    def value_for(self, i: int) -> Fraction | None:
        return self.values[i] if self.values is not None else self.value


@dataclass
class SantaInstance:
    num_players: int
    resources: list[Item]

    @property
    def num_entities(self) -> int:
        return self.num_players

    @property
    def items(self) -> list[Item]:
        return self.resources

    @property
    def is_matroid_flavor(self) -> bool:
        return any(it.polymatroid is not None for it in self.resources)

    def distinct_values(self) -> list[Fraction]:
        vals = set()
        for it in self.resources:
            if it.values is not None:
                vals.update(v for v in it.values if v)
            elif it.value:
                vals.add(it.value)
        return sorted(vals)

    def two_values(self) -> tuple[Fraction, Fraction]:
        """(u, w) with u <= w; a single-valued instance returns (v, v)."""
        vals = self.distinct_values()
        if not vals:
            return Fraction(0), Fraction(0)
        if len(vals) == 1:
            return vals[0], vals[0]
        if len(vals) > 2:
            raise ValueError("not a two-value instance")
        return vals[0], vals[1]


@dataclass
class MakespanInstance:
    num_machines: int
    jobs: list[Item]

    @property
    def num_entities(self) -> int:
        return self.num_machines

    @property
    def items(self) -> list[Item]:
        return self.jobs

    @property
    def is_matroid_flavor(self) -> bool:
        return any(it.polymatroid is not None for it in self.jobs)

    def distinct_sizes(self) -> list[Fraction]:
        vals = set()
        for it in self.jobs:
            if it.values is not None:
                vals.update(v for v in it.values if v is not None)
            elif it.value is not None:
                vals.add(it.value)
        return sorted(vals)

    def two_values(self) -> tuple[Fraction, Fraction]:
        vals = sorted(v for v in self.distinct_sizes())
        if not vals:
            return Fraction(0), Fraction(0)
        if len(vals) == 1:
            return vals[0], vals[0]
        if len(vals) > 2:
            raise ValueError("not a two-value instance")
        return vals[0], vals[1]


@dataclass
class CoreCoverInstance:
    """Cover every element by an independent set or by polymatroid multiplicity b."""

    matroid: MatroidOracle
    polymatroid: PolymatroidOracle
    b: int = 1

    @property
    def n(self) -> int:
        return self.matroid.n


Allocation = list  # list of per-item entity vectors (tuples of ints)


def unit_vector(i: int, m: int) -> tuple[int, ...]:
    return tuple(1 if k == i else 0 for k in range(m))


def assignment_to_alloc(choices: Sequence[int | None], m: int) -> Allocation:
    return [unit_vector(c, m) if c is not None else tuple([0] * m) for c in choices]


def santa_player_values(inst: SantaInstance, alloc: Allocation) -> list[Fraction]:
    vals = [Fraction(0)] * inst.num_players
    for it, vec in zip(inst.resources, alloc):
        for i in range(inst.num_players):
            if vec[i]:
                v = it.value_for(i)
                vals[i] += v * vec[i]
    return vals


def makespan_loads(inst: MakespanInstance, alloc: Allocation) -> list[Fraction]:
    loads = [Fraction(0)] * inst.num_machines
    for it, vec in zip(inst.jobs, alloc):
        for i in range(inst.num_machines):
            if vec[i]:
                v = it.value_for(i)
                if v is None:
                    raise ValueError("job placed on a machine with infinite size")
                loads[i] += v * vec[i]
    return loads


def validate_allocation(inst, alloc: Allocation, require_basis: bool | None = None) -> None:
    """Structural validity: unit vectors for classical items (makespan jobs must
    be assigned; santa resources may stay unassigned), polymatroid membership
    (bases where required) for matroid items."""
    is_makespan = isinstance(inst, MakespanInstance)
    if require_basis is None:
        require_basis = is_makespan
    if len(alloc) != len(inst.items):
        raise ValueError("one vector per item required")
    for j, (it, vec) in enumerate(zip(inst.items, alloc)):
        if any(v < 0 for v in vec):
            raise ValueError(f"item {j}: negative multiplicity")
        if it.polymatroid is not None:
            if require_basis:
                if not is_basis(it.polymatroid, vec):
                    raise ValueError(f"item {j}: vector is not a basis of its polymatroid")
            elif not member(it.polymatroid, vec):
                raise ValueError(f"item {j}: vector outside its polymatroid")
        else:
            total = sum(vec)
            if total > 1 or (is_makespan and total != 1):
                raise ValueError(f"item {j}: classical items go to at most one entity")


# ---------------------------------------------------------------------------
# JSON encoding


def _rat_to_json(v: Fraction | None):
    if v is None:
        return None
    f = Fraction(v)
    return {"num": f.numerator, "den": f.denominator}


def _rat_from_json(obj, path: str) -> Fraction | None:
    if obj is None:
        return None
    if isinstance(obj, bool):
        raise SchemaError(f"{path}: expected a rational, got a bool")
    if isinstance(obj, int):
        return Fraction(obj)
    if isinstance(obj, dict):
        try:
            num, den = obj["num"], obj["den"]
        except KeyError as exc:
            raise SchemaError(f"{path}: rational needs num and den") from exc
        if not isinstance(num, int) or not isinstance(den, int) or den == 0:
            raise SchemaError(f"{path}: rational num/den must be integers, den nonzero")
        return Fraction(num, den)
    raise SchemaError(f"{path}: expected a rational")


def matroid_to_json(m: MatroidOracle) -> dict:
    if isinstance(m, UniformMatroid):
        return {"kind": "uniform", "n": m.n, "rank": m.k}
    if isinstance(m, PartitionMatroid):
        return {"kind": "partition", "n": m.n,
                "blocks": [sorted(bits(b)) for b in m.blocks], "caps": list(m.caps)}
    if isinstance(m, GraphicMatroid):
        return {"kind": "graphic", "vertices": m.num_vertices, "edges": [list(e) for e in m.edges]}
    if isinstance(m, TransversalMatroid):
        return {"kind": "transversal", "n": m.n, "num_right": m.num_right,
                "adjacency": [sorted(bits(a)) for a in m.adjacency]}
    if isinstance(m, ExplicitMatroid):
        return {"kind": "explicit", "n": m.n, "table": {str(x): m.table[x] for x in range(1 << m.n)}}
    if isinstance(m, ContractedMatroid):
        return {"kind": "contracted", "inner": matroid_to_json(m.inner), "set": sorted(bits(m.cmask))}
    if isinstance(m, ZeroedMatroid):
        return {"kind": "zeroed", "inner": matroid_to_json(m.inner), "removed": sorted(bits(m.removed))}
    if isinstance(m, UnionMatroid):
        return {"kind": "union", "parts": [matroid_to_json(p) for p in m.parts]}
    if isinstance(m, InducedMatroid):
        return {"kind": "induced", "polymatroid": poly_to_json(m.poly)}
    raise SchemaError(f"matroid kind {type(m).__name__} has no JSON form")


def matroid_from_json(obj, path: str = "matroid") -> MatroidOracle:
    if not isinstance(obj, dict) or "kind" not in obj:
        raise SchemaError(f"{path}: matroid object needs a kind")
    kind = obj["kind"]
    try:
        if kind == "uniform":
            return UniformMatroid(obj["n"], obj["rank"])
        if kind == "partition":
            return PartitionMatroid(obj["n"], [mask_of(b) for b in obj["blocks"]], obj["caps"])
        if kind == "graphic":
            return GraphicMatroid(obj["vertices"], [tuple(e) for e in obj["edges"]])
        if kind == "transversal":
            return TransversalMatroid([mask_of(a) for a in obj["adjacency"]], obj["num_right"])
        if kind == "explicit":
            n = obj["n"]
            return ExplicitMatroid(n, [obj["table"][str(x)] for x in range(1 << n)])
        if kind == "contracted":
            return ContractedMatroid(matroid_from_json(obj["inner"], path + ".inner"),
                                     mask_of(obj["set"]))
        if kind == "zeroed":
            return ZeroedMatroid(matroid_from_json(obj["inner"], path + ".inner"),
                                 mask_of(obj["removed"]))
        if kind == "union":
            return UnionMatroid([matroid_from_json(p, f"{path}.parts[{i}]")
                                 for i, p in enumerate(obj["parts"])])
        if kind == "induced":
            return InducedMatroid(poly_from_json(obj["polymatroid"], path + ".polymatroid"))
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"{path}: bad {kind} matroid: {exc}") from exc
    raise SchemaError(f"{path}: unknown matroid kind {kind!r}")


def poly_to_json(p: PolymatroidOracle) -> dict:
    if isinstance(p, ModularPoly):
        return {"kind": "modular", "weights": list(p.weights)}
    if isinstance(p, CoveragePoly):
        return {"kind": "coverage", "sets": [sorted(bits(c)) for c in p.covers],
                "weights": list(p.item_weights)}
    if isinstance(p, ScaledRankPoly):
        return {"kind": "scaled-rank", "matroid": matroid_to_json(p.matroid), "scale": p.scale}
    if isinstance(p, ExplicitPoly):
        return {"kind": "explicit", "n": p.n, "table": {str(x): p.table[x] for x in range(1 << p.n)}}
    if isinstance(p, SumPoly):
        return {"kind": "sum", "parts": [poly_to_json(q) for q in p.parts]}
    if isinstance(p, CappedPoly):
        return {"kind": "capped", "inner": poly_to_json(p.inner), "caps": list(p.caps)}
    if isinstance(p, VectorContractedPoly):
        return {"kind": "contracted", "inner": poly_to_json(p.inner), "base": list(p.base)}
    if isinstance(p, MarginalPoly):
        return {"kind": "set-contracted", "inner": poly_to_json(p.inner),
                "set": sorted(bits(p.base_mask))}
    if isinstance(p, DualPoly):
        return {"kind": "dual", "inner": poly_to_json(p.inner), "z": list(p.z)}
    raise SchemaError(f"polymatroid kind {type(p).__name__} has no JSON form")


def poly_from_json(obj, path: str = "polymatroid") -> PolymatroidOracle:
    if not isinstance(obj, dict) or "kind" not in obj:
        raise SchemaError(f"{path}: polymatroid object needs a kind")
    kind = obj["kind"]
    try:
        if kind == "modular":
            return ModularPoly(obj["weights"])
        if kind == "coverage":
            return CoveragePoly([mask_of(s) for s in obj["sets"]], obj["weights"])
        if kind == "scaled-rank":
            return ScaledRankPoly(matroid_from_json(obj["matroid"], path + ".matroid"), obj["scale"])
        if kind == "explicit":
            n = obj["n"]
            table = [obj["table"][str(x)] for x in range(1 << n)]
            if any(not isinstance(v, int) for v in table):
                raise SchemaError(f"{path}.table: polymatroid values must be integers")
            return ExplicitPoly(n, table)
        if kind == "sum":
            return SumPoly([poly_from_json(q, f"{path}.parts[{i}]")
                            for i, q in enumerate(obj["parts"])])
        if kind == "capped":
            return CappedPoly(poly_from_json(obj["inner"], path + ".inner"), obj["caps"])
        if kind == "contracted":
            return VectorContractedPoly(poly_from_json(obj["inner"], path + ".inner"), obj["base"])
        if kind == "set-contracted":
            return MarginalPoly(poly_from_json(obj["inner"], path + ".inner"), mask_of(obj["set"]))
        if kind == "dual":
            return DualPoly(poly_from_json(obj["inner"], path + ".inner"), obj["z"])
    except SchemaError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"{path}: bad {kind} polymatroid: {exc}") from exc
    raise SchemaError(f"{path}: unknown polymatroid kind {kind!r}")


def serialize_instance(inst) -> bytes:
    if isinstance(inst, SantaInstance):
        kind = "santa-matroid" if inst.is_matroid_flavor else "santa"
        obj = {"type": kind, "players": inst.num_players,
               "items": [_item_to_json(it) for it in inst.resources]}
    elif isinstance(inst, MakespanInstance):
        kind = "makespan-matroid" if inst.is_matroid_flavor else "makespan"
        obj = {"type": kind, "machines": inst.num_machines,
               "items": [_item_to_json(it) for it in inst.jobs]}
    elif isinstance(inst, CoreCoverInstance):
        obj = {"type": "core-cover", "matroid": matroid_to_json(inst.matroid),
               "polymatroid": poly_to_json(inst.polymatroid), "b": inst.b}
    else:
        raise TypeError(f"cannot serialize {type(inst).__name__}")
    return json.dumps(obj, sort_keys=True, indent=1).encode()


def _item_to_json(it: Item) -> dict:
    out: dict = {}
    if it.values is not None:
        out["values"] = [_rat_to_json(v) for v in it.values]
    if it.value is not None:
        out["value"] = _rat_to_json(it.value)
    if it.polymatroid is not None:
        out["polymatroid"] = poly_to_json(it.polymatroid)
    return out


def parse_instance(data: bytes | str):
    try:
        obj = json.loads(data)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"not valid JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise SchemaError("top level: expected an object")
    kind = obj.get("type")
    if kind in ("santa", "santa-matroid"):
        if "players" not in obj:
            raise SchemaError("missing field: players")
        m = obj["players"]
        items = _parse_items(obj, m, kind == "santa-matroid", allow_none=False)
        inst = SantaInstance(m, items)
    elif kind in ("makespan", "makespan-matroid"):
        if "machines" not in obj:
            raise SchemaError("missing field: machines")
        m = obj["machines"]
        items = _parse_items(obj, m, kind == "makespan-matroid", allow_none=True)
        inst = MakespanInstance(m, items)
    elif kind == "core-cover":
        for fld in ("matroid", "polymatroid", "b"):
            if fld not in obj:
                raise SchemaError(f"missing field: {fld}")
        if not isinstance(obj["b"], int) or obj["b"] < 1:
            raise SchemaError("b: must be a positive integer")
        inst = CoreCoverInstance(matroid_from_json(obj["matroid"]),
                                 poly_from_json(obj["polymatroid"]), obj["b"])
        if inst.matroid.n != inst.polymatroid.n:
            raise SchemaError("matroid/polymatroid: ground sets differ")
    else:
        raise SchemaError(f"type: unknown instance type {kind!r}")
    return inst


def _parse_items(obj, m: int, matroid_flavor: bool, allow_none: bool) -> list[Item]:
    if not isinstance(m, int) or m < 0:
        raise SchemaError("players/machines: must be a nonnegative integer")
    raw = obj.get("items")
    if not isinstance(raw, list):
        raise SchemaError("items: expected a list")
    items = []
    for j, it in enumerate(raw):
        path = f"items[{j}]"
        if not isinstance(it, dict):
            raise SchemaError(f"{path}: expected an object")
        if matroid_flavor:
            if "value" not in it or "polymatroid" not in it:
                raise SchemaError(f"{path}: matroid items need value and polymatroid")
            v = _rat_from_json(it["value"], path + ".value")
            if v is None or v < 0:
                raise SchemaError(f"{path}.value: must be a nonnegative rational")
            poly = poly_from_json(it["polymatroid"], path + ".polymatroid")
            if poly.n != m:
                raise SchemaError(f"{path}.polymatroid: ground set size != entity count")
            items.append(Item(value=v, polymatroid=poly))
        else:
            if "values" not in it:
                raise SchemaError(f"{path}: classical items need values")
            vals = it["values"]
            if not isinstance(vals, list) or len(vals) != m:
                raise SchemaError(f"{path}.values: expected {m} entries")
            parsed = []
            for i, v in enumerate(vals):
                r = _rat_from_json(v, f"{path}.values[{i}]")
                if r is None and not allow_none:
                    raise SchemaError(f"{path}.values[{i}]: null only encodes infinite sizes")
                if r is not None and r < 0:
                    raise SchemaError(f"{path}.values[{i}]: negative value")
                parsed.append(r)
            items.append(Item(values=tuple(parsed)))
    return items


# ---------------------------------------------------------------------------
# Generators


def gen_gap_instance(m: int, b: int = 1) -> CoreCoverInstance:
    """The integrality-gap core instance: uniform matroid of rank m-1 over m
    elements with the counting polymatroid f(X) = |X|; optimal cover value 1."""
    if m < 2:
        raise ValueError("gap instance needs m >= 2")
    return CoreCoverInstance(UniformMatroid(m, m - 1), ModularPoly([1] * m), b)


def _random_poly(rng: random.Random, n: int, max_weight: int = 3) -> PolymatroidOracle:
    kind = rng.choice(["modular", "coverage", "scaled-rank"])
    if kind == "modular":
        return ModularPoly([rng.randint(0, max_weight) for _ in range(n)])
    if kind == "coverage":
        universe = rng.randint(1, n + 2)
        covers = [mask_of(i for i in range(universe) if rng.random() < 0.5) for _ in range(n)]
        weights = [rng.randint(1, max_weight) for _ in range(universe)]
        return CoveragePoly(covers, weights)
    return ScaledRankPoly(_random_matroid(rng, n), rng.randint(1, max_weight))


def _random_matroid(rng: random.Random, n: int) -> MatroidOracle:
    kind = rng.choice(["uniform", "partition", "graphic", "transversal"])
    if kind == "uniform":
        return UniformMatroid(n, rng.randint(0, n))
    if kind == "partition":
        labels = [rng.randrange(max(1, n // 2)) for _ in range(n)]
        blocks, caps = [], []
        for lab in sorted(set(labels)):
            blocks.append(mask_of(e for e in range(n) if labels[e] == lab))
            caps.append(rng.randint(0, 2))
        return PartitionMatroid(n, blocks, caps)
    if kind == "graphic":
        verts = rng.randint(2, max(2, n))
        edges = [(rng.randrange(verts), rng.randrange(verts)) for _ in range(n)]
        return GraphicMatroid(verts, edges)
    num_right = rng.randint(1, n)
    adjacency = [mask_of(r for r in range(num_right) if rng.random() < 0.6) for _ in range(n)]
    return TransversalMatroid(adjacency, num_right)


def gen_random(flavor: str, seed: int, **params):
    """Deterministic random instance; size parameters by flavor:
    m (entities), n (items), u/w (the two values), max_weight."""
    rng = random.Random(seed)
    m = params.get("m", 4)
    n = params.get("n", 6)
    u = Fraction(params.get("u", Fraction(1)))
    w = Fraction(params.get("w", Fraction(3)))
    max_weight = params.get("max_weight", 3)

    if flavor == "gap":
        return gen_gap_instance(m, params.get("b", 1))
    if flavor == "core-cover":
        return CoreCoverInstance(_random_matroid(rng, m), _random_poly(rng, m, max_weight),
                                 params.get("b", 1))
    if flavor == "unrelated-santa":
        den = params.get("den", 4)
        items = [Item(values=tuple(Fraction(rng.randint(0, den * 2), den) for _ in range(m)))
                 for _ in range(n)]
        return SantaInstance(m, items)
    if flavor == "restricted-santa":
        items = []
        for _ in range(n):
            v = Fraction(rng.randint(1, 4), rng.randint(1, 2))
            allowed = [i for i in range(m) if rng.random() < 0.6] or [rng.randrange(m)]
            items.append(Item(values=tuple(v if i in allowed else Fraction(0) for i in range(m))))
        return SantaInstance(m, items)
    if flavor == "two-value-santa":
        items = []
        for _ in range(n):
            row = tuple(rng.choice([Fraction(0), u, w]) for _ in range(m))
            if all(v == 0 for v in row):
                row = row[:-1] + (rng.choice([u, w]),)
            items.append(Item(values=row))
        return SantaInstance(m, items)
    if flavor == "two-value-makespan":
        items = []
        for _ in range(n):
            row = tuple(rng.choice([None, u, w]) for _ in range(m))
            if all(v is None for v in row):
                row = row[:-1] + (rng.choice([u, w]),)
            items.append(Item(values=row))
        return MakespanInstance(m, items)
    if flavor == "restricted-makespan":
        items = []
        for _ in range(n):
            p = Fraction(rng.randint(1, 4), rng.randint(1, 2))
            allowed = [i for i in range(m) if rng.random() < 0.6] or [rng.randrange(m)]
            items.append(Item(values=tuple(p if i in allowed else None for i in range(m))))
        return MakespanInstance(m, items)
    if flavor == "santa-matroid":
        items = [Item(value=rng.choice([u, w]), polymatroid=_random_poly(rng, m, max_weight))
                 for _ in range(n)]
        return SantaInstance(m, items)
    if flavor == "makespan-matroid":
        items = [Item(value=rng.choice([u, w]), polymatroid=_random_poly(rng, m, max_weight))
                 for _ in range(n)]
        return MakespanInstance(m, items)
    raise ValueError(f"unknown flavor {flavor!r}")


# ---------------------------------------------------------------------------
# Equal-value merging (matroid flavors)


@dataclass
class MergeRecord:
    merged: SantaInstance | MakespanInstance
    groups: list[list[int]]  # merged item index -> original item indices


def merge_equal_value(inst) -> MergeRecord:
    """One item per distinct value; each group's polymatroid is the sum of the
    originals. Solutions split back via split_merged_solution."""
    if not inst.is_matroid_flavor:
        raise ValueError("merging applies to matroid-flavor instances")
    order: list[Fraction] = []
    groups: dict[Fraction, list[int]] = {}
    for j, it in enumerate(inst.items):
        if it.value not in groups:
            groups[it.value] = []
            order.append(it.value)
        groups[it.value].append(j)
    merged_items = []
    group_list = []
    for v in order:
        idxs = groups[v]
        polys = [inst.items[j].polymatroid for j in idxs]
        poly = polys[0] if len(polys) == 1 else SumPoly(polys)
        merged_items.append(Item(value=v, polymatroid=poly))
        group_list.append(idxs)
    if isinstance(inst, SantaInstance):
        merged = SantaInstance(inst.num_players, merged_items)
    else:
        merged = MakespanInstance(inst.num_machines, merged_items)
    return MergeRecord(merged, group_list)


def split_merged_solution(inst, record: MergeRecord, merged_alloc: Allocation) -> Allocation:
    """Decompose each merged basis into bases of the original polymatroids."""
    from .intersection import decompose_merged_basis

    out: Allocation = [None] * len(inst.items)
    for g, vec in zip(record.groups, merged_alloc):
        parts = [inst.items[j].polymatroid for j in g]
        pieces = decompose_merged_basis(parts, vec)
        for j, piece in zip(g, pieces):
            out[j] = piece
    return out
