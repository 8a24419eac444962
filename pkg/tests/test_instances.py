"""Instance model, JSON round trips, generators, and equal-value merging."""

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from matalloc.bitsets import full_mask
from matalloc.instances import (Item, MakespanInstance, SantaInstance,
                                assignment_to_alloc, gen_gap_instance, gen_random,
                                makespan_loads, merge_equal_value, parse_instance,
                                santa_player_values, serialize_instance, split_merged_solution,
                                validate_allocation)
from matalloc.limits import SchemaError
from matalloc.oracle import brute_max_cover_b, check_axioms, enumerate_bases
from matalloc.polymatroids import is_basis


class TestJson:
    def test_minimal_restricted_santa(self):
        data = (b'{"type": "santa", "players": 2, '
                b'"items": [{"values": [{"num": 1, "den": 1}, {"num": 0, "den": 1}]}]}')
        inst = parse_instance(data)
        assert inst.num_players == 2 and inst.resources[0].values == (Fraction(1), Fraction(0))

    def test_gap_instance_roundtrip(self):
        inst = gen_gap_instance(3)
        again = parse_instance(serialize_instance(inst))
        assert serialize_instance(again) == serialize_instance(inst)
        assert again.matroid.rank(full_mask(3)) == 2

    def test_missing_players_named(self):
        with pytest.raises(SchemaError, match="players"):
            parse_instance(b'{"type": "santa", "items": []}')

    def test_non_integer_poly_rejected(self):
        bad = (b'{"type": "core-cover", "b": 1, '
               b'"matroid": {"kind": "uniform", "n": 1, "rank": 1}, '
               b'"polymatroid": {"kind": "explicit", "n": 1, "table": {"0": 0, "1": 1.5}}}')
        with pytest.raises(SchemaError, match="integer"):
            parse_instance(bad)

    def test_negative_value_rejected(self):
        bad = (b'{"type": "santa", "players": 1, '
               b'"items": [{"values": [{"num": -1, "den": 1}]}]}')
        with pytest.raises(SchemaError, match="negative"):
            parse_instance(bad)

    def test_infinite_size_encodes_as_null(self):
        inst = MakespanInstance(2, [Item(values=(Fraction(1), None))])
        again = parse_instance(serialize_instance(inst))
        assert again.jobs[0].values == (Fraction(1), None)

    @given(st.integers(0, 300))
    @settings(max_examples=40, deadline=None)
    def test_generator_outputs_roundtrip(self, seed):
        rng = random.Random(seed)
        flavor = rng.choice(["gap", "core-cover", "unrelated-santa", "restricted-santa",
                             "two-value-santa", "two-value-makespan", "restricted-makespan",
                             "santa-matroid", "makespan-matroid"])
        inst = gen_random(flavor, seed, m=rng.randint(2, 4), n=rng.randint(1, 5))
        blob = serialize_instance(inst)
        assert serialize_instance(parse_instance(blob)) == blob


class TestGenerators:
    def test_gap_values(self):
        for m in (2, 3):
            inst = gen_gap_instance(m)
            assert inst.matroid.rank(full_mask(m)) == m - 1
            assert inst.polymatroid.value(full_mask(m)) == m

    def test_gap_optimum_is_one(self):
        inst = gen_gap_instance(2)
        assert brute_max_cover_b(inst.matroid, inst.polymatroid) == 1

    def test_determinism(self):
        a = gen_random("restricted-santa", 1, m=4, n=6)
        b = gen_random("restricted-santa", 1, m=4, n=6)
        assert serialize_instance(a) == serialize_instance(b)

    def test_two_value_flavor_constraint(self):
        inst = gen_random("two-value-makespan", 2, m=3, n=5, u=Fraction(1), w=Fraction(3))
        finite = {v for it in inst.jobs for v in it.values if v is not None}
        assert finite <= {Fraction(1), Fraction(3)}

    def test_matroid_flavor_axioms(self):
        inst = gen_random("santa-matroid", 3, m=3, n=4)
        for it in inst.resources:
            assert check_axioms(it.polymatroid, seed=3, augmentation_samples=3)["ok"]


class TestAllocations:
    def test_values_and_loads(self):
        inst = SantaInstance(2, [Item(values=(Fraction(2), Fraction(1))),
                                 Item(values=(Fraction(0), Fraction(3)))])
        alloc = assignment_to_alloc([0, 1], 2)
        assert santa_player_values(inst, alloc) == [Fraction(2), Fraction(3)]
        mk = MakespanInstance(2, [Item(values=(Fraction(2), Fraction(1)))])
        assert makespan_loads(mk, assignment_to_alloc([1], 2)) == [Fraction(0), Fraction(1)]

    def test_validate_rejects_double_assignment(self):
        inst = SantaInstance(2, [Item(values=(Fraction(1), Fraction(1)))])
        with pytest.raises(ValueError):
            validate_allocation(inst, [(1, 1)])

    def test_validate_makespan_requires_assignment(self):
        mk = MakespanInstance(2, [Item(values=(Fraction(1), None))])
        with pytest.raises(ValueError):
            validate_allocation(mk, [(0, 0)])


class TestMerge:
    def test_equal_sizes_sum(self):
        from matalloc.polymatroids import ScaledRankPoly
        from matalloc.matroids import UniformMatroid

        jobs = [Item(value=Fraction(1), polymatroid=ScaledRankPoly(UniformMatroid(2, 1), 1)),
                Item(value=Fraction(1), polymatroid=ScaledRankPoly(UniformMatroid(2, 1), 1))]
        inst = MakespanInstance(2, jobs)
        rec = merge_equal_value(inst)
        assert len(rec.merged.jobs) == 1
        merged_poly = rec.merged.jobs[0].polymatroid
        assert merged_poly.value(0b11) == 2  # sum of the two rank oracles

    def test_distinct_values_identity(self):
        from matalloc.polymatroids import ModularPoly

        jobs = [Item(value=Fraction(1), polymatroid=ModularPoly([1, 0])),
                Item(value=Fraction(2), polymatroid=ModularPoly([0, 1]))]
        inst = MakespanInstance(2, jobs)
        rec = merge_equal_value(inst)
        assert len(rec.merged.jobs) == 2
        assert rec.groups == [[0], [1]]

    @given(st.integers(0, 300))
    @settings(max_examples=30, deadline=None)
    def test_merge_solve_split_roundtrip(self, seed):
        rng = random.Random(seed)
        m = rng.randint(1, 3)
        inst = gen_random("makespan-matroid", seed, m=m, n=rng.randint(2, 4),
                          u=Fraction(1), w=Fraction(2))
        rec = merge_equal_value(inst)
        merged_alloc = []
        for it in rec.merged.jobs:
            bases = enumerate_bases(it.polymatroid)
            if not bases:
                return
            merged_alloc.append(rng.choice(bases))
        split = split_merged_solution(inst, rec, merged_alloc)
        # per-machine load is preserved exactly and each part is a basis
        merged_loads = makespan_loads(rec.merged, merged_alloc)
        split_loads = makespan_loads(inst, split)
        assert merged_loads == split_loads
        for j, piece in enumerate(split):
            assert is_basis(inst.jobs[j].polymatroid, piece)
