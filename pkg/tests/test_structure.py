from collections import Counter
from itertools import combinations
from math import comb

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hadswitch.constructions import paley, sylvester
from hadswitch.core import HadamardMatrix, MatrixError, transpose
from hadswitch.structure import (
    COLUMNS,
    ROWS,
    closed_quadruple_counts,
    field_partition,
    find_closed_quadruples,
    find_hall_sets,
    quadruple_sums,
    quadruple_type,
    three_normalize,
    type_histogram,
)

import corpus
from oracles import closed_quadruples, quadruple_types, sylvester_entry

# -- three_normalize ----------------------------------------------------------------------


def test_normalized_triple_is_left_alone():
    # 1 ^ 2 ^ 3 = 0: the product of character rows 1, 2, 3 is the trivial character
    m = sylvester(3)
    out, signs = three_normalize(m, (1, 2, 3))
    assert out == m and (signs == 1).all()


def test_normalizing_signs_follow_the_xor_oracle():
    # 0 ^ 1 ^ 2 = 3: the product of rows 0, 1, 2 is character row 3
    m = sylvester(3)
    out, signs = three_normalize(m, (0, 1, 2))
    assert signs.tolist() == [sylvester_entry(3, c) for c in range(8)]
    assert (out.array[0] * out.array[1] * out.array[2] == 1).all()


@given(st.integers(0, 2**32 - 1))
def test_three_normalize_is_idempotent(seed):
    rng = np.random.default_rng(seed)
    m = corpus.random_transform(corpus.get("paley20"), rng)
    rows = tuple(rng.choice(20, 3, replace=False).tolist())
    once, _ = three_normalize(m, rows)
    twice, signs = three_normalize(once, rows)
    assert twice == once and (signs == 1).all()


def test_pre_negated_column_is_restored():
    m = sylvester(4)
    a = m.array.copy()
    a[:, 6] *= -1
    out, signs = three_normalize(HadamardMatrix.from_array(a), (1, 2, 3))
    assert signs[6] == -1 and (np.delete(signs, 6) == 1).all()
    assert out == m


def test_three_normalize_index_errors():
    with pytest.raises(MatrixError):
        three_normalize(sylvester(3), (1, 1, 2))
    with pytest.raises(MatrixError):
        three_normalize(sylvester(3), (1, 2))


# -- field_partition -------------------------------------------------------------------------


def test_fields_of_sylvester16_follow_low_index_bits():
    fp = field_partition(sylvester(4), (1, 2, 3))
    # patterns (++), (-+), (+-), (--) of (h1 h2, h1 h3) select c mod 4 = 0, 1, 3, 2
    assert fp.fields == tuple(tuple(c for c in range(16) if c % 4 == r) for r in (0, 1, 3, 2))
    assert fp.defining_rows == (1, 2, 3)
    assert fp.field_of(7) == 3  # fields are numbered 1..4


def test_order_4_fields_are_singletons():
    fp = field_partition(sylvester(2), (1, 2, 3))
    assert sorted(len(f) for f in fp.fields) == [1, 1, 1, 1]


@pytest.mark.parametrize("name", ["sylvester16", "double24", "sylvester32"])
def test_fields_of_closed_quadruples_are_the_column_groups(name):
    # after normalizing, the top 4 x n block has four distinct column patterns
    # up to sign, each repeated n/4 times; the fields are exactly those groups
    m = corpus.get(name)
    for info in find_closed_quadruples(m)[:60]:
        q = info.indices
        fp = field_partition(m, q[:3])
        block = m.array[list(q)].astype(int)
        block = block * block[0]
        groups = {}
        for c in range(m.n):
            groups.setdefault(tuple(block[:, c]), []).append(c)
        assert len(groups) == 4
        assert sorted(map(tuple, groups.values())) == sorted(fp.fields)


@given(st.integers(0, 2**32 - 1))
def test_field_partition_is_negation_invariant(seed):
    rng = np.random.default_rng(seed)
    m = corpus.get("paley2_20")
    rows = tuple(rng.choice(20, 3, replace=False).tolist())
    signs = rng.choice([-1, 1], 20)
    flipped = HadamardMatrix.from_array(m.array * signs[None, :])
    assert field_partition(flipped, rows) == field_partition(m, rows)


def test_field_partition_rejects_non_hadamard():
    with pytest.raises(MatrixError):
        field_partition(HadamardMatrix.from_array(np.ones((8, 8), dtype=int)), (0, 1, 2))


# -- quadruple typing ------------------------------------------------------------------------


def test_sylvester16_types_by_xor():
    m = sylvester(4)
    for q in combinations(range(16), 4):
        t = quadruple_type(m, q).type_r
        assert t == (0 if q[0] ^ q[1] ^ q[2] ^ q[3] == 0 else 2)


def test_hall_set_type_and_columns():
    m = paley(19, 1)
    halls = find_hall_sets(m)
    assert halls
    for info in halls[:40]:
        assert info.type_r == 1 and len(info.hall_columns) == 4
        fp = field_partition(m, info.indices[:3])
        assert sorted(fp.field_of(c) for c in info.hall_columns) == [1, 2, 3, 4]
        prod = m.array[list(info.indices)].prod(axis=0)
        minority = -1 if (prod < 0).sum() < (prod > 0).sum() else 1
        assert sorted(np.nonzero(prod == minority)[0].tolist()) == sorted(info.hall_columns)


@pytest.mark.parametrize("name", ["sylvester8", "paley12", "sylvester16", "paley20", "paley2_20"])
def test_types_match_brute_force(name):
    m = corpus.get(name)
    brute = quadruple_types(m.array)
    quads, _ = quadruple_sums(m)
    assert len(quads) == comb(m.n, 4)
    for q in list(brute)[:: max(1, len(brute) // 400)]:
        info = quadruple_type(m, q)
        assert info.type_r == brute[q]
        assert 0 <= info.type_r <= m.n // 8 or m.n == 4
        assert (info.hall_columns is not None) == (info.type_r == 1)
    assert type_histogram(m) == dict(Counter(brute.values()))
    assert sum(type_histogram(m).values()) == comb(m.n, 4)


def test_column_axis_uses_the_transpose():
    m = corpus.random_transform(corpus.get("double24"), np.random.default_rng(9))
    assert [q.indices for q in find_closed_quadruples(m, COLUMNS)] == [
        q.indices for q in find_closed_quadruples(transpose(m), ROWS)
    ]
    assert type_histogram(m, COLUMNS) == type_histogram(transpose(m), ROWS)


def test_quadruple_type_index_errors():
    with pytest.raises(MatrixError):
        quadruple_type(sylvester(3), (0, 1, 2, 2))
    with pytest.raises(MatrixError):
        quadruple_type(sylvester(3), (0, 1, 2, 8))


# -- closed quadruples -------------------------------------------------------------------------


@pytest.mark.parametrize("k,count", [(3, 14), (4, 140), (5, 1240)])
def test_sylvester_counts(k, count):
    qs = find_closed_quadruples(sylvester(k))
    assert len(qs) == count
    assert all(q.closed for q in qs)
    assert [q.indices for q in qs] == sorted(q.indices for q in qs)


def test_paley24_has_no_closed_quadruples():
    assert closed_quadruple_counts(paley(23, 1)) == (0, 0)


@pytest.mark.parametrize("name", ["sylvester8", "sylvester16", "paley12", "paley20", "paley2_20"])
def test_pair_hash_matches_brute_force_under_50_transforms(name):
    rng = np.random.default_rng(len(name))
    base = corpus.get(name)
    for _ in range(50):
        m = corpus.random_transform(base, rng)
        assert {q.indices for q in find_closed_quadruples(m)} == closed_quadruples(m.array)


def test_pair_hash_matches_brute_force_on_switched_order16_classes():
    from census import census

    for m in census("s16", "QR").matrices():
        assert {q.indices for q in find_closed_quadruples(m)} == closed_quadruples(m.array)


@pytest.mark.parametrize("name", ["paley12", "paley20", "paley2_20", "paley28", "paley2_28", "paley2_36"])
def test_no_closed_quadruples_when_n_is_4_mod_8(name):
    assert closed_quadruple_counts(corpus.get(name)) == (0, 0)


# -- Hall sets ---------------------------------------------------------------------------------


@pytest.mark.parametrize("name", ["sylvester16", "sylvester32", "paley28"])
def test_no_hall_sets(name):
    assert find_hall_sets(corpus.get(name)) == []


def test_paley20_hall_sets_match_exhaustive_typing():
    m = paley(19, 1)
    brute = {q for q, t in quadruple_types(m.array).items() if t == 1}
    assert {h.indices for h in find_hall_sets(m)} == brute
    assert len(brute) == 285


@pytest.mark.parametrize("name", ["paley20", "paley2_20", "paley2_28"])
def test_hall_columns_product_rule(name):
    # for each row outside the Hall set, the product of its Hall-column
    # entries is minus the corresponding product along any Hall row
    m = corpus.get(name)
    a = m.array.astype(int)
    for info in find_hall_sets(m)[:50]:
        cols = list(info.hall_columns)
        inside = a[info.indices[0], cols].prod()
        assert all(a[i, cols].prod() == inside for i in info.indices)
        others = [i for i in range(m.n) if i not in info.indices]
        assert all(a[i, cols].prod() == -inside for i in others)
        # and the Hall columns themselves form a Hall set
        assert quadruple_type(m, tuple(sorted(cols)), COLUMNS).type_r == 1


def test_hall_counts_on_column_axis():
    m = paley(13, 2)
    assert len(find_hall_sets(m, COLUMNS)) == len(find_hall_sets(transpose(m), ROWS))
