import math

import numpy as np
import pytest

from status_filter.errors import AllZeroWeights
from status_filter.status import (
    ROW_KEYS,
    STATUSES,
    CognitiveStatus,
    ConditionalStatusTable,
    LinguisticStatus,
    StatusDistribution,
    argmax_status,
    normalize,
    row_index,
    table_row,
)

I, A, F = CognitiveStatus.IN_FOCUS, CognitiveStatus.ACTIVATED, CognitiveStatus.FAMILIAR
N, M, T = LinguisticStatus.NOT_MENTIONED, LinguisticStatus.MENTIONED_NON_TOPIC, LinguisticStatus.MENTIONED_TOPIC


def test_givenness_order():
    assert F < A < I
    assert max(STATUSES) is I
    assert sorted(STATUSES) == [F, A, I]


def test_row_keys_are_canonical():
    assert ROW_KEYS[0] == (I, N)
    assert ROW_KEYS[1] == (I, M)
    assert ROW_KEYS[3] == (A, N)
    assert ROW_KEYS[-1] == (F, T)
    for i, (prev, ling) in enumerate(ROW_KEYS):
        assert row_index(prev, ling) == i


@pytest.mark.parametrize(
    "values",
    [(0.5, 0.6, -0.1), (0.3, 0.3, 0.3), (float("nan"), 0.5, 0.5), (math.inf, 0.0, 0.0)],
)
def test_distribution_rejects_invalid(values):
    with pytest.raises(ValueError):
        StatusDistribution.of(values)


def test_distribution_access():
    d = StatusDistribution.of((0.2, 0.3, 0.5))
    assert d[I] == 0.2 and d[A] == 0.3 and d[F] == 0.5
    assert d.as_dict() == {"I": 0.2, "A": 0.3, "F": 0.5}
    assert StatusDistribution.one_hot(A).as_tuple() == (0.0, 1.0, 0.0)


@pytest.mark.parametrize(
    "weights, expected",
    [
        ((1, 1, 1), (1 / 3, 1 / 3, 1 / 3)),
        ((0, 0, 2), (0.0, 0.0, 1.0)),
        ((0.2, 0.3, 0.5), (0.2, 0.3, 0.5)),
    ],
)
def test_normalize(weights, expected):
    assert normalize(weights).as_tuple() == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("k", [0.5, 3.0, 1e6])
@pytest.mark.parametrize("weights", [(1, 1, 1), (0, 0, 2), (0.2, 0.3, 0.5), (7, 1e-3, 0)])
def test_normalize_is_scale_invariant(weights, k):
    scaled = normalize([k * w for w in weights]).as_tuple()
    assert scaled == pytest.approx(normalize(weights).as_tuple(), abs=1e-12)


def test_normalize_all_zero():
    with pytest.raises(AllZeroWeights):
        normalize((0.0, 0.0, 0.0))


def test_normalize_rejects_negative():
    with pytest.raises(ValueError):
        normalize((1.0, -0.5, 0.5))


@pytest.mark.parametrize(
    "values, expected",
    [
        ((0.6, 0.3, 0.1), I),
        ((1 / 3, 1 / 3, 1 / 3), F),
        ((0.45, 0.45, 0.10), A),
        ((0.4, 0.2, 0.4), F),
        ((0.05, 0.10, 0.85), F),
    ],
)
def test_argmax_ties_go_to_lower_status(values, expected):
    assert argmax_status(StatusDistribution.of(values)) is expected


def test_table_lookup():
    rows = {k: (1 / 3, 1 / 3, 1 / 3) for k in ROW_KEYS}
    rows[(I, N)] = (0.1, 0.7, 0.2)
    t = ConditionalStatusTable.from_rows(rows)
    assert table_row(t, I, N).as_tuple() == pytest.approx((0.1, 0.7, 0.2))
    assert ConditionalStatusTable.uniform().row(F, T).as_tuple() == pytest.approx((1 / 3, 1 / 3, 1 / 3))


def test_table_rejects_bad_rows():
    probs = np.full((9, 3), 1 / 3)
    probs[4] = (0.3, 0.3, 0.3)
    with pytest.raises(ValueError):
        ConditionalStatusTable(probs)
    with pytest.raises(ValueError):
        ConditionalStatusTable(np.full((8, 3), 1 / 3))
    with pytest.raises(ValueError):
        ConditionalStatusTable.from_rows({ROW_KEYS[0]: (1.0, 0.0, 0.0)})


def test_table_is_read_only():
    t = ConditionalStatusTable.uniform()
    with pytest.raises(ValueError):
        t.probabilities[0, 0] = 1.0


def test_table_accepts_loose_rows_with_wider_tolerance():
    probs = np.full((9, 3), 1 / 3)
    probs[0] = (0.3333335, 0.3333335, 0.3333335)
    t = ConditionalStatusTable(probs, tolerance=1e-6)
    # lookups still hand back proper distributions
    assert math.fsum(t.row(I, N).as_tuple()) == pytest.approx(1.0, abs=1e-12)


def test_matrix_for_slices_one_linguistic_status():
    probs = np.zeros((9, 3))
    for prev, ling in ROW_KEYS:
        probs[row_index(prev, ling), ling.column] = 1.0
    t = ConditionalStatusTable(probs)
    m = t.matrix_for(M)
    assert m.shape == (3, 3)
    assert np.array_equal(m[:, 1], np.ones(3))


def test_table_equality():
    assert ConditionalStatusTable.uniform() == ConditionalStatusTable.uniform()
    assert ConditionalStatusTable.uniform() != ConditionalStatusTable(np.full((9, 3), 1 / 3), alpha=1.0)
