import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quatalg.errors import ContainmentError, DimensionMismatchError, UsageError
from quatalg.exactq import (
    I1,
    I2,
    I3,
    ONE,
    QQ,
    Quaternion,
    RowReducer,
    annihilator,
    coordinate_subspace,
    format_rational,
    full_space,
    h_span,
    image,
    intersect,
    kernel,
    left_multiply,
    map_subspace,
    parse_rational,
    preimage,
    quotient_basis,
    rank,
    rat_matrix,
    right_multiply,
    span,
    subspace_sum,
    to_rational,
    zero_subspace,
)

small_ints = st.integers(min_value=-4, max_value=4)
vectors = st.lists(small_ints, min_size=5, max_size=5)
quaternions = st.tuples(small_ints, small_ints, small_ints, small_ints).map(lambda c: Quaternion(*c))


def test_rational_parsing_and_formatting():
    assert parse_rational('6/4') == QQ(3, 2)
    assert format_rational(QQ(3, 2)) == '3/2'
    assert format_rational(QQ(-4, 2)) == '-2'
    assert to_rational(7) == QQ(7)


@pytest.mark.parametrize('bad', ['1.5.2', 'abc', '1/0', '0.5', '1e3', '3/4.0', '1_000', ''])
def test_rational_parsing_rejects_garbage(bad):
    with pytest.raises(UsageError):
        parse_rational(bad)


def test_floats_are_rejected():
    with pytest.raises(UsageError):
        to_rational(0.5)


def test_quaternion_units_multiply_cyclically():
    assert I1 * I2 == I3
    assert I2 * I3 == I1
    assert I3 * I1 == I2
    assert I2 * I1 == -I3
    assert I1 * I1 == -ONE


def test_quaternion_inverse_and_norm():
    q = Quaternion(1, 2, -1, 3)
    assert q.norm2() == QQ(15)
    assert q * q.inverse() == ONE
    assert q.inverse() * q == ONE


def test_quaternion_matrices_match_products():
    p = Quaternion(1, -2, 0, 3)
    q = Quaternion(2, 1, 1, -1)
    vec = {h: c for h, c in enumerate(q.components()) if c}
    assert left_multiply(p, vec) == {h: c for h, c in enumerate((p * q).components()) if c}
    assert right_multiply(vec, p) == {h: c for h, c in enumerate((q * p).components()) if c}


@given(quaternions, quaternions, quaternions)
@settings(max_examples=40, deadline=None)
def test_quaternion_product_is_associative(a, b, c):
    assert (a * b) * c == a * (b * c)


def test_span_is_rref_and_order_independent():
    a = span([[1, 2, 3], [2, 4, 7]], 3)
    b = span([[0, 0, 1], [1, 2, 0]], 3)
    assert a == b
    assert a.dim == 2
    assert a.pivots == (0, 2)


def test_span_rejects_long_vectors():
    with pytest.raises(DimensionMismatchError):
        span([[1, 2, 3, 4]], 3)


def test_annihilator_of_annihilator():
    s = span([[1, -1, 0, 2], [0, 1, 1, 1]], 4)
    assert annihilator(s).dim == 2
    assert annihilator(annihilator(s)) == s


def test_intersection_and_sum_dimensions():
    a = coordinate_subspace(4, (0, 1))
    b = span([[1, 0, 1, 0], [0, 1, 0, 0]], 4)
    assert intersect(a, b) == coordinate_subspace(4, (1,))
    assert subspace_sum(a, b).dim == 3


@given(st.lists(vectors, min_size=1, max_size=4), st.lists(vectors, min_size=1, max_size=4))
@settings(max_examples=40, deadline=None)
def test_grassmann_formula(rows_a, rows_b):
    a = span(rows_a, 5)
    b = span(rows_b, 5)
    assert a.dim + b.dim == subspace_sum(a, b).dim + intersect(a, b).dim


def test_kernel_and_image_of_row_map():
    m = rat_matrix([[1, 0, 1], [0, 1, 1], [1, 1, 2]])
    assert rank(m) == 2
    assert kernel(m) == span([[1, 1, -1]], 3)
    assert image(m) == span([[1, 0, 1], [0, 1, 1]], 3)


def test_kernel_of_zero_width_map_is_everything():
    m = rat_matrix([[], []], 0)
    assert kernel(m) == full_space(2)


def test_map_and_preimage():
    m = rat_matrix([[1, 0], [0, 0], [0, 1]])
    target = coordinate_subspace(2, (0,))
    assert preimage(m, target) == coordinate_subspace(3, (0, 1))
    assert map_subspace(full_space(3), m) == full_space(2)


def test_quotient_basis_requires_containment():
    a = coordinate_subspace(3, (0, 1))
    b = coordinate_subspace(3, (0,))
    reps = quotient_basis(a, b)
    assert reps.shape == (1, 3)
    with pytest.raises(ContainmentError):
        quotient_basis(b, a)


def test_coordinates_and_combine_round_trip():
    s = span([[1, 0, 2], [0, 1, -1]], 3)
    vec = {0: QQ(3), 1: QQ(2), 2: QQ(4)}
    coords = s.coordinates(vec)
    assert coords == (QQ(3), QQ(2))
    assert s.combine(coords) == vec
    with pytest.raises(ContainmentError):
        s.coordinates({2: QQ(1)})


def test_h_span_is_h_closed():
    s = h_span([{0: QQ(1), 5: QQ(1)}], 8)
    assert s.dim == 4
    assert s.h_closed()
    assert not coordinate_subspace(4, (0,)).h_closed()


def test_row_reducer_tracks_rank():
    reducer = RowReducer(3)
    assert reducer.add({0: QQ(1), 1: QQ(1)})
    assert reducer.add({1: QQ(1)})
    assert not reducer.add({0: QQ(2)})
    assert reducer.rank == 2
    assert reducer.subspace() == coordinate_subspace(3, (0, 1))


def test_zero_subspace_basics():
    z = zero_subspace(3)
    assert z.is_zero()
    assert annihilator(z) == full_space(3)
    assert z.contains([0, 0, 0])
