import pytest

from quatalg.ahmod import (
    AHMorphism,
    direct_sum,
    exactness_example,
    fingerprints_match,
    is_semistable,
    is_stable,
    make_ah_module,
    quaternions_module,
    random_exact_sequence,
    random_stable,
    u_linear,
    virtual_dim,
    y_module,
)
from quatalg.errors import BudgetExceededError, DimensionMismatchError, IncompatibleError
from quatalg.exactq import QQ, span, zero_subspace
from quatalg.qtensor import (
    alt_power,
    alt_power_formula,
    check_sequence,
    elem_tensor,
    permute_factors,
    qtensor,
    qtensor_k,
    sigma_h,
    sym_power,
    sym_power_formula,
    tensor_dims_formula,
    tensor_morphism,
    tensor_sequence,
)


def test_y_tensor_y():
    t = qtensor(y_module(), y_module())
    assert t.dims() == (12, 7)
    assert t.dims() == tensor_dims_formula(2, 1, 2, 1)


def test_alternating_square_of_y_vanishes():
    assert alt_power(y_module(), 2).subspace.is_zero()
    assert alt_power_formula(2, 1, 2) == (0, 0)


def test_h_is_unit_for_tensor():
    y = y_module()
    t = qtensor(quaternions_module(), y)
    assert t.dims() == (8, 5)
    assert fingerprints_match(t.base, y)


def test_tensor_of_modules_without_prime_part_is_zero():
    u = make_ah_module(1, zero_subspace(4))
    assert qtensor(u, u).subspace.is_zero()


def test_powers_of_linear_functions():
    u = u_linear()
    assert sym_power(u, 1).dims() == (12, 8)
    assert sym_power(u, 2).dims() == sym_power_formula(3, 2, 2) == (24, 15)
    assert fingerprints_match(alt_power(u, 2).base, y_module())


@pytest.mark.parametrize('k', [0, 1, 2])
def test_tensor_power_of_h_is_h(k):
    assert qtensor_k(quaternions_module(), k).dims() == (4, 3)


def test_negative_power_is_rejected():
    with pytest.raises(DimensionMismatchError):
        sym_power(y_module(), -1)


def test_budget_is_enforced():
    with pytest.raises(BudgetExceededError) as e:
        qtensor(y_module(), y_module(), budget=10)
    assert e.value.details()['budget'] == 10


@pytest.mark.parametrize('j,r,n,expected', [
    (1, 1, 0, (4, 3)),
    (2, 1, 2, (12, 7)),
    (3, 2, 1, (12, 8)),
    (3, 2, 3, (40, 24)),
])
def test_sym_power_formula_values(j, r, n, expected):
    assert sym_power_formula(j, r, n) == expected


def test_random_stable_tensor_matches_formula():
    u = random_stable(2, 1, seed=11)
    v = random_stable(2, 2, seed=12)
    assert qtensor(u, v).dims() == tensor_dims_formula(2, 1, 2, 2)


def test_identity_tensor_identity_is_identity():
    y = y_module()
    ident = AHMorphism.identity(y)
    m, source, target = tensor_morphism(ident, ident)
    assert source.dims() == target.dims() == (12, 7)
    assert m.coeffs == AHMorphism.identity(m.source).coeffs


def test_elementary_tensor_requires_commuting_values():
    h = quaternions_module()
    assert elem_tensor({0: QQ(1)}, {0: QQ(2)}, h, h) == {0: QQ(2)}
    with pytest.raises(IncompatibleError):
        elem_tensor({1: QQ(1)}, {2: QQ(1)}, h, h)


def test_permute_factors_moves_cells():
    # ячейка (0, 2) в размерах (2, 3) переходит в (2, 0) в размерах (3, 2)
    assert permute_factors({4 * 2 + 1: QQ(1)}, [2, 3], [1, 0]) == {4 * 4 + 1: QQ(1)}


def test_symmetrization_is_idempotent():
    vec = {4 * 1: QQ(1), 4 * 2: QQ(3)}
    once = sigma_h(vec, 2, 2)
    assert once == {4 * 1: QQ(2), 4 * 2: QQ(2)}
    assert sigma_h(once, 2, 2) == once


def test_exactness_example_breaks_after_tensoring():
    ex = exactness_example()
    fs = [ex['phi'], ex['psi']]
    assert check_sequence(fs).ah_exact
    tensored = check_sequence(tensor_sequence(fs, ex['W']))
    assert tensored.module_dims == (0, 0, 4)
    assert tensored.failures() == (2,)


def test_sequence_must_compose():
    ex = exactness_example()
    with pytest.raises(DimensionMismatchError):
        check_sequence([ex['psi'], ex['phi']])
    with pytest.raises(DimensionMismatchError):
        check_sequence([])


def test_random_exact_sequence_stays_exact_with_stable_factor():
    u = random_stable(1, 1, seed=3)
    w = random_stable(2, 1, seed=4)
    seq = list(random_exact_sequence(u, w, seed=5))
    assert check_sequence(seq).ah_exact
    z = y_module()
    assert is_stable(z)
    assert check_sequence(tensor_sequence(seq, z)).ah_exact


def test_stable_times_semistable_sum_matches_formula():
    u = y_module()
    v = direct_sum(random_stable(1, 1, seed=7), y_module())
    assert is_semistable(v)
    assert (v.n, virtual_dim(v)) == (3, 2)
    assert qtensor(u, v).dims() == tensor_dims_formula(2, 1, 3, 2) == (20, 12)


def test_tensor_product_commutes_up_to_isomorphism():
    u = y_module()
    v = random_stable(1, 1, seed=2)
    uv = qtensor(u, v)
    vu = qtensor(v, u)
    assert uv.dims() == vu.dims()
    assert fingerprints_match(uv.base, vu.base)


@pytest.mark.slow
def test_third_power_agrees_with_iterated_product():
    u = u_linear()
    pair = qtensor(u, u)
    assert pair.dims() == tensor_dims_formula(3, 2, 3, 2) == (32, 20)
    triple = qtensor_k(u, 3)
    assert triple.dims() == qtensor(pair.base, u).dims()
    # (8, 4) ⊗ (3, 2): l = 8·2 + 4·3 − 4·2 = 20
    assert triple.dims() == tensor_dims_formula(3, 2, 8, 4) == (80, 48)


def test_tensoring_keeps_injective_maps_injective():
    u = random_stable(1, 1, seed=3)
    w = random_stable(2, 1, seed=4)
    phi, _ = random_exact_sequence(u, w, seed=5)
    assert phi.kernel().is_zero()
    z = y_module()
    m, source, target = tensor_morphism(phi, AHMorphism.identity(z))
    assert source.dims() == qtensor(u, z).dims()
    assert m.kernel().is_zero()


@pytest.mark.parametrize('module', [y_module, u_linear])
def test_symmetrization_image_is_sym_square(module):
    u = module()
    d = u.dagger.dim
    full = qtensor_k(u, 2)
    sym = sym_power(u, 2)
    averaged = span([sigma_h(row, d, 2) for row in full.subspace.rows], full.layout.coord_dim)
    assert averaged == span([sym.expand(row) for row in sym.subspace.rows], full.layout.coord_dim)
    assert averaged.dim == sym.subspace.dim
