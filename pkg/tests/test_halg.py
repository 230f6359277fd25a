import pytest

from quatalg.ahmod import direct_sum, quaternions_module, u_linear, y_module
from quatalg.errors import IncompatibleError, NotAHModuleError, UsageError
from quatalg.exactq import I1, I2, I3, ONE, QQ, Quaternion, full_space, h_span, span
from quatalg.halg import (
    FilteredQuotient,
    GradedAlgebra,
    associated_graded,
    axiom_a_check,
    eval_poly,
    free_algebra,
    ideal_from_generators,
    poly_mul,
    quotient_algebra,
)
from quatalg.variety import EH_GENERATOR_GRADE, eh_algebra, eh_generators, lambda_deformation, lambda_from_params


def eh_expected(j):
    l = (2 * j + 1) * (j + 1)
    return (4 * l, 2 * l + 2 * j + 1)


def test_free_algebra_on_y_grades():
    alg = free_algebra(y_module(), 3)
    assert alg.dims() == {0: (4, 3), 1: (8, 5), 2: (12, 7), 3: (16, 9)}


def test_weight_leaves_odd_grades_empty():
    alg = free_algebra(y_module(), 4, weight=2)
    assert alg.grade_indices == [0, 2, 4]
    assert alg.dims()[1] == (0, 0)
    assert alg.dims()[4] == (12, 7)
    assert alg.grade(3) is None


def test_bad_weight_is_rejected():
    with pytest.raises(UsageError):
        GradedAlgebra(y_module(), 3, weight=0)


def test_polynomial_helpers():
    p = {(0,): I1}
    q = {(0,): I2}
    assert poly_mul(p, q) == {(0, 0): I3}
    assert poly_mul(q, p) == {(0, 0): -I3}
    assert eval_poly({(0, 1): ONE}, [QQ(2), QQ(3)]) == Quaternion(6)


def test_axioms_hold_on_free_h_algebra():
    report = axiom_a_check(free_algebra(quaternions_module(), 3))
    assert report.passed, report.violations()


def test_axioms_hold_on_free_y_algebra():
    report = axiom_a_check(free_algebra(y_module(), 2))
    assert report.passed, report.violations()


@pytest.mark.slow
def test_axioms_hold_on_free_y_algebra_up_to_four():
    report = axiom_a_check(free_algebra(y_module(), 4))
    assert report.passed, report.violations()


def test_product_in_free_h_algebra():
    alg = free_algebra(quaternions_module(), 2)
    i1 = {1: QQ(1)}
    i2 = {2: QQ(1)}
    assert alg.product(i1, 1, i2, 1) == {3: QQ(1)}
    with pytest.raises(UsageError):
        alg.product(i1, 1, i2, 2)


def test_product_of_incompatible_elements_is_rejected():
    alg = free_algebra(y_module(), 2)
    rows = alg.grades[1].subspace.rows
    found = False
    for y in rows:
        for z in rows:
            try:
                alg.product(y, 1, z, 1)
            except IncompatibleError:
                found = True
    assert found


def test_generators_must_sit_in_a_grade():
    alg = free_algebra(y_module(), 4, weight=2)
    with pytest.raises(UsageError):
        ideal_from_generators(alg, 1, full_space(alg.layout(1).coord_dim))


def test_eh_ideal_and_quotient_up_to_four():
    alg = eh_algebra(4)
    assert alg.dims()[2] == (24, 15)
    assert alg.dims()[4] == (72, 42)
    ideal = ideal_from_generators(alg, EH_GENERATOR_GRADE, eh_generators(alg))
    assert ideal.dims()[4] == 12
    assert ideal.absorption().passed
    quotient = quotient_algebra(alg, ideal)
    for g in (0, 2, 4):
        assert quotient.dims()[g] == eh_expected(g // 2)
        assert quotient.grades[g].exact


@pytest.mark.slow
def test_eh_ideal_up_to_eight():
    alg = eh_algebra(8)
    ideal = ideal_from_generators(alg, EH_GENERATOR_GRADE, eh_generators(alg))
    quotient = quotient_algebra(alg, ideal)
    for g in (6, 8):
        j = g // 2
        assert ideal.dims()[g] == 2 * j * (j - 1) * (j + 1)
        assert quotient.dims()[g] == eh_expected(j)
    assert ideal.stationary


def test_filtered_quotient_levels():
    alg = eh_algebra(4)
    gens = eh_generators(alg)
    lam = lambda_from_params(1, 2, 0, 0, 0)
    filtered = FilteredQuotient(alg, EH_GENERATOR_GRADE, gens, lambda_deformation(lam, alg.layout(4)))
    assert filtered.level_dims() == {0: (4, 0, 4), 2: (28, 0, 28), 4: (100, 12, 88)}
    assert filtered.leading(4) == gens


def test_associated_graded_without_deformation_is_plain_quotient():
    alg = eh_algebra(4)
    gens = eh_generators(alg)
    graded = associated_graded(FilteredQuotient(alg, EH_GENERATOR_GRADE, gens))
    plain = quotient_algebra(alg, ideal_from_generators(alg, EH_GENERATOR_GRADE, gens))
    assert graded.dims() == plain.dims()


def test_axioms_hold_on_free_u_algebra():
    report = axiom_a_check(GradedAlgebra(u_linear(), 2))
    assert report.passed, report.violations()


def test_lopsided_product_breaks_commutativity():
    alg = GradedAlgebra(u_linear(), 2, mu_weight=lambda a, b: QQ(2) if a < b else QQ(1))
    report = axiom_a_check(alg)
    assert not report.passed
    assert any(c.name.startswith('коммутативность') for c in report.violations())


def test_ideal_of_a_whole_grade_swallows_everything_above():
    alg = free_algebra(y_module(), 4)
    ideal = ideal_from_generators(alg, 2, alg.grades[2].subspace)
    for g in (2, 3, 4):
        assert ideal.subspace(g) == alg.grades[g].subspace
    assert ideal.dims() == {0: 0, 1: 0, 2: 12, 3: 16, 4: 20}
    quotient = quotient_algebra(alg, ideal)
    assert quotient.dims() == {0: (4, 3), 1: (8, 5), 2: (0, 0), 3: (0, 0), 4: (0, 0)}


def test_associated_graded_names_the_grade_of_a_bad_quotient():
    h = quaternions_module()
    alg = free_algebra(direct_sum(h, h), 2)
    a1 = alg.grades[1]
    # (q, q·i1): пересечение с I⊕I двумерно, образ U′ в частном равен H
    line = h_span([{0: QQ(1), 5: QQ(1)}], 4 * a1.base.n)
    gens = span([a1.embed(r) for r in line.rows], a1.layout.coord_dim)
    with pytest.raises(NotAHModuleError) as e:
        associated_graded(FilteredQuotient(alg, 1, gens))
    assert e.value.grade == 1
    assert e.value.details()['grade'] == 1
