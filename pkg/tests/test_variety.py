import pytest

from quatalg.errors import InvariantViolationError, UsageError
from quatalg.exactq import I1, QQ
from quatalg.halg import ideal_from_generators, quotient_algebra
from quatalg.variety import (
    EH_GENERATOR_GRADE,
    QuadraticSystem,
    check_lambda,
    classify_lambda,
    eh_algebra,
    eh_chart,
    eh_family,
    eh_generators,
    emit_equations,
    frame_equations,
    identity_chart,
    lambda_from_params,
    membership,
    orbit_samples,
    orientation,
    real_system,
    rotate_point,
    rotation_from_quadruple,
    so3_action_check,
    substitute,
)

IDENTITY_FRAME = [1, 0, 0, 0, 1, 0, 0, 0, 1]
# грамиан diag(1, 4, 9) = λ + 14/3
CASE3_PARAMS = (QQ(-11, 3), QQ(-2, 3), 0, 0, 0)
CASE3_FRAME = [1, 0, 0, 0, 2, 0, 0, 0, 3]
# a12 = 1: v_1·v_2 = 1, |v_k|² − a_kk = 4/3
OFFDIAG_PARAMS = (QQ(2, 3), QQ(-1, 3), 1, 0, 0)
OFFDIAG_FRAME = [1, 1, 0, 0, 1, 0, 0, 0, 1]


@pytest.fixture(scope='module')
def flat():
    return eh_family(lambda_from_params(0, 0, 0, 0, 0))


@pytest.fixture(scope='module')
def deformed():
    return eh_family(lambda_from_params(*CASE3_PARAMS))


@pytest.fixture(scope='module')
def offdiag():
    return eh_family(lambda_from_params(*OFFDIAG_PARAMS))


def test_lambda_from_params_is_traceless():
    lam = lambda_from_params(1, 2, 3, 4, 5)
    assert lam[2][2] == -3
    assert lam[0][1] == lam[1][0] == 3
    assert check_lambda(lam) == lam


@pytest.mark.parametrize('lam, message', [
    ([[1, 1, 0], [0, -1, 0], [0, 0, 0]], 'симметричной'),
    ([[1, 0, 0], [0, 1, 0], [0, 0, 1]], 'След'),
    ([[0, 0], [0, 0]], '3×3'),
])
def test_bad_lambda_is_rejected(lam, message):
    with pytest.raises(InvariantViolationError, match=message):
        check_lambda(lam)


@pytest.mark.parametrize('params, case', [
    ((0, 0, 0, 0, 0), 1),
    ((-1, -1, 0, 0, 0), 2),
    ((1, 1, 0, 0, 0), 3),
    (CASE3_PARAMS, 3),
])
def test_classify_lambda(params, case):
    assert classify_lambda(lambda_from_params(*params)) == case


def test_substitute_with_identity_chart_keeps_polynomial():
    poly = {(0, 1): I1}
    assert substitute(poly, identity_chart(2)) == poly


def test_flat_system_shape(flat):
    assert flat.case == 1
    assert flat.system.n_vars == 9
    assert len(flat.system) == 5


def test_quotient_and_filtered_emit_the_same_flat_equations(flat):
    alg = eh_algebra(4)
    quotient = quotient_algebra(alg, ideal_from_generators(alg, EH_GENERATOR_GRADE, eh_generators(alg)))
    assert emit_equations(quotient, eh_chart()).equivalent(flat.system)


def test_flat_membership(flat):
    assert flat.membership(IDENTITY_FRAME)
    assert flat.membership([0] * 9)
    assert not flat.membership([1, 0, 0, 0, 2, 0, 0, 0, 1])
    assert flat.jacobian_rank(IDENTITY_FRAME) == 5
    assert flat.jacobian_rank([0] * 9) == 0


def test_flat_variety_holds_both_orientations(flat):
    mirrored = [1, 0, 0, 0, 1, 0, 0, 0, -1]
    assert orientation(IDENTITY_FRAME) == 1
    assert orientation(mirrored) == -1
    assert flat.membership(mirrored)


def test_membership_checks_point_length(flat):
    with pytest.raises(UsageError):
        membership(flat.system, [0] * 8)


def test_case_three_point(deformed):
    assert deformed.case == 3
    assert deformed.membership(CASE3_FRAME)
    assert not deformed.membership(IDENTITY_FRAME)
    assert deformed.jacobian_rank(CASE3_FRAME) == 5


def test_rotations_preserve_the_variety(flat, deformed):
    rotation = rotation_from_quadruple(1, 2, 0, 0)
    assert so3_action_check(flat.system, rotation, IDENTITY_FRAME)
    assert so3_action_check(deformed.system, rotation, CASE3_FRAME)
    assert deformed.membership(rotate_point(rotation, CASE3_FRAME))


def test_rotation_must_be_special_orthogonal(flat):
    with pytest.raises(InvariantViolationError):
        so3_action_check(flat.system, [[1, 0, 0], [0, 1, 0], [0, 0, -1]])
    with pytest.raises(InvariantViolationError):
        rotation_from_quadruple(0, 0, 0, 0)


def test_orbit_samples_stay_on_variety(deformed):
    samples = orbit_samples(deformed.system, CASE3_FRAME, 3, seed=5)
    assert all(s.member and s.jacobian_rank == 5 for s in samples)
    assert {s.orientation for s in samples} == {1}


def test_reconstruction_rank_is_positive(flat):
    assert 0 < flat.reconstruction_rank(IDENTITY_FRAME) <= 16


def test_flat_system_matches_written_out_equations(flat):
    # x_0..x_2, x_3..x_5, x_6..x_8: компоненты v_1, v_2, v_3
    written = [
        {(0, 3): 1, (1, 4): 1, (2, 5): 1},
        {(3, 6): 1, (4, 7): 1, (5, 8): 1},
        {(0, 6): 1, (1, 7): 1, (2, 8): 1},
        {(0, 0): 1, (1, 1): 1, (2, 2): 1, (3, 3): -1, (4, 4): -1, (5, 5): -1},
        {(3, 3): 1, (4, 4): 1, (5, 5): 1, (6, 6): -1, (7, 7): -1, (8, 8): -1},
    ]
    system = QuadraticSystem(9, eh_chart(), (), real_system(written, 9))
    assert len(system) == 5
    assert system.equivalent(flat.system)
    assert system.equivalent(frame_equations(lambda_from_params(0, 0, 0, 0, 0)))


@pytest.mark.parametrize('name,params', [
    ('flat', (0, 0, 0, 0, 0)),
    ('deformed', CASE3_PARAMS),
    ('offdiag', OFFDIAG_PARAMS),
])
def test_emitted_equations_match_frame_equations(request, name, params):
    family = request.getfixturevalue(name)
    assert family.system.equivalent(frame_equations(lambda_from_params(*params)))


def test_off_diagonal_lambda_moves_the_system(flat, offdiag):
    assert not offdiag.system.equivalent(flat.system)
    written = [
        {(0, 3): 1, (1, 4): 1, (2, 5): 1, (): -1},
        {(3, 6): 1, (4, 7): 1, (5, 8): 1},
        {(0, 6): 1, (1, 7): 1, (2, 8): 1},
        {(0, 0): 1, (1, 1): 1, (2, 2): 1, (3, 3): -1, (4, 4): -1, (5, 5): -1, (): -1},
        {(3, 3): 1, (4, 4): 1, (5, 5): 1, (6, 6): -1, (7, 7): -1, (8, 8): -1},
    ]
    assert offdiag.system.equivalent(QuadraticSystem(9, eh_chart(), (), real_system(written, 9)))


def test_off_diagonal_membership(offdiag):
    assert offdiag.membership(OFFDIAG_FRAME)
    assert not offdiag.membership([1, -1, 0, 0, 1, 0, 0, 0, 1])
    assert not offdiag.membership(IDENTITY_FRAME)
    assert offdiag.jacobian_rank(OFFDIAG_FRAME) == 5
