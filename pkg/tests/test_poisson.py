import pytest

from quatalg.errors import DimensionMismatchError, InvariantViolationError
from quatalg.exactq import QQ
from quatalg.poisson import HLAlgebra, LieAlgebra, abelian, hl_from_lie, poisson_on_free, so3, solvable2


def test_standard_lie_algebras_are_valid():
    assert so3().c(0, 1, 2) == 1
    assert so3().c(1, 0, 2) == -1
    assert solvable2().bracket([QQ(1), QQ(0)], [QQ(0), QQ(1)]) == [QQ(0), QQ(1)]
    assert not abelian(2).constants


def test_antisymmetry_is_required():
    with pytest.raises(InvariantViolationError, match='антисимметричность'):
        LieAlgebra(2, {(0, 1, 1): 1})


def test_jacobi_is_required():
    constants = {(0, 1, 2): 1, (1, 0, 2): -1, (0, 2, 0): 1, (2, 0, 0): -1}
    with pytest.raises(InvariantViolationError, match='Якоби'):
        LieAlgebra(3, constants)


def test_constant_indices_are_checked():
    with pytest.raises(InvariantViolationError):
        LieAlgebra(2, {(0, 2, 1): 1})


@pytest.mark.parametrize('g', [so3(), solvable2()], ids=['so3', 'solv2'])
def test_hl_axioms(g):
    report = hl_from_lie(g).check()
    assert report.passed, report.violations()


def test_carrier_is_copies_of_y():
    hl = hl_from_lie(so3())
    assert hl.carrier.dims() == (24, 15, 9)
    assert hl.dual_dim == 9


def test_bracket_morphism_shape():
    m = hl_from_lie(so3()).bracket_morphism()
    assert m.source.n == 27
    assert m.target.n == 9


def test_lowest_poisson_bracket_is_the_hl_bracket():
    hl = hl_from_lie(so3())
    tables = poisson_on_free(hl, 2)
    d = hl.dual_dim
    # (a=0, j=1) ⊗ (b=1, k=2): [e0, e1] = e2
    vec = {4 * ((0 * 3 + 1) * d + (1 * 3 + 2)) + 3: QQ(1)}
    assert tables.xi(1, 1, vec) == hl.bracket(vec)
    assert tables.xi(1, 1, vec) == {4 * ((2 * 3 + 1) * 3 + 2) + 3: QQ(1)}
    assert tables.rank(1, 1) > 0
    assert tables.check().passed


def test_abelian_bracket_vanishes():
    tables = poisson_on_free(hl_from_lie(abelian(1)), 2)
    assert tables.rank(1, 1) == 0
    assert tables.check().passed


@pytest.mark.slow
@pytest.mark.parametrize('g', [so3(), solvable2()], ids=['so3', 'solv2'])
def test_derivation_property_up_to_three(g):
    tables = poisson_on_free(hl_from_lie(g), 3)
    assert set(tables.images) == {(1, 1), (1, 2), (2, 1)}
    assert tables.derivation()
    assert tables.check().passed


def test_unit_tensor_goes_through_the_contraction():
    hl = hl_from_lie(so3())
    tables = poisson_on_free(hl, 2)
    a = {4 * 5 + 1: QQ(2), 4 * 7: QQ(-1)}
    one_a = tables.unit_tensor(1, a)
    assert len(one_a) == 2
    assert tables.xi(0, 1, one_a) == {}
    assert tables.xi(1, 0, tables.unit_tensor(1, a, unit_first=False)) == {}
    with pytest.raises(DimensionMismatchError):
        tables.xi(0, 1, {999999: QQ(1)})
    with pytest.raises(DimensionMismatchError):
        tables.xi(1, 0, {4 * 9: QQ(1)})


def test_unit_check_sees_a_nonzero_bracket(monkeypatch):
    tables = poisson_on_free(hl_from_lie(so3()), 2)
    honest = tables.xi

    def leaky(k, l, vec):
        out = honest(k, l, vec)
        if k == 0 and vec:
            out = dict(out)
            out[0] = QQ(1)
        return out

    monkeypatch.setattr(tables, 'xi', leaky)
    report = tables.check()
    assert not tables.identity_kills()
    assert not report.passed
    assert any('единица' in check.name for check in report.violations())


def test_perturbed_structure_constants_break_antisymmetry():
    g = so3()
    object.__setattr__(g, 'constants', {(0, 1, 2): QQ(1), (1, 0, 2): QQ(1)})
    hl = HLAlgebra(g, hl_from_lie(so3()).carrier)
    assert not hl.antisymmetry()
    assert not hl.check().passed
