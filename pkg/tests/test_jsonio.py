import pytest

from quatalg.ahmod import exactness_example, y_module
from quatalg.errors import UsageError
from quatalg.exactq import QQ, Quaternion
from quatalg.jsonio import (
    dumps,
    lie_from_json,
    lie_to_json,
    module_from_json,
    module_to_json,
    morphism_from_json,
    morphism_to_json,
    parse_numbers,
    quaternion_from_json,
    resolve_lie,
    resolve_module,
    subspace_from_json,
)
from quatalg.poisson import so3


def test_rationals_are_strings():
    assert parse_numbers('1, -2, 3/4') == [QQ(1), QQ(-2), QQ(3, 4)]
    assert quaternion_from_json(['1', '1/2', 0, -3]) == Quaternion(1, QQ(1, 2), 0, -3)
    with pytest.raises(UsageError):
        parse_numbers(' , ')
    with pytest.raises(UsageError):
        quaternion_from_json([1.0, 0, 0, 0])
    with pytest.raises(UsageError):
        quaternion_from_json(['0.5', 0, 0, 0])


def test_module_and_morphism_survive_serialization():
    y = y_module()
    assert module_from_json(module_to_json(y)) == y
    psi = exactness_example()['psi']
    back = morphism_from_json(morphism_to_json(psi))
    assert back.coeffs == psi.coeffs
    assert back.source == psi.source


def test_lie_brackets_fill_antisymmetric_partner():
    g = lie_from_json({'dim': 2, 'brackets': [[0, 1, 1, '1']]})
    assert g.c(1, 0, 1) == -1
    assert lie_from_json(lie_to_json(so3())).constants == so3().constants


@pytest.mark.parametrize('payload', [
    {'brackets': []},
    {'dim': -1},
    {'dim': 2, 'brackets': [[0, 1, 1]]},
])
def test_bad_lie_payloads(payload):
    with pytest.raises(UsageError):
        lie_from_json(payload)


def test_bad_module_payloads():
    with pytest.raises(UsageError):
        module_from_json({'uprime': []})
    with pytest.raises(UsageError):
        module_from_json({'n': 1, 'uprime': [[0, 1, 0]]})
    with pytest.raises(UsageError):
        subspace_from_json([1, 2])


def test_builtin_names():
    assert resolve_module('Y')[1] == {'builtin': 'y'}
    assert resolve_module('xq:1,0,0')[0].dims() == (4, 2, 2)
    assert resolve_lie('abelian:2')[0].dim == 2
    with pytest.raises(UsageError):
        resolve_lie('abelian:x')
    with pytest.raises(UsageError):
        resolve_module('xq:1,0')


def test_dumps_keeps_unicode_and_sorts_keys():
    assert dumps({'b': 'Λ', 'a': 1}) == '{\n  "a": 1,\n  "b": "Λ"\n}'
