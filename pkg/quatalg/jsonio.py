"""JSON-кодеки: рациональные числа строками "p/q", плотные векторы, модули, морфизмы.

Формат модуля: {"n": 2, "uprime": [[...4n чисел...], ...], "name": "V"}.
"""
from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Any, Dict, List, Mapping, Sequence, Tuple

from .ahmod import AHModule, AHMorphism, make_ah_module, quaternions_module, u_linear, x_q, y_module
from .errors import UsageError
from .exactq import Quaternion, Rational, SparseVec, Subspace, format_rational, span, to_dense, to_rational, to_sparse
from .poisson import LieAlgebra, abelian, so3, solvable2

BUILTIN_LIE = {'so3': so3, 'solv2': solvable2}


def rational_to_json(value: Any) -> str:
    return format_rational(value)


def rational_from_json(value: Any) -> Rational:
    if isinstance(value, float):
        raise UsageError(f"Вещественные числа с плавающей точкой не допускаются: {value}")
    return to_rational(value)


def vector_to_json(vec: Mapping[int, Rational], n: int) -> List[str]:
    return [format_rational(c) for c in to_dense(vec, n)]


def vector_from_json(values: Any, n: int) -> SparseVec:
    if not isinstance(values, list) or len(values) != n:
        raise UsageError(f"Ожидался список из {n} чисел")
    return to_sparse([rational_from_json(v) for v in values])


def subspace_to_json(s: Subspace) -> Dict[str, Any]:
    return {'ambient': s.ambient_dim, 'rows': [vector_to_json(r, s.ambient_dim) for r in s.rows]}


def subspace_from_json(payload: Any) -> Subspace:
    if not isinstance(payload, dict) or 'ambient' not in payload:
        raise UsageError("Подпространство задаётся объектом {'ambient', 'rows'}")
    n = _int(payload['ambient'], 'ambient')
    return span([vector_from_json(r, n) for r in payload.get('rows', [])], n)


def quaternion_to_json(q: Quaternion) -> List[str]:
    return [format_rational(c) for c in q.components()]


def quaternion_from_json(values: Any) -> Quaternion:
    if not isinstance(values, list) or len(values) != 4:
        raise UsageError('Кватернион задаётся списком из 4 чисел')
    return Quaternion(*(rational_from_json(v) for v in values))


def module_to_json(u: AHModule) -> Dict[str, Any]:
    out: Dict[str, Any] = {'n': u.n, 'uprime': [vector_to_json(r, 4 * u.n) for r in u.uprime.rows]}
    if u.name:
        out['name'] = u.name
    return out


def module_from_json(payload: Any) -> AHModule:
    if not isinstance(payload, dict) or 'n' not in payload:
        raise UsageError("Модуль задаётся объектом {'n', 'uprime'}")
    n = _int(payload['n'], 'n')
    rows = payload.get('uprime', [])
    if not isinstance(rows, list):
        raise UsageError("Поле 'uprime' должно быть списком векторов")
    return make_ah_module(n, span([vector_from_json(r, 4 * n) for r in rows], 4 * n), str(payload.get('name', '')))


def morphism_to_json(f: AHMorphism) -> Dict[str, Any]:
    return {
        'source': module_to_json(f.source),
        'target': module_to_json(f.target),
        'coeffs': [[quaternion_to_json(q) for q in row] for row in f.coeffs],
    }


def morphism_from_json(payload: Any) -> AHMorphism:
    if not isinstance(payload, dict) or not {'source', 'target', 'coeffs'} <= set(payload):
        raise UsageError("Морфизм задаётся объектом {'source', 'target', 'coeffs'}")
    source = module_from_json(payload['source'])
    target = module_from_json(payload['target'])
    coeffs = payload['coeffs']
    if not isinstance(coeffs, list) or len(coeffs) != source.n or any(
            not isinstance(row, list) or len(row) != target.n for row in coeffs):
        raise UsageError(f"Матрица морфизма должна иметь размер {source.n}×{target.n}")
    return AHMorphism(source, target, [[quaternion_from_json(q) for q in row] for row in coeffs])


def lie_to_json(g: LieAlgebra) -> Dict[str, Any]:
    brackets = [[i, j, k, format_rational(v)] for (i, j, k), v in sorted(g.constants.items()) if i < j]
    return {'dim': g.dim, 'brackets': brackets, 'name': g.name}


def lie_from_json(payload: Any) -> LieAlgebra:
    """{"dim": m, "brackets": [[i, j, k, c], ...]} задаёт c_ij^k = c и c_ji^k = −c."""
    if not isinstance(payload, dict) or 'dim' not in payload:
        raise UsageError("Алгебра Ли задаётся объектом {'dim', 'brackets'}")
    m = _int(payload['dim'], 'dim')
    constants: Dict[Tuple[int, int, int], Rational] = {}
    for entry in payload.get('brackets', []):
        if not isinstance(entry, list) or len(entry) != 4:
            raise UsageError('Скобка задаётся списком [i, j, k, c]')
        i, j, k = (_int(x, 'индекс') for x in entry[:3])
        c = rational_from_json(entry[3])
        constants[(i, j, k)] = constants.get((i, j, k), 0) + c
        constants[(j, i, k)] = constants.get((j, i, k), 0) - c
    return LieAlgebra(m, constants, str(payload.get('name', '')))


def _int(value: Any, what: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int) or value < 0:
        raise UsageError(f"Поле '{what}' должно быть неотрицательным целым, получено {value!r}")
    return value


def parse_numbers(text: str) -> List[Rational]:
    """'1,-2,3/4' → список рациональных чисел."""
    parts = [p for p in text.split(',') if p.strip()]
    if not parts:
        raise UsageError(f"Ожидался список чисел через запятую, получено '{text}'")
    return [rational_from_json(p) for p in parts]


def load_json(path: str) -> Any:
    try:
        return json.loads(Path(path).read_text(encoding='utf-8'))
    except OSError as exc:
        raise UsageError(f"Не удалось прочитать файл '{path}': {exc}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"Некорректный JSON в '{path}': {exc}") from exc


def digest(path: str) -> str:
    try:
        return hashlib.sha256(Path(path).read_bytes()).hexdigest()
    except OSError as exc:
        raise UsageError(f"Не удалось прочитать файл '{path}': {exc}") from exc


def resolve_module(source: str) -> Tuple[AHModule, Dict[str, str]]:
    """Встроенные h, y, u, xq:a,b,c или путь к JSON; второе значение: запись для отчёта."""
    key = source.strip().lower()
    if key == 'h':
        return quaternions_module(), {'builtin': 'h'}
    if key == 'y':
        return y_module(), {'builtin': 'y'}
    if key == 'u':
        return u_linear(), {'builtin': 'u'}
    if key.startswith('xq:'):
        values = parse_numbers(key[3:])
        if len(values) != 3:
            raise UsageError('xq ожидает три компоненты мнимого кватерниона')
        return x_q(Quaternion(0, *values)), {'builtin': key}
    return module_from_json(load_json(source)), {'file': source, 'sha256': digest(source)}


def resolve_lie(source: str) -> Tuple[LieAlgebra, Dict[str, str]]:
    key = source.strip().lower()
    if key in BUILTIN_LIE:
        return BUILTIN_LIE[key](), {'builtin': key}
    if key.startswith('abelian:'):
        text = key.split(':', 1)[1]
        if not text.isdigit():
            raise UsageError(f"abelian ожидает размерность, получено '{text}'")
        return abelian(int(text)), {'builtin': key}
    return lie_from_json(load_json(source)), {'file': source, 'sha256': digest(source)}


def resolve_generators(source: str) -> Tuple[int, Subspace, Dict[str, Any]]:
    """'2,gens.json' → (степень, подпространство образующих, запись для отчёта)."""
    grade_text, sep, path = source.partition(',')
    if not sep or not path.strip():
        raise UsageError(f"Ожидалось 'степень,файл.json', получено '{source}'")
    if not grade_text.strip().isdigit():
        raise UsageError(f"Степень образующих должна быть неотрицательным целым, получено '{grade_text}'")
    grade = int(grade_text)
    path = path.strip()
    gens = subspace_from_json(load_json(path))
    return grade, gens, {'grade': grade, 'file': path, 'sha256': digest(path)}


def dumps(payload: Any) -> str:
    return json.dumps(payload, ensure_ascii=False, sort_keys=True, indent=2)


def dims_to_json(dims: Mapping[int, Sequence[int]]) -> Dict[str, List[int]]:
    return {str(g): list(d) for g, d in sorted(dims.items())}
