"""Точная рациональная арифметика, кватернионы и канонические подпространства R^N.

Все вычисления ранга, ядра и RREF идут через ``DomainMatrix`` над ``QQ``.
Вектор внутри пакета хранится разреженно, как ``Dict[int, Rational]``;
наружу отдаётся кортежем рациональных чисел.
"""
from __future__ import annotations

import numbers
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from sympy.polys.domains import QQ
from sympy.polys.matrices import DomainMatrix

from .errors import ContainmentError, DimensionMismatchError, UsageError

Rational = Any
RatMatrix = DomainMatrix
SparseVec = Dict[int, Rational]
Vector = Tuple[Rational, ...]
VectorLike = Union[Sequence[Any], Mapping[int, Any]]

ZERO_Q = QQ(0)
ONE_Q = QQ(1)

_RATIONAL_TEXT = re.compile(r'[+-]?\d+(?:/\d+)?')


def to_rational(value: Any) -> Rational:
    if isinstance(value, QQ.dtype):
        return value
    if isinstance(value, bool):
        raise UsageError(f"Ожидалось рациональное число, получено {value!r}")
    if isinstance(value, str):
        if not _RATIONAL_TEXT.fullmatch(value.strip()):
            raise UsageError(f"Ожидалось рациональное число вида p или p/q, получено '{value}'")
        try:
            frac = Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise UsageError(f"Некорректное рациональное число '{value}'") from exc
        return QQ(frac.numerator, frac.denominator)
    if isinstance(value, numbers.Integral):
        return QQ(int(value))
    if hasattr(value, 'p') and hasattr(value, 'q'):
        return QQ(int(value.p), int(value.q))
    if isinstance(value, numbers.Rational) or (hasattr(value, 'numerator') and hasattr(value, 'denominator')):
        return QQ(int(value.numerator), int(value.denominator))
    raise UsageError(f"Только точные рациональные значения, получено {value!r}")


def format_rational(value: Any) -> str:
    q = to_rational(value)
    num, den = int(q.numerator), int(q.denominator)
    return str(num) if den == 1 else f"{num}/{den}"


def parse_rational(text: str) -> Rational:
    return to_rational(text)


def to_sparse(vec: VectorLike) -> SparseVec:
    if isinstance(vec, Mapping):
        items = ((int(k), to_rational(v)) for k, v in vec.items())
    else:
        items = ((i, to_rational(v)) for i, v in enumerate(vec))
    return {k: v for k, v in items if v}


def to_dense(vec: Mapping[int, Rational], n: int) -> Vector:
    out = [ZERO_Q] * n
    for k, v in vec.items():
        out[k] = v
    return tuple(out)


def axpy(target: SparseVec, coef: Rational, src: Mapping[int, Rational]) -> None:
    """target += coef * src на месте, с выбросом нулей."""
    if not coef:
        return
    for k, v in src.items():
        s = target.get(k, ZERO_Q) + coef * v
        if s:
            target[k] = s
        else:
            target.pop(k, None)


def scale(vec: Mapping[int, Rational], coef: Rational) -> SparseVec:
    if not coef:
        return {}
    return {k: coef * v for k, v in vec.items()}


@dataclass(frozen=True)
class Quaternion:
    r0: Rational = ZERO_Q
    r1: Rational = ZERO_Q
    r2: Rational = ZERO_Q
    r3: Rational = ZERO_Q

    def __post_init__(self):
        for name in ('r0', 'r1', 'r2', 'r3'):
            object.__setattr__(self, name, to_rational(getattr(self, name)))

    @classmethod
    def from_components(cls, comps: Sequence[Any]) -> 'Quaternion':
        if len(comps) != 4:
            raise DimensionMismatchError(f"Кватернион задаётся 4 компонентами, получено {len(comps)}")
        return cls(*comps)

    @classmethod
    def imaginary(cls, a: Any, b: Any, c: Any) -> 'Quaternion':
        return cls(0, a, b, c)

    def components(self) -> Vector:
        return (self.r0, self.r1, self.r2, self.r3)

    def is_zero(self) -> bool:
        return not (self.r0 or self.r1 or self.r2 or self.r3)

    def is_imaginary(self) -> bool:
        return not self.r0

    def conj(self) -> 'Quaternion':
        return Quaternion(self.r0, -self.r1, -self.r2, -self.r3)

    def norm2(self) -> Rational:
        return self.r0 * self.r0 + self.r1 * self.r1 + self.r2 * self.r2 + self.r3 * self.r3

    def inverse(self) -> 'Quaternion':
        n = self.norm2()
        if not n:
            raise ZeroDivisionError('Обращение нулевого кватерниона')
        c = self.conj()
        return Quaternion(c.r0 / n, c.r1 / n, c.r2 / n, c.r3 / n)

    def __add__(self, other: 'Quaternion') -> 'Quaternion':
        return Quaternion(self.r0 + other.r0, self.r1 + other.r1, self.r2 + other.r2, self.r3 + other.r3)

    def __sub__(self, other: 'Quaternion') -> 'Quaternion':
        return Quaternion(self.r0 - other.r0, self.r1 - other.r1, self.r2 - other.r2, self.r3 - other.r3)

    def __neg__(self) -> 'Quaternion':
        return Quaternion(-self.r0, -self.r1, -self.r2, -self.r3)

    def __mul__(self, other: Any) -> 'Quaternion':
        if not isinstance(other, Quaternion):
            s = to_rational(other)
            return Quaternion(self.r0 * s, self.r1 * s, self.r2 * s, self.r3 * s)
        a0, a1, a2, a3 = self.components()
        b0, b1, b2, b3 = other.components()
        return Quaternion(
            a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3,
            a0 * b1 + a1 * b0 + a2 * b3 - a3 * b2,
            a0 * b2 - a1 * b3 + a2 * b0 + a3 * b1,
            a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0,
        )

    def __rmul__(self, other: Any) -> 'Quaternion':
        return self * other

    def left_matrix(self) -> List[List[Rational]]:
        # строка h: компоненты self * e_h, так что x·L = self * x
        return [list((self * e).components()) for e in BASIS]

    def right_matrix(self) -> List[List[Rational]]:
        # строка h: компоненты e_h * self, так что x·R = x * self
        return [list((e * self).components()) for e in BASIS]

    def __str__(self) -> str:
        return '(' + ', '.join(format_rational(c) for c in self.components()) + ')'


ZERO = Quaternion()
ONE = Quaternion(1)
I1 = Quaternion(0, 1)
I2 = Quaternion(0, 0, 1)
I3 = Quaternion(0, 0, 0, 1)
BASIS = (ONE, I1, I2, I3)
IMAGINARY_UNITS = (I1, I2, I3)


def slot(vec: Mapping[int, Rational], i: int) -> Quaternion:
    base = 4 * i
    return Quaternion(*(vec.get(base + h, ZERO_Q) for h in range(4)))


def put_slot(vec: SparseVec, i: int, q: Quaternion) -> None:
    base = 4 * i
    for h, c in enumerate(q.components()):
        if c:
            vec[base + h] = c
        else:
            vec.pop(base + h, None)


def left_multiply(q: Quaternion, vec: Mapping[int, Rational]) -> SparseVec:
    """Покомпонентное левое умножение q·(u_0, u_1, ...)."""
    out: SparseVec = {}
    for s in sorted({k // 4 for k in vec}):
        put_slot(out, s, q * slot(vec, s))
    return out


def right_multiply(vec: Mapping[int, Rational], q: Quaternion) -> SparseVec:
    out: SparseVec = {}
    for s in sorted({k // 4 for k in vec}):
        put_slot(out, s, slot(vec, s) * q)
    return out


def rat_matrix(rows: Sequence[Sequence[Any]], ncols: Optional[int] = None) -> RatMatrix:
    nrows = len(rows)
    if ncols is None:
        ncols = len(rows[0]) if nrows else 0
    return sparse_matrix([to_sparse(r) for r in rows], ncols)


def sparse_matrix(rows: Sequence[Mapping[int, Rational]], ncols: int) -> RatMatrix:
    dod = {i: {k: (v if isinstance(v, QQ.dtype) else to_rational(v)) for k, v in r.items()}
           for i, r in enumerate(rows) if r}
    return DomainMatrix(dod, (len(rows), ncols), QQ)


def matrix_rows(m: RatMatrix) -> List[SparseVec]:
    dod = m.to_dod()
    return [dict(dod.get(i, {})) for i in range(m.shape[0])]


def zero_matrix(nrows: int, ncols: int) -> RatMatrix:
    return DomainMatrix({}, (nrows, ncols), QQ)


def vec_times_matrix(vec: Mapping[int, Rational], m: RatMatrix) -> SparseVec:
    rows = m.to_dod()
    out: SparseVec = {}
    for k, c in vec.items():
        row = rows.get(k)
        if row:
            axpy(out, c, row)
    return out


def is_zero_matrix(m: RatMatrix) -> bool:
    return not any(m.to_dod().values())


def _rref_rows(m: RatMatrix) -> List[SparseVec]:
    nrows, ncols = m.shape
    if nrows == 0 or ncols == 0 or is_zero_matrix(m):
        return []
    reduced, pivots = m.rref()
    dod = reduced.to_dod()
    return [dict(dod.get(i, {})) for i in range(len(pivots))]


def rref(m: RatMatrix) -> RatMatrix:
    rows = _rref_rows(m)
    return sparse_matrix(rows, m.shape[1])


def rank(m: RatMatrix) -> int:
    return len(_rref_rows(m))


class RowReducer:
    """Инкрементальный базис Гаусса–Жордана: строки всегда приведены."""

    def __init__(self, ambient_dim: int):
        self.ambient_dim = ambient_dim
        self._rows: Dict[int, SparseVec] = {}

    @property
    def rank(self) -> int:
        return len(self._rows)

    def reduce(self, vec: Mapping[int, Rational]) -> SparseVec:
        out = dict(vec)
        for p in [k for k in vec if k in self._rows]:
            c = out.get(p)
            if c:
                axpy(out, -c, self._rows[p])
        return out

    def contains(self, vec: Mapping[int, Rational]) -> bool:
        return not self.reduce(vec)

    def add(self, vec: Mapping[int, Rational]) -> bool:
        r = self.reduce(vec)
        if not r:
            return False
        p = min(r)
        inv = ONE_Q / r[p]
        r = {k: v * inv for k, v in r.items()}
        for row in self._rows.values():
            c = row.get(p)
            if c:
                axpy(row, -c, r)
        self._rows[p] = r
        return True

    def rows(self) -> List[SparseVec]:
        return [dict(self._rows[p]) for p in sorted(self._rows)]

    def subspace(self) -> 'Subspace':
        return Subspace._trusted(self.ambient_dim, self.rows())


@dataclass(frozen=True, eq=False)
class Subspace:
    ambient_dim: int
    basis: RatMatrix

    @classmethod
    def _trusted(cls, ambient_dim: int, rows: List[SparseVec]) -> 'Subspace':
        return cls(ambient_dim, sparse_matrix(rows, ambient_dim))

    @cached_property
    def rows(self) -> List[SparseVec]:
        return matrix_rows(self.basis)

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def is_zero(self) -> bool:
        return self.dim == 0

    def is_full(self) -> bool:
        return self.dim == self.ambient_dim

    @cached_property
    def pivots(self) -> Tuple[int, ...]:
        return tuple(min(r) for r in self.rows)

    @cached_property
    def _key(self) -> Tuple:
        return (self.ambient_dim, tuple(tuple(sorted(r.items())) for r in self.rows))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Subspace):
            return NotImplemented
        return self._key == other._key

    def __hash__(self) -> int:
        return hash(self._key)

    def reduce(self, vec: Mapping[int, Rational]) -> SparseVec:
        out = dict(vec)
        for p, row in zip(self.pivots, self.rows):
            c = vec.get(p)
            if c:
                axpy(out, -c, row)
        return out

    def contains(self, vec: VectorLike) -> bool:
        sv = to_sparse(vec) if not isinstance(vec, dict) else vec
        if sv and max(sv) >= self.ambient_dim:
            raise DimensionMismatchError('Вектор длиннее окружающего пространства')
        return not self.reduce(sv)

    def contains_subspace(self, other: 'Subspace') -> bool:
        _check_ambient(self, other)
        return all(self.contains(r) for r in other.rows)

    def coordinates(self, vec: Mapping[int, Rational]) -> Vector:
        # RREF: координаты равны значениям на опорных столбцах
        if self.reduce(vec):
            raise ContainmentError('Вектор не лежит в подпространстве')
        return tuple(vec.get(p, ZERO_Q) for p in self.pivots)

    def combine(self, coords: Sequence[Rational]) -> SparseVec:
        out: SparseVec = {}
        for c, row in zip(coords, self.rows):
            axpy(out, to_rational(c), row)
        return out

    def vectors(self) -> List[Vector]:
        return [to_dense(r, self.ambient_dim) for r in self.rows]

    def h_closed(self) -> bool:
        if self.ambient_dim % 4:
            return False
        return all(self.contains(left_multiply(q, r)) for r in self.rows for q in IMAGINARY_UNITS)

    def __repr__(self) -> str:
        return f"Subspace(dim={self.dim}, ambient={self.ambient_dim})"


def _check_ambient(a: Subspace, b: Subspace) -> None:
    if a.ambient_dim != b.ambient_dim:
        raise DimensionMismatchError(
            f"Размерности окружающих пространств не совпадают: {a.ambient_dim} и {b.ambient_dim}"
        )


def zero_subspace(n: int) -> Subspace:
    return Subspace._trusted(n, [])


def full_space(n: int) -> Subspace:
    return Subspace._trusted(n, [{i: ONE_Q} for i in range(n)])


def coordinate_subspace(n: int, coords: Iterable[int]) -> Subspace:
    return Subspace._trusted(n, [{i: ONE_Q} for i in sorted(set(coords))])


def span(vectors: Iterable[VectorLike], ambient_dim: int) -> Subspace:
    rows = [to_sparse(v) if not isinstance(v, dict) else v for v in vectors]
    rows = [r for r in rows if r]
    for r in rows:
        if max(r) >= ambient_dim:
            raise DimensionMismatchError('Вектор длиннее окружающего пространства')
    return Subspace._trusted(ambient_dim, _rref_rows(sparse_matrix(rows, ambient_dim)) if rows else [])


def h_span(vectors: Iterable[Mapping[int, Rational]], ambient_dim: int) -> Subspace:
    reducer = RowReducer(ambient_dim)
    for v in vectors:
        reducer.add(v)
        for q in IMAGINARY_UNITS:
            reducer.add(left_multiply(q, v))
    return reducer.subspace()


def subspace_sum(a: Subspace, b: Subspace) -> Subspace:
    _check_ambient(a, b)
    if a.is_zero():
        return b
    if b.is_zero():
        return a
    return span(a.rows + b.rows, a.ambient_dim)


def annihilator(s: Subspace) -> Subspace:
    """{y : <b, y> = 0 для всех b из s}."""
    if s.is_zero():
        return full_space(s.ambient_dim)
    if s.is_full():
        return zero_subspace(s.ambient_dim)
    null = s.basis.nullspace()
    return span(matrix_rows(null), s.ambient_dim)


def intersect(a: Subspace, b: Subspace) -> Subspace:
    _check_ambient(a, b)
    if a.is_zero() or b.is_zero():
        return zero_subspace(a.ambient_dim)
    if a.is_full():
        return b
    if b.is_full():
        return a
    return annihilator(subspace_sum(annihilator(a), annihilator(b)))


def kernel(m: RatMatrix) -> Subspace:
    """Ядро отображения x ↦ x·M (векторы-строки)."""
    n_in, n_out = m.shape
    if n_in == 0:
        return zero_subspace(0)
    if n_out == 0 or is_zero_matrix(m):
        return full_space(n_in)
    null = m.transpose().nullspace()
    return span(matrix_rows(null), n_in)


def image(m: RatMatrix) -> Subspace:
    n_in, n_out = m.shape
    return Subspace._trusted(n_out, _rref_rows(m))


def quotient_basis(a: Subspace, b: Subspace) -> RatMatrix:
    """Канонические представители смежных классов a/b (b ⊆ a)."""
    _check_ambient(a, b)
    if not a.contains_subspace(b):
        raise ContainmentError('quotient_basis: второе подпространство не содержится в первом')
    reduced = [b.reduce(r) for r in a.rows]
    reps = span([r for r in reduced if r], a.ambient_dim)
    return reps.basis


def map_subspace(s: Subspace, m: RatMatrix) -> Subspace:
    if s.ambient_dim != m.shape[0]:
        raise DimensionMismatchError('Отображение и подпространство несовместимы')
    return span([vec_times_matrix(r, m) for r in s.rows], m.shape[1])


def preimage(m: RatMatrix, target: Subspace) -> Subspace:
    """{x : x·M ∈ target}."""
    if target.ambient_dim != m.shape[1]:
        raise DimensionMismatchError('Отображение и подпространство несовместимы')
    ann = annihilator(target)
    if ann.is_zero():
        return full_space(m.shape[0])
    # x·M·Aᵀ = 0
    cols = ann.rows
    composed = [{j: sum((row.get(k, ZERO_Q) * c[k] for k in c), ZERO_Q) for j, c in enumerate(cols)}
                for row in matrix_rows(m)]
    composed = [{j: v for j, v in r.items() if v} for r in composed]
    return kernel(sparse_matrix(composed, len(cols)))
