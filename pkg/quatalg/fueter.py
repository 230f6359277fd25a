"""Оператор Дирака–Фютера на однородных многочленах H → H.

Координаты PolySpace: 4·m + h, где m есть номер монома x0^a x1^b x2^c x3^d
(мономы упорядочены лексикографически по кортежу степеней), h есть компонента
кватернионного коэффициента. H действует умножением коэффициентов слева.
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from functools import cached_property, lru_cache
from math import comb
from typing import Dict, List, Tuple

from .ahmod import AHModule, Presentation, fingerprints_match, imaginary_part, present
from .errors import DimensionMismatchError, UsageError
from .exactq import (
    BASIS,
    IMAGINARY_UNITS,
    ONE,
    QQ,
    ZERO_Q,
    Quaternion,
    RatMatrix,
    SparseVec,
    Subspace,
    full_space,
    intersect,
    is_zero_matrix,
    kernel,
    left_multiply,
    put_slot,
    slot,
    sparse_matrix,
    vec_times_matrix,
)
from .qtensor import sym_power

LOGGER = logging.getLogger(__name__)

Exponent = Tuple[int, int, int, int]

# I_j(dx_i) = sign·dx_target, I_0 = id
COMPLEX_STRUCTURES: Tuple[Tuple[Tuple[int, int], ...], ...] = (
    ((0, 1), (1, 1), (2, 1), (3, 1)),
    ((1, 1), (0, -1), (3, 1), (2, -1)),
    ((2, 1), (3, -1), (0, -1), (1, 1)),
    ((3, 1), (2, 1), (1, -1), (0, -1)),
)

# голоморфные координаты относительно I_axis: пары (x_a + x_b i_axis)
HOLOMORPHIC_PAIRS = {
    1: ((0, 1), (2, 3)),
    2: ((0, 2), (3, 1)),
    3: ((0, 3), (1, 2)),
}

REAL_FORM = 'real'
QUATERNIONIC_FORM = 'quaternionic'


@dataclass(frozen=True)
class PolySpace:
    degree: int

    @cached_property
    def monomials(self) -> List[Exponent]:
        if self.degree < 0:
            return []
        return sorted(e for e in itertools.product(range(self.degree + 1), repeat=4) if sum(e) == self.degree)

    @cached_property
    def index(self) -> Dict[Exponent, int]:
        return {e: i for i, e in enumerate(self.monomials)}

    @property
    def size(self) -> int:
        return len(self.monomials)

    @property
    def dim(self) -> int:
        return 4 * comb(self.degree + 3, 3) if self.degree >= 0 else 0

    def vector(self, poly: Dict[Exponent, Quaternion]) -> SparseVec:
        out: SparseVec = {}
        for e, q in poly.items():
            if sum(e) != self.degree:
                raise DimensionMismatchError(f"Моном {e} не имеет степени {self.degree}")
            put_slot(out, self.index[e], q)
        return out

    def polynomial(self, vec: SparseVec) -> Dict[Exponent, Quaternion]:
        return {self.monomials[m]: slot(vec, m) for m in sorted({k // 4 for k in vec})}


@lru_cache(maxsize=None)
def poly_space(k: int) -> PolySpace:
    return PolySpace(k)


def _lowered(e: Exponent, i: int) -> Exponent:
    return e[:i] + (e[i] - 1,) + e[i + 1:]


class FueterOperator:
    """D в одной из двух форм.

    real: da0 + Σ I_j(da_j), вещественная 1-форма; координата 4·m′ + i.
    quaternionic: da − Σ I_j(da) i_j, H-значная 1-форма; координата 16·m′ + 4·i + h.
    """

    def __init__(self, degree: int, form: str = REAL_FORM):
        if degree < 0:
            raise DimensionMismatchError(f"Степень должна быть неотрицательной, получено {degree}")
        if form not in (REAL_FORM, QUATERNIONIC_FORM):
            raise UsageError(f"Неизвестная форма оператора: {form}")
        self.degree = degree
        self.form = form
        self.source = poly_space(degree)
        self.target = poly_space(degree - 1)

    @property
    def width(self) -> int:
        per_mono = 4 if self.form == REAL_FORM else 16
        return per_mono * self.target.size

    @cached_property
    def matrix(self) -> RatMatrix:
        rows = []
        for e in self.source.monomials:
            for h in range(4):
                rows.append(self._row(e, h))
        return sparse_matrix(rows, self.width)

    def _row(self, e: Exponent, h: int) -> SparseVec:
        row: SparseVec = {}

        def add(k: int, v) -> None:
            total = row.get(k, ZERO_Q) + v
            if total:
                row[k] = total
            else:
                row.pop(k, None)

        for i in range(4):
            if not e[i]:
                continue
            m = self.target.index[_lowered(e, i)]
            if self.form == REAL_FORM:
                t, s = COMPLEX_STRUCTURES[h][i]
                add(4 * m + t, QQ(s * e[i]))
                continue
            add(16 * m + 4 * i + h, QQ(e[i]))
            for j, unit in enumerate(IMAGINARY_UNITS, start=1):
                t, s = COMPLEX_STRUCTURES[j][i]
                coef = BASIS[h] * unit
                for hh, c in enumerate(coef.components()):
                    if c:
                        add(16 * m + 4 * t + hh, -s * e[i] * c)
        return row

    def apply(self, vec: SparseVec) -> SparseVec:
        return vec_times_matrix(vec, self.matrix)

    def kernel(self) -> Subspace:
        if self.degree == 0:
            return full_space(4)
        return kernel(self.matrix)


@dataclass(frozen=True)
class FueterKernel:
    space: PolySpace
    subspace: Subspace
    presentation: Presentation

    @property
    def module(self) -> AHModule:
        return self.presentation.module

    @property
    def dim(self) -> int:
        return self.subspace.dim


@lru_cache(maxsize=None)
def fueter_kernel(k: int, form: str = REAL_FORM) -> FueterKernel:
    w = FueterOperator(k, form).kernel()
    presentation = present(w, intersect(w, imaginary_part(poly_space(k).size)), f"U^({k})")
    LOGGER.info(f"Ядро D в степени {k}: размерность {w.dim}")
    return FueterKernel(poly_space(k), w, presentation)


def forms_agree(k: int) -> bool:
    return FueterOperator(k, REAL_FORM).kernel() == FueterOperator(k, QUATERNIONIC_FORM).kernel()


def matches_sym_power(k: int, generator: AHModule) -> bool:
    """U^(k) ≅ S_H^k U по отпечатку."""
    return fingerprints_match(fueter_kernel(k).module, sym_power(generator, k).base)


def equivariance_check(k: int, q: Quaternion) -> bool:
    """D(q·a) = q·D(a) для H-значной формы на всём базисе PolySpace."""
    op = FueterOperator(k, QUATERNIONIC_FORM)
    for key in range(op.source.dim):
        e = {key: QQ(1)}
        if op.apply(left_multiply(q, e)) != left_multiply(q, op.apply(e)):
            return False
    return True


def _negation_fixed(k: int) -> Subspace:
    # a(−x) = (−1)^k a(x)
    space = poly_space(k)
    shift = (-1) ** k - 1
    return kernel(sparse_matrix([{i: shift} if shift else {} for i in range(space.dim)], space.dim))


def invariant_grades(k_max: int) -> Dict[int, int]:
    """Размерности ядра D, неподвижные относительно q ↦ −q."""
    return {k: intersect(fueter_kernel(k).subspace, _negation_fixed(k)).dim for k in range(k_max + 1)}


def _poly_mul(p: Dict[Exponent, Quaternion], q: Dict[Exponent, Quaternion]) -> Dict[Exponent, Quaternion]:
    out: Dict[Exponent, Quaternion] = {}
    for e1, a in p.items():
        for e2, b in q.items():
            e = tuple(x + y for x, y in zip(e1, e2))
            total = out.get(e, Quaternion()) + a * b
            if total.is_zero():
                out.pop(e, None)
            else:
                out[e] = total
    return out


def _unit_exponent(i: int) -> Exponent:
    return tuple(1 if j == i else 0 for j in range(4))


def holomorphic_basis(k: int, axis: int) -> List[SparseVec]:
    """w1^a w2^(k−a), где w1, w2 суть I_axis-голоморфные координаты."""
    if axis not in HOLOMORPHIC_PAIRS:
        raise UsageError(f"Ось должна быть 1, 2 или 3, получено {axis}")
    unit = IMAGINARY_UNITS[axis - 1]
    coords = [{_unit_exponent(a): ONE, _unit_exponent(b): unit} for a, b in HOLOMORPHIC_PAIRS[axis]]
    space = poly_space(k)
    basis = []
    for a in range(k + 1):
        poly: Dict[Exponent, Quaternion] = {(0, 0, 0, 0): ONE}
        for factor in [coords[0]] * a + [coords[1]] * (k - a):
            poly = _poly_mul(poly, factor)
        basis.append(space.vector(poly))
    return basis


@dataclass(frozen=True)
class DeltaSplit:
    n: int
    plus_dim: int
    minus_dim: int
    identity_holds: bool


def _two_forms(n: int) -> List[Tuple[int, int]]:
    return list(itertools.combinations(range(4 * n), 2))


def delta_matrix(n: int) -> RatMatrix:
    """δ = Σ I_j⊗I_j на Λ²(R^{4n})*, строка p: образ dx_a∧dx_b."""
    if n < 1:
        raise DimensionMismatchError(f"Кватернионная размерность должна быть ≥ 1, получено {n}")
    pairs = _two_forms(n)
    index = {p: i for i, p in enumerate(pairs)}
    rows = []
    for a, b in pairs:
        row: SparseVec = {}
        for structure in COMPLEX_STRUCTURES[1:]:
            ta, sa = structure[a % 4]
            tb, sb = structure[b % 4]
            ta += 4 * (a // 4)
            tb += 4 * (b // 4)
            sign = sa * sb
            if ta > tb:
                ta, tb, sign = tb, ta, -sign
            k = index[(ta, tb)]
            total = row.get(k, ZERO_Q) + sign
            if total:
                row[k] = total
            else:
                row.pop(k, None)
        rows.append(row)
    return sparse_matrix(rows, len(pairs))


def _scalar(size: int, c: int) -> RatMatrix:
    return sparse_matrix([{i: c} for i in range(size)], size)


def delta_split(n: int) -> DeltaSplit:
    delta = delta_matrix(n)
    size = delta.shape[0]
    identity = _scalar(size, 1)
    three = _scalar(size, 3)
    residual = delta * delta - delta - delta - three
    holds = is_zero_matrix(residual)
    plus = kernel(delta - three).dim
    minus = kernel(delta + identity).dim
    LOGGER.info(f"δ на Λ²(R^{4 * n}): Λ₊ = {plus}, Λ₋ = {minus}")
    return DeltaSplit(n, plus, minus, holds)


def expected_kernel_dim(k: int) -> int:
    return 2 * (k + 1) * (k + 2)


def expected_delta_dims(n: int) -> Tuple[int, int]:
    return (2 * n * n + n, 6 * n * n - 3 * n)
