"""HL-алгебры A_g = g⊗Y и скобка ξ_{k,l} на свободной алгебре F^A.

Индекс A† есть 3a + j: a нумерует базис g, j нумерует базис Y†.
ξ(T)[(c,j), k] = Σ_{a,b} c_ab^c T[(a,j), (b,k)], т.е. ξ = λ⊗id.
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, List, Mapping, Tuple

from .ahmod import AHModule, AHMorphism, direct_sum_many, y_module
from .constants import DEFAULT_BUDGET
from .errors import DimensionMismatchError, InvariantViolationError
from .exactq import ZERO_Q, Rational, SparseVec, span, to_rational
from .halg import AxiomReport
from .layout import Block, TensorLayout, cached_layout, symmetric_layout
from .qtensor import EmbeddedModule, alt_power, embed_layout, flatten_index, qtensor, sym_power, unflatten_index

LOGGER = logging.getLogger(__name__)

Y_DUAL = 3


@dataclass(frozen=True)
class LieAlgebra:
    dim: int
    constants: Mapping[Tuple[int, int, int], Rational] = field(default_factory=dict)
    name: str = ''

    def __post_init__(self):
        clean = {}
        for (i, j, k), v in self.constants.items():
            if not all(0 <= x < self.dim for x in (i, j, k)):
                raise InvariantViolationError(f"Индекс структурной константы вне диапазона: {(i, j, k)}")
            v = to_rational(v)
            if v:
                clean[(i, j, k)] = v
        object.__setattr__(self, 'constants', clean)
        self.validate()

    def c(self, i: int, j: int, k: int) -> Rational:
        return self.constants.get((i, j, k), ZERO_Q)

    def validate(self) -> None:
        m = self.dim
        for i, j, k in itertools.product(range(m), repeat=3):
            if self.c(i, j, k) != -self.c(j, i, k):
                raise InvariantViolationError(f"Нарушена антисимметричность: c_{i}{j}^{k}")
        for i, j, k, n in itertools.product(range(m), repeat=4):
            total = sum(
                (self.c(i, j, l) * self.c(l, k, n) + self.c(j, k, l) * self.c(l, i, n)
                 + self.c(k, i, l) * self.c(l, j, n) for l in range(m)),
                ZERO_Q,
            )
            if total:
                raise InvariantViolationError(f"Нарушено тождество Якоби на ({i}, {j}, {k})")

    def bracket(self, x: List[Rational], y: List[Rational]) -> List[Rational]:
        out = [ZERO_Q] * self.dim
        for (i, j, k), v in self.constants.items():
            out[k] += v * x[i] * y[j]
        return out


def _antisymmetric(dim: int, entries: Mapping[Tuple[int, int, int], int], name: str) -> LieAlgebra:
    constants = {}
    for (i, j, k), v in entries.items():
        constants[(i, j, k)] = v
        constants[(j, i, k)] = -v
    return LieAlgebra(dim, constants, name)


def so3() -> LieAlgebra:
    return _antisymmetric(3, {(0, 1, 2): 1, (1, 2, 0): 1, (2, 0, 1): 1}, 'so(3)')


def solvable2() -> LieAlgebra:
    """[e1, e2] = e2."""
    return _antisymmetric(2, {(0, 1, 1): 1}, 'solv2')


def abelian(m: int) -> LieAlgebra:
    return LieAlgebra(m, {}, f"R^{m}")


@dataclass(eq=False)
class HLAlgebra:
    lie: LieAlgebra
    carrier: AHModule
    budget: int = DEFAULT_BUDGET

    @property
    def dual_dim(self) -> int:
        return Y_DUAL * self.lie.dim

    def bracket(self, vec: SparseVec) -> SparseVec:
        """ξ на H⊗(A†)*⊗(A†)* → H⊗(A†)*⊗(Y†)*."""
        return self.bracket_at(vec, 2, 0)

    def bracket_at(self, vec: SparseVec, arity: int, p: int) -> SparseVec:
        """ξ на сомножителях p, p+1 полного тензора; слот Y† встаёт после p."""
        d = self.dual_dim
        dims_in = [d] * arity
        dims_out = [d] * arity
        dims_out[p + 1] = Y_DUAL
        out: SparseVec = {}
        consts = self.lie.constants
        for key, val in vec.items():
            cell, h = divmod(key, 4)
            idx = unflatten_index(cell, dims_in)
            a, j = divmod(idx[p], Y_DUAL)
            b, k = divmod(idx[p + 1], Y_DUAL)
            for c in range(self.lie.dim):
                coef = consts.get((a, b, c))
                if not coef:
                    continue
                new = list(idx)
                new[p] = Y_DUAL * c + j
                new[p + 1] = k
                target = 4 * flatten_index(new, dims_out) + h
                total = out.get(target, ZERO_Q) + coef * val
                if total:
                    out[target] = total
                else:
                    out.pop(target, None)
        return out

    @cached_property
    def square(self) -> EmbeddedModule:
        return qtensor(self.carrier, self.carrier, self.budget)

    @cached_property
    def target(self) -> EmbeddedModule:
        return qtensor(self.carrier, y_module(), self.budget)

    def bracket_morphism(self) -> AHMorphism:
        images = [self.target.coordinates(self.bracket(w)) for w in self.square.generators()]
        return AHMorphism.from_images(self.square.base, self.target.base, images)

    def antisymmetry(self) -> bool:
        """S²_H A ⊆ Ker ξ."""
        sym = sym_power(self.carrier, 2, self.budget)
        return all(not self.bracket(sym.layout.expand(r)) for r in sym.subspace.rows)

    def jacobi(self) -> bool:
        """Λ³_H A ⊆ Ker((ξ⊗id)∘(id⊗ξ))."""
        alt = alt_power(self.carrier, 3, self.budget)
        for r in alt.subspace.rows:
            inner = self.bracket_at(alt.layout.expand(r), 3, 1)
            outer = self._bracket_mixed(inner)
            if outer:
                return False
        return True

    def _bracket_mixed(self, vec: SparseVec) -> SparseVec:
        # вход H⊗(A†)*⊗(A†)*⊗(Y†)*, ξ на первых двух сомножителях
        d = self.dual_dim
        dims_in = [d, d, Y_DUAL]
        dims_out = [d, Y_DUAL, Y_DUAL]
        out: SparseVec = {}
        for key, val in vec.items():
            cell, h = divmod(key, 4)
            x0, x1, y = unflatten_index(cell, dims_in)
            a, j = divmod(x0, Y_DUAL)
            b, k = divmod(x1, Y_DUAL)
            for c in range(self.lie.dim):
                coef = self.lie.constants.get((a, b, c))
                if coef:
                    target = 4 * flatten_index([Y_DUAL * c + j, k, y], dims_out) + h
                    total = out.get(target, ZERO_Q) + coef * val
                    if total:
                        out[target] = total
                    else:
                        out.pop(target, None)
        return out

    def check(self) -> AxiomReport:
        report = AxiomReport()
        report.add('антисимметричность: S²_H A ⊆ Ker ξ', self.antisymmetry())
        report.add('тождество Якоби на Λ³_H A', self.jacobi())
        return report


def hl_from_lie(g: LieAlgebra, budget: int = DEFAULT_BUDGET) -> HLAlgebra:
    g.validate()
    y = y_module()
    carrier = direct_sum_many([y] * g.dim, f"{g.name}⊗Y" if g.name else '')
    return HLAlgebra(g, carrier, budget)


def _remove(mono: Tuple[int, ...], x: int) -> Tuple[int, ...]:
    i = mono.index(x)
    return mono[:i] + mono[i + 1:]


@dataclass(eq=False)
class PoissonTables:
    hl: HLAlgebra
    truncation: int
    images: Dict[Tuple[int, int], List[SparseVec]] = field(default_factory=dict)
    contained: Dict[Tuple[int, int], bool] = field(default_factory=dict)

    def rank(self, k: int, l: int) -> int:
        if (k, l) not in self.images:
            return 0
        width = self.target_layout(k + l - 1).coord_dim
        return span(self.images[(k, l)], width).dim

    def target_layout(self, degree: int) -> TensorLayout:
        return cached_layout((Block(self.hl.carrier, degree), Block(y_module(), 1)))

    def xi(self, k: int, l: int, vec: SparseVec) -> SparseVec:
        """ξ_{k,l} на многочленах: R_m(z) = Σ c_ab^c z_(c,j) ∂_x(a,j) ∂_x′(b,m) P |_(z,z)."""
        source = symmetric_layout(self.hl.carrier, k, l)
        consts = self.hl.lie.constants
        index: Dict = {}
        out: SparseVec = {}
        for key, val in vec.items():
            cell, h = divmod(key, 4)
            if not 0 <= cell < source.size:
                raise DimensionMismatchError(
                    f"Координата {key} вне пространства S^{k}A⊗S^{l}A размерности {source.coord_dim}")
            m1, m2 = source.monomials[cell]
            if m1 and m2 and not index:
                index = self.target_layout(k + l - 1).index
            for alpha in set(m1):
                a, j = divmod(alpha, Y_DUAL)
                ca = m1.count(alpha)
                rest1 = _remove(m1, alpha)
                for beta in set(m2):
                    b, m = divmod(beta, Y_DUAL)
                    cb = m2.count(beta)
                    rest = rest1 + _remove(m2, beta)
                    for c in range(self.hl.lie.dim):
                        coef = consts.get((a, b, c))
                        if not coef:
                            continue
                        mono = tuple(sorted(rest + (Y_DUAL * c + j,)))
                        t = 4 * index[(mono, (m,))] + h
                        total = out.get(t, ZERO_Q) + coef * ca * cb * val
                        if total:
                            out[t] = total
                        else:
                            out.pop(t, None)
        return out

    def unit_tensor(self, l: int, vec: SparseVec, unit_first: bool = True) -> SparseVec:
        """1⊗a (или a⊗1) в координатах S⁰A⊗S^lA (S^lA⊗S⁰A)."""
        single = symmetric_layout(self.hl.carrier, l)
        pair = symmetric_layout(self.hl.carrier, *((0, l) if unit_first else (l, 0)))
        out: SparseVec = {}
        for key, val in vec.items():
            cell, h = divmod(key, 4)
            (mono,) = single.monomials[cell]
            cells = ((), mono) if unit_first else (mono, ())
            out[4 * pair.index[cells] + h] = val
        return out

    def identity_kills(self) -> bool:
        """ξ(1⊗a) = ξ(a⊗1) = 0."""
        for l in range(1, self.truncation + 1):
            basis = embed_layout(symmetric_layout(self.hl.carrier, l), self.hl.budget).subspace.rows
            for r in basis:
                if self.xi(0, l, self.unit_tensor(l, r)) or self.xi(l, 0, self.unit_tensor(l, r, False)):
                    return False
        return True

    def derivation(self) -> bool:
        """ξ∘(μ⊗id) = 2(μ⊗id)∘(id⊗ξ) на S²_H A⊗_H A."""
        if self.truncation < 3:
            return True
        layout = symmetric_layout(self.hl.carrier, 2, 1)
        target = self.target_layout(2)
        module = embed_layout(layout, self.hl.budget)
        for row in module.subspace.rows:
            lhs = self.xi(2, 1, row)
            tensor_route = self.hl.bracket_at(layout.expand(row), 3, 1)
            rhs = _merge_first_two(tensor_route, self.hl.dual_dim, target)
            if lhs != {k: 2 * v for k, v in rhs.items()}:
                return False
        return True

    def check(self) -> AxiomReport:
        report = AxiomReport()
        report.add('единица: ξ(1⊗a) = 0', self.identity_kills())
        report.add('свойство дифференцирования', self.derivation())
        for (k, l), ok in sorted(self.contained.items()):
            report.add(f"ξ_{k},{l} ⊆ S^{k + l - 1}A⊗_H Y", ok)
        return report


def _merge_first_two(vec: SparseVec, d: int, target: TensorLayout) -> SparseVec:
    out: SparseVec = {}
    dims = [d, d, Y_DUAL]
    for key, val in vec.items():
        cell, h = divmod(key, 4)
        x0, x1, y = unflatten_index(cell, dims)
        t = 4 * target.index[(tuple(sorted((x0, x1))), (y,))] + h
        total = out.get(t, ZERO_Q) + val
        if total:
            out[t] = total
        else:
            out.pop(t, None)
    return out


def poisson_on_free(hl: HLAlgebra, truncation: int) -> PoissonTables:
    tables = PoissonTables(hl, truncation)
    for k in range(1, truncation + 1):
        for l in range(1, truncation + 1 - k):
            layout = symmetric_layout(hl.carrier, k, l)
            domain = embed_layout(layout, hl.budget, what=f"S^{k}A⊗S^{l}A")
            images = [tables.xi(k, l, r) for r in domain.subspace.rows]
            target = embed_layout(tables.target_layout(k + l - 1), hl.budget, what=f"S^{k + l - 1}A⊗Y")
            tables.images[(k, l)] = images
            tables.contained[(k, l)] = all(target.subspace.contains(v) for v in images)
            LOGGER.info(f"ξ_{k},{l}: ранг {tables.rank(k, l)}")
    return tables
