"""Кватернионное тензорное произведение U⊗_H V и производные конструкции.

U⊗_H V = (ι_U(U)⊗(V†)*) ∩ ((U†)*⊗ι_V(V)) внутри H⊗(U†)*⊗(V†)*.
Пересечение считается как решение условий на слои (см. layout.solve),
после чего выделяется H-базис и получается абстрактный AH-модуль.
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from math import comb, factorial
from typing import List, Optional, Sequence, Tuple

from .ahmod import AHModule, AHMorphism, Presentation, present_blocks
from .constants import DEFAULT_BUDGET
from .errors import DimensionMismatchError, IncompatibleError
from .exactq import (
    QQ,
    ZERO,
    RatMatrix,
    SparseVec,
    Subspace,
    full_space,
    intersect,
    map_subspace,
    put_slot,
    slot,
    span,
)
from .layout import Block, TensorLayout, cached_layout, solve

LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class EmbeddedModule:
    """AH-модуль, реализованный подпространством H⊗(F_1†)*⊗...⊗(F_k†)*."""
    layout: TensorLayout
    subspace: Subspace
    prime_subspace: Subspace
    presentation: Presentation

    @property
    def base(self) -> AHModule:
        return self.presentation.module

    @property
    def factors(self) -> Tuple[AHModule, ...]:
        return self.layout.factors

    @property
    def ambient_dim(self) -> int:
        return self.layout.logical_ambient

    def dims(self) -> Tuple[int, int]:
        return (self.subspace.dim, self.prime_subspace.dim)

    def embed(self, coords: SparseVec) -> SparseVec:
        return self.presentation.embed(coords)

    def coordinates(self, vec: SparseVec) -> SparseVec:
        return self.presentation.coordinates(vec)

    def generators(self) -> List[SparseVec]:
        """Векторы w_j H-базиса в координатах раскладки."""
        rows = self.presentation.basis.to_dod()
        return [dict(rows.get(4 * j, {})) for j in range(self.base.n)]

    def expand(self, vec: SparseVec) -> SparseVec:
        return self.layout.expand(vec)

    def contraction_dagger(self) -> Subspace:
        """(U⊗_H V)† как образ λ(U†⊗V†): значения тензора в каждой клетке."""
        m = self.base.n
        gens = self.generators()
        functionals = []
        for cell in range(self.layout.size):
            vec: SparseVec = {}
            for j, w in enumerate(gens):
                put_slot(vec, j, slot(w, cell))
            if vec:
                functionals.append(vec)
        return span(functionals, 4 * m)

    def __repr__(self) -> str:
        return f"EmbeddedModule(base={self.base!r}, layout_dim={self.layout.coord_dim})"


def iota(u: AHModule) -> RatMatrix:
    return u.iota_matrix


def embed_layout(layout: TensorLayout, budget: int = DEFAULT_BUDGET, head: Optional[Subspace] = None,
                 name: str = '', what: str = '') -> EmbeddedModule:
    layout.check_budget(budget, what)
    solved = solve(layout, head)
    presentation = present_blocks(solved.components, name) if solved.components else _empty(layout, name)
    LOGGER.debug(f"{what or 'раскладка'}: размерности {solved.subspace.dim}/{solved.prime_subspace.dim}")
    return EmbeddedModule(layout, solved.subspace, solved.prime_subspace, presentation)


def _empty(layout: TensorLayout, name: str) -> Presentation:
    return present_blocks([(span([], layout.coord_dim), span([], layout.coord_dim))], name)


def _label(*names: str, sep: str = '⊗') -> str:
    return sep.join(names) if all(names) else ''


def qtensor(u: AHModule, v: AHModule, budget: int = DEFAULT_BUDGET) -> EmbeddedModule:
    layout = cached_layout((Block(u, 1), Block(v, 1)))
    return embed_layout(layout, budget, name=_label(u.name, v.name), what='U⊗_H V')


def qtensor_k(u: AHModule, k: int, budget: int = DEFAULT_BUDGET) -> EmbeddedModule:
    """⊗_H^k U сразу в H⊗((U†)*)^{⊗k}; k = 0 даёт H."""
    if k < 0:
        raise DimensionMismatchError(f"Степень должна быть неотрицательной, получено {k}")
    layout = cached_layout((Block(u, 1),) * k)
    return embed_layout(layout, budget, name=_label(*([u.name] * k)) if k else 'H', what=f"⊗^{k}")


def sym_power(u: AHModule, k: int, budget: int = DEFAULT_BUDGET) -> EmbeddedModule:
    if k < 0:
        raise DimensionMismatchError(f"Степень должна быть неотрицательной, получено {k}")
    layout = cached_layout((Block(u, k),))
    return embed_layout(layout, budget, name=f"S^{k}{u.name}" if k else 'H', what=f"S^{k}")


def alt_power(u: AHModule, k: int, budget: int = DEFAULT_BUDGET) -> EmbeddedModule:
    if k < 0:
        raise DimensionMismatchError(f"Степень должна быть неотрицательной, получено {k}")
    layout = cached_layout((Block(u, k),), alternating=True)
    return embed_layout(layout, budget, name=f"Λ^{k}{u.name}" if k else 'H', what=f"Λ^{k}")


def unflatten_index(flat: int, dims: Sequence[int]) -> Tuple[int, ...]:
    idx = []
    for d in reversed(dims):
        flat, r = divmod(flat, d)
        idx.append(r)
    return tuple(reversed(idx))


def flatten_index(idx: Sequence[int], dims: Sequence[int]) -> int:
    flat = 0
    for i, d in zip(idx, dims):
        flat = flat * d + i
    return flat


def permute_factors(vec: SparseVec, dims: Sequence[int], perm: Sequence[int]) -> SparseVec:
    """(πT)[a_{π(0)}, ..., a_{π(k−1)}] = T[a_0, ..., a_{k−1}]."""
    new_dims = [dims[p] for p in perm]
    out: SparseVec = {}
    for key, val in vec.items():
        cell, h = divmod(key, 4)
        idx = unflatten_index(cell, dims)
        out[4 * flatten_index([idx[p] for p in perm], new_dims) + h] = val
    return out


def sigma_h(vec: SparseVec, d: int, k: int) -> SparseVec:
    """Усреднение по S_k в координатах полного тензора H⊗((U†)*)^{⊗k}."""
    dims = [d] * k
    weight = QQ(1, factorial(k))
    out: SparseVec = {}
    for perm in itertools.permutations(range(k)):
        for key, val in permute_factors(vec, dims, perm).items():
            total = out.get(key, 0) + weight * val
            if total:
                out[key] = total
            else:
                out.pop(key, None)
    return out


def dagger_pullback(f: AHMorphism) -> List[Tuple]:
    """Строка c: координаты φ^×(γ_c) в базисе U† для базиса γ_c пространства W†."""
    source, target = f.source, f.target
    rows = []
    for gamma in target.dagger.rows:
        pulled: SparseVec = {}
        for i in range(source.n):
            acc = ZERO
            for j in range(target.n):
                acc = acc + f.coeffs[i][j] * slot(gamma, j)
            put_slot(pulled, i, acc)
        rows.append(source.dagger.coordinates(pulled))
    return rows


def tensor_morphism(f: AHMorphism, g: AHMorphism, budget: int = DEFAULT_BUDGET,
                    source: Optional[EmbeddedModule] = None,
                    target: Optional[EmbeddedModule] = None) -> Tuple[AHMorphism, EmbeddedModule, EmbeddedModule]:
    """id⊗(φ^×)*⊗(ψ^×)*: U⊗_H V → W⊗_H X в базисах абстрактных модулей."""
    source = source or qtensor(f.source, g.source, budget)
    target = target or qtensor(f.target, g.target, budget)
    mf = dagger_pullback(f)
    mg = dagger_pullback(g)
    dv = g.source.dagger.dim
    dx = g.target.dagger.dim
    images = []
    for w in source.generators():
        image: SparseVec = {}
        for key, val in w.items():
            cell, h = divmod(key, 4)
            a, b = divmod(cell, dv)
            for c, row_f in enumerate(mf):
                cf = row_f[a]
                if not cf:
                    continue
                for e, row_g in enumerate(mg):
                    cg = row_g[b]
                    if cg:
                        k = 4 * (c * dx + e) + h
                        total = image.get(k, 0) + cf * cg * val
                        if total:
                            image[k] = total
                        else:
                            image.pop(k, None)
        images.append(target.coordinates(image))
    return AHMorphism.from_images(source.base, target.base, images), source, target


def elem_tensor(u_vec: SparseVec, v_vec: SparseVec, u: AHModule, v: AHModule) -> SparseVec:
    """u⊗_H v: (u⊗_H v)·(α⊗β) = α(u)β(v), если все α(u) и β(v) коммутируют."""
    alphas = [_evaluate(alpha, u_vec, u.n) for alpha in u.dagger.rows]
    betas = [_evaluate(beta, v_vec, v.n) for beta in v.dagger.rows]
    for a, p in enumerate(alphas):
        for b, q in enumerate(betas):
            if p * q != q * p:
                raise IncompatibleError(f"α_{a}(u) = {p} и β_{b}(v) = {q} не коммутируют")
    out: SparseVec = {}
    dv = len(betas)
    for a, p in enumerate(alphas):
        for b, q in enumerate(betas):
            put_slot(out, a * dv + b, p * q)
    return out


def _evaluate(alpha: SparseVec, vec: SparseVec, n: int):
    acc = ZERO
    for i in range(n):
        acc = acc + slot(vec, i) * slot(alpha, i)
    return acc


@dataclass(frozen=True)
class PositionReport:
    index: int
    module_exact: bool
    prime_exact: bool
    image_dim: int
    kernel_dim: int
    image_prime_dim: int
    kernel_prime_dim: int

    @property
    def ah_exact(self) -> bool:
        return self.module_exact and self.prime_exact


@dataclass(frozen=True)
class SequenceReport:
    positions: Tuple[PositionReport, ...]
    module_dims: Tuple[int, ...]

    @property
    def ah_exact(self) -> bool:
        return all(p.ah_exact for p in self.positions)

    def failures(self) -> Tuple[int, ...]:
        return tuple(p.index for p in self.positions if not p.ah_exact)


def check_sequence(fs: Sequence[AHMorphism]) -> SequenceReport:
    """Точность 0 → M_0 → M_1 → ... → M_k → 0 в каждом члене M_p."""
    if not fs:
        raise DimensionMismatchError('Последовательность должна содержать хотя бы один морфизм')
    for i, (f, g) in enumerate(zip(fs, fs[1:])):
        if f.target != g.source:
            raise DimensionMismatchError(f"Морфизмы {i} и {i + 1} не компонуются")
    modules = [fs[0].source] + [f.target for f in fs]
    positions = []
    for p, m in enumerate(modules):
        ambient = 4 * m.n
        if p == 0:
            img = span([], ambient)
            img_prime = img
        else:
            f = fs[p - 1]
            img = f.image()
            img_prime = map_subspace(f.source.uprime, f.real_matrix) if f.source.n else span([], ambient)
        if p == len(fs):
            ker = full_space(ambient)
        else:
            ker = fs[p].kernel()
        ker_prime = intersect(ker, m.uprime)
        positions.append(PositionReport(
            p, img == ker, img_prime == ker_prime, img.dim, ker.dim, img_prime.dim, ker_prime.dim,
        ))
    LOGGER.debug(f"Проверка точности: {[int(pos.ah_exact) for pos in positions]}")
    return SequenceReport(tuple(positions), tuple(4 * m.n for m in modules))


def tensor_sequence(fs: Sequence[AHMorphism], z: AHModule,
                    budget: int = DEFAULT_BUDGET) -> List[AHMorphism]:
    """(−)⊗_H Z, применённое к каждому морфизму последовательности."""
    identity = AHMorphism.identity(z)
    out = []
    cached: Optional[EmbeddedModule] = None
    for f in fs:
        morphism, _, target = tensor_morphism(f, identity, budget, source=cached)
        out.append(morphism)
        cached = target
    return out


def tensor_dims_formula(j: int, r: int, k: int, s: int) -> Tuple[int, int]:
    """U стабилен (dim 4j, вирт. r), V полустабилен (4k, s): l = js + rk − rs, t = rs."""
    l = j * s + r * k - r * s
    return (4 * l, 2 * l + r * s)


def sym_power_formula(j: int, r: int, n: int) -> Tuple[int, int]:
    k = (j - r) * comb(r + n - 1, n - 1) + comb(r + n - 1, n) if n else 1
    return (4 * k, 2 * k + comb(r + n - 1, n))


def alt_power_formula(j: int, r: int, n: int) -> Tuple[int, int]:
    l = (j - r) * comb(r - 1, n - 1) + comb(r, n) if n else 1
    return (4 * l, 2 * l + comb(r, n))
