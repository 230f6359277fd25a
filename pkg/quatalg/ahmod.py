"""AH-модули: кватернионный модуль H^n с вещественным подпространством U′.

Координаты: слот i занимает позиции 4i..4i+3 в порядке (r0, r1, r2, r3).
Функционал α ∈ U^× задаётся вектором коэффициентов a ∈ H^n, α(u) = Σ u_i a_i.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Dict, List, Sequence, Tuple

import numpy as np

from .constants import (
    CANONICAL_PROBES,
    DEFAULT_RANDOM_PROBES,
    DEFAULT_SEED,
    RANDOM_ENTRY_BOUND,
    RETRY_LIMIT,
)
from .errors import DimensionMismatchError, InvariantViolationError, NotAHModuleError, NotHClosedError
from .exactq import (
    IMAGINARY_UNITS,
    ONE_Q,
    ZERO,
    Quaternion,
    RatMatrix,
    RowReducer,
    SparseVec,
    Subspace,
    annihilator,
    coordinate_subspace,
    h_span,
    image,
    intersect,
    kernel,
    left_multiply,
    map_subspace,
    put_slot,
    rat_matrix,
    slot,
    span,
    sparse_matrix,
    to_dense,
    vec_times_matrix,
    zero_subspace,
)

LOGGER = logging.getLogger(__name__)

Probe = Tuple[int, int, int]


@dataclass(frozen=True, eq=False)
class AHModule:
    n: int
    uprime: Subspace
    name: str = field(default='', compare=False)

    def __post_init__(self):
        if self.uprime.ambient_dim != 4 * self.n:
            raise DimensionMismatchError(
                f"U′ должно лежать в R^{4 * self.n}, а лежит в R^{self.uprime.ambient_dim}"
            )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, AHModule):
            return NotImplemented
        return self.n == other.n and self.uprime == other.uprime

    def __hash__(self) -> int:
        return hash((self.n, self.uprime))

    @property
    def real_dim(self) -> int:
        return 4 * self.n

    @cached_property
    def dagger(self) -> Subspace:
        # Re(Σ u_i a_i) = Σ_i (u_i0 a_i0 − u_i1 a_i1 − u_i2 a_i2 − u_i3 a_i3)
        functionals = []
        for row in self.uprime.rows:
            functionals.append({k: (v if k % 4 == 0 else -v) for k, v in row.items()})
        return annihilator(span(functionals, 4 * self.n))

    @property
    def dagger_dim(self) -> int:
        return self.dagger.dim

    @cached_property
    def iota_matrix(self) -> RatMatrix:
        """Матрица ι_U: R^{4n} → H⊗(U†)* ≅ R^{4d}, строка 4i+h: образ e_h в слоте i."""
        d = self.dagger.dim
        rows: List[SparseVec] = [dict() for _ in range(4 * self.n)]
        for a, alpha in enumerate(self.dagger.rows):
            for i in {k // 4 for k in alpha}:
                coeff = slot(alpha, i)
                for h, e_row in enumerate(coeff.right_matrix()):
                    target = rows[4 * i + h]
                    for hh, c in enumerate(e_row):
                        if c:
                            target[4 * a + hh] = c
        return sparse_matrix(rows, 4 * d)

    @cached_property
    def iota_image(self) -> Subspace:
        return image(self.iota_matrix)

    @cached_property
    def fibre_rows(self) -> List[SparseVec]:
        """Уравнения подпространства ι_U(U) внутри H⊗(U†)*."""
        if self.dagger.dim == 0:
            return []
        return annihilator(self.iota_image).rows

    def joint_kernel(self) -> Subspace:
        return kernel(self.iota_matrix) if self.n else zero_subspace(0)

    def dims(self) -> Tuple[int, int, int]:
        return (4 * self.n, self.uprime.dim, self.dagger.dim)

    def iota(self, vec: SparseVec) -> SparseVec:
        return vec_times_matrix(vec, self.iota_matrix)

    def __repr__(self) -> str:
        label = f" {self.name}" if self.name else ''
        return f"AHModule{label}(n={self.n}, dims={self.dims()})"


def make_ah_module(n: int, uprime: Subspace, name: str = '') -> AHModule:
    module = AHModule(n, uprime, name)
    joint = module.joint_kernel()
    if not joint.is_zero():
        witness = to_dense(joint.rows[0], 4 * n)
        raise NotAHModuleError('Не выполнено AH-условие: общее ядро функционалов из U† ненулевое', witness)
    return module


def zero_module() -> AHModule:
    return AHModule(0, zero_subspace(0), '0')


def quaternions_module() -> AHModule:
    """Модуль H с H′ = I."""
    return make_ah_module(1, coordinate_subspace(4, (1, 2, 3)), 'H')


def virtual_dim(u: AHModule) -> int:
    return u.uprime.dim - 2 * u.n


@dataclass(frozen=True)
class Presentation:
    """H-базис вещественного H-замкнутого подпространства W ⊆ R^N.

    Строки ``basis`` идут группами [w_j, i1·w_j, i2·w_j, i3·w_j], так что
    координаты (q_0, ..., q_{m-1}) ∈ H^m соответствуют Σ q_j w_j.
    """
    module: AHModule
    basis: RatMatrix
    blocks: Tuple[Tuple[int, Tuple[int, ...], RatMatrix], ...]

    @property
    def ambient_dim(self) -> int:
        return self.basis.shape[1]

    def embed(self, coords: SparseVec) -> SparseVec:
        return vec_times_matrix(coords, self.basis)

    def coordinates(self, vec: SparseVec) -> SparseVec:
        out: SparseVec = {}
        for offset, pivots, inverse in self.blocks:
            restricted = {t: vec[p] for t, p in enumerate(pivots) if vec.get(p)}
            for k, v in vec_times_matrix(restricted, inverse).items():
                out[offset + k] = v
        return out


def _h_generators(w: Subspace) -> List[SparseVec]:
    reducer = RowReducer(w.ambient_dim)
    gens = []
    for row in w.rows:
        if reducer.contains(row):
            continue
        gens.append(row)
        reducer.add(row)
        for q in IMAGINARY_UNITS:
            reducer.add(left_multiply(q, row))
    return gens


def present_blocks(parts: Sequence[Tuple[Subspace, Subspace]], name: str = '') -> Presentation:
    """Представление прямой суммы H-замкнутых кусков с непересекающимися носителями."""
    ambient = parts[0][0].ambient_dim if parts else 0
    basis_rows: List[SparseVec] = []
    blocks = []
    prime_rows: List[SparseVec] = []
    for w, w_prime in parts:
        if w.is_zero():
            continue
        gens = _h_generators(w)
        local = []
        for g in gens:
            local.append(dict(g))
            local.extend(left_multiply(q, g) for q in IMAGINARY_UNITS)
        if len(local) != w.dim:
            raise NotHClosedError('Подпространство не замкнуто относительно умножения на i1, i2, i3')
        pivots = w.pivots
        square = [{t: r[p] for t, p in enumerate(pivots) if r.get(p)} for r in local]
        inverse = sparse_matrix(square, len(pivots)).to_dense().inv().to_sparse()
        offset = len(basis_rows)
        blocks.append((offset, pivots, inverse))
        basis_rows.extend(local)
        for r in w_prime.rows:
            restricted = {t: r[p] for t, p in enumerate(pivots) if r.get(p)}
            prime_rows.append({offset + k: v for k, v in vec_times_matrix(restricted, inverse).items()})
    m4 = len(basis_rows)
    module = make_ah_module(m4 // 4, span(prime_rows, m4), name)
    LOGGER.debug(f"H-базис: ранг {module.n}, блоков {len(blocks)}")
    return Presentation(module, sparse_matrix(basis_rows, ambient), tuple(blocks))


def present(w: Subspace, w_prime: Subspace, name: str = '') -> Presentation:
    if not w.h_closed():
        raise NotHClosedError('Подпространство не замкнуто относительно умножения на i1, i2, i3')
    if w.is_zero():
        return Presentation(AHModule(0, zero_subspace(0), name), sparse_matrix([], w.ambient_dim), ())
    return present_blocks([(w, w_prime)], name)


def imaginary_part(n: int) -> Subspace:
    return coordinate_subspace(4 * n, (k for k in range(4 * n) if k % 4))


def _as_probe(q) -> Quaternion:
    if isinstance(q, Quaternion):
        return q
    return Quaternion.imaginary(*q)


def x_q(q) -> AHModule:
    q = _as_probe(q)
    if q.is_zero() or not q.is_imaginary():
        raise InvariantViolationError(f"X_q определён только для ненулевого мнимого q, получено {q}")
    # X_q′ = {p : pq + qp = 0}
    m = [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(q.right_matrix(), q.left_matrix())]
    return make_ah_module(1, kernel(rat_matrix(m)), f"X_{q}")


@lru_cache(maxsize=None)
def y_presentation() -> Presentation:
    """Y = {(q1, q2, q3) : q1 i1 + q2 i2 + q3 i3 = 0} ⊂ H³ после выделения H-базиса."""
    rows = []
    for unit in IMAGINARY_UNITS:
        rows.extend(unit.right_matrix())
    w = kernel(rat_matrix(rows))
    w_prime = intersect(w, imaginary_part(3))
    return present(w, w_prime, 'Y')


def y_module() -> AHModule:
    return y_presentation().module


def u_linear() -> AHModule:
    """Линейные q-голоморфные функции Σ q_j x_j на H в координатах (q1, q2, q3).

    q0 = −(q1 i1 + q2 i2 + q3 i3); U′ = все q_j мнимые, т.е. Re q0 = 0.
    """
    real_q0 = span([{1: ONE_Q, 6: ONE_Q, 11: ONE_Q}], 12)
    uprime = intersect(imaginary_part(3), annihilator(real_q0))
    return make_ah_module(3, uprime, 'U')


def direct_sum(a: AHModule, b: AHModule) -> AHModule:
    shift = 4 * a.n
    rows = a.uprime.rows + [{k + shift: v for k, v in r.items()} for r in b.uprime.rows]
    label = f"{a.name}⊕{b.name}" if a.name and b.name else ''
    return make_ah_module(a.n + b.n, span(rows, 4 * (a.n + b.n)), label)


def direct_sum_many(modules: Sequence[AHModule], name: str = '') -> AHModule:
    total = zero_module()
    for m in modules:
        total = direct_sum(total, m)
    return AHModule(total.n, total.uprime, name) if name else total


def submodule_presentation(u: AHModule, w: Subspace) -> Presentation:
    if w.ambient_dim != 4 * u.n:
        raise DimensionMismatchError('Подмодуль должен лежать в окружающем пространстве модуля')
    if not w.h_closed():
        raise NotHClosedError('Подпространство не замкнуто относительно умножения на i1, i2, i3')
    return present(w, intersect(w, u.uprime))


def submodule(u: AHModule, w: Subspace) -> AHModule:
    return submodule_presentation(u, w).module


@dataclass(frozen=True)
class QuotientMap:
    module: AHModule
    projection: RatMatrix
    slots: Tuple[int, ...]


def quotient_map(u: AHModule, w: Subspace) -> QuotientMap:
    """U/W: дополнение из стандартных слотов, проекция вдоль W."""
    if w.ambient_dim != 4 * u.n:
        raise DimensionMismatchError('Подмодуль должен лежать в окружающем пространстве модуля')
    if not w.h_closed():
        raise NotHClosedError('Подпространство не замкнуто относительно умножения на i1, i2, i3')
    reducer = RowReducer(4 * u.n)
    for r in w.rows:
        reducer.add(r)
    slots = []
    for i in range(u.n):
        if reducer.contains({4 * i: ONE_Q}):
            continue
        slots.append(i)
        for h in range(4):
            reducer.add({4 * i + h: ONE_Q})
    complement = [4 * i + h for i in slots for h in range(4)]
    position = {c: t for t, c in enumerate(complement)}
    # RREF подпространства W в порядке столбцов «сначала не-дополнение»
    order = [k for k in range(4 * u.n) if k not in position] + complement
    relabel = {old: new for new, old in enumerate(order)}
    rows = span([{relabel[k]: v for k, v in r.items()} for r in w.rows], 4 * u.n).rows
    by_pivot = {order[min(r)]: {order[k]: v for k, v in r.items()} for r in rows}
    proj_rows: List[SparseVec] = []
    for k in range(4 * u.n):
        if k in position:
            proj_rows.append({position[k]: ONE_Q})
        else:
            row = by_pivot.get(k, {})
            proj_rows.append({position[c]: -v for c, v in row.items() if c in position})
    projection = sparse_matrix(proj_rows, len(complement))
    quotient_prime = map_subspace(u.uprime, projection)
    module = make_ah_module(len(slots), quotient_prime, f"{u.name}/W" if u.name else '')
    return QuotientMap(module, projection, tuple(slots))


def quotient(u: AHModule, w: Subspace) -> AHModule:
    return quotient_map(u, w).module


def sector(u: AHModule, q) -> Subspace:
    q = _as_probe(q)
    rotated = span([left_multiply(q, r) for r in u.uprime.rows], 4 * u.n)
    return intersect(u.uprime, rotated)


def random_probes(count: int, seed: int = DEFAULT_SEED) -> List[Probe]:
    rng = np.random.default_rng(seed)
    out: List[Probe] = []
    while len(out) < count:
        cand = tuple(int(x) for x in rng.integers(-RANDOM_ENTRY_BOUND, RANDOM_ENTRY_BOUND + 1, size=3))
        if any(cand):
            out.append(cand)
    return out


def _check_probes(probes: Sequence[Probe]) -> List[Probe]:
    if not probes:
        raise InvariantViolationError('Список направлений пуст')
    out = []
    for p in probes:
        q = _as_probe(p)
        if q.is_zero() or not q.is_imaginary():
            raise InvariantViolationError(f"Направление {q} должно быть ненулевым мнимым кватернионом")
        out.append(tuple(int(c) if c.denominator == 1 else c for c in (q.r1, q.r2, q.r3)))
    return out


@dataclass(frozen=True)
class SemistabilityReport:
    semistable: bool
    sector_dims: Tuple[Tuple[Probe, int], ...]
    span_dim: int

    def __bool__(self) -> bool:
        return self.semistable


def is_semistable(u: AHModule, probes: Sequence[Probe] = CANONICAL_PROBES) -> SemistabilityReport:
    probes = _check_probes(probes)
    sectors = [(p, sector(u, p)) for p in probes]
    total = h_span([r for _, s in sectors for r in s.rows], 4 * u.n)
    return SemistabilityReport(total.dim == 4 * u.n, tuple((p, s.dim) for p, s in sectors), total.dim)


@dataclass(frozen=True)
class StabilityReport:
    stable: bool
    semistable: bool
    virtual_dim: int
    sector_dims: Tuple[Tuple[Probe, int], ...]

    def __bool__(self) -> bool:
        return self.stable

    @property
    def failures(self) -> Tuple[Tuple[Probe, int], ...]:
        return tuple((p, d) for p, d in self.sector_dims if d != 2 * self.virtual_dim)


def is_stable(u: AHModule, probes: Sequence[Probe] = CANONICAL_PROBES,
              random_count: int = DEFAULT_RANDOM_PROBES, seed: int = DEFAULT_SEED) -> StabilityReport:
    semi = is_semistable(u, probes)
    r = virtual_dim(u)
    dims = list(semi.sector_dims)
    dims.extend((p, sector(u, p).dim) for p in random_probes(random_count, seed))
    stable = semi.semistable and all(d == 2 * r for _, d in dims)
    return StabilityReport(stable, semi.semistable, r, tuple(dims))


def random_subspace(ambient: int, dim: int, rng: np.random.Generator) -> Subspace:
    entries = rng.integers(-RANDOM_ENTRY_BOUND, RANDOM_ENTRY_BOUND + 1, size=(dim, ambient))
    return span([[int(x) for x in row] for row in entries], ambient)


def random_stable(j: int, r: int, seed: int = DEFAULT_SEED, retries: int = RETRY_LIMIT) -> AHModule:
    if not 0 < r <= j:
        raise InvariantViolationError(f"Нужно 0 < r ≤ j, получено j={j}, r={r}")
    rng = np.random.default_rng(seed)
    for attempt in range(retries):
        uprime = random_subspace(4 * j, 2 * j + r, rng)
        if uprime.dim != 2 * j + r:
            continue
        try:
            module = make_ah_module(j, uprime, f"rand({j},{r})")
        except NotAHModuleError:
            continue
        if is_stable(module, seed=seed + attempt):
            LOGGER.debug(f"random_stable({j}, {r}): попытка {attempt + 1}")
            return module
    raise InvariantViolationError(f"random_stable({j}, {r}): превышен лимит попыток {retries}")


@dataclass(frozen=True)
class IsoFingerprint:
    quat_rank: int
    uprime_dim: int
    dagger_dim: int
    virtual_dim: int
    sector_dims: Tuple[int, ...]
    probes: Tuple[Probe, ...] = CANONICAL_PROBES


def fingerprint(u: AHModule, probes: Sequence[Probe] = CANONICAL_PROBES) -> IsoFingerprint:
    probes = tuple(_check_probes(probes))
    return IsoFingerprint(
        u.n, u.uprime.dim, u.dagger.dim, virtual_dim(u), tuple(sector(u, p).dim for p in probes), probes,
    )


def fingerprints_match(a: AHModule, b: AHModule) -> bool:
    return fingerprint(a) == fingerprint(b)


QMatrix = Tuple[Tuple[Quaternion, ...], ...]


def _qmatrix(coeffs: Sequence[Sequence[Quaternion]], n_rows: int, n_cols: int) -> QMatrix:
    rows = tuple(tuple(c if isinstance(c, Quaternion) else Quaternion.from_components(c) for c in row)
                 for row in coeffs)
    if len(rows) != n_rows or any(len(r) != n_cols for r in rows):
        raise DimensionMismatchError(f"Матрица коэффициентов должна иметь размер {n_rows}×{n_cols}")
    return rows


def quaternion_real_matrix(coeffs: QMatrix, n_rows: int, n_cols: int) -> RatMatrix:
    rows: List[SparseVec] = [dict() for _ in range(4 * n_rows)]
    for i, row in enumerate(coeffs):
        for j, c in enumerate(row):
            if c.is_zero():
                continue
            for h, r in enumerate(c.right_matrix()):
                for hh, v in enumerate(r):
                    if v:
                        rows[4 * i + h][4 * j + hh] = v
    return sparse_matrix(rows, 4 * n_cols)


@dataclass(frozen=True, eq=False)
class AHMorphism:
    """φ(u)_j = Σ_i u_i C_ij; коэффициенты справа, H-действие слева."""
    source: AHModule
    target: AHModule
    coeffs: QMatrix

    def __post_init__(self):
        object.__setattr__(self, 'coeffs', _qmatrix(self.coeffs, self.source.n, self.target.n))
        image_prime = map_subspace(self.source.uprime, self.real_matrix)
        if not self.target.uprime.contains_subspace(image_prime):
            raise InvariantViolationError('Морфизм не переводит U′ в V′')

    @classmethod
    def identity(cls, u: AHModule) -> 'AHMorphism':
        coeffs = [[Quaternion(1) if i == j else ZERO for j in range(u.n)] for i in range(u.n)]
        return cls(u, u, coeffs)

    @classmethod
    def from_images(cls, source: AHModule, target: AHModule, images: Sequence[SparseVec]) -> 'AHMorphism':
        """images[i]: образ единичного вектора слота i в координатах target."""
        coeffs = [[slot(img, j) for j in range(target.n)] for img in images]
        return cls(source, target, coeffs)

    @cached_property
    def real_matrix(self) -> RatMatrix:
        return quaternion_real_matrix(self.coeffs, self.source.n, self.target.n)

    def apply(self, vec: SparseVec) -> SparseVec:
        return vec_times_matrix(vec, self.real_matrix)

    def compose(self, other: 'AHMorphism') -> 'AHMorphism':
        """Сначала self, затем other."""
        if self.target != other.source:
            raise DimensionMismatchError('Морфизмы не компонуются: цель первого не равна источнику второго')
        coeffs = []
        for i in range(self.source.n):
            row = []
            for k in range(other.target.n):
                acc = ZERO
                for j in range(self.target.n):
                    acc = acc + self.coeffs[i][j] * other.coeffs[j][k]
                row.append(acc)
            coeffs.append(row)
        return AHMorphism(self.source, other.target, coeffs)

    def kernel(self) -> Subspace:
        if self.source.n == 0:
            return zero_subspace(0)
        return kernel(self.real_matrix)

    def image(self) -> Subspace:
        if self.target.n == 0:
            return zero_subspace(0)
        return image(self.real_matrix)


def exactness_example() -> Dict[str, object]:
    """0 → U → V → W → 0 с U′ = 0, V′ = ⟨(1, i1), (1, i2)⟩, W′ = ⟨i1, i2⟩."""
    u = make_ah_module(1, zero_subspace(4), 'U')
    v_prime = span([{0: ONE_Q, 5: ONE_Q}, {0: ONE_Q, 6: ONE_Q}], 8)
    v = make_ah_module(2, v_prime, 'V')
    w = make_ah_module(1, coordinate_subspace(4, (1, 2)), 'W')
    one = Quaternion(1)
    phi = AHMorphism(u, v, [[one, ZERO]])
    psi = AHMorphism(v, w, [[ZERO], [one]])
    return {'U': u, 'V': v, 'W': w, 'phi': phi, 'psi': psi}


def random_quaternion(rng: np.random.Generator) -> Quaternion:
    return Quaternion(*(int(x) for x in rng.integers(-RANDOM_ENTRY_BOUND, RANDOM_ENTRY_BOUND + 1, size=4)))


def random_exact_sequence(u: AHModule, w: AHModule, seed: int = DEFAULT_SEED) -> Tuple[AHMorphism, AHMorphism]:
    """AH-точная 0 → U → V → W → 0, где V = U ⊕ W, закрученное унипотентной матрицей."""
    rng = np.random.default_rng(seed)
    twist = [[random_quaternion(rng) for _ in range(w.n)] for _ in range(u.n)]
    n = u.n + w.n
    g = [[ZERO] * n for _ in range(n)]
    for i in range(n):
        g[i][i] = Quaternion(1)
    for i in range(u.n):
        for j in range(w.n):
            g[i][u.n + j] = twist[i][j]
    plain = direct_sum(u, w)
    v_prime = map_subspace(plain.uprime, quaternion_real_matrix(tuple(map(tuple, g)), n, n))
    v = make_ah_module(n, v_prime, 'V')
    phi = AHMorphism(u, v, [g[i] for i in range(u.n)])
    psi_coeffs = [[(-twist[i][j]) for j in range(w.n)] for i in range(u.n)]
    psi_coeffs += [[Quaternion(1) if i == j else ZERO for j in range(w.n)] for i in range(w.n)]
    psi = AHMorphism(v, w, psi_coeffs)
    return phi, psi


def vector_from_quaternions(quats: Sequence[Quaternion]) -> SparseVec:
    out: SparseVec = {}
    for i, q in enumerate(quats):
        put_slot(out, i, q)
    return out


def quaternions_from_vector(vec: SparseVec, n: int) -> Tuple[Quaternion, ...]:
    return tuple(slot(vec, i) for i in range(n))
