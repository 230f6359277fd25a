"""Приёмочная батарея: точные проверки размерностей, точности и аксиом."""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from typing import Callable, List, Tuple

import numpy as np

from .ahmod import (
    direct_sum,
    exactness_example,
    fingerprints_match,
    is_semistable,
    is_stable,
    quaternions_module,
    random_exact_sequence,
    random_stable,
    u_linear,
    virtual_dim,
    x_q,
    y_module,
)
from .constants import DEFAULT_BUDGET, DEFAULT_SEED
from .exactq import QQ, Quaternion
from .fueter import expected_kernel_dim, fueter_kernel, invariant_grades, matches_sym_power
from .halg import axiom_a_check, free_algebra, ideal_from_generators, quotient_algebra
from .poisson import hl_from_lie, poisson_on_free, so3, solvable2
from .qtensor import (
    alt_power,
    alt_power_formula,
    check_sequence,
    qtensor,
    sym_power,
    sym_power_formula,
    tensor_dims_formula,
    tensor_sequence,
)
from .variety import (
    EH_GENERATOR_GRADE,
    eh_algebra,
    eh_chart,
    eh_family,
    eh_generators,
    emit_equations,
    frame_equations,
    lambda_from_params,
)

LOGGER = logging.getLogger(__name__)

EH_CHECK_PARAMS = ((0, 0, 0, 0, 0), (QQ(-11, 3), QQ(-2, 3), 0, 0, 0), (QQ(2, 3), QQ(-1, 3), 1, 0, 0))


@dataclass(frozen=True)
class SuiteCheck:
    name: str
    passed: bool
    detail: str = ''
    seconds: float = 0.0


@dataclass
class SuiteResult:
    checks: List[SuiteCheck] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


def _random_pair(rng: np.random.Generator) -> Tuple[int, int]:
    j = int(rng.integers(1, 4))
    r = int(rng.integers(1, min(j, 2) + 1))
    return j, r


def dimension_theorem(count: int, seed: int, budget: int) -> Tuple[bool, str]:
    """U стабилен, V стабилен (чётные экземпляры) или полустабилен как V_1 ⊕ V_2 (нечётные)."""
    rng = np.random.default_rng(seed)
    bad = []
    for i in range(count):
        j, r = _random_pair(rng)
        k, s = _random_pair(rng)
        u = random_stable(j, r, seed + 3 * i)
        v = random_stable(k, s, seed + 3 * i + 1)
        if i % 2:
            v = direct_sum(v, random_stable(*_random_pair(rng), seed + 3 * i + 2))
            if not is_semistable(v):
                bad.append(f"V_1 ⊕ V_2 не полустабилен, экземпляр {i}")
                continue
        k, s = v.n, virtual_dim(v)
        got = qtensor(u, v, budget).dims()
        if got != tensor_dims_formula(j, r, k, s):
            bad.append(f"({j},{r})⊗({k},{s}): {got}")
    return not bad, f"пар: {count}, расхождений: {len(bad)} {bad[:3]}"


def binomial_powers(seed: int, budget: int, max_n: int = 3) -> Tuple[bool, str]:
    bad = []
    cases = [(j, r) for j in range(1, 4) for r in range(1, min(j, 2) + 1)]
    for idx, (j, r) in enumerate(cases):
        u = random_stable(j, r, seed + idx)
        for n in range(max_n + 1):
            if sym_power(u, n, budget).dims() != sym_power_formula(j, r, n):
                bad.append(f"S^{n} ({j},{r})")
            if alt_power(u, n, budget).dims() != alt_power_formula(j, r, n):
                bad.append(f"Λ^{n} ({j},{r})")
    return not bad, f"расхождения: {bad}" if bad else f"модулей: {len(cases)}"


def canonical_modules(budget: int) -> Tuple[bool, str]:
    y = y_module()
    u = u_linear()
    checks = {
        'Y dims': y.dims() == (8, 5, 3),
        'Y stable': is_stable(y).stable,
        'Y⊗Y': qtensor(y, y, budget).dims() == (12, 7),
        'Λ²Y = 0': alt_power(y, 2, budget).subspace.is_zero(),
        'U dims': u.dims() == (12, 8, 4),
        'U stable': is_stable(u).stable,
        'Λ²U ≅ Y': fingerprints_match(alt_power(u, 2, budget).base, y),
    }
    for k in range(5):
        checks[f"S^{k}U"] = sym_power(u, k, budget).subspace.dim == expected_kernel_dim(k)
    failed = [name for name, ok in checks.items() if not ok]
    return not failed, f"не прошли: {failed}" if failed else 'все канонические модули'


def exactness(count: int, seed: int, budget: int) -> Tuple[bool, str]:
    ex = exactness_example()
    fs = [ex['phi'], ex['psi']]
    tensored = check_sequence(tensor_sequence(fs, ex['W'], budget))
    problems = []
    if not check_sequence(fs).ah_exact:
        problems.append('пример не точен')
    if tensored.module_dims != (0, 0, 4) or tensored.failures() != (2,):
        problems.append(f"пример после ⊗Z: {tensored.module_dims}, сбои {tensored.failures()}")
    rng = np.random.default_rng(seed)
    for i in range(count):
        j, r = _random_pair(rng)
        k, s = _random_pair(rng)
        u = random_stable(j, r, seed + 3 * i)
        w = random_stable(k, s, seed + 3 * i + 1)
        seq = list(random_exact_sequence(u, w, seed + i))
        direction = Quaternion(0, *(int(c) for c in rng.integers(-2, 3, size=3)))
        z = x_q(direction) if not direction.is_zero() else quaternions_module()
        left = check_sequence(tensor_sequence(seq, z, budget))
        if not all(p.ah_exact for p in left.positions[:2]):
            problems.append(f"левая точность, экземпляр {i}")
        z2 = random_stable(*_random_pair(rng), seed + 3 * i + 2)
        if not check_sequence(tensor_sequence(seq, z2, budget)).ah_exact:
            problems.append(f"правая точность, экземпляр {i}")
    return not problems, '; '.join(problems) or f"экземпляров: {count}"


def fueter_bridge(max_k: int = 5, bridge_k: int = 3) -> Tuple[bool, str]:
    dims = [fueter_kernel(k).dim for k in range(max_k + 1)]
    expected = [expected_kernel_dim(k) for k in range(max_k + 1)]
    bridge = all(matches_sym_power(k, u_linear()) for k in range(bridge_k + 1))
    return dims == expected and bridge, f"dims {dims}, мост {bridge}"


def eh_battery(truncation: int, budget: int) -> Tuple[bool, str]:
    alg = eh_algebra(truncation, budget)
    gens = eh_generators(alg)
    ideal = ideal_from_generators(alg, EH_GENERATOR_GRADE, gens)
    quotient = quotient_algebra(alg, ideal)
    problems = []
    for g in alg.grade_indices:
        j = g // 2
        l = (2 * j + 1) * (j + 1)
        if quotient.dims()[g] != (4 * l, 2 * l + 2 * j + 1):
            problems.append(f"B^{g} = {quotient.dims()[g]}")
        if ideal.subspace(g).dim != 2 * j * (j - 1) * (j + 1):
            problems.append(f"I^{g} = {ideal.subspace(g).dim}")
    flat = emit_equations(quotient, eh_chart())
    if not flat.equivalent(frame_equations(lambda_from_params(0, 0, 0, 0, 0))):
        problems.append('уравнения λ = 0 не совпадают с условием на грамиан')
    for params in EH_CHECK_PARAMS:
        lam = lambda_from_params(*params)
        if not eh_family(lam, 4, budget).system.equivalent(frame_equations(lam)):
            problems.append(f"уравнения при λ = {params}")
    grades = invariant_grades(4)
    for k in (0, 2, 4):
        if k <= truncation and grades[k] != quotient.dims()[k][0]:
            problems.append(f"Z/2-инвариантная степень {k}")
    return not problems, '; '.join(problems) or f"степени до {truncation}"


def hp_axioms(truncation: int, budget: int) -> Tuple[bool, str]:
    failed = []
    for g in (so3(), solvable2()):
        hl = hl_from_lie(g, budget)
        report = hl.check()
        report.checks.extend(poisson_on_free(hl, truncation).check().checks)
        failed.extend(f"{g.name}: {c.name}" for c in report.violations())
    return not failed, f"нарушения: {failed}" if failed else 'so(3), solv2'


def axiom_a(budget: int) -> Tuple[bool, str]:
    failed = []
    for q, k in ((y_module(), 4), (u_linear(), 3)):
        report = axiom_a_check(free_algebra(q, k, budget=budget))
        failed.extend(f"F^{q.name}: {c.name}" for c in report.violations())
    return not failed, f"нарушения: {failed}" if failed else 'F^Y до 4, F^U до 3'


def run_suite(seed: int = DEFAULT_SEED, budget: int = DEFAULT_BUDGET, quick: bool = False) -> SuiteResult:
    """quick сокращает случайные выборки и пропускает степень 8 и усечение K = 3."""
    battery: List[Tuple[str, Callable[[], Tuple[bool, str]]]] = [
        ('теорема о размерности', lambda: dimension_theorem(10 if quick else 50, seed, budget)),
        ('биномиальные формулы', lambda: binomial_powers(seed, budget, 2 if quick else 3)),
        ('канонические модули', lambda: canonical_modules(budget)),
        ('точность', lambda: exactness(5 if quick else 20, seed, budget)),
        ('мост Фютера', lambda: fueter_bridge(3 if quick else 5, 2 if quick else 3)),
        ('Эгучи–Хансон', lambda: eh_battery(4 if quick else 8, budget)),
        ('аксиомы скобки', lambda: hp_axioms(2 if quick else 3, budget)),
        ('аксиомы алгебры', lambda: axiom_a(budget)),
    ]
    result = SuiteResult()
    for name, check in battery:
        start = time.perf_counter()
        passed, detail = check()
        elapsed = time.perf_counter() - start
        result.checks.append(SuiteCheck(name, passed, detail, elapsed))
        LOGGER.info(f"{name}: {'ok' if passed else 'FAIL'} ({elapsed:.1f} с)")
    return result
