"""Построители отчётов: вычисление плюс перевод результата в JSON-совместимый вид."""
from __future__ import annotations

from typing import Any, Dict, List, Optional, Sequence

from .ahmod import (
    AHModule,
    AHMorphism,
    IsoFingerprint,
    exactness_example,
    fingerprint,
    is_semistable,
    is_stable,
    random_exact_sequence,
    random_stable,
    virtual_dim,
)
from .constants import DEFAULT_BUDGET, DEFAULT_RANDOM_PROBES, DEFAULT_SEED
from .errors import UsageError
from .exactq import Subspace, format_rational
from .fueter import (
    QUATERNIONIC_FORM,
    delta_split,
    expected_delta_dims,
    expected_kernel_dim,
    forms_agree,
    fueter_kernel,
    invariant_grades,
)
from .halg import (
    AxiomReport,
    IdealData,
    QuotientAlgebra,
    axiom_a_check,
    free_algebra,
    ideal_from_generators,
    quotient_algebra,
)
from .jsonio import dims_to_json
from .poisson import LieAlgebra, hl_from_lie, poisson_on_free
from .qtensor import (
    SequenceReport,
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
    EH_WEIGHT,
    QuadraticSystem,
    eh_algebra,
    eh_family,
    eh_generators,
    lambda_from_params,
)


def fingerprint_json(fp: IsoFingerprint) -> Dict[str, Any]:
    return {
        'quat_rank': fp.quat_rank,
        'uprime_dim': fp.uprime_dim,
        'dagger_dim': fp.dagger_dim,
        'virtual_dim': fp.virtual_dim,
        'sector_dims': [[list(p), d] for p, d in zip(fp.probes, fp.sector_dims)],
    }


def axioms_json(report: AxiomReport) -> List[Dict[str, Any]]:
    return [{'name': c.name, 'passed': c.passed, 'detail': c.detail} for c in report.checks]


def _stability(u: AHModule, seed: int) -> Dict[str, Any]:
    rep = is_stable(u, seed=seed)
    return {'stable': rep.stable, 'semistable': rep.semistable, 'virtual_dim': rep.virtual_dim}


def module_report(u: AHModule, seed: int = DEFAULT_SEED) -> Dict[str, Any]:
    return {
        'dims': list(u.dims()),
        'fingerprint': fingerprint_json(fingerprint(u)),
        **_stability(u, seed),
    }


def tensor_report(u: AHModule, v: AHModule, budget: int = DEFAULT_BUDGET,
                  seed: int = DEFAULT_SEED) -> Dict[str, Any]:
    t = qtensor(u, v, budget)
    out: Dict[str, Any] = {
        'dims': list(t.dims()),
        'ambient': t.ambient_dim,
        'fingerprint': fingerprint_json(fingerprint(t.base)),
        'stable': is_stable(t.base, seed=seed).stable,
    }
    if is_stable(u, seed=seed) and is_semistable(v):
        out['formula'] = list(tensor_dims_formula(u.n, virtual_dim(u), v.n, virtual_dim(v)))
    return out


def power_report(u: AHModule, k: int, alternating: bool = False, budget: int = DEFAULT_BUDGET,
                 seed: int = DEFAULT_SEED) -> Dict[str, Any]:
    power = alt_power(u, k, budget) if alternating else sym_power(u, k, budget)
    out: Dict[str, Any] = {
        'kind': 'alt' if alternating else 'sym',
        'k': k,
        'dims': list(power.dims()),
        'fingerprint': fingerprint_json(fingerprint(power.base)),
    }
    if is_stable(u, seed=seed):
        formula = alt_power_formula if alternating else sym_power_formula
        out['formula'] = list(formula(u.n, virtual_dim(u), k))
    return out


def stability_report(u: AHModule, random_count: int = DEFAULT_RANDOM_PROBES,
                     seed: int = DEFAULT_SEED) -> Dict[str, Any]:
    rep = is_stable(u, random_count=random_count, seed=seed)
    return {
        'stable': rep.stable,
        'semistable': rep.semistable,
        'virtual_dim': rep.virtual_dim,
        'sector_dims': [[list(p), d] for p, d in rep.sector_dims],
        'failures': [[list(p), d] for p, d in rep.failures],
    }


def sequence_json(report: SequenceReport) -> Dict[str, Any]:
    return {
        'ah_exact': report.ah_exact,
        'failures': list(report.failures()),
        'module_dims': list(report.module_dims),
        'positions': [
            {
                'index': p.index,
                'module_exact': p.module_exact,
                'prime_exact': p.prime_exact,
                'image_dim': p.image_dim,
                'kernel_dim': p.kernel_dim,
            }
            for p in report.positions
        ],
    }


def exactness_report(fs: Sequence[AHMorphism], z: AHModule, budget: int = DEFAULT_BUDGET) -> Dict[str, Any]:
    return {
        'sequence': sequence_json(check_sequence(fs)),
        'tensored': sequence_json(check_sequence(tensor_sequence(fs, z, budget))),
    }


def example_exactness_report(budget: int = DEFAULT_BUDGET) -> Dict[str, Any]:
    ex = exactness_example()
    return exactness_report([ex['phi'], ex['psi']], ex['W'], budget)


def random_exactness_report(j: int, r: int, z: AHModule, seed: int = DEFAULT_SEED,
                            budget: int = DEFAULT_BUDGET) -> Dict[str, Any]:
    u = random_stable(j, r, seed)
    w = random_stable(j, r, seed + 1)
    phi, psi = random_exact_sequence(u, w, seed)
    return exactness_report([phi, psi], z, budget)


def free_report(q: AHModule, truncation: int, weight: int = 1, budget: int = DEFAULT_BUDGET,
                seed: int = DEFAULT_SEED, axioms: bool = False) -> Dict[str, Any]:
    alg = free_algebra(q, truncation, weight, budget, seed)
    out: Dict[str, Any] = {'dims': dims_to_json(alg.dims())}
    if is_stable(q, seed=seed):
        out['formula'] = {str(g): list(sym_power_formula(q.n, virtual_dim(q), g // weight))
                          for g in alg.grade_indices}
    if axioms:
        report = axiom_a_check(alg)
        out['axioms'] = axioms_json(report)
        out['passed'] = report.passed
    return out


def _require_eh(family: str) -> None:
    if family != 'eh':
        raise UsageError(f"Поддерживается только семейство 'eh', получено '{family}'")


def eh_expected(truncation: int) -> Dict[str, Dict[str, int]]:
    """l = (2j+1)(j+1), t = 2j+1 для B^{2j}; dim I^{2j} = 2j(j−1)(j+1)."""
    out = {}
    for g in range(0, truncation + 1, EH_WEIGHT):
        j = g // EH_WEIGHT
        l = (2 * j + 1) * (j + 1)
        out[str(g)] = {'quotient_dim': 4 * l, 'quotient_prime_dim': 2 * l + 2 * j + 1,
                       'ideal_dim': 2 * j * (j - 1) * (j + 1)}
    return out


def ideal_json(ideal: IdealData, absorption: bool = False) -> Dict[str, Any]:
    out: Dict[str, Any] = {
        'generator_grade': ideal.generator_grade,
        'dims': {str(g): d for g, d in ideal.dims().items()},
        'prime_dims': {str(g): d for g, d in ideal.prime_dims().items()},
        'recursive_dims': {str(g): d for g, d in ideal.recursive_dims().items()},
        'stationary': ideal.stationary,
    }
    if absorption:
        report = ideal.absorption()
        out['absorption'] = axioms_json(report)
        out['passed'] = report.passed
    return out


def ideal_report(family: str, truncation: int, budget: int = DEFAULT_BUDGET,
                 absorption: bool = False) -> Dict[str, Any]:
    _require_eh(family)
    alg = eh_algebra(truncation, budget)
    ideal = ideal_from_generators(alg, EH_GENERATOR_GRADE, eh_generators(alg))
    return {**ideal_json(ideal, absorption), 'expected': eh_expected(truncation)}


def generated_ideal_report(q: AHModule, truncation: int, grade: int, gens: Subspace, weight: int = 1,
                           budget: int = DEFAULT_BUDGET, seed: int = DEFAULT_SEED,
                           absorption: bool = False) -> Dict[str, Any]:
    """Идеал свободной алгебры F^Q, порождённый подпространством степени grade."""
    alg = free_algebra(q, truncation, weight, budget, seed)
    ideal = ideal_from_generators(alg, grade, gens)
    return {'algebra_dims': dims_to_json(alg.dims()), **ideal_json(ideal, absorption)}


def quotient_report(family: str, truncation: int, budget: int = DEFAULT_BUDGET,
                    seed: int = DEFAULT_SEED, lam: Optional[Sequence[Any]] = None) -> Dict[str, Any]:
    _require_eh(family)
    if lam is not None and any(lam):
        fam = eh_family(lambda_from_params(*lam), truncation, budget)
        quotient = fam.graded
        extra = {'case': fam.case, 'filtered_dims': {str(g): list(d) for g, d in fam.filtered_dims().items()}}
    else:
        alg = eh_algebra(truncation, budget)
        quotient = quotient_algebra(alg, ideal_from_generators(alg, EH_GENERATOR_GRADE, eh_generators(alg)))
        extra = {}
    return {**quotient_json(quotient, seed), 'expected': eh_expected(truncation), **extra}


def quotient_json(quotient: QuotientAlgebra, seed: int = DEFAULT_SEED) -> Dict[str, Any]:
    stability = quotient.stability(seed)
    return {
        'dims': dims_to_json(quotient.dims()),
        'exact': {str(g): qg.exact for g, qg in quotient.grades.items()},
        'stable': {str(g): {'ideal': s[0].stable, 'quotient': s[1].stable} for g, s in stability.items()},
    }


def generated_quotient_report(q: AHModule, truncation: int, grade: int, gens: Subspace, weight: int = 1,
                              budget: int = DEFAULT_BUDGET, seed: int = DEFAULT_SEED) -> Dict[str, Any]:
    alg = free_algebra(q, truncation, weight, budget, seed)
    quotient = quotient_algebra(alg, ideal_from_generators(alg, grade, gens))
    return quotient_json(quotient, seed)


def hl_report(g: LieAlgebra, truncation: int = 3, budget: int = DEFAULT_BUDGET) -> Dict[str, Any]:
    hl = hl_from_lie(g, budget)
    tables = poisson_on_free(hl, truncation)
    hl_checks = hl.check()
    poisson_checks = tables.check()
    return {
        'lie_dim': g.dim,
        'carrier_dims': list(hl.carrier.dims()),
        'bracket_dims': [list(hl.square.dims()), list(hl.target.dims())],
        'hl_axioms': axioms_json(hl_checks),
        'poisson_axioms': axioms_json(poisson_checks),
        'ranks': {f"{k},{l}": tables.rank(k, l) for k, l in sorted(tables.images)},
        'passed': hl_checks.passed and poisson_checks.passed,
    }


def polynomial_json(poly: Dict[Any, Any]) -> List[List[Any]]:
    return [[list(m), format_rational(c)] for m, c in sorted(poly.items())]


def system_json(system: QuadraticSystem) -> Dict[str, Any]:
    return {
        'n_vars': system.n_vars,
        'count': len(system),
        'equations': [polynomial_json(p) for p in system.polynomials()],
    }


def variety_emit_report(lam: Sequence[Any], truncation: int = 4, budget: int = DEFAULT_BUDGET) -> Dict[str, Any]:
    fam = eh_family(lambda_from_params(*lam), truncation, budget)
    return {
        'case': fam.case,
        'lambda': [[format_rational(c) for c in row] for row in fam.lam],
        'system': system_json(fam.system),
    }


def variety_member_report(lam: Sequence[Any], point: Sequence[Any], truncation: int = 4,
                          budget: int = DEFAULT_BUDGET) -> Dict[str, Any]:
    if len(point) != 9:
        raise UsageError(f"Точка задаётся 9 координатами v1, v2, v3, получено {len(point)}")
    fam = eh_family(lambda_from_params(*lam), truncation, budget)
    member = fam.membership(point)
    out: Dict[str, Any] = {'case': fam.case, 'member': member}
    if member:
        out['jacobian_rank'] = fam.jacobian_rank(point)
        out['reconstruction_rank'] = fam.reconstruction_rank(point)
    return out


def fueter_dim_report(k: int, compare_forms: bool = False) -> Dict[str, Any]:
    kernel = fueter_kernel(k)
    out: Dict[str, Any] = {
        'k': k,
        'dim': kernel.dim,
        'expected': expected_kernel_dim(k),
        'fingerprint': fingerprint_json(fingerprint(kernel.module)),
    }
    if compare_forms:
        out['forms_agree'] = forms_agree(k)
        out['quaternionic_dim'] = fueter_kernel(k, QUATERNIONIC_FORM).dim
    return out


def fueter_grades_report(k_max: int) -> Dict[str, Any]:
    grades = invariant_grades(k_max)
    return {
        'dims': {str(k): d for k, d in grades.items()},
        'expected': {str(k): (4 * (k + 1) * (k // 2 + 1) if k % 2 == 0 else 0) for k in grades},
    }


def fueter_delta_report(n: int) -> Dict[str, Any]:
    split = delta_split(n)
    return {
        'n': n,
        'plus': split.plus_dim,
        'minus': split.minus_dim,
        'expected': list(expected_delta_dims(n)),
        'identity_holds': split.identity_holds,
    }
