import argparse
import logging
import sys
import time
from typing import Any, Dict, List, Optional, Sequence

from . import api
from .constants import DEFAULT_BUDGET, DEFAULT_RANDOM_PROBES, DEFAULT_SEED
from .errors import BudgetExceededError, QuatAlgError, UsageError, check_label, error_label
from .jsonio import dumps, parse_numbers, resolve_generators, resolve_lie, resolve_module
from .suite import run_suite

try:
    from colorama import just_fix_windows_console
except ImportError:  # pragma: no cover - fallback for environments without colorama
    def just_fix_windows_console():
        return None

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_BUDGET = 3
EXIT_ERROR = 4


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(message)


def _common() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--seed', type=int, default=DEFAULT_SEED, help='Зерно для всех случайных проверок.')
    common.add_argument('--budget', type=int, default=DEFAULT_BUDGET,
                        help='Предел вещественной размерности окружающего пространства.')
    common.add_argument('-v', '--verbose', action='count', default=0, help='Журнал на stderr (-vv: отладка).')
    common.add_argument('--timing', action='store_true', help='Добавить время выполнения в отчёт.')
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    ap = _Parser(description='quatalg — кватернионная алгебра AH-модулей и H-алгебр.')
    sub = ap.add_subparsers(dest='command', parser_class=_Parser)
    sub.required = True

    p = sub.add_parser('module', parents=[common], help='Размерности, отпечаток и стабильность модуля.')
    p.add_argument('module', help='h, y, u, xq:a,b,c или путь к JSON.')

    p = sub.add_parser('tensor', parents=[common], help='U⊗_H V.')
    p.add_argument('--left', required=True)
    p.add_argument('--right', required=True)

    p = sub.add_parser('power', parents=[common], help='S^k_H U или Λ^k_H U.')
    p.add_argument('module')
    kind = p.add_mutually_exclusive_group()
    kind.add_argument('--sym', action='store_true', default=True)
    kind.add_argument('--alt', action='store_true')
    p.add_argument('-k', type=int, required=True)

    p = sub.add_parser('stability', parents=[common], help='Полустабильность и стабильность.')
    p.add_argument('module')
    p.add_argument('--random', type=int, default=DEFAULT_RANDOM_PROBES, help='Число случайных направлений.')

    p = sub.add_parser('exactness', parents=[common], help='Точность последовательностей после ⊗_H Z.')
    source = p.add_mutually_exclusive_group()
    source.add_argument('--example', action='store_true', help='Встроенный пример со сбоем точности.')
    source.add_argument('--random', metavar='J,R', help='Случайная точная последовательность стабильных модулей.')
    p.add_argument('--z', default='y', help='Модуль Z для случайной последовательности.')

    p = sub.add_parser('free', parents=[common], help='Свободная H-алгебра F^Q.')
    p.add_argument('module', nargs='?', help='То же, что --gen.')
    p.add_argument('--gen', help='Образующий модуль Q: h, y, u, xq:a,b,c или путь к JSON.')
    p.add_argument('-K', type=int, required=True, dest='truncation')
    p.add_argument('--weight', type=int, default=1)
    p.add_argument('--axioms', action='store_true', help='Проверить аксиому A.')

    for name, text in (('ideal', 'Идеал, порождённый J.'), ('quotient', 'Факторалгебра B = F/I.')):
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument('--family', default='eh')
        p.add_argument('--gens', metavar='GRADE,FILE',
                       help='Образующие J: степень и JSON-подпространство {ambient, rows} в координатах этой степени.')
        p.add_argument('--gen', default='y', help='Образующий модуль свободной алгебры для --gens.')
        p.add_argument('--weight', type=int, default=1, help='Вес образующих для --gens.')
        p.add_argument('-K', type=int, default=8, dest='truncation')
        if name == 'ideal':
            p.add_argument('--absorption', action='store_true')
        else:
            p.add_argument('--lambda', dest='lam', help='a11,a22,a12,a23,a31 для деформации.')

    p = sub.add_parser('hl', parents=[common], help='HL-алгебра g⊗Y и скобка на F^A.')
    p.add_argument('lie', nargs='?', help='То же, что --lie.')
    p.add_argument('--lie', dest='lie_flag', help='so3, solv2, abelian:m или путь к JSON со структурными константами.')
    p.add_argument('-K', type=int, default=3, dest='truncation')

    p = sub.add_parser('variety', help='Уравнения многообразия M_{P,Q}.')
    vsub = p.add_subparsers(dest='action', parser_class=_Parser)
    vsub.required = True
    for name in ('emit', 'member'):
        vp = vsub.add_parser(name, parents=[common])
        vp.add_argument('--family', default='eh')
        vp.add_argument('--lambda', dest='lam', default='0,0,0,0,0')
        if name == 'member':
            vp.add_argument('--point', required=True, help='Девять координат v1, v2, v3.')

    p = sub.add_parser('fueter', help='Оператор Дирака–Фютера.')
    fsub = p.add_subparsers(dest='action', parser_class=_Parser)
    fsub.required = True
    fp = fsub.add_parser('dim', parents=[common])
    fp.add_argument('-k', type=int, required=True)
    fp.add_argument('--forms', action='store_true', help='Сравнить две формы оператора.')
    fp = fsub.add_parser('grades', parents=[common])
    fp.add_argument('--quotient', default='z2', choices=['z2'])
    fp.add_argument('-K', type=int, default=6, dest='truncation')
    fp = fsub.add_parser('delta', parents=[common])
    fp.add_argument('-n', type=int, required=True)

    p = sub.add_parser('suite', parents=[common], help='Приёмочная батарея.')
    p.add_argument('--quick', action='store_true')
    return ap


def _lambda(text: Optional[str]) -> Optional[List[Any]]:
    if text is None:
        return None
    values = parse_numbers(text)
    if len(values) != 5:
        raise UsageError('λ задаётся пятью числами a11,a22,a12,a23,a31')
    return values


def _pair(text: str) -> List[int]:
    values = parse_numbers(text)
    if len(values) != 2 or any(v.denominator != 1 for v in values):
        raise UsageError(f"Ожидалась пара целых J,R, получено '{text}'")
    return [int(v.numerator) for v in values]


def _non_negative(value: int, what: str) -> int:
    if value < 0:
        raise UsageError(f"{what} должно быть неотрицательным, получено {value}")
    return value


def _choose(flag: Optional[str], positional: Optional[str], name: str) -> str:
    if flag and positional and flag != positional:
        raise UsageError(f"{name} и позиционный аргумент заданы по-разному: '{flag}' и '{positional}'")
    value = flag or positional
    if not value:
        raise UsageError(f"Не задан {name}")
    return value


def execute(args: argparse.Namespace, inputs: Dict[str, Any]) -> Dict[str, Any]:
    seed, budget = args.seed, args.budget
    cmd = args.command
    if cmd == 'module':
        u, inputs['module'] = resolve_module(args.module)
        return api.module_report(u, seed)
    if cmd == 'tensor':
        u, inputs['left'] = resolve_module(args.left)
        v, inputs['right'] = resolve_module(args.right)
        return api.tensor_report(u, v, budget, seed)
    if cmd == 'power':
        u, inputs['module'] = resolve_module(args.module)
        return api.power_report(u, _non_negative(args.k, 'k'), args.alt, budget, seed)
    if cmd == 'stability':
        u, inputs['module'] = resolve_module(args.module)
        return api.stability_report(u, _non_negative(args.random, '--random'), seed)
    if cmd == 'exactness':
        if args.random:
            j, r = _pair(args.random)
            z, inputs['z'] = resolve_module(args.z)
            return api.random_exactness_report(j, r, z, seed, budget)
        return api.example_exactness_report(budget)
    if cmd == 'free':
        q, inputs['module'] = resolve_module(_choose(args.gen, args.module, '--gen'))
        return api.free_report(q, _non_negative(args.truncation, 'K'), args.weight, budget, seed, args.axioms)
    if cmd in ('ideal', 'quotient') and args.gens:
        q, inputs['module'] = resolve_module(args.gen)
        grade, gens, inputs['gens'] = resolve_generators(args.gens)
        truncation = _non_negative(args.truncation, 'K')
        if cmd == 'ideal':
            return api.generated_ideal_report(q, truncation, grade, gens, args.weight, budget, seed, args.absorption)
        if args.lam is not None:
            raise UsageError('--lambda применим только к семейству eh, не к --gens')
        return api.generated_quotient_report(q, truncation, grade, gens, args.weight, budget, seed)
    if cmd == 'ideal':
        return api.ideal_report(args.family, _non_negative(args.truncation, 'K'), budget, args.absorption)
    if cmd == 'quotient':
        return api.quotient_report(args.family, _non_negative(args.truncation, 'K'), budget, seed,
                                   _lambda(args.lam))
    if cmd == 'hl':
        g, inputs['lie'] = resolve_lie(_choose(args.lie_flag, args.lie, '--lie'))
        return api.hl_report(g, _non_negative(args.truncation, 'K'), budget)
    if cmd == 'variety':
        if args.family != 'eh':
            raise UsageError(f"Поддерживается только семейство 'eh', получено '{args.family}'")
        lam = _lambda(args.lam)
        if args.action == 'emit':
            return api.variety_emit_report(lam, budget=budget)
        return api.variety_member_report(lam, parse_numbers(args.point), budget=budget)
    if cmd == 'fueter':
        if args.action == 'dim':
            return api.fueter_dim_report(_non_negative(args.k, 'k'), args.forms)
        if args.action == 'grades':
            return api.fueter_grades_report(_non_negative(args.truncation, 'K'))
        return api.fueter_delta_report(args.n)
    result = run_suite(seed, budget, args.quick)
    for check in result.checks:
        print(check_label(f"{check.name}: {check.detail}", check.passed), file=sys.stderr)
    return {
        'passed': result.passed,
        'checks': [{'name': c.name, 'passed': c.passed, 'detail': c.detail} for c in result.checks],
    }


def _configure_logging(verbose: int) -> None:
    if verbose:
        level = logging.DEBUG if verbose > 1 else logging.INFO
        logging.basicConfig(level=level, stream=sys.stderr, format='%(levelname)s %(name)s: %(message)s')


def _emit_error(exc: QuatAlgError) -> None:
    print(f"{error_label()} {exc}", file=sys.stderr)
    print(dumps({'error': exc.details()}))


def run(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        _emit_error(exc)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    _configure_logging(args.verbose)
    inputs: Dict[str, Any] = {}
    start = time.perf_counter()
    try:
        result = execute(args, inputs)
    except UsageError as exc:
        _emit_error(exc)
        return EXIT_USAGE
    except BudgetExceededError as exc:
        _emit_error(exc)
        return EXIT_BUDGET
    except QuatAlgError as exc:
        _emit_error(exc)
        return EXIT_ERROR
    ok = bool(result.get('passed', True))
    report = {
        'command': args.command,
        'argv': argv,
        'inputs': inputs,
        'seed': args.seed,
        'budget': args.budget,
        'result': result,
        'ok': ok,
    }
    if args.timing:
        report['seconds'] = round(time.perf_counter() - start, 3)
    print(dumps(report))
    return EXIT_OK if ok else EXIT_FAILED


def main() -> None:
    just_fix_windows_console()
    sys.exit(run())


if __name__ == '__main__':
    main()
