from __future__ import annotations

from typing import Any, Dict, Optional, Sequence


class QuatAlgError(Exception):
    code = 'error'

    def details(self) -> Dict[str, Any]:
        return {'kind': self.code, 'message': str(self)}


class DimensionMismatchError(QuatAlgError):
    code = 'dimension_mismatch'


class ContainmentError(QuatAlgError):
    code = 'containment'


class NotHClosedError(QuatAlgError):
    code = 'not_h_closed'


class IncompatibleError(QuatAlgError):
    code = 'incompatible'


class InvariantViolationError(QuatAlgError):
    code = 'invariant_violation'


class UsageError(QuatAlgError):
    code = 'usage'


class NotAHModuleError(QuatAlgError):
    code = 'not_ah_module'

    def __init__(self, message: str, witness: Optional[Sequence[Any]] = None, grade: Optional[int] = None):
        super().__init__(message)
        self.witness = tuple(witness) if witness is not None else None
        self.grade = grade

    def at_grade(self, grade: int) -> 'NotAHModuleError':
        return NotAHModuleError(f"{self} (степень {grade})", self.witness, grade)

    def details(self) -> Dict[str, Any]:
        out = super().details()
        if self.witness is not None:
            out['witness'] = [str(x) for x in self.witness]
        if self.grade is not None:
            out['grade'] = self.grade
        return out


class BudgetExceededError(QuatAlgError):
    code = 'budget_exceeded'

    def __init__(self, ambient: int, budget: int, what: str = ''):
        label = f" для {what}" if what else ''
        super().__init__(f"Размер окружающего пространства{label} {ambient} превышает лимит {budget}")
        self.ambient = ambient
        self.budget = budget

    def details(self) -> Dict[str, Any]:
        out = super().details()
        out.update(ambient=self.ambient, budget=self.budget)
        return out


try:
    from colorama import Fore, Style
except ImportError:  # pragma: no cover - fallback for environments without colorama
    class _NoColor:
        def __getattr__(self, _):
            return ''

    Fore = _NoColor()
    Style = _NoColor()

RESET = getattr(Style, 'RESET_ALL', '')


def _apply_color(text: str, *codes: str) -> str:
    prefix = ''.join(code for code in codes if code)
    if not prefix:
        return text
    return f"{prefix}{text}{RESET}"


def error_label() -> str:
    return _apply_color('Ошибка:', Style.BRIGHT, getattr(Fore, 'RED', ''))


def check_label(name: str, passed: bool) -> str:
    color = getattr(Fore, 'GREEN', '') if passed else getattr(Fore, 'RED', '')
    mark = 'ok' if passed else 'FAIL'
    return f"{_apply_color(mark, Style.BRIGHT, color)} {name}"
