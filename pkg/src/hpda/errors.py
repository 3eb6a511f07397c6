"""Exception types and the validation report shared by all validators."""
from __future__ import annotations

from dataclasses import dataclass, field


class ParameterError(ValueError):
    """A construction or calculator argument violates its stated range."""


class PreconditionError(ValueError):
    """An input object does not satisfy an operation's precondition."""


class ConstructionError(RuntimeError):
    """A construction produced an object whose measured parameters disagree
    with the closed-form ones. Always a bug, never user error."""


@dataclass(frozen=True)
class Violation:
    clause: str
    message: str
    witness: tuple = ()

    def __str__(self) -> str:
        return f"[{self.clause}] {self.message}"


@dataclass
class Report:
    """Outcome of a validator: empty ``violations`` means the object is valid."""

    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok

    def add(self, clause: str, message: str, *witness) -> None:
        self.violations.append(Violation(clause, message, tuple(witness)))

    def clauses(self) -> set[str]:
        return {v.clause for v in self.violations}

    def require(self, what: str = "object") -> None:
        if not self.ok:
            head = "; ".join(str(v) for v in self.violations[:3])
            more = len(self.violations) - 3
            tail = f" (+{more} more)" if more > 0 else ""
            raise PreconditionError(f"invalid {what}: {head}{tail}")

    def __str__(self) -> str:
        if self.ok:
            return "ok"
        return "\n".join(str(v) for v in self.violations)
