from decimal import ROUND_DOWN, ROUND_HALF_UP, Decimal
from fractions import Fraction

import pytest


def _dec(x) -> Decimal:
    x = Fraction(x)
    return Decimal(x.numerator) / Decimal(x.denominator)


def printed_match(value, printed: str, parts=None) -> bool:
    """Does an exact value agree with a value printed to limited precision?

    ``printed`` is a decimal ("3.285", "0.53") or scientific ("1.346e15")
    literal. Accepted when the value rounds half-up or truncates to the printed
    digits; a printed integer must be exact. A printed sum may also equal the
    sum of its printed ``parts`` (pass parts only when each part matched).
    """
    with_ctx = Decimal(printed)
    v = _dec(value)
    if "e" in printed.lower():
        mant, exp = printed.lower().split("e")
        scale = Decimal(10) ** int(exp)
        m = Decimal(mant)
        v = v / scale
        quant = Decimal(1).scaleb(m.as_tuple().exponent)
        return any(v.quantize(quant, rounding=r) == m for r in (ROUND_HALF_UP, ROUND_DOWN))
    if "." not in printed:
        return v == with_ctx
    quant = Decimal(1).scaleb(with_ctx.as_tuple().exponent)
    if any(v.quantize(quant, rounding=r) == with_ctx for r in (ROUND_HALF_UP, ROUND_DOWN)):
        return True
    if parts is not None:
        return sum(Decimal(p) for p in parts) == with_ctx
    return False


@pytest.fixture
def match():
    return printed_match


_ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def acceptance():
    """``acceptance(n, ok, detail)`` records one criterion line for the summary."""

    def record(n: int, ok: bool, detail: str = "") -> bool:
        _ACCEPTANCE[n] = (bool(ok), detail)
        print(f"criterion {n}: {'PASS' if ok else 'FAIL'} {detail}")
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_ACCEPTANCE):
        ok, detail = _ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
