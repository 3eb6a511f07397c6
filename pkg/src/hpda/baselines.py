"""Closed-form loads and subpacketization of the comparison schemes.

All rates are exact ``Fraction`` values and binomials are Python ints.
``r(m, K)`` below is the centralized single-layer rate with ``m = M/N``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import ceil, comb, floor

from .errors import ParameterError
from .points import SchemePoint, frac


@dataclass(frozen=True)
class ManRateInput:
    m: Fraction
    K: int
    N: int | None = None  # defaults to K


def _integral_rate(t: int, K: int, N: int) -> Fraction:
    m = Fraction(t, K)
    return K * (1 - m) * min(Fraction(1, 1 + t), Fraction(N, K))


def man_rate(inp: ManRateInput | Fraction | int | str, K: int | None = None, N: int | None = None) -> tuple[Fraction, int]:
    """Rate and subpacketization of the centralized single-layer scheme.

    A non-integer ``K*m`` is handled by sharing between its floor and ceiling;
    the subpacketization is then the larger binomial.
    """
    if not isinstance(inp, ManRateInput):
        inp = ManRateInput(frac(inp), K, N)
    m, K = frac(inp.m), inp.K
    N = K if inp.N is None else inp.N
    if K < 1:
        raise ParameterError(f"K must be positive, got {K}")
    if not 0 <= m <= 1:
        raise ParameterError(f"memory ratio must lie in [0, 1], got {m}")
    km = K * m
    lo, hi = floor(km), ceil(km)
    if lo == hi:
        return _integral_rate(lo, K, N), comb(K, lo)
    theta = hi - km  # km = theta*lo + (1-theta)*hi
    rate = theta * _integral_rate(lo, K, N) + (1 - theta) * _integral_rate(hi, K, N)
    return rate, max(comb(K, lo), comb(K, hi))


def r(m, K: int, N: int | None = None) -> Fraction:
    return man_rate(ManRateInput(frac(m), K, N))[0]


def _clamped(m: Fraction, K: int, N: int | None, notes: list[str], what: str) -> tuple[Fraction, int]:
    if m > 1:
        notes.append(f"{what}: memory argument {m} > 1 clamped to 1")
        m = Fraction(1)
    return man_rate(ManRateInput(m, K, N))


def _ratio(num: Fraction, den: Fraction) -> Fraction:
    return num / den if den else Fraction(0)


@dataclass(frozen=True)
class KnmdResult:
    point: SchemePoint
    alpha: Fraction
    beta: Fraction
    notes: tuple


def knmd_point(K1: int, K2: int, m1, m2, alpha, beta, N: int | None = None, tag: str = "") -> SchemePoint:
    return knmd_detail(K1, K2, m1, m2, alpha, beta, N, tag).point


def knmd_detail(K1: int, K2: int, m1, m2, alpha, beta, N: int | None = None, tag: str = "") -> KnmdResult:
    """Two-subscheme split: a fraction ``alpha`` of every file goes through
    mirror-aided delivery using a fraction ``beta`` of user memory, the rest
    is served directly to all ``K1*K2`` users with the remaining user memory."""
    m1, m2, a, b = frac(m1), frac(m2), frac(alpha), frac(beta)
    for name, x in (("alpha", a), ("beta", b), ("m1", m1), ("m2", m2)):
        if not 0 <= x <= 1:
            raise ParameterError(f"{name} must lie in [0, 1], got {x}")
    notes: list[str] = []
    r1 = r2 = Fraction(0)
    fs = [1]
    if a > 0:
        ra, fa = _clamped(_ratio(m1, a), K1, N, notes, "mirror subscheme, layer 1")
        rb, fb = _clamped(_ratio(b * m2, a), K2, N, notes, "mirror subscheme, layer 2")
        r1 += a * K2 * ra
        r2 += a * rb
        fs += [fa, fb]
    if a < 1:
        mu = _ratio((1 - b) * m2, 1 - a)
        rc, fc = _clamped(mu, K1 * K2, N, notes, "direct subscheme, layer 1")
        rd, fd = _clamped(mu, K2, N, notes, "direct subscheme, layer 2")
        r1 += (1 - a) * rc
        r2 += (1 - a) * rd
        fs += [fc, fd]
    point = SchemePoint(m1, m2, r1, r2, max(fs), tag or f"KNMD(alpha={a},beta={b})", K1, K2)
    return KnmdResult(point, a, b, tuple(notes))


def knmd_optimal_ab(K1: int, K2: int, M1, M2, N) -> tuple[Fraction, Fraction]:
    """Piecewise choice of (alpha, beta) with three memory regimes."""
    M1, M2, N = frac(M1), frac(M2), frac(N)
    if M1 + M2 * K2 < N:
        return M1 / (M1 + M2 * K2), Fraction(0)
    if M1 <= N / 4:
        return M1 / N, M1 / N
    return M1 / N, Fraction(1, 4)


def scheme_a_point(K1: int, K2: int, m1, m2, N: int | None = None) -> SchemePoint:
    """Mirror-aided delivery only (alpha = beta = 1)."""
    m1, m2 = frac(m1), frac(m2)
    ra, fa = man_rate(ManRateInput(m1, K1, N))
    rb, fb = man_rate(ManRateInput(m2, K2, N))
    return SchemePoint(m1, m2, K2 * ra, rb, max(fa, fb), "scheme A", K1, K2)


def scheme_b_point(K1: int, K2: int, m1, m2, N: int | None = None) -> SchemePoint:
    """Direct delivery ignoring mirror caches (alpha = beta = 0)."""
    m1, m2 = frac(m1), frac(m2)
    rc, fc = man_rate(ManRateInput(m2, K1 * K2, N))
    rd, _ = man_rate(ManRateInput(m2, K2, N))
    return SchemePoint(m1, m2, rc, rd, fc, "scheme B", K1, K2)


def kywm_scheme2_point(pda_a: tuple[int, int, int, int], pda_b: tuple[int, int, int, int], tag: str = "") -> SchemePoint:
    """Product of a mirror-layer PDA A=(K1,F1,Z1,S1) and a user-layer PDA B=(K2,F2,Z2,S2)."""
    for name, p in (("A", pda_a), ("B", pda_b)):
        K, F, Z, S = p
        if K < 1 or F < 1 or S < 1 or not 0 <= Z < F:
            raise ParameterError(f"PDA {name}={p} is not a valid (K, F, Z, S) quadruple")
    K1, F1, Z1, S1 = pda_a
    K2, F2, Z2, S2 = pda_b
    return SchemePoint(
        Fraction(Z1, F1),
        Fraction(Z2, F2),
        Fraction(S1 * S2, F1 * F2),
        Fraction(S2, F2),
        F1 * F2,
        tag or f"product A={pda_a} B={pda_b}",
        K1,
        K2,
    )


def jc_point(K1: int, K2: int, m1, m2) -> SchemePoint:
    """Joint caching with both memories on the integer grid."""
    m1, m2 = frac(m1), frac(m2)
    for name, K, m in (("K1*m1", K1, m1), ("K2*m2", K2, m2)):
        if not 0 <= m <= 1:
            raise ParameterError(f"memory ratio must lie in [0, 1], got {m}")
        if (K * m).denominator != 1:
            raise ParameterError(f"{name} = {K * m} is not an integer")
    t1, t2 = int(K1 * m1), int(K2 * m2)
    r1 = K1 * K2 * (1 - m1) * (1 - m2) / (1 + K1 * m1)
    r2 = K2 * (1 - m2) / (1 + K2 * m2)
    return SchemePoint(m1, m2, r1, r2, comb(K1, t1) * comb(K2, t2), "JC", K1, K2)


def wwcy_delay(K1: int, K2: int, m1, m2, alpha, beta, N: int | None = None) -> Fraction:
    """Delay of a two-part scheme with concurrent layer transmissions."""
    return wwcy_detail(K1, K2, m1, m2, alpha, beta, N)[0]


def wwcy_detail(K1: int, K2: int, m1, m2, alpha, beta, N: int | None = None) -> tuple[Fraction, int]:
    m1, m2, a, b = frac(m1), frac(m2), frac(alpha), frac(beta)
    for name, x in (("alpha", a), ("beta", b), ("m1", m1), ("m2", m2)):
        if not 0 <= x <= 1:
            raise ParameterError(f"{name} must lie in [0, 1], got {x}")
    notes: list[str] = []
    t = Fraction(0)
    fs = [1]
    if a > 0:
        mirror_share = _ratio(m1, a)
        ra, fa = _clamped(mirror_share, K1, N, notes, "p1")
        rb, fb = _clamped(_ratio(b * m2, a), K2, N, notes, "p1")
        t += a * (ra * rb + min(mirror_share, Fraction(1)) * rb)
        fs += [fa, fb]
    if a < 1:
        rc, fc = _clamped(_ratio((1 - b) * m2, 1 - a), K1 * K2, N, notes, "s2")
        t += (1 - a) * rc
        fs.append(fc)
    # subpacketization is dominated by the all-user part
    mu = _ratio((1 - b) * m2, 1 - a) if a < 1 else Fraction(0)
    km = K1 * K2 * min(mu, Fraction(1))
    f = max(comb(K1 * K2, floor(km)), comb(K1 * K2, ceil(km))) if a < 1 else max(fs)
    return t, f


# ---- parametric family with K1 = q^2, K2 = q^2 - 1, m1 = 1/q, m2 = 1/(q+1)


@dataclass(frozen=True)
class FamilyRow:
    scheme: str
    q: int
    f: int | None
    r1: Fraction | None
    r2: Fraction | None
    t: Fraction | None
    approx: bool = False  # r2 and t are stated as approximations
    note: str = ""


def _q_check(q: int) -> None:
    if not isinstance(q, int) or q < 2:
        raise ParameterError(f"q must be an integer >= 2, got {q!r}")


def table5_closed_forms(q: int) -> list[FamilyRow]:
    """Printed closed forms for each scheme in the q-family."""
    _q_check(q)
    Q = Fraction(q)
    rows = [
        FamilyRow(
            "proposed",
            q,
            comb(q * q, q),
            2 * Q * (q * q - q - 1) * (q - 1) / ((q + 1) * (q + 2)),
            (3 * Q * Q - 1) * (q - 1) / (q * (q + 1)),
            (Q - 1) * (2 * q**4 + q**3 + 4 * q * q - q - 2) / (q * (q + 1) * (q + 2)),
        ),
        FamilyRow(
            "KNMD",
            q,
            comb(q * q * (q * q - 1), q * q * (q - 1)),
            Q * Q * (q - 1) ** 2 / (1 + q * q * (q - 1)),
            Q - 1,
            (Q - 1) * (2 * q**3 - 2 * q * q + 1) / (1 + q * q * (q - 1)),
        ),
        FamilyRow("scheme A", q, comb(q * q, q), Q * (q - 1) ** 2, Q - 1, (Q - 1) * (q * q - q + 1)),
        FamilyRow(
            "scheme B",
            q,
            comb(q * q * (q * q - 1), q * q * (q - 1)),
            Q**3 * (q - 1) / (1 + q * q * (q - 1)),
            Q - 1,
            (Q - 1) * (2 * q**3 - q * q + 1) / (1 + q * q * (q - 1)),
        ),
        FamilyRow(
            "scheme I",
            q,
            comb(q * q * (q * q - 1), q * (q - 1) * (2 * q + 1)),
            (Q * Q - q - 1) / (2 * q + 1),
            (Q * Q - q - 1) / (2 * q + 1),
            2 * (Q * Q - q - 1) / (2 * q + 1),
            approx=True,
            note="R2 and T are approximate closed forms",
        ),
        FamilyRow("scheme II", q, q ** (q - 1) * (q + 1) ** (q - 2), Q * (q - 1), Q, Q * Q),
        FamilyRow(
            "JC",
            q,
            comb(q * q, q) * comb(q * q - 1, q - 1),
            Q * Q * (q - 1) ** 2 / (q + 1),
            Q - 1,
            (Q - 1) * (q**3 - q * q + q + 1) / (q + 1),
        ),
    ]
    return rows


def _scheme2_pdas(q: int):
    """Mirror and user PDAs of the product scheme; None when a parameter is fractional."""
    a = (q * q, q ** (q - 1), q ** (q - 2), q**q - q ** (q - 1))
    if q < 3:
        return None
    b = (q * q - 1, (q + 1) ** (q - 2), (q + 1) ** (q - 3), (q + 1) ** (q - 1) - (q + 1) ** (q - 2))
    return a, b


def table5_direct(q: int) -> list[FamilyRow]:
    """The same rows evaluated from the general calculators."""
    from .hpda import subset_point

    _q_check(q)
    K1, K2 = q * q, q * q - 1
    m1, m2 = Fraction(1, q), Fraction(1, q + 1)

    def row(name, p: SchemePoint, note=""):
        return FamilyRow(name, q, p.f, p.r1, p.r2, p.t_seq, note=note)

    out = [row("proposed", subset_point(q * q, q * q - 1, q * q - 2, q))]
    a, b = knmd_optimal_ab(K1, K2, m1, m2, 1)
    note = "" if (a, b) == (m1, m1) else f"regime rule gives (alpha, beta)=({a}, {b}); evaluated at (1/q, 1/q)"
    out.append(row("KNMD", knmd_point(K1, K2, m1, m2, m1, m1), note))
    out.append(row("scheme A", scheme_a_point(K1, K2, m1, m2)))
    out.append(row("scheme B", scheme_b_point(K1, K2, m1, m2)))
    out.append(FamilyRow("scheme I", q, None, None, None, None, note="closed form only"))
    pdas = _scheme2_pdas(q)
    if pdas is None:
        out.append(FamilyRow("scheme II", q, None, None, None, None, note="user-layer PDA has fractional Z for q=2"))
    else:
        out.append(row("scheme II", kywm_scheme2_point(*pdas)))
    out.append(row("JC", jc_point(K1, K2, m1, m2)))
    return out


def table5_rows(q: int) -> list[SchemePoint]:
    """Closed-form rows as SchemePoints (scheme I carries its approximate R2)."""
    m1, m2 = Fraction(1, q), Fraction(1, q + 1)
    return [
        SchemePoint(m1, m2, row.r1, row.r2, row.f, row.scheme + (" (approx)" if row.approx else ""), q * q, q * q - 1)
        for row in table5_closed_forms(q)
    ]


def table5_orderings(q: int) -> dict[str, bool]:
    """Check the stated F and T orderings across schemes by substitution."""
    rows = {row.scheme: row for row in table5_closed_forms(q)}
    f = {k: v.f for k, v in rows.items()}
    t = {k: v.t for k, v in rows.items()}
    f_chain = ["scheme II", "JC", "KNMD", "scheme I"]
    t_chain = ["scheme I", "KNMD", "scheme B", "scheme II", "proposed", "JC", "scheme A"]
    return {
        "F": f["proposed"] == f["scheme A"]
        and f["KNMD"] == f["scheme B"]
        and f["scheme A"] < f["scheme II"]
        and all(f[x] < f[y] for x, y in zip(f_chain, f_chain[1:])),
        "T": all(t[x] < t[y] for x, y in zip(t_chain, t_chain[1:])),
    }
