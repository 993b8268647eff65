"""Continued fractions of square roots, Pell equations x^2 - D*y^2 = N for
N in {1, -1, 2, -2}, and the divisor-split analysis of the fundamental
solution that decides solvability of the -2 equation."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import gcd, isqrt, prod
from typing import Iterator

from .arith import Factorization, factor, jacobi

__all__ = [
    "Branch",
    "CaseTrace",
    "ContinuedFraction",
    "NoConsistentBranchError",
    "PellSolution",
    "SymbolCheck",
    "case_analysis",
    "cf_sqrt",
    "convergents",
    "fundamental_solution",
    "solve_target",
]

TARGETS = (1, -1, 2, -2)

_MAX_CONVERGENTS = 10**6


class NoConsistentBranchError(RuntimeError):
    """No divisor split of the fundamental solution held numerically."""


@dataclass(frozen=True)
class ContinuedFraction:
    """Periodic expansion of sqrt(D): integer part and minimal repeating block."""

    D: int
    a0: int
    period: tuple[int, ...]

    def terms(self) -> Iterator[int]:
        yield self.a0
        while True:
            yield from self.period


def cf_sqrt(D: int) -> ContinuedFraction:
    """Canonical periodic continued fraction of sqrt(D) for non-square D >= 2."""
    if D < 2:
        raise ValueError(f"cf_sqrt requires D >= 2, got {D}")
    a0 = isqrt(D)
    if a0 * a0 == D:
        raise ValueError(f"cf_sqrt requires a non-square, got {D} = {a0}^2")
    period = []
    p, q = 0, 1
    a = a0
    while True:
        p = a * q - p
        q = (D - p * p) // q
        a = (a0 + p) // q
        period.append(a)
        if q == 1:
            break
    assert period[-1] == 2 * a0
    return ContinuedFraction(D, a0, tuple(period))


def convergents(cf: ContinuedFraction) -> Iterator[tuple[int, int]]:
    """Numerator/denominator pairs p_k/q_k of the expansion, k = 0, 1, ..."""
    p_prev, q_prev = 1, 0
    p, q = None, None
    for a in cf.terms():
        if p is None:
            p, q = a, 1
        else:
            p, p_prev = a * p + p_prev, p
            q, q_prev = a * q + q_prev, q
        yield p, q


@dataclass(frozen=True)
class PellSolution:
    """Verified solution of x^2 - D*y^2 = N with y >= 1 and x >= 0."""

    D: int
    N: int
    x: int
    y: int

    def __post_init__(self) -> None:
        if self.N not in TARGETS:
            raise ValueError(f"unsupported target {self.N}")
        if self.y < 1 or self.x < 0:
            raise ValueError(f"solution must have x >= 0, y >= 1, got {(self.x, self.y)}")
        if self.x * self.x - self.D * self.y * self.y != self.N:
            raise ValueError(
                f"({self.x}, {self.y}) does not solve x^2 - {self.D}*y^2 = {self.N}"
            )


def fundamental_solution(D: int) -> PellSolution:
    """Minimal positive solution of x^2 - D*y^2 = 1, found on the convergents."""
    cf = cf_sqrt(D)
    for i, (p, q) in enumerate(convergents(cf)):
        if p * p - D * q * q == 1:
            return PellSolution(D, 1, p, q)
        if i > _MAX_CONVERGENTS:
            break
    raise AssertionError(f"no fundamental solution found for D={D}")  # unreachable


def solve_target(D: int, N: int) -> PellSolution | None:
    """Minimal-y solution of x^2 - D*y^2 = N for N in {-1, 2, -2}, or None.

    For N^2 < D the scan over convergents across two full periods is complete.
    For the few small D with N^2 >= D a direct scan of y up to the
    fundamental-solution height decides instead.
    """
    if N not in (-1, 2, -2):
        raise ValueError(f"solve_target handles N in {{-1, 2, -2}}, got {N}")
    cf = cf_sqrt(D)
    best: tuple[int, int] | None = None
    limit = 2 * len(cf.period) + 1
    for i, (p, q) in enumerate(convergents(cf)):
        if i >= limit:
            break
        if p * p - D * q * q == N and (best is None or q < best[1]):
            best = (p, q)
    if N * N >= D:
        y1 = fundamental_solution(D).y
        for y in range(1, y1 + 1):
            x2 = N + D * y * y
            if x2 < 0:
                continue
            x = isqrt(x2)
            if x * x == x2:
                if best is None or y < best[1]:
                    best = (x, y)
                break
    if best is None:
        return None
    return PellSolution(D, N, best[0], best[1])


@dataclass(frozen=True)
class SymbolCheck:
    """Quadratic-residue condition a branch forces: (top/modulus) must be +1."""

    top: int
    modulus: int
    value: int

    def describe(self) -> str:
        return f"jacobi({self.top}, {self.modulus}) = {self.value}"


@dataclass(frozen=True)
class Branch:
    """One coprime split x0+1 = delta*d_plus*a^2, x0-1 = delta*d_minus*b^2."""

    index: int
    d_plus: int
    d_minus: int
    consistent: bool
    a: int | None
    b: int | None
    checks: tuple[SymbolCheck, ...]
    contradiction: str | None


@dataclass(frozen=True)
class CaseTrace:
    """Structured record of the divisor-split argument for one m.

    `a` and `b` are oriented so that b^2 - m*a^2 equals `residual` whenever
    the consistent split puts the whole of m on one side; `residual` is None
    for mixed splits of composite m (those occur only outside the certified
    prime patterns).
    """

    m: int
    x0: int
    y0: int
    parity_case: str
    branch_index: int
    a: int
    b: int
    residual: int | None
    branches: tuple[Branch, ...]

    def consistent_branch(self) -> Branch:
        return self.branches[self.branch_index - 1]


def _is_square(k: int) -> int | None:
    if k < 0:
        return None
    r = isqrt(k)
    return r if r * r == k else None


def _divisor_splits(primes: tuple[int, ...]) -> list[int]:
    """d_plus candidates: descending subset size, ascending value within a size."""
    out = []
    for size in range(len(primes), -1, -1):
        values = sorted(prod(c) for c in combinations(primes, size))
        out.extend(values)
    return out


def case_analysis(m: int, factorization: Factorization | None = None) -> CaseTrace:
    """Reconstruct the divisor-split argument from the actual fundamental solution.

    Splits (x0+1)(x0-1) = m*y0^2 across the coprime factors, marks the unique
    numerically consistent branch, and records for every other branch the
    concrete obstruction found: a failing residue symbol, or a violation of
    the minimality of (x0, y0).
    """
    fact = factorization if factorization is not None else factor(m)
    if fact.value != m:
        raise ValueError("factorization does not match m")
    if not fact.is_squarefree() or m < 2:
        raise ValueError(f"case_analysis requires squarefree m >= 2, got {m}")
    primes = fact.primes
    sol = fundamental_solution(m)
    x0, y0 = sol.x, sol.y
    even_case = y0 % 2 == 0
    delta = 2 if even_case else 1
    c = 1 if even_case else 2
    u_plus = (x0 + 1) // delta
    u_minus = (x0 - 1) // delta
    assert gcd(u_plus, u_minus) == 1
    assert u_plus * u_minus * delta * delta == m * y0 * y0

    branches = []
    consistent_index = None
    for idx, d_plus in enumerate(_divisor_splits(primes), start=1):
        d_minus = m // d_plus
        a = b = None
        if u_plus % d_plus == 0 and u_minus % d_minus == 0:
            a = _is_square(u_plus // d_plus)
            b = _is_square(u_minus // d_minus)
        holds = a is not None and b is not None
        checks = []
        contradiction = None
        if not holds:
            a = b = None
            # The split would force d_plus*a^2 - d_minus*b^2 = c; reduce by
            # each prime of m to extract the residue symbol it requires.
            for pi in primes:
                if d_plus % pi == 0:
                    checks.append(SymbolCheck(-c * d_minus, pi, jacobi(-c * d_minus, pi)))
                else:
                    checks.append(SymbolCheck(c * d_plus, pi, jacobi(c * d_plus, pi)))
            failing = next((ch for ch in checks if ch.value == -1), None)
            if failing is not None:
                contradiction = failing.describe()
            elif d_plus == 1 and c == 1:
                contradiction = (
                    f"minimality: a^2 - {m}*b^2 = 1 would give a positive "
                    f"solution with b < {y0}"
                )
            else:
                contradiction = "none found (outside the certified patterns)"
        else:
            consistent_index = idx
        branches.append(
            Branch(idx, d_plus, d_minus, holds, a, b, tuple(checks), contradiction)
        )

    if consistent_index is None:
        raise NoConsistentBranchError(
            f"no divisor split of ({x0}+1)({x0}-1) = {m}*{y0}^2 held"
        )

    hit = branches[consistent_index - 1]
    if hit.d_plus == m:
        a_out, b_out = hit.a, hit.b
        residual = -c
    elif hit.d_plus == 1:
        a_out, b_out = hit.b, hit.a
        residual = c
    else:
        a_out, b_out = hit.a, hit.b
        residual = None
    if residual is not None:
        assert b_out * b_out - m * a_out * a_out == residual

    return CaseTrace(
        m=m,
        x0=x0,
        y0=y0,
        parity_case="y0_even" if even_case else "y0_odd",
        branch_index=consistent_index,
        a=a_out,
        b=b_out,
        residual=residual,
        branches=tuple(branches),
    )
