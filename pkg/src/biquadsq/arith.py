"""Integer primitives: primality, factorization, quadratic symbols, and
classical sum-of-squares decompositions over the rational integers."""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd, isqrt

__all__ = [
    "Factorization",
    "FactorizationBudgetError",
    "factor",
    "four_squares",
    "is_prime",
    "is_squarefree",
    "jacobi",
    "three_square_criterion",
    "three_squares",
    "two_square_criterion",
    "two_squares",
]

DEFAULT_FACTOR_BUDGET = 2_000_000


class FactorizationBudgetError(RuntimeError):
    """Factorization exceeded its configured effort budget."""


def _sieve(limit: int) -> tuple[int, ...]:
    flags = bytearray([1]) * (limit + 1)
    flags[0:2] = b"\x00\x00"
    for p in range(2, isqrt(limit) + 1):
        if flags[p]:
            flags[p * p :: p] = bytearray(len(flags[p * p :: p]))
    return tuple(i for i, f in enumerate(flags) if f)

_SMALL_PRIMES = _sieve(1000)

# Deterministic Miller-Rabin witness set, exact for n < 3.3 * 10^24.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin for the desk scale (exact below 3.3e24)."""
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class Factorization:
    """Prime factorization with strictly increasing primes and exponents >= 1."""

    value: int
    factors: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        prod = 1
        prev = 1
        for p, e in self.factors:
            if p <= prev or e < 1 or not is_prime(p):
                raise ValueError(f"invalid factorization of {self.value}")
            prev = p
            prod *= p**e
        if prod != self.value:
            raise ValueError(f"factors do not multiply back to {self.value}")

    @property
    def primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.factors)

    def is_squarefree(self) -> bool:
        return all(e == 1 for _, e in self.factors)


def _pollard_brent(n: int, budget: int) -> tuple[int | None, int]:
    """Brent-cycle Pollard rho. Returns (nontrivial factor or None, steps used)."""
    if n % 2 == 0:
        return 2, 0
    used = 0
    for c in range(1, 50):
        y, m, g, r, q = 2, 128, 1, 1, 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                used += min(m, r - k)
                if used > budget:
                    raise FactorizationBudgetError(
                        f"factorization exceeded budget ({budget} steps) on {n}"
                    )
                g = gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = gcd(abs(x - ys), n)
                used += 1
                if used > budget:
                    raise FactorizationBudgetError(
                        f"factorization exceeded budget ({budget} steps) on {n}"
                    )
        if g != n:
            return g, used
    return None, used


def factor(n: int, budget: int = DEFAULT_FACTOR_BUDGET) -> Factorization:
    """Factor n >= 1 by trial division plus Brent rho.

    Raises FactorizationBudgetError when the rho stage would exceed `budget`
    squaring steps; the budget is generous for anything below 2^64.
    """
    if n < 1:
        raise ValueError(f"factor requires n >= 1, got {n}")
    value = n
    counts: dict[int, int] = {}
    for p in _SMALL_PRIMES:
        if p * p > n:
            break
        while n % p == 0:
            counts[p] = counts.get(p, 0) + 1
            n //= p
    stack = [n] if n > 1 else []
    remaining = budget
    while stack:
        k = stack.pop()
        if k == 1:
            continue
        if is_prime(k):
            counts[k] = counts.get(k, 0) + 1
            continue
        root = isqrt(k)
        if root * root == k:
            stack += [root, root]
            continue
        d, used = _pollard_brent(k, remaining)
        remaining -= used
        if d is None or d in (1, k):
            raise FactorizationBudgetError(f"factorization exceeded budget on {k}")
        stack += [d, k // d]
    return Factorization(value, tuple(sorted(counts.items())))


def is_squarefree(n: int, budget: int = DEFAULT_FACTOR_BUDGET) -> bool:
    """True iff no prime divides n more than once."""
    if n < 1:
        raise ValueError(f"is_squarefree requires n >= 1, got {n}")
    return factor(n, budget).is_squarefree()


def jacobi(a: int, b: int) -> int:
    """Jacobi symbol (a/b) for odd positive b; the Legendre symbol for prime b."""
    if b <= 0 or b % 2 == 0:
        raise ValueError(f"jacobi requires an odd positive lower argument, got {b}")
    a %= b
    result = 1
    while a != 0:
        while a % 2 == 0:
            a //= 2
            if b % 8 in (3, 5):
                result = -result
        a, b = b, a
        if a % 4 == 3 and b % 4 == 3:
            result = -result
        a %= b
    return result if b == 1 else 0


def two_squares(n: int, cap: int | None = None) -> tuple[int, int] | None:
    """Largest-first (a, b) with a^2 + b^2 = n and a <= cap, or None."""
    if n < 0:
        return None
    hi = isqrt(n)
    if cap is not None:
        hi = min(hi, cap)
    for a in range(hi, -1, -1):
        r = n - a * a
        if r > a * a:
            break
        b = isqrt(r)
        if b * b == r:
            return a, b
    return None


def three_squares(n: int, cap: int | None = None) -> tuple[int, int, int] | None:
    """Largest-first (a, b, c) with a^2 + b^2 + c^2 = n and a <= cap, or None."""
    if n < 0:
        return None
    if not three_square_criterion(max(n, 1)) and n > 0:
        return None
    hi = isqrt(n)
    if cap is not None:
        hi = min(hi, cap)
    for a in range(hi, -1, -1):
        r = n - a * a
        if r > 2 * a * a:
            break
        rest = two_squares(r, cap=a)
        if rest is not None:
            return (a, *rest)
    return None


def four_squares(n: int) -> tuple[int, int, int, int]:
    """Decompose n >= 0 as a^2 + b^2 + c^2 + d^2, largest-first.

    Descending exhaustive search; exact and fast at desk scale because the
    inner layers are pruned by the three-square criterion.
    """
    if n < 0:
        raise ValueError(f"four_squares requires n >= 0, got {n}")
    for a in range(isqrt(n), -1, -1):
        r = n - a * a
        if r > 3 * a * a:
            break
        rest = three_squares(r, cap=a)
        if rest is not None:
            return (a, *rest)
    raise AssertionError(f"four-square search failed for {n}")  # unreachable


def two_square_criterion(n: int, budget: int = DEFAULT_FACTOR_BUDGET) -> bool:
    """True iff every prime divisor of n congruent to 3 mod 4 has even exponent."""
    if n < 1:
        raise ValueError(f"two_square_criterion requires n >= 1, got {n}")
    return all(
        e % 2 == 0 for p, e in factor(n, budget).factors if p % 4 == 3
    )


def three_square_criterion(n: int) -> bool:
    """True iff n is not of the shape 4^a * (8b + 7)."""
    if n < 1:
        raise ValueError(f"three_square_criterion requires n >= 1, got {n}")
    while n % 4 == 0:
        n //= 4
    return n % 8 != 7
