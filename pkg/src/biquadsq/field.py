"""Exact arithmetic in K = Q(sqrt(-m), sqrt(n)) and its ring of integers.

Elements carry exact rational coordinates over the symbolic basis {1, u, v, w}
with u^2 = -m, v^2 = n and w defined as u*v/g for g = gcd(m, n), so that
w^2 = ell = -m*n/g^2.  All identities below are consequences of that closed
multiplication table; no numerical square roots appear anywhere.

The ring of integers is the lattice spanned by

    B = {1, (1+u)(1+w)/4, (1+u)/2, (1+v)/2}

and `is_integral` / `to_integral_coords` decide membership by solving the
change-of-basis system exactly.  `is_algebraic_integer` provides the
independent characteristic-polynomial test used to cross-check the lattice.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd

from .arith import is_squarefree

__all__ = [
    "FieldParams",
    "IntegralCoords",
    "KElem",
    "QuadElem",
    "basis_change_determinant",
    "char_poly",
    "conjugates",
    "integral_basis",
    "is_algebraic_integer",
    "is_integral",
    "kelem_from_dict",
    "make_params",
    "mul",
    "mul_basis_coords",
    "norm",
    "square_basis_coords",
    "structure_constants",
    "to_integral_coords",
    "trace",
    "trace_in_basis_form",
    "trace_to_subfield",
]

SUBFIELDS = ("u", "v", "w")


@dataclass(frozen=True)
class FieldParams:
    """Validated pair (m, n) with g = gcd(m, n) and ell = -m*n/g^2."""

    m: int
    n: int
    g: int
    ell: int

    @property
    def m_over_g(self) -> int:
        return self.m // self.g

    def __repr__(self) -> str:
        return f"FieldParams(m={self.m}, n={self.n})"


def make_params(m: int, n: int) -> FieldParams:
    """Validate (m, n) and derive g and ell.

    Each violation is reported separately: positivity, distinctness, the
    congruence classes m = 3 and n = 1 (mod 4), degeneracy n = 1, and
    squarefreeness.
    """
    if m < 1 or n < 1:
        raise ValueError(f"m and n must be positive, got ({m}, {n})")
    if m == n:
        raise ValueError(f"m and n must be distinct, got m = n = {m}")
    if m % 4 != 3:
        raise ValueError(f"m must be congruent to 3 mod 4, got {m} = {m % 4} (mod 4)")
    if n % 4 != 1:
        raise ValueError(f"n must be congruent to 1 mod 4, got {n} = {n % 4} (mod 4)")
    if n == 1:
        raise ValueError("n = 1 degenerates the field to a single quadratic")
    if not is_squarefree(m):
        raise ValueError(f"m must be squarefree, got {m}")
    if not is_squarefree(n):
        raise ValueError(f"n must be squarefree, got {n}")
    g = gcd(m, n)
    ell = -(m * n) // (g * g)
    assert ell < 0 and ell % 4 == 1
    return FieldParams(m, n, g, ell)


def _frac(x: int | str | Fraction) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


@dataclass(frozen=True)
class KElem:
    """Field element q0 + q1*u + q2*v + q3*w with exact rational coordinates."""

    params: FieldParams
    coords: tuple[Fraction, Fraction, Fraction, Fraction]

    def __post_init__(self) -> None:
        if len(self.coords) != 4:
            raise ValueError("KElem requires exactly four coordinates")
        object.__setattr__(self, "coords", tuple(_frac(c) for c in self.coords))

    @classmethod
    def of(cls, params: FieldParams, q0=0, q1=0, q2=0, q3=0) -> KElem:
        return cls(params, (_frac(q0), _frac(q1), _frac(q2), _frac(q3)))

    @classmethod
    def one(cls, params: FieldParams) -> KElem:
        return cls.of(params, 1)

    @classmethod
    def u(cls, params: FieldParams) -> KElem:
        return cls.of(params, 0, 1)

    @classmethod
    def v(cls, params: FieldParams) -> KElem:
        return cls.of(params, 0, 0, 1)

    @classmethod
    def w(cls, params: FieldParams) -> KElem:
        return cls.of(params, 0, 0, 0, 1)

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coords)

    def is_rational(self) -> bool:
        return all(c == 0 for c in self.coords[1:])

    def _coerce(self, other) -> "KElem | None":
        if isinstance(other, KElem):
            if other.params != self.params:
                raise ValueError("params mismatch between operands")
            return other
        if isinstance(other, (int, Fraction)):
            return KElem.of(self.params, other)
        return None

    def __add__(self, other) -> KElem:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return KElem(self.params, tuple(a + b for a, b in zip(self.coords, o.coords)))

    __radd__ = __add__

    def __sub__(self, other) -> KElem:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return KElem(self.params, tuple(a - b for a, b in zip(self.coords, o.coords)))

    def __rsub__(self, other) -> KElem:
        return (-self) + other

    def __neg__(self) -> KElem:
        return KElem(self.params, tuple(-c for c in self.coords))

    def __mul__(self, other) -> KElem:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        p = self.params
        m, n, ell, mg, ng, g = p.m, p.n, p.ell, p.m_over_g, p.n // p.g, p.g
        a0, a1, a2, a3 = self.coords
        b0, b1, b2, b3 = o.coords
        # u^2 = -m, v^2 = n, w^2 = ell, u*v = g*w, u*w = -(m/g)*v, v*w = (n/g)*u
        return KElem(
            p,
            (
                a0 * b0 - m * a1 * b1 + n * a2 * b2 + ell * a3 * b3,
                a0 * b1 + a1 * b0 + ng * (a2 * b3 + a3 * b2),
                a0 * b2 + a2 * b0 - mg * (a1 * b3 + a3 * b1),
                a0 * b3 + a3 * b0 + g * (a1 * b2 + a2 * b1),
            ),
        )

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> KElem:
        if exponent < 0:
            raise ValueError("negative powers not supported")
        out = KElem.one(self.params)
        base = self
        e = exponent
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def square(self) -> KElem:
        return self * self

    def galois(self, flip_u: bool, flip_v: bool) -> KElem:
        """Apply the automorphism negating u and/or v (w follows as u*v/g)."""
        q0, q1, q2, q3 = self.coords
        su = -1 if flip_u else 1
        sv = -1 if flip_v else 1
        return KElem(self.params, (q0, su * q1, sv * q2, su * sv * q3))

    def __repr__(self) -> str:
        q0, q1, q2, q3 = self.coords
        return f"KElem({q0} + {q1}*u + {q2}*v + {q3}*w; m={self.params.m}, n={self.params.n})"

    def to_dict(self) -> dict:
        return {
            "m": str(self.params.m),
            "n": str(self.params.n),
            "basis": "UVW",
            "coords": [str(c) for c in self.coords],
        }


@dataclass(frozen=True)
class QuadElem:
    """Element a + b*sqrt(d) of a quadratic subfield, d the squarefree kernel."""

    d: int
    a: Fraction
    b: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "a", _frac(self.a))
        object.__setattr__(self, "b", _frac(self.b))

    @classmethod
    def in_half_basis(cls, d: int, s: int | Fraction, t: int | Fraction) -> QuadElem:
        """Build s + t*(1 + sqrt(d))/2."""
        s, t = _frac(s), _frac(t)
        return cls(d, s + t / 2, t / 2)

    def is_integral(self) -> bool:
        """Classical criterion: trace 2a and norm a^2 - d*b^2 both integers."""
        tr = 2 * self.a
        nm = self.a * self.a - self.d * self.b * self.b
        return tr.denominator == 1 and nm.denominator == 1

    def __repr__(self) -> str:
        return f"QuadElem({self.a} + {self.b}*sqrt({self.d}))"


@dataclass(frozen=True)
class IntegralCoords:
    """Integer coordinates over the module basis B of the ring of integers."""

    params: FieldParams
    x: tuple[int, int, int, int]

    def __post_init__(self) -> None:
        if len(self.x) != 4 or not all(isinstance(c, int) for c in self.x):
            raise ValueError("IntegralCoords requires four integers")
        object.__setattr__(self, "x", tuple(self.x))

    def to_kelem(self) -> KElem:
        x1, x2, x3, x4 = self.x
        mg = self.params.m_over_g
        return KElem(
            self.params,
            (
                Fraction(4 * x1 + x2 + 2 * x3 + 2 * x4, 4),
                Fraction(x2 + 2 * x3, 4),
                Fraction(-mg * x2 + 2 * x4, 4),
                Fraction(x2, 4),
            ),
        )

    def __neg__(self) -> IntegralCoords:
        return IntegralCoords(self.params, tuple(-c for c in self.x))

    def to_dict(self) -> dict:
        return {
            "m": str(self.params.m),
            "n": str(self.params.n),
            "basis": "B",
            "coords": [str(c) for c in self.x],
        }


def kelem_from_dict(data: dict) -> KElem | IntegralCoords:
    """Parse the JSON object form; exact-rational strings only, no floats."""
    params = make_params(int(data["m"]), int(data["n"]))
    coords = data["coords"]
    if len(coords) != 4 or not all(isinstance(c, str) for c in coords):
        raise ValueError("coords must be four exact-rational strings")
    basis = data.get("basis", "UVW")
    if basis == "B":
        return IntegralCoords(params, tuple(int(c) for c in coords))
    if basis == "UVW":
        return KElem(params, tuple(Fraction(c) for c in coords))
    raise ValueError(f"unknown basis tag {basis!r}")


def mul(a: KElem, b: KElem) -> KElem:
    return a * b


def integral_basis(params: FieldParams) -> tuple[KElem, KElem, KElem, KElem]:
    """The module basis B = {1, (1+u)(1+w)/4, (1+u)/2, (1+v)/2}."""
    one = KElem.one(params)
    half = Fraction(1, 2)
    e3 = KElem.of(params, half, half)
    e4 = KElem.of(params, half, 0, half)
    half_w = KElem.of(params, half, 0, 0, half)
    e2 = e3 * half_w
    return (one, e2, e3, e4)


def conjugates(a: KElem) -> tuple[KElem, KElem, KElem, KElem]:
    """Galois orbit under {1, sigma_u, sigma_v, sigma_u sigma_v}."""
    return (
        a,
        a.galois(True, False),
        a.galois(False, True),
        a.galois(True, True),
    )


def trace(a: KElem) -> Fraction:
    """Full trace to Q; the radicals cancel, leaving 4*q0."""
    return 4 * a.coords[0]


def norm(a: KElem) -> Fraction:
    """Product of the four conjugates, always rational."""
    c = conjugates(a)
    prod = c[0] * c[1] * c[2] * c[3]
    if not prod.is_rational():
        raise AssertionError("norm did not collapse to a rational")
    return prod.coords[0]


def trace_to_subfield(a: KElem, which: str) -> QuadElem:
    """Relative trace a + sigma(a) onto the subfield fixing the given radical.

    `which` is "u" for Q(sqrt(-m)), "v" for Q(sqrt(n)), "w" for Q(sqrt(ell)).
    """
    p = a.params
    q0, q1, q2, q3 = a.coords
    if which == "u":
        return QuadElem(-p.m, 2 * q0, 2 * q1)
    if which == "v":
        return QuadElem(p.n, 2 * q0, 2 * q2)
    if which == "w":
        return QuadElem(p.ell, 2 * q0, 2 * q3)
    raise ValueError(f"unknown subfield {which!r}, expected one of {SUBFIELDS}")


def trace_in_basis_form(xc: IntegralCoords, which: str) -> QuadElem:
    """Relative trace computed directly from B coordinates.

    Closed forms over the half-integer generators of each quadratic subring;
    these must agree with `trace_to_subfield` on the same element.
    """
    p = xc.params
    x1, x2, x3, x4 = xc.x
    mg = p.m_over_g
    if which == "u":
        return QuadElem.in_half_basis(-p.m, 2 * x1 + x4, x2 + 2 * x3)
    if which == "v":
        return QuadElem.in_half_basis(
            p.n, 2 * x1 + Fraction((1 + mg) * x2, 2) + x3, -mg * x2 + 2 * x4
        )
    if which == "w":
        return QuadElem.in_half_basis(p.ell, 2 * x1 + x3 + x4, x2)
    raise ValueError(f"unknown subfield {which!r}, expected one of {SUBFIELDS}")


def to_integral_coords(a: KElem) -> IntegralCoords | None:
    """Solve the change-of-basis system; integer solution iff a is in the lattice."""
    q0, q1, q2, q3 = a.coords
    mg = a.params.m_over_g
    x2 = 4 * q3
    x3 = 2 * (q1 - q3)
    x4 = 2 * (q2 + mg * q3)
    x1 = q0 - q1 - q2 - mg * q3
    xs = (x1, x2, x3, x4)
    if any(x.denominator != 1 for x in xs):
        return None
    return IntegralCoords(a.params, tuple(int(x) for x in xs))


def is_integral(a: KElem) -> bool:
    return to_integral_coords(a) is not None


def char_poly(a: KElem) -> tuple[Fraction, Fraction, Fraction, Fraction, Fraction]:
    """Monic degree-4 characteristic polynomial, coefficients low to high.

    Computed as the product of (X - c) over the Galois orbit; every
    coefficient must collapse to a rational.
    """
    coeffs = [KElem.one(a.params)]
    for c in conjugates(a):
        nxt = [(-c) * coeffs[0]]
        for k in range(1, len(coeffs)):
            nxt.append(coeffs[k - 1] - c * coeffs[k])
        nxt.append(coeffs[-1])
        coeffs = nxt
    out = []
    for k in coeffs:
        if not k.is_rational():
            raise AssertionError("characteristic polynomial has irrational coefficient")
        out.append(k.coords[0])
    return tuple(out)


def is_algebraic_integer(a: KElem) -> bool:
    """Independent integrality test: integer characteristic polynomial."""
    return all(c.denominator == 1 for c in char_poly(a))


def basis_change_determinant(params: FieldParams) -> Fraction:
    """Determinant of the matrix writing B over {1, u, v, w}."""
    cols = [e.coords for e in integral_basis(params)]
    mat = [[cols[j][i] for j in range(4)] for i in range(4)]
    total = Fraction(0)
    for perm, sign in _PERMS:
        term = Fraction(1)
        for row, col in enumerate(perm):
            term *= mat[row][col]
        total += sign * term
    return total


def _permutations_with_sign():
    from itertools import permutations

    out = []
    for perm in permutations(range(4)):
        inv = sum(
            1 for i in range(4) for j in range(i + 1, 4) if perm[i] > perm[j]
        )
        out.append((perm, 1 if inv % 2 == 0 else -1))
    return tuple(out)

_PERMS = _permutations_with_sign()


@lru_cache(maxsize=None)
def structure_constants(
    params: FieldParams,
) -> tuple[tuple[tuple[int, int, int, int], ...], ...]:
    """Integer products e_i * e_j of the module basis, in B coordinates.

    The table existing at all is the closure of the lattice under
    multiplication; used for fast searches over integer coordinates.
    """
    basis = integral_basis(params)
    table = []
    for ei in basis:
        row = []
        for ej in basis:
            prod = to_integral_coords(ei * ej)
            if prod is None:
                raise AssertionError("basis product left the lattice")
            row.append(prod.x)
        table.append(tuple(row))
    return tuple(table)


def mul_basis_coords(params: FieldParams, x, y) -> tuple[int, int, int, int]:
    """Product of two lattice elements given by integer B coordinates."""
    table = structure_constants(params)
    acc = [0, 0, 0, 0]
    for i in range(4):
        xi = x[i]
        if not xi:
            continue
        for j in range(4):
            c = xi * y[j]
            if not c:
                continue
            t = table[i][j]
            acc[0] += c * t[0]
            acc[1] += c * t[1]
            acc[2] += c * t[2]
            acc[3] += c * t[3]
    return tuple(acc)


def square_basis_coords(params: FieldParams, x) -> tuple[int, int, int, int]:
    return mul_basis_coords(params, x, x)
