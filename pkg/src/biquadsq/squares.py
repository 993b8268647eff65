"""Sum-of-squares machinery for the biquadratic ring of integers: verified
representations, the level of -1, length compression, bounded-search oracles,
and residue-ring obstructions.

Every representation is wrapped in `SquaresRep`, whose constructor re-derives
the exact identity; an unverified representation cannot exist.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import isqrt

import numpy as np

from .arith import four_squares, three_squares
from .field import (
    FieldParams,
    IntegralCoords,
    KElem,
    integral_basis,
    is_integral,
    kelem_from_dict,
    square_basis_coords,
    to_integral_coords,
)
from .pell import solve_target

__all__ = [
    "SLevelResult",
    "SearchExhaustedError",
    "SquaresRep",
    "compress",
    "min_squares_bounded",
    "minus_one_as_two_squares",
    "moser_table",
    "obstruction_scan",
    "product_rep",
    "quad_ring_level",
    "represent_any",
    "represent_basis_element",
    "represent_integer",
    "s_level",
    "two_square_obstruction",
]

DEFAULT_SEARCH_BOX = 12
LENGTH3_BOX_CAP = 5

ENV_SEARCH_BOX = "BIQUAD_SEARCH_BOX"


class SearchExhaustedError(RuntimeError):
    """A bounded search ended without producing the required certificate."""


def _default_box() -> int:
    raw = os.environ.get(ENV_SEARCH_BOX)
    if raw is None:
        return DEFAULT_SEARCH_BOX
    box = int(raw)
    if box < 1:
        raise ValueError(f"{ENV_SEARCH_BOX} must be a positive integer, got {raw}")
    return box


@dataclass(frozen=True)
class SquaresRep:
    """Verified identity: sum of the squares of `terms` equals `target`.

    Construction re-derives the identity with exact field arithmetic and
    checks that every term lies in the ring of integers.
    """

    target: KElem
    terms: tuple[KElem, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "terms", tuple(self.terms))
        total = KElem.of(self.target.params, 0)
        for t in self.terms:
            if t.params != self.target.params:
                raise ValueError("term from a different field")
            if not is_integral(t):
                raise ValueError(f"term {t!r} is not integral")
            total = total + t * t
        if total != self.target:
            raise ValueError("squares do not sum to the target")

    def __len__(self) -> int:
        return len(self.terms)

    def to_dict(self) -> dict:
        return {
            "target": self.target.to_dict(),
            "terms": [t.to_dict() for t in self.terms],
            "verified": True,
        }

    @classmethod
    def from_dict(cls, data: dict) -> SquaresRep:
        target = kelem_from_dict(data["target"])
        if isinstance(target, IntegralCoords):
            target = target.to_kelem()
        terms = []
        for t in data["terms"]:
            k = kelem_from_dict(t)
            terms.append(k.to_kelem() if isinstance(k, IntegralCoords) else k)
        return cls(target, tuple(terms))  # verification recomputed, never trusted


def moser_table(d: int) -> tuple[int, frozenset[int]]:
    """Level classification of Q(sqrt(-d)): (field level, ring level set).

    The ring value is {1} for d = 1, {4} for d = 7 mod 8, and the ambiguous
    {2, 3} otherwise; the ambiguity is resolved by `quad_ring_level`.
    """
    if d < 1:
        raise ValueError(f"moser_table requires d >= 1, got {d}")
    if d == 1:
        return 1, frozenset({1})
    if d % 8 == 7:
        return 4, frozenset({4})
    return 2, frozenset({2, 3})


# ---------------------------------------------------------------------------
# Quadratic subring searches (two coordinates over {1, omega})
# ---------------------------------------------------------------------------


def _quad_square(d: int, half: bool, c0: int, c1: int) -> tuple[int, int]:
    # omega = (1+sqrt(-d))/2 when half (d = 3 mod 4), else omega = sqrt(-d)
    if half:
        # omega^2 = omega - (1+d)/4
        k = (1 + d) // 4
        return (c0 * c0 - k * c1 * c1, 2 * c0 * c1 + c1 * c1)
    return (c0 * c0 - d * c1 * c1, 2 * c0 * c1)


def _quad_minus_one_search(
    d: int, t: int, box: int
) -> list[tuple[int, int]] | None:
    """Exhaustive search for -1 as a sum of t squares in O of Q(sqrt(-d))."""
    half = d % 4 == 3
    squares: dict[tuple[int, int], tuple[int, int]] = {}
    for c0 in range(-box, box + 1):
        for c1 in range(box + 1):  # squares of +-x agree, halve the grid
            sq = _quad_square(d, half, c0, c1)
            squares.setdefault(sq, (c0, c1))
    target = (-1, 0)
    keys = sorted(squares)
    if t == 1:
        return [squares[target]] if target in squares else None
    if t == 2:
        for s in keys:
            rest = (target[0] - s[0], target[1] - s[1])
            if rest in squares:
                return [squares[s], squares[rest]]
        return None
    if t == 3:
        for i, s1 in enumerate(keys):
            mid = (target[0] - s1[0], target[1] - s1[1])
            for s2 in keys[i:]:
                rest = (mid[0] - s2[0], mid[1] - s2[1])
                if rest in squares:
                    return [squares[s1], squares[s2], squares[rest]]
        return None
    raise ValueError(f"unsupported length {t}")


def quad_ring_level(
    d: int, search_box: int | None = None
) -> tuple[int, tuple[tuple[int, int], ...], str]:
    """Resolved level of the ring of integers of Q(sqrt(-d)) with a witness.

    Witness elements are coordinate pairs over {1, omega}.  For d = 3 mod 4
    the value 2 is decided exactly by solvability of x^2 - d*y^2 = -2; for
    other d the exclusion of 2 is certified within the search box only.
    """
    if d < 1:
        raise ValueError(f"quad_ring_level requires d >= 1, got {d}")
    if d == 1:
        return 1, ((0, 1),), "table"
    if d % 8 == 7:
        # -1 = (sqrt(-d))^2 + (d-1); d-1 = 6 mod 8 is a sum of three nonzero squares
        r = three_squares(d - 1)
        assert r is not None and all(r)
        root = (-1, 2)  # sqrt(-d) = 2*omega - 1 since d = 3 mod 4
        return 4, (root, *((c, 0) for c in r)), "table"
    box = search_box if search_box is not None else max(_default_box(), 24)
    if d % 4 == 3:
        sol = solve_target(d, -2)
        if sol is not None:
            x, y = sol.x, sol.y
            return 2, (((x - y) // 2, y), ((x + y) // 2, -y)), "pell_criterion"
        two = None  # exact exclusion of 2 via the solvability criterion
    else:
        two = _quad_minus_one_search(d, 2, box)
        if two is not None:
            return 2, tuple(two), "search"
    for b in (8, 16, 32, max(box, 32)):
        three = _quad_minus_one_search(d, 3, b)
        if three is not None:
            return 3, tuple(three), "search"
    raise SearchExhaustedError(
        f"no short representation of -1 found in the ring of Q(sqrt(-{d}))"
    )


# ---------------------------------------------------------------------------
# Lattice enumeration helpers (integer coordinates over the module basis)
# ---------------------------------------------------------------------------


def _np_table(params: FieldParams) -> np.ndarray:
    from .field import structure_constants

    return np.array(structure_constants(params), dtype=np.int64)


def _pack_rows(rows: np.ndarray) -> np.ndarray:
    rows = np.ascontiguousarray(rows, dtype=np.int64)
    return rows.view(np.dtype((np.void, rows.dtype.itemsize * rows.shape[1]))).ravel()


@lru_cache(maxsize=8)
def _square_catalog(params: FieldParams, box: int):
    """All squares of lattice elements with coordinates in [-box, box]^4.

    Returns (distinct squares as an int64 array, sorted packed keys, the sort
    order, and one preimage element per distinct square).
    """
    side = np.arange(-box, box + 1, dtype=np.int64)
    grid = np.stack(np.meshgrid(side, side, side, side, indexing="ij"), axis=-1)
    elems = grid.reshape(-1, 4)
    table = _np_table(params)
    sq = np.einsum("ni,nj,ijk->nk", elems, elems, table)
    packed = _pack_rows(sq)
    uniq, first = np.unique(packed, return_index=True)
    squares = sq[first]
    pre = elems[first]
    keys = _pack_rows(squares)
    order = np.argsort(keys)
    return squares, keys[order], order, pre


def _member_rows(rows: np.ndarray, sorted_keys: np.ndarray) -> np.ndarray:
    keys = _pack_rows(rows)
    idx = np.searchsorted(sorted_keys, keys)
    idx_c = np.minimum(idx, len(sorted_keys) - 1)
    return (idx < len(sorted_keys)) & (sorted_keys[idx_c] == keys)


def _lookup_row(row: np.ndarray, sorted_keys: np.ndarray, order: np.ndarray) -> int:
    key = _pack_rows(row.reshape(1, 4))[0]
    idx = int(np.searchsorted(sorted_keys, key))
    return int(order[idx])


def _bounded_square_tuple_search(
    params: FieldParams, target: tuple[int, int, int, int], t: int, box: int
) -> list[IntegralCoords] | None:
    """Exhaustive search for `target` as a sum of t lattice squares in the box."""
    squares, sorted_keys, order, pre = _square_catalog(params, box)
    tgt = np.array(target, dtype=np.int64)

    def found(i: int) -> IntegralCoords:
        return IntegralCoords(params, tuple(int(c) for c in pre[i]))

    if t == 1:
        hit = _member_rows(tgt.reshape(1, 4), sorted_keys)
        if hit[0]:
            return [found(_lookup_row(tgt, sorted_keys, order))]
        return None
    if t == 2:
        rest = tgt[None, :] - squares
        hits = np.nonzero(_member_rows(rest, sorted_keys))[0]
        if len(hits):
            i = int(hits[0])
            j = _lookup_row(rest[i], sorted_keys, order)
            return [found(i), found(j)]
        return None
    if t == 3:
        for i in range(len(squares)):
            mid = tgt - squares[i]
            rest = mid[None, :] - squares[i:]
            hits = np.nonzero(_member_rows(rest, sorted_keys))[0]
            if len(hits):
                j = i + int(hits[0])
                k = _lookup_row(rest[int(hits[0])], sorted_keys, order)
                return [found(i), found(j), found(k)]
        return None
    if t == 4:
        for i in range(len(squares)):
            sub = _bounded_square_tuple_search(
                params, tuple(int(c) for c in (tgt - squares[i])), 3, box
            )
            if sub is not None:
                return [found(i), *sub]
        return None
    raise ValueError(f"unsupported tuple length {t}")


# ---------------------------------------------------------------------------
# The level of -1
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SLevelResult:
    """Level s of the ring with a verified witness for -1.

    `method` records where the witness came from; `exclusion_boxes` lists the
    (length, box) pairs for every shorter length ruled out by bounded search.
    A result with an empty `exclusion_boxes` is exact without qualification.
    """

    params: FieldParams
    s: int
    witness: SquaresRep
    method: str
    exclusion_boxes: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        if len(self.witness) != self.s:
            raise ValueError("witness length does not match the level")
        minus_one = KElem.of(self.params, -1)
        if self.witness.target != minus_one:
            raise ValueError("witness does not represent -1")

    def to_dict(self) -> dict:
        return {
            "m": str(self.params.m),
            "n": str(self.params.n),
            "s": str(self.s),
            "method": self.method,
            "exclusion_boxes": {str(t): str(b) for t, b in self.exclusion_boxes},
            "witness": self.witness.to_dict(),
        }


def minus_one_as_two_squares(params: FieldParams) -> tuple[KElem, KElem] | None:
    """Lift a solution of x^2 - m*y^2 = -2 to a two-square witness for -1.

    Returns ((x + y*u)/2, (x - y*u)/2), both integral because x and y are
    forced odd; None when the equation has no solution.
    """
    sol = solve_target(params.m, -2)
    if sol is None:
        return None
    x, y = Fraction(sol.x), Fraction(sol.y)
    a = KElem.of(params, x / 2, y / 2)
    b = KElem.of(params, x / 2, -y / 2)
    return a, b


def _lift_quad_pair(params: FieldParams, gen: str, pair: tuple[int, int]) -> KElem:
    """Embed c0 + c1*omega of a quadratic subring, omega = (1+gen)/2."""
    c0, c1 = pair
    half = Fraction(c1, 2)
    if gen == "u":
        return KElem.of(params, c0 + half, half)
    if gen == "w":
        return KElem.of(params, c0 + half, 0, 0, half)
    raise ValueError(f"no imaginary generator {gen!r}")


def s_level(params: FieldParams, search_box: int | None = None) -> SLevelResult:
    """Compute s = minimal number of integral squares summing to -1.

    -1 is never a single square here (no quadratic subfield is Q(i), since
    the three kernels are -m < -1, n > 1 and ell < -1).  The two-square case
    is decided by the -2 Pell criterion in the imaginary subrings and a
    bounded biquadratic search; longer witnesses come from the subring
    classification or bounded search, with every exclusion box recorded.
    """
    box = search_box if search_box is not None else _default_box()
    return _s_level_cached(params, box)


@lru_cache(maxsize=None)
def _s_level_cached(params: FieldParams, box: int) -> SLevelResult:
    minus_one = KElem.of(params, -1)

    def rep(terms) -> SquaresRep:
        return SquaresRep(minus_one, tuple(terms))

    for d, gen in ((params.m, "u"), (-params.ell, "w")):
        sol = solve_target(d, -2)
        if sol is not None:
            x, y = sol.x, sol.y
            terms = (
                _lift_quad_pair(params, gen, ((x - y) // 2, y)),
                _lift_quad_pair(params, gen, ((x + y) // 2, -y)),
            )
            return SLevelResult(params, 2, rep(terms), "pell_criterion", ())
    target = (-1, 0, 0, 0)
    hit2 = _bounded_square_tuple_search(params, target, 2, box)
    if hit2 is not None:
        # exact: length 1 is impossible structurally, so nothing is box-qualified
        return SLevelResult(
            params, 2, rep(tuple(h.to_kelem() for h in hit2)), "bounded_search", ()
        )
    exclusions = ((2, box),)
    for d, gen in ((params.m, "u"), (-params.ell, "w")):
        if d % 8 == 3:
            level, pairs, _ = quad_ring_level(d)
            assert level == 3
            terms = tuple(_lift_quad_pair(params, gen, p) for p in pairs)
            return SLevelResult(params, 3, rep(terms), "subfield_moser", exclusions)
    box3 = min(box, LENGTH3_BOX_CAP)
    hit3 = _bounded_square_tuple_search(params, target, 3, box3)
    if hit3 is not None:
        return SLevelResult(
            params,
            3,
            rep(tuple(h.to_kelem() for h in hit3)),
            "bounded_search",
            exclusions + ((3, box3),),
        )
    # Both imaginary subrings sit at level 4: -1 = u^2 + (m - 1), and
    # m - 1 = 2 mod 4 is always a sum of three squares.
    r = three_squares(params.m - 1)
    assert r is not None
    terms = (KElem.u(params),) + tuple(KElem.of(params, c) for c in r if c)
    return SLevelResult(
        params, 4, rep(terms), "subfield_moser", exclusions + ((3, box3),)
    )


# ---------------------------------------------------------------------------
# The representation pipeline
# ---------------------------------------------------------------------------


def product_rep(a: SquaresRep, b: SquaresRep) -> SquaresRep:
    """Representation of the product target: all pairwise term products."""
    if a.target.params != b.target.params:
        raise ValueError("params mismatch between representations")
    terms = tuple(x * y for x in a.terms for y in b.terms)
    return SquaresRep(a.target * b.target, terms)


def represent_integer(t: int, params: FieldParams) -> SquaresRep:
    """Sum-of-squares representation of a rational integer.

    Nonnegative integers embed through the four-square decomposition;
    negative ones multiply the representation of -1 by that of |t|.
    """
    if t == 0:
        return SquaresRep(KElem.of(params, 0), ())
    if t > 0:
        parts = tuple(KElem.of(params, c) for c in four_squares(t) if c)
        return SquaresRep(KElem.of(params, t), parts)
    return product_rep(s_level(params).witness, represent_integer(-t, params))


@lru_cache(maxsize=None)
def _basis_element_rep(params: FieldParams, k: int) -> SquaresRep:
    basis = integral_basis(params)
    if k == 1:
        return represent_integer(1, params)
    if k == 3:
        e3 = basis[2]
        tail = represent_integer((params.m + 1) // 4, params)
        return SquaresRep(e3, (e3, *tail.terms))
    if k == 4:
        e4 = basis[3]
        tail = represent_integer(-(params.n - 1) // 4, params)
        return SquaresRep(e4, (e4, *tail.terms))
    if k == 2:
        half_w = KElem.of(params, Fraction(1, 2), 0, 0, Fraction(1, 2))
        tail = represent_integer((1 - params.ell) // 4, params)
        rep_half_w = SquaresRep(half_w, (half_w, *tail.terms))
        return product_rep(_basis_element_rep(params, 3), rep_half_w)
    raise ValueError(f"basis index must be 1..4, got {k}")


def represent_basis_element(k: int, params: FieldParams) -> SquaresRep:
    """Representation of the k-th module basis element (1-indexed).

    Each half-integer generator e satisfies e = e^2 + integer, reducing the
    problem to rational integers; the quarter-integer element is the product
    of two half-integer ones.
    """
    return _basis_element_rep(params, k)


def represent_any(a: IntegralCoords) -> SquaresRep:
    """Raw sum-of-squares representation of an arbitrary integral element.

    Concatenates, over the basis expansion, the products of the coefficient
    representations with the basis-element representations.  Length is
    unbounded; `compress` brings it down to the level bound.
    """
    params = a.params
    terms: list[KElem] = []
    for k, xk in enumerate(a.x, start=1):
        if xk == 0:
            continue
        part = product_rep(
            represent_integer(xk, params), represent_basis_element(k, params)
        )
        terms.extend(part.terms)
    return SquaresRep(a.to_kelem(), tuple(terms))


def compress(a: IntegralCoords, search_box: int | None = None) -> SquaresRep:
    """Short representation: length s+1 for even level s, s+2 for odd.

    Writes -target as a raw sum of squares b_1^2 + ... + b_t^2, forms

        g2 = S + P,  g1 = g2 + 1,  g3 = S + 1

    with S the sum of the b_i and P the sum of products over i < j (computed
    as (S^2 + target)/2), giving target = g1^2 - g2^2 - g3^2 exactly.  The
    factor -1 is then replaced by the level witness and consecutive witness
    pairs are folded through the two-square multiplication identity.  Zero
    terms are kept so the output length is determined by the level alone.
    """
    params = a.params
    target = a.to_kelem()
    if target.is_zero():
        return SquaresRep(target, ())
    neg = represent_any(-a)
    S = KElem.of(params, 0)
    for b in neg.terms:
        S = S + b
    P = (S * S + target) * Fraction(1, 2)
    g2 = S + P
    g1 = g2 + 1
    g3 = S + 1
    assert g1 * g1 - g2 * g2 - g3 * g3 == target
    eps = s_level(params, search_box).witness.terms
    terms = [g1]
    for i in range(0, len(eps) - 1, 2):
        e1, e2 = eps[i], eps[i + 1]
        terms.append(e1 * g2 + e2 * g3)
        terms.append(e1 * g3 - e2 * g2)
    if len(eps) % 2 == 1:
        e = eps[-1]
        terms.append(e * g2)
        terms.append(e * g3)
    return SquaresRep(target, tuple(terms))


def min_squares_bounded(
    a: IntegralCoords, t_max: int = 3, box: int = 8
) -> int | None:
    """Minimal t <= t_max with a sum-of-t-squares representation in the box.

    Exhaustive within the box, so None only certifies absence for terms with
    coordinates bounded by `box`.  Cost grows steeply with t and box.
    """
    if not 1 <= t_max <= 4:
        raise ValueError(f"t_max must be between 1 and 4, got {t_max}")
    if box < 1:
        raise ValueError(f"box must be positive, got {box}")
    for t in range(1, t_max + 1):
        if _bounded_square_tuple_search(a.params, a.x, t, box) is not None:
            return t
    return None


# ---------------------------------------------------------------------------
# Residue-ring obstruction
# ---------------------------------------------------------------------------


@lru_cache(maxsize=16)
def _two_square_sums_mod(params: FieldParams, k: int) -> frozenset[tuple[int, ...]]:
    """All residues of b1^2 + b2^2 in the ring modulo 2^k."""
    mod = 1 << k
    half = 1 << max(k - 1, 1)
    squares = set()
    for x in product(range(half), repeat=4):
        sq = square_basis_coords(params, x)
        squares.add(tuple(c % mod for c in sq))
    sums = set()
    for s1 in squares:
        for s2 in squares:
            sums.add(tuple((c1 + c2) % mod for c1, c2 in zip(s1, s2)))
    return frozenset(sums)


def two_square_obstruction(a: IntegralCoords, k: int = 3) -> bool:
    """True iff a is not a sum of two squares modulo 2^k.

    A True answer certifies that a is not a sum of two integral squares in
    the full ring (any global identity reduces); False is inconclusive.
    """
    if not 1 <= k <= 4:
        raise ValueError(f"k must be between 1 and 4, got {k}")
    mod = 1 << k
    residue = tuple(c % mod for c in a.x)
    return residue not in _two_square_sums_mod(a.params, k)


def obstruction_scan(params: FieldParams, k: int = 3) -> IntegralCoords | None:
    """First residue class modulo 2^k that is not a sum of two squares."""
    if not 1 <= k <= 4:
        raise ValueError(f"k must be between 1 and 4, got {k}")
    sums = _two_square_sums_mod(params, k)
    mod = 1 << k
    for x in product(range(mod), repeat=4):
        if x not in sums:
            return IntegralCoords(params, x)
    return None
