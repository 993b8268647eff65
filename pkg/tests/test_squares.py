import json
import random
from fractions import Fraction
from itertools import product

import pytest
import sympy

from _pools import random_params
from biquadsq.field import IntegralCoords, KElem, make_params, to_integral_coords
from biquadsq.pell import solve_target
from biquadsq.squares import (
    SquaresRep,
    compress,
    min_squares_bounded,
    minus_one_as_two_squares,
    moser_table,
    obstruction_scan,
    product_rep,
    quad_ring_level,
    represent_any,
    represent_basis_element,
    represent_integer,
    s_level,
    two_square_obstruction,
)

P35 = make_params(3, 5)


def ic(params, *x):
    return IntegralCoords(params, tuple(x))


def test_gamma_identity_symbolic():
    """g1^2 - g2^2 - g3^2 = -(b1^2 + ... + bt^2) with strict i < j products.

    The inclusive i <= j reading breaks the telescoping already at t = 1.
    """
    for t in range(1, 5):
        bs = sympy.symbols(f"b1:{t + 1}")
        S = sum(bs)
        P = sum(bs[i] * bs[j] for i in range(t) for j in range(i + 1, t))
        g2 = S + P
        g1 = g2 + 1
        g3 = S + 1
        lhs = sympy.expand(g1**2 - g2**2 - g3**2 + sum(b**2 for b in bs))
        assert lhs == 0
    b = sympy.symbols("b")
    g2_incl = b + b * b
    assert sympy.expand((g2_incl + 1) ** 2 - g2_incl**2 - (b + 1) ** 2 + b**2) != 0


def test_squares_rep_cannot_exist_unverified():
    with pytest.raises(ValueError, match="sum"):
        SquaresRep(KElem.of(P35, 2), (KElem.one(P35),))
    with pytest.raises(ValueError, match="integral"):
        SquaresRep(KElem.of(P35, Fraction(-3, 4)), (KElem.of(P35, 0, Fraction(1, 2)),))


def test_squares_rep_json_reverifies():
    rep = represent_integer(7, P35)
    blob = rep.to_dict()
    assert SquaresRep.from_dict(json.loads(json.dumps(blob))).target == rep.target
    tampered = json.loads(json.dumps(blob))
    tampered["target"]["coords"] = ["8", "0", "0", "0"]
    with pytest.raises(ValueError):
        SquaresRep.from_dict(tampered)


def test_moser_table_fixtures():
    assert moser_table(1) == (1, frozenset({1}))
    assert moser_table(7) == (4, frozenset({4}))
    assert moser_table(3) == (2, frozenset({2, 3}))
    assert moser_table(2) == (2, frozenset({2, 3}))


def test_quad_ring_level_fixtures():
    assert quad_ring_level(1)[0] == 1
    assert quad_ring_level(2)[0] == 2
    assert quad_ring_level(3)[0] == 2
    assert quad_ring_level(5)[0] == 2
    assert quad_ring_level(6)[0] == 3
    for d in (7, 15, 23):
        assert quad_ring_level(d)[0] == 4


def quad_square(d, half, c0, c1):
    if half:
        k = (1 + d) // 4
        return (c0 * c0 - k * c1 * c1, 2 * c0 * c1 + c1 * c1)
    return (c0 * c0 - d * c1 * c1, 2 * c0 * c1)


def test_quad_ring_witnesses_verify():
    for d in (1, 2, 3, 5, 6, 7, 15, 19, 23, 35, 43):
        s, witness, _ = quad_ring_level(d)
        assert len(witness) == s
        half = d % 4 == 3
        total = (0, 0)
        for c0, c1 in witness:
            sq = quad_square(d, half, c0, c1)
            total = (total[0] + sq[0], total[1] + sq[1])
        assert total == (-1, 0)


def test_quad_ring_matches_moser_for_small_d():
    from biquadsq.arith import is_squarefree

    for d in range(1, 51):
        if not is_squarefree(d):
            continue
        s, _, _ = quad_ring_level(d)
        assert s in moser_table(d)[1], d


def test_minus_one_as_two_squares_fixtures():
    a, b = minus_one_as_two_squares(P35)
    assert a == KElem.of(P35, Fraction(1, 2), Fraction(1, 2))
    assert b == KElem.of(P35, Fraction(1, 2), Fraction(-1, 2))
    assert a * a + b * b == KElem.of(P35, -1)

    p515 = make_params(51, 5)
    a, b = minus_one_as_two_squares(p515)
    assert a == KElem.of(p515, Fraction(7, 2), Fraction(1, 2))
    assert a * a + b * b == KElem.of(p515, -1)

    assert minus_one_as_two_squares(make_params(7, 5)) is None


def test_s_level_fixture_35():
    res = s_level(P35)
    assert res.s == 2
    assert res.method == "pell_criterion"
    assert res.exclusion_boxes == ()
    assert set(res.witness.terms) == {
        KElem.of(P35, Fraction(1, 2), Fraction(1, 2)),
        KElem.of(P35, Fraction(1, 2), Fraction(-1, 2)),
    }


def test_s_level_75_biquadratic_witness():
    """Both quadratic subrings fail the -2 criterion for (7, 5), yet the
    biquadratic lattice still reaches -1 with two squares: the element pair
    (u +- v)/2 squares to (-m + n)/2 = -1.  Recorded as the actual outcome."""
    p = make_params(7, 5)
    assert solve_target(7, -2) is None
    assert solve_target(35, -2) is None
    res = s_level(p)
    assert res.s == 2
    assert res.method == "bounded_search"


def test_s_level_witness_never_shorter_than_two():
    rng = random.Random(15)
    for _ in range(6):
        p = random_params(rng, 200)
        assert s_level(p).s >= 2


def test_s_level_level_four_field():
    # m = 7 (mod 8) and |ell| = 7 (mod 8) push both subrings to level 4;
    # the bounded searches then decide the lattice level.
    p = make_params(15, 17)
    res = s_level(p, search_box=4)
    assert res.s == len(res.witness)
    assert res.s in (2, 3, 4)


def test_product_rep():
    one_rep = represent_integer(1, P35)
    two_rep = represent_integer(2, P35)
    assert [t for t in product_rep(one_rep, two_rep).terms] == list(two_rep.terms)
    four = product_rep(two_rep, two_rep)
    assert four.target == KElem.of(P35, 4)
    assert len(four) == 4

    minus_one = s_level(P35).witness
    v_rep = SquaresRep(KElem.of(P35, 5), (KElem.v(P35),))
    minus_five = product_rep(minus_one, v_rep)
    assert minus_five.target == KElem.of(P35, -5)
    assert len(minus_five) == 2


def test_represent_integer():
    assert len(represent_integer(0, P35)) == 0
    seven = represent_integer(7, P35)
    assert sorted(t.coords[0] for t in seven.terms) == [1, 1, 1, 2]
    minus_one = represent_integer(-1, P35)
    assert len(minus_one) == 2


def test_represent_basis_element_fixtures():
    e3_rep = represent_basis_element(3, P35)
    assert e3_rep.target == KElem.of(P35, Fraction(1, 2), Fraction(1, 2))
    assert set(e3_rep.terms) == {e3_rep.target, KElem.one(P35)}

    e1_rep = represent_basis_element(1, P35)
    assert list(e1_rep.terms) == [KElem.one(P35)]

    e4 = KElem.of(P35, Fraction(1, 2), 0, Fraction(1, 2))
    e4_rep = represent_basis_element(4, P35)
    assert e4_rep.target == e4
    assert e4_rep.terms[0] == e4 and len(e4_rep) == 3


def test_represent_any_fixtures():
    assert list(represent_any(ic(P35, 1, 0, 0, 0)).terms) == [KElem.one(P35)]
    e3_rep = represent_any(ic(P35, 0, 0, 1, 0))
    assert e3_rep.target == KElem.of(P35, Fraction(1, 2), Fraction(1, 2))
    neg = represent_any(ic(P35, 0, 0, -1, 0))
    assert len(neg) == 4


def test_represent_any_random_sample():
    rng = random.Random(16)
    for _ in range(5):
        p = random_params(rng, 120)
        for _ in range(8):
            xc = IntegralCoords(p, tuple(rng.randint(-10, 10) for _ in range(4)))
            rep = represent_any(xc)  # constructor verifies the identity
            assert rep.target == xc.to_kelem()


def test_compress_fixtures():
    w_coords = to_integral_coords(KElem.w(P35))
    rep = compress(w_coords)
    assert len(rep) == 3
    assert rep.target == KElem.w(P35)

    assert len(compress(ic(P35, 0, 0, 0, 0))) == 0
    assert len(compress(ic(P35, -1, 0, 0, 0))) == 3


def test_compress_length_matches_level():
    rng = random.Random(17)
    for _ in range(4):
        p = random_params(rng, 120)
        s = s_level(p).s
        for _ in range(5):
            xc = IntegralCoords(p, tuple(rng.randint(-6, 6) for _ in range(4)))
            if all(c == 0 for c in xc.x):
                continue
            rep = compress(xc)
            if s % 2 == 0:
                assert len(rep) == s + 1
            else:
                assert len(rep) <= s + 2


def test_min_squares_bounded_fixtures():
    assert min_squares_bounded(ic(P35, 1, 0, 0, 0), 3, 2) == 1
    assert min_squares_bounded(ic(P35, -1, 0, 0, 0), 3, 2) == 2
    assert min_squares_bounded(ic(P35, 2, 0, 0, 0), 3, 2) == 2
    assert min_squares_bounded(ic(P35, 0, 0, 0, 0), 3, 1) == 1  # 0 = 0^2


def test_min_squares_bounded_validates():
    with pytest.raises(ValueError):
        min_squares_bounded(ic(P35, 1, 0, 0, 0), 5, 2)
    with pytest.raises(ValueError):
        min_squares_bounded(ic(P35, 1, 0, 0, 0), 2, 0)


def test_min_squares_four_term_search():
    # 7 = 2^2+1+1+1 needs all four squares over the rationals, and small
    # boxes have no shorter lattice representation either
    assert min_squares_bounded(ic(P35, 7, 0, 0, 0), 4, 1) == 4


def test_obstruction_fixtures():
    assert not two_square_obstruction(ic(P35, 1, 0, 0, 0))
    assert not two_square_obstruction(ic(P35, 2, 0, 0, 0))
    witness = obstruction_scan(P35)
    assert witness is not None
    assert witness.x == (0, 0, 0, 1)
    assert two_square_obstruction(witness)


def test_obstruction_never_fires_on_actual_two_square_sums():
    rng = random.Random(18)
    for _ in range(50):
        b1 = IntegralCoords(P35, tuple(rng.randint(-4, 4) for _ in range(4))).to_kelem()
        b2 = IntegralCoords(P35, tuple(rng.randint(-4, 4) for _ in range(4))).to_kelem()
        total = to_integral_coords(b1 * b1 + b2 * b2)
        for k in (1, 2, 3, 4):
            assert not two_square_obstruction(total, k)


def test_obstruction_scan_none_when_everything_reachable():
    # k = 1 separates too little for (3, 5): every residue is a two-square sum
    assert obstruction_scan(P35, k=1) is None


def test_oracle_agreement_small_elements():
    count = 0
    for x in product((-1, 0, 1), repeat=4):
        xc = IntegralCoords(P35, x)
        t = min_squares_bounded(xc, 3, 2)
        if t is None:
            continue
        count += 1
        if not xc.to_kelem().is_zero():
            assert len(compress(xc)) >= t
        if t <= 2:
            assert not two_square_obstruction(xc)
    assert count > 20
