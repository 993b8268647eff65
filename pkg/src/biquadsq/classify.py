"""Pattern classification of m and the g = 3 certification pipeline.

Three prime patterns admit a certificate: a single prime p = 3 (mod 8);
a product pq with p = 3, q = 1 (mod 8) and (p/q) = -1; and a product pqr
with all factors 3 (mod 8) whose residue symbols are cyclically -1 under
some labeling.  For each the -2 Pell equation is solvable, the ring level
is 2, and every integral element is a sum of three squares while some
element is provably not a sum of two.
"""

from __future__ import annotations

from dataclasses import dataclass

from .arith import factor, jacobi
from .field import FieldParams, IntegralCoords
from .pell import CaseTrace, PellSolution, case_analysis, solve_target
from .squares import (
    SLevelResult,
    minus_one_as_two_squares,
    obstruction_scan,
    s_level,
)

__all__ = [
    "Certificate",
    "ClassificationReport",
    "RoutesDisagreeError",
    "certify_g3",
    "classify_m",
]

PATTERNS = ("I", "II", "III", "none")


class RoutesDisagreeError(RuntimeError):
    """The direct Pell search and the divisor-split route are inconsistent."""


@dataclass(frozen=True)
class Certificate:
    condition: str
    value: str
    ok: bool

    def to_dict(self) -> dict:
        return {"condition": self.condition, "value": self.value, "ok": self.ok}


@dataclass(frozen=True)
class ClassificationReport:
    """Pattern verdict for m with its certificates and, when earned, g = 3.

    A pattern of "none" is neutral: the certified patterns say nothing about
    such m, and the report never claims g != 3.
    """

    m: int
    pattern: str
    certificates: tuple[Certificate, ...]
    pell_witness: PellSolution | None = None
    case_trace: CaseTrace | None = None
    level: SLevelResult | None = None
    obstruction_witness: IntegralCoords | None = None
    conclusion: str | None = None
    note: str | None = None

    def to_dict(self) -> dict:
        from .pell import Branch  # noqa: F401  (documents the nested schema)

        def trace_dict(t: CaseTrace) -> dict:
            return {
                "m": str(t.m),
                "x0": str(t.x0),
                "y0": str(t.y0),
                "parity_case": t.parity_case,
                "branch": str(t.branch_index),
                "a": str(t.a),
                "b": str(t.b),
                "residual": None if t.residual is None else str(t.residual),
                "branches": [
                    {
                        "index": str(b.index),
                        "d_plus": str(b.d_plus),
                        "d_minus": str(b.d_minus),
                        "consistent": b.consistent,
                        "a": None if b.a is None else str(b.a),
                        "b": None if b.b is None else str(b.b),
                        "contradiction": b.contradiction,
                        "checks": [
                            {
                                "top": str(c.top),
                                "modulus": str(c.modulus),
                                "value": str(c.value),
                            }
                            for c in b.checks
                        ],
                    }
                    for b in t.branches
                ],
            }

        return {
            "m": str(self.m),
            "pattern": self.pattern,
            "certificates": [c.to_dict() for c in self.certificates],
            "pell_witness": (
                None
                if self.pell_witness is None
                else {"x": str(self.pell_witness.x), "y": str(self.pell_witness.y)}
            ),
            "case_trace": None if self.case_trace is None else trace_dict(self.case_trace),
            "s_level": None if self.level is None else self.level.to_dict(),
            "obstruction_witness": (
                None
                if self.obstruction_witness is None
                else self.obstruction_witness.to_dict()
            ),
            "conclusion": self.conclusion,
            "note": self.note,
        }


def _congruence_cert(label: str, p: int, target: int) -> Certificate:
    return Certificate(f"{label} = {target} (mod 8)", str(p % 8), p % 8 == target)


def _symbol_cert(p: int, q: int, want: int = -1) -> Certificate:
    value = jacobi(p, q)
    return Certificate(f"({p}/{q}) = {want}", str(value), value == want)


def classify_m(m: int) -> ClassificationReport:
    """Match m against the three certified prime patterns.

    The three-prime condition is label-independent: with all factors 3 mod 8,
    reciprocity makes the symbols around a cycle either all -1 or all +1 in
    one orientation, and reversing the orientation swaps the two, so the
    pattern holds exactly when the three oriented symbols agree.
    """
    if m < 1:
        raise ValueError(f"classify_m requires positive m, got {m}")
    fact = factor(m)
    if not fact.is_squarefree():
        raise ValueError(f"classify_m requires squarefree m, got {m}")
    primes = fact.primes
    certs: list[Certificate] = []

    if len(primes) == 1:
        p = primes[0]
        certs.append(_congruence_cert("p", p, 3))
        pattern = "I" if certs[-1].ok else "none"
        return ClassificationReport(m, pattern, tuple(certs))

    if len(primes) == 2:
        threes = [p for p in primes if p % 8 == 3]
        ones = [p for p in primes if p % 8 == 1]
        if len(threes) == 1 and len(ones) == 1:
            p, q = threes[0], ones[0]
            certs.append(_congruence_cert("p", p, 3))
            certs.append(_congruence_cert("q", q, 1))
            certs.append(_symbol_cert(p, q))
            pattern = "II" if all(c.ok for c in certs) else "none"
        else:
            certs.extend(_congruence_cert("p", p, 3) for p in primes)
            pattern = "none"
        return ClassificationReport(m, pattern, tuple(certs))

    if len(primes) == 3:
        certs.extend(
            _congruence_cert(label, p, 3)
            for label, p in zip(("p", "q", "r"), primes)
        )
        if all(c.ok for c in certs):
            p1, p2, p3 = primes
            s1, s2, s3 = jacobi(p1, p2), jacobi(p2, p3), jacobi(p3, p1)
            if s1 == s2 == s3:
                # one of the two cyclic orientations carries all -1
                p, q, r = (p1, p2, p3) if s1 == -1 else (p1, p3, p2)
                certs.append(_symbol_cert(p, q))
                certs.append(_symbol_cert(q, r))
                certs.append(_symbol_cert(r, p))
                return ClassificationReport(m, "III", tuple(certs))
            certs.append(
                Certificate(
                    "cyclic residue symbols agree",
                    f"({s1}, {s2}, {s3})",
                    False,
                )
            )
        return ClassificationReport(m, "none", tuple(certs))

    certs.append(
        Certificate("number of prime factors in {1, 2, 3}", str(len(primes)), False)
    )
    return ClassificationReport(m, "none", tuple(certs))


def certify_g3(
    params: FieldParams,
    search_box: int | None = None,
    scan_obstruction: bool = True,
) -> ClassificationReport:
    """Run the full certification for the field given by params.

    When m matches a pattern, obtains the -2 Pell solution both by direct
    convergent search and through the divisor-split analysis, requires the
    two routes to agree, lifts it to the two-square witness for -1, and
    concludes g = 3.  Optionally attaches a residue-class witness that some
    element is not a sum of two squares.
    """
    base = classify_m(params.m)
    if base.pattern == "none":
        return ClassificationReport(
            m=base.m,
            pattern=base.pattern,
            certificates=base.certificates,
            note="not covered by the certified patterns",
        )

    direct = solve_target(params.m, -2)
    trace = case_analysis(params.m)
    split_solvable = trace.residual == -2
    if (direct is None) != (not split_solvable):
        raise RoutesDisagreeError(
            f"m={params.m}: direct search says "
            f"{'solvable' if direct else 'unsolvable'}, divisor split says "
            f"{'solvable' if split_solvable else 'unsolvable'}"
        )
    if direct is None:
        raise RoutesDisagreeError(
            f"m={params.m}: pattern {base.pattern} matched but x^2 - m*y^2 = -2 "
            "has no solution on either route"
        )
    # the split produces its own solution (b, a); both must verify
    split_witness = PellSolution(params.m, -2, trace.b, trace.a)

    witness_pair = minus_one_as_two_squares(params)
    assert witness_pair is not None
    level = s_level(params, search_box)
    assert level.s == 2

    obstruction = obstruction_scan(params) if scan_obstruction else None
    return ClassificationReport(
        m=base.m,
        pattern=base.pattern,
        certificates=base.certificates,
        pell_witness=direct if direct.y <= split_witness.y else split_witness,
        case_trace=trace,
        level=level,
        obstruction_witness=obstruction,
        conclusion="g = 3",
    )
