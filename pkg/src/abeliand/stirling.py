"""Exact machinery for non-centered Stirling numbers of the first kind (r = 1).

Rows of coefficients s(i,j;1) are the coefficients of the falling factorial
(x-1)(x-2)...(x-i) and are generated by multiplying those linear factors out
one at a time: O(i^2) integer arithmetic, no rounding anywhere.  Rows are
memoized append-only, so concurrent readers are safe and repeated callers
pay once.

The brute-force subset formula |s(i,j;1)| = i! * sum over j-subsets
{r_1..r_j} of {1..i} of 1/(r_1...r_j) is kept only as an independent
small-i oracle; it is exponential in i.

On one low-order value: expanding (x-1)(x-2) forces s(2,0;1) = 2.  Some
summaries of this table quote 4 for that entry; the inequality certified by
``check_bound_f`` holds with either value (2 <= 6 and 4 <= 6), and this
module uses the value the definition forces.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

# e^2 = 7.38905609893065... truncated after 10 digits, i.e. slightly BELOW
# the true value, so `product <= E2_LOWER` implies `product <= e^2`.
E2_LOWER = Fraction(73890560989, 10**10)

_SUBSET_ORACLE_MAX = 14


@dataclass(frozen=True)
class StirlingRow:
    """Row i of the table: coeffs[j] = s(i,j;1) for j = 0..i."""

    i: int
    coeffs: tuple[int, ...]


@dataclass(frozen=True)
class Polynomial:
    """Dense polynomial with exact rational coefficients, ascending degree."""

    coeffs: tuple[Fraction, ...]

    def __post_init__(self):
        cs = [Fraction(c) for c in self.coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    @property
    def degree(self) -> int:
        # -1 for the zero polynomial
        return len(self.coeffs) - 1

    def __call__(self, x):
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc


# Append-only row memo; _rows[i] holds the coefficients of (x-1)...(x-i).
_rows: list[tuple[int, ...]] = [(1,)]
_rows_lock = threading.Lock()


def _ensure_rows(i: int) -> None:
    if i < len(_rows):
        return
    with _rows_lock:
        while len(_rows) <= i:
            k = len(_rows)  # next factor to absorb is (x - k)
            prev = _rows[-1]
            row = [0] * (k + 1)
            for j, c in enumerate(prev):
                row[j] -= k * c
                row[j + 1] += c
            _rows.append(tuple(row))


def stirling_row(i: int) -> StirlingRow:
    """Exact coefficients of (x-1)(x-2)...(x-i); row 0 is [1]."""
    if i < 0:
        raise ValueError("row index must be non-negative")
    _ensure_rows(i)
    return StirlingRow(i, _rows[i])


def unsigned_stirling(i: int, j: int) -> int:
    """|s(i,j;1)| = (-1)^(i-j) * s(i,j;1)."""
    if not 0 <= j <= i:
        raise ValueError(f"need 0 <= j <= i, got i={i}, j={j}")
    c = stirling_row(i).coeffs[j]
    return -c if (i - j) % 2 else c


def unsigned_stirling_subset_oracle(i: int, j: int) -> int:
    """|s(i,j;1)| by enumerating every j-subset of {1..i}.

    Independent of the row recurrence; exponential cost, so capped at
    i <= 14.  Requires j >= 1 (the formula is stated for i >= j > 0).
    """
    if i > _SUBSET_ORACLE_MAX:
        raise ValueError(f"subset oracle capped at i <= {_SUBSET_ORACLE_MAX}")
    if j == 0 or j > i:
        raise ValueError(f"need i >= j > 0, got i={i}, j={j}")
    total = Fraction(0)
    for subset in combinations(range(1, i + 1), j):
        total += Fraction(1, math.prod(subset))
    value = math.factorial(i) * total
    assert value.denominator == 1
    return value.numerator


def falling_factorial(x, n: int):
    """(x)_n = x * (x-1) * ... * (x-(n-1)); the empty product 1 when n = 0."""
    if n < 0:
        raise ValueError("n must be non-negative")
    result = 1
    for k in range(n):
        result = result * (x - k)
    return result


def poly_P(i: int) -> Polynomial:
    """Degree-i polynomial with coefficients s(i+2,j;1), j = 0..i.

    This is row i+2 with its two highest-order coefficients dropped.
    """
    if i < 0:
        raise ValueError("i must be non-negative")
    row = stirling_row(i + 2).coeffs
    return Polynomial(tuple(Fraction(c) for c in row[: i + 1]))


def poly_h(i: int) -> Polynomial:
    """x^(i+1) * ((i+2)(i+3)/2 - x), degree i+2, leading coefficient -1."""
    if i < 0:
        raise ValueError("i must be non-negative")
    lead = (i + 2) * (i + 3) // 2
    coeffs = [Fraction(0)] * (i + 1) + [Fraction(lead), Fraction(-1)]
    return Polynomial(tuple(coeffs))


def bound_f(i: int) -> int:
    """Quartic majorant f(i) = a + 2ai + ai(i-1) + 4 with a = (i+1)(i+2)."""
    if i < 0:
        raise ValueError("i must be non-negative")
    a = (i + 1) * (i + 2)
    return a + 2 * a * i + a * i * (i - 1) + 4


def _eval_int(coeffs, x: int) -> int:
    acc = 0
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


@dataclass(frozen=True)
class LemmaPCertificate:
    """Exact evidence for the decomposition and sandwich of P_i at N.

    ``equality_holds`` covers P_i(N) = (N-1)_(i+2) + h_i(N).  When
    ``strong_gate`` (i^2 >= 2N) is set, ``inequalities_hold`` additionally
    records h_i(N) > 0 and 2N^(i+3) > P_i(N) > (N-1)_(i+2) >= 0; it is None
    when the gate does not apply.
    """

    i: int
    N: int
    p_at_N: int
    falling_part: int
    h_part: int
    equality_holds: bool
    strong_gate: bool
    inequalities_hold: bool | None

    @property
    def ok(self) -> bool:
        return self.equality_holds and self.inequalities_hold is not False


@dataclass(frozen=True)
class BoundFCertificate:
    i: int
    j: int
    lhs: int  # |s(i+2,j;1)|
    rhs: int  # f(i) * |s(i,j;1)|
    holds: bool


@dataclass(frozen=True)
class ProductBoundCertificate:
    i: int
    N: int
    product: Fraction
    bound: Fraction
    holds: bool


def check_lemma_P(i: int, N: int) -> LemmaPCertificate:
    """Certify P_i(N) = (N-1)_(i+2) + h_i(N), all arithmetic exact."""
    if i < 1:
        raise ValueError("i must be >= 1")
    if N - 3 < i:
        raise ValueError(f"need N - 3 >= i, got i={i}, N={N}")
    row = stirling_row(i + 2).coeffs
    p_at_N = _eval_int(row[: i + 1], N)
    falling_part = falling_factorial(N - 1, i + 2)
    h_part = N ** (i + 1) * ((i + 2) * (i + 3) // 2 - N)
    equality = p_at_N == falling_part + h_part
    gate = i * i >= 2 * N
    inequalities = None
    if gate:
        inequalities = (
            h_part > 0 and 2 * N ** (i + 3) > p_at_N > falling_part >= 0
        )
    return LemmaPCertificate(
        i, N, p_at_N, falling_part, h_part, equality, gate, inequalities
    )


def check_bound_f(i: int, j: int) -> BoundFCertificate:
    """Certify |s(i+2,j;1)| <= f(i) * |s(i,j;1)|, both sides exact."""
    if not 0 <= j <= i:
        raise ValueError(f"need 0 <= j <= i, got i={i}, j={j}")
    lhs = unsigned_stirling(i + 2, j)
    rhs = bound_f(i) * unsigned_stirling(i, j)
    return BoundFCertificate(i, j, lhs, rhs, lhs <= rhs)


def check_product_bound(i: int, N: int) -> ProductBoundCertificate:
    """Certify prod_{j=1..i} (1 + j/N) <= e^2 for 0 <= i < sqrt(2N).

    The sqrt gate is the exact integer test i^2 < 2N.  The right-hand side
    is E2_LOWER < e^2, so holds=True implies the real inequality.
    """
    if N < 1:
        raise ValueError("N must be positive")
    if i < 0 or i * i >= 2 * N:
        raise ValueError(f"need 0 <= i < sqrt(2N), got i={i}, N={N}")
    product = Fraction(math.prod(range(N + 1, N + i + 1)), N**i)
    return ProductBoundCertificate(i, N, product, E2_LOWER, product <= E2_LOWER)
