"""The Abelian and Avalanche distribution families.

Two evaluation modes share one API.  Exact mode works in
``fractions.Fraction`` throughout, so normalization, moment identities and
the J-term rewrite of the second moment can be asserted with equality.
Float mode evaluates PMFs in log space (log-gamma binomials, log1p) and the
second moment through a compensated bracket sum, switching to the
J-term tail form for large N where the bracket cancels catastrophically.

The Abelian family lives on {1..N}, the Avalanche family on {0..N}, and the
shifted Avalanche family (Avalanche + 1) on {1..N+1}.  The shared parameter
constraint is 0 < p < 1/N; alpha = N*p is the scale-free form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .stirling import falling_factorial, poly_P, stirling_row

FAMILIES = ("abelian", "avalanche", "shifted")

Number = Union[Fraction, float]

_BRUTE_FORCE_N_MAX = 30
# Above this N the float second moment abandons the direct bracket, whose
# leading terms cancel to O(p), for the J-term tail form.
_FLOAT_TAIL_N = 1000


def _check_N(N) -> None:
    if not isinstance(N, int) or isinstance(N, bool) or N < 1:
        raise ValueError("N must be an integer >= 1")


@dataclass(frozen=True)
class Params:
    """Validated (N, p) pair with alpha = N*p carried alongside.

    Exact mode stores p and alpha as Fractions (alpha = N*p exactly); float
    mode stores both as floats.  Use the ``exact``/``stable`` constructors
    with exactly one of p or alpha.
    """

    N: int
    p: Number
    alpha: Number

    def __post_init__(self):
        _check_N(self.N)
        if not 0 < self.p:
            raise ValueError("p must be positive")
        if not self.N * self.p < 1:
            raise ValueError(f"p must be < 1/N, got p={self.p} with N={self.N}")

    @classmethod
    def exact(cls, N: int, p=None, alpha=None) -> "Params":
        _check_N(N)
        if (p is None) == (alpha is None):
            raise ValueError("provide exactly one of p or alpha")
        if alpha is not None:
            alpha = Fraction(alpha)
            p = alpha / N
        else:
            p = Fraction(p)
            alpha = p * N
        return cls(N, p, alpha)

    @classmethod
    def stable(cls, N: int, p=None, alpha=None) -> "Params":
        _check_N(N)
        if (p is None) == (alpha is None):
            raise ValueError("provide exactly one of p or alpha")
        if alpha is not None:
            alpha = float(alpha)
            p = alpha / N
        else:
            p = float(p)
            alpha = p * N
        return cls(N, p, alpha)

    @property
    def is_exact(self) -> bool:
        return isinstance(self.p, Fraction)

    @property
    def mode(self) -> str:
        return "exact" if self.is_exact else "float"


@dataclass(frozen=True)
class PmfTable:
    family: str
    params: Params
    support: tuple[int, ...]
    probs_exact: tuple[Fraction, ...] | None
    probs_float: tuple[float, ...] | None
    logprobs: tuple[float, ...] | None


@dataclass(frozen=True)
class Moments:
    mean: Number
    second_moment: Number
    variance: Number
    mode: str


@dataclass(frozen=True)
class JDecomposition:
    """Exact J-term rewrite of the Abelian second moment.

    Satisfies J2 = J3 + J4, J4 = J5 + J6 (split at the least k with
    k^2 >= 2N) and C * (J1 - J2) = second_moment, all as rational equalities.
    """

    J1: Fraction
    J2: Fraction
    J3: Fraction
    J4: Fraction
    J5: Fraction
    J6: Fraction
    C: Fraction
    second_moment: Fraction


@dataclass(frozen=True)
class ConvergenceRow:
    N: int
    variance: float | None
    limit: float
    abs_error: float | None
    error: str | None = None


def support(family: str, N: int) -> range:
    if family == "abelian":
        return range(1, N + 1)
    if family == "avalanche":
        return range(0, N + 1)
    if family == "shifted":
        return range(1, N + 2)
    raise ValueError(f"unknown family {family!r}")


def normalization_C(params: Params) -> Number:
    """C = (1 - N*p) / (1 - (N-1)*p), in (0, 1)."""
    N, p = params.N, params.p
    return (1 - N * p) / (1 - (N - 1) * p)


def _log_C(N: int, p: float) -> float:
    return math.log1p(-N * p) - math.log1p(-(N - 1) * p)


def _log_binom(n: int, k: int) -> float:
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)


def abelian_logpmf(params: Params, b: int) -> float:
    """Log of the Abelian PMF, assembled factor by factor in log space.

    Every base is positive on the support: 1 - b*p >= 1 - N*p > 0.  The
    b = N term carries exponent N-b-1 = -1 and b = 1 contributes
    (b-2)*log(b) = 0, both handled by plain arithmetic here.
    """
    N, p = params.N, float(params.p)
    if not 1 <= b <= N:
        raise ValueError(f"b={b} outside Abelian support 1..{N}")
    return (
        _log_C(N, p)
        + _log_binom(N - 1, b - 1)
        + (b - 1) * math.log(p)
        + (N - b - 1) * math.log1p(-b * p)
        + (b - 2) * math.log(b)
    )


def avalanche_logpmf(params: Params, b: int) -> float:
    """Log of the Avalanche PMF.

    The factor (1 - (b+1)*p)^(N-b) is skipped when its exponent is zero
    (b = N), where its base may be <= 0 but the factor is 1 by convention.
    """
    N, p = params.N, float(params.p)
    if not 0 <= b <= N:
        raise ValueError(f"b={b} outside Avalanche support 0..{N}")
    lp = _log_binom(N, b) + b * math.log(p) + (b - 1) * math.log(b + 1)
    if b < N:
        lp += (N - b) * math.log1p(-(b + 1) * p)
    return lp


def abelian_pmf(params: Params, b: int) -> Number:
    """P(Z = b) = C * binom(N-1,b-1) * p^(b-1) * (1-bp)^(N-b-1) * b^(b-2)."""
    N = params.N
    if not 1 <= b <= N:
        raise ValueError(f"b={b} outside Abelian support 1..{N}")
    if not params.is_exact:
        return math.exp(abelian_logpmf(params, b))
    p = params.p
    return (
        normalization_C(params)
        * math.comb(N - 1, b - 1)
        * p ** (b - 1)
        * (1 - b * p) ** (N - b - 1)
        * Fraction(b) ** (b - 2)
    )


def avalanche_pmf(params: Params, b: int) -> Number:
    """P(X = b) = binom(N,b) * p^b * (1-(b+1)p)^(N-b) * (b+1)^(b-1)."""
    N = params.N
    if not 0 <= b <= N:
        raise ValueError(f"b={b} outside Avalanche support 0..{N}")
    if not params.is_exact:
        return math.exp(avalanche_logpmf(params, b))
    p = params.p
    return (
        math.comb(N, b)
        * p**b
        * (1 - (b + 1) * p) ** (N - b)
        * Fraction(b + 1) ** (b - 1)
    )


def shifted_pmf(params: Params, b: int) -> Number:
    """P(Y = b) = P(X = b-1) on the shifted support 1..N+1."""
    if not 1 <= b <= params.N + 1:
        raise ValueError(f"b={b} outside shifted support 1..{params.N + 1}")
    return avalanche_pmf(params, b - 1)


_PMF = {"abelian": abelian_pmf, "avalanche": avalanche_pmf, "shifted": shifted_pmf}
_LOGPMF = {"abelian": abelian_logpmf, "avalanche": avalanche_logpmf}


def pmf(family: str, params: Params, b: int) -> Number:
    try:
        f = _PMF[family]
    except KeyError:
        raise ValueError(f"unknown family {family!r}") from None
    return f(params, b)


def pmf_table(family: str, params: Params) -> PmfTable:
    """Whole-support table; exact probabilities or (logprob, prob) pairs."""
    sup = tuple(support(family, params.N))
    if params.is_exact:
        probs = tuple(pmf(family, params, b) for b in sup)
        return PmfTable(family, params, sup, probs, None, None)
    if family == "shifted":
        logs = tuple(avalanche_logpmf(params, b - 1) for b in sup)
    else:
        logs = tuple(_LOGPMF[family](params, b) for b in sup)
    return PmfTable(family, params, sup, None, tuple(map(math.exp, logs)), logs)


def abelian_mean(params: Params) -> Number:
    """E(Z) = N / (N - (N-1)*alpha)."""
    N, alpha = params.N, params.alpha
    return N / (N - (N - 1) * alpha)


def avalanche_mean(params: Params) -> Number:
    """E(X) = sum_{i=1..N} (N)_i * p^i, with (N)_i the falling factorial."""
    N, p = params.N, params.p
    if params.is_exact:
        return sum(
            (falling_factorial(N, i) * p**i for i in range(1, N + 1)),
            start=Fraction(0),
        )
    terms = []
    t = 1.0
    for i in range(1, N + 1):
        t *= (N - i + 1) * p
        terms.append(t)
        if t < 1e-25:
            break
    return math.fsum(terms)


def abelian_second_moment(params: Params) -> Number:
    """E(Z^2) = (C/p) * [1/(1-Np) - 1 - sum_{i=1..N-1} (N-1)_i p^i]."""
    N, p = params.N, params.p
    if params.is_exact:
        bracket = (
            1 / (1 - N * p)
            - 1
            - sum(
                (falling_factorial(N - 1, i) * p**i for i in range(1, N)),
                start=Fraction(0),
            )
        )
        return normalization_C(params) / p * bracket
    return _float_second_moment(N, p, params.alpha)


def _float_bracket(N: int, p: float) -> float:
    # Terms are products of factors (N-k)*p < alpha < 1, so they decrease
    # monotonically; the residual bracket is O(p) and fsum keeps the
    # cancellation between 1/(1-Np) - 1 and the sum exact.
    terms = [1.0 / (1.0 - N * p), -1.0]
    t = 1.0
    for i in range(1, N):
        t *= (N - i) * p
        terms.append(-t)
        if t < 1e-25:
            break
    return math.fsum(terms)


def _float_J3_closed(N: int, alpha: float) -> float:
    # Closed partial sum of -sum_{i=0}^{N-2} alpha^i (i+1)(i+2)/2: the full
    # series is 1/(1-alpha)^3 and the tail at M = N-2 telescopes into three
    # geometric pieces.
    one = 1.0 - alpha
    tail = alpha ** (N - 1) * (
        1.0 / one**3 + (N - 1) * alpha / one**2 + (N - 1) * (N + 2) / (2.0 * one)
    )
    return -1.0 / one**3 + tail


def _float_J4(N: int, alpha: float) -> float:
    # J4 = sum_i alpha^(i+1) * [N*(Q_i - 1) + (i+2)(i+3)/2] with
    # Q_i = prod_{k=1..i+2} (1 - k/N): the p^(i+1) (N-1)_(i+2) + p^(i+1) h_i(N)
    # split of each P_i term, computed without forming either giant factor.
    terms = []
    q = (1.0 - 1.0 / N) * (1.0 - 2.0 / N)
    apow = alpha
    for i in range(N - 2):  # i = 0 .. N-3
        if i > 0:
            q *= 1.0 - (i + 2.0) / N
        terms.append(apow * (N * (q - 1.0) + 0.5 * (i + 2) * (i + 3)))
        apow *= alpha
        # |bracket| <= N + (i+3)(i+4)/2 and <= 2N^2 once the sandwich bound
        # kicks in; either way the geometric tail below is negligible.
        if apow * (2.0 * N * N + (i + 3) * (i + 4) + N) / (1.0 - alpha) < 1e-18:
            break
    return math.fsum(terms)


def _float_second_moment(N: int, p: float, alpha: float) -> float:
    C = (1.0 - N * p) / (1.0 - (N - 1) * p)
    if N <= _FLOAT_TAIL_N:
        return C / p * _float_bracket(N, p)
    J1 = alpha**N / (p * (1.0 - alpha))
    return C * (J1 - _float_J3_closed(N, alpha) - _float_J4(N, alpha))


def abelian_variance(params: Params) -> Moments:
    """Mean, second moment and variance of the Abelian family."""
    mean = abelian_mean(params)
    second = abelian_second_moment(params)
    return Moments(mean, second, second - mean * mean, params.mode)


def brute_force_moment(family: str, params: Params, k: int) -> Number:
    """k-th raw moment by direct summation over the whole support.

    The exact-mode oracle for every closed form; cost-guarded to N <= 30.
    Float mode sums the log-space PMF instead and carries no guard.
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}")
    if params.is_exact:
        if params.N > _BRUTE_FORCE_N_MAX:
            raise ValueError(
                f"exact brute force guarded to N <= {_BRUTE_FORCE_N_MAX}"
            )
        return sum(
            (Fraction(b) ** k * pmf(family, params, b) for b in support(family, params.N)),
            start=Fraction(0),
        )
    table = pmf_table(family, params)
    return math.fsum(
        float(b) ** k * q for b, q in zip(table.support, table.probs_float)
    )


def moments(family: str, params: Params) -> Moments:
    """Moments for any family: closed forms for Abelian, summation otherwise."""
    if family == "abelian":
        return abelian_variance(params)
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}")
    m1 = brute_force_moment(family, params, 1)
    m2 = brute_force_moment(family, params, 2)
    return Moments(m1, m2, m2 - m1 * m1, params.mode)


def _split_index(N: int) -> int:
    """Least k with k^2 >= 2N."""
    return math.isqrt(2 * N - 1) + 1


def j_decomposition(params: Params) -> JDecomposition:
    """Exact J1..J6 terms of the second-moment rewrite, invariants checked.

    J2 comes from the raw double sum over rows s(i, .); J4 is recomputed
    independently through the truncated-row polynomials P_i, so the returned
    object's J2 = J3 + J4 equality is a genuine cross-check, not bookkeeping.
    """
    if not params.is_exact:
        raise ValueError("j_decomposition requires exact-mode params")
    N, p, alpha = params.N, params.p, params.alpha
    if N < 2:
        raise ValueError("need N >= 2")

    C = normalization_C(params)
    J1 = alpha**N / (p * (1 - alpha))
    J2 = sum(
        (
            p ** (i - 1) * sum(stirling_row(i).coeffs[j] * N**j for j in range(i))
            for i in range(1, N)
        ),
        start=Fraction(0),
    )
    J3 = -sum(
        (alpha**i * Fraction((i + 1) * (i + 2), 2) for i in range(N - 1)),
        start=Fraction(0),
    )
    p_values = [poly_P(i)(N) for i in range(N - 2)]  # i = 0 .. N-3
    J4 = p * sum((p**i * v for i, v in enumerate(p_values)), start=Fraction(0))
    kstar = _split_index(N)
    J5 = p * sum(
        (p**i * v for i, v in enumerate(p_values) if i < kstar), start=Fraction(0)
    )
    J6 = p * sum(
        (p**i * v for i, v in enumerate(p_values) if i >= kstar), start=Fraction(0)
    )
    second = abelian_second_moment(params)

    if J2 != J3 + J4:
        raise ArithmeticError(f"J2 != J3 + J4 at N={N}, alpha={alpha}")
    if J4 != J5 + J6:
        raise ArithmeticError(f"J4 != J5 + J6 at N={N}, alpha={alpha}")
    if C * (J1 - J2) != second:
        raise ArithmeticError(f"C*(J1 - J2) != E[Z^2] at N={N}, alpha={alpha}")
    return JDecomposition(J1, J2, J3, J4, J5, J6, C, second)


def variance_limit(alpha) -> Fraction:
    """Large-N variance limit alpha / (1 - alpha)^3, exact."""
    alpha = Fraction(alpha)
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    return alpha / (1 - alpha) ** 3


def convergence_table(alpha: float, N_list) -> list[ConvergenceRow]:
    """Float-mode variance vs. the limit for each N, sorted ascending.

    Rows that fail to evaluate finitely report an error string instead of
    numbers rather than raising mid-table.
    """
    alpha = float(alpha)
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    Ns = sorted(set(int(n) for n in N_list))
    if not Ns:
        raise ValueError("N list must be nonempty")
    if Ns[0] < 2:
        raise ValueError("each N must be >= 2")
    limit = alpha / (1.0 - alpha) ** 3
    rows = []
    for N in Ns:
        try:
            v = abelian_variance(Params.stable(N, alpha=alpha)).variance
        except (OverflowError, ValueError) as exc:
            rows.append(ConvergenceRow(N, None, limit, None, str(exc)))
            continue
        if not math.isfinite(v):
            rows.append(ConvergenceRow(N, None, limit, None, "non-finite variance"))
            continue
        rows.append(ConvergenceRow(N, v, limit, abs(v - limit)))
    return rows
