"""Machine-checkable identity suites behind the `verify` CLI subcommand.

Each suite walks a parameter range, counts checks, and records one message
per failure.  Exact suites assert rational equality; float suites assert
the documented tolerances.  Everything is deterministic for a fixed seed,
so two runs with identical flags print identical bytes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from scipy import stats as scipy_stats

from . import dist, sampler
from .dist import Params
from .stirling import (
    check_bound_f,
    check_lemma_P,
    check_product_bound,
    falling_factorial,
    stirling_row,
    unsigned_stirling,
    unsigned_stirling_subset_oracle,
)

ALPHA_GRID = tuple(Fraction(k, 10) for k in range(1, 10))

# Probabilities below this are outside double range; the float/exact
# comparison switches from relative error to a smallness assertion there.
_FLOAT_FLOOR = 1e-280


@dataclass
class SuiteResult:
    name: str
    checks: int = 0
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def check(self, ok: bool, msg: str) -> None:
        self.checks += 1
        if not ok:
            self.failures.append(msg)


def _eval_poly(coeffs, x):
    acc = 0
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def suite_stirling(max_i: int = 60, fault: str | None = None) -> SuiteResult:
    r = SuiteResult("stirling")
    for i in range(max_i + 1):
        coeffs = list(stirling_row(i).coeffs)
        if fault == "stirling-sign" and i == min(5, max_i):
            coeffs[0] = -coeffs[0]  # test-only corruption of a local copy
        r.check(coeffs[i] == 1, f"diagonal entry != 1 in row {i}")
        if i >= 1:
            r.check(
                coeffs[i - 1] == -i * (i + 1) // 2,
                f"subdiagonal entry wrong in row {i}",
            )
        for j, c in enumerate(coeffs):
            expected_sign = -1 if (i - j) % 2 else 1
            r.check(
                c == 0 or (c > 0) == (expected_sign > 0),
                f"sign pattern broken at row {i}, j={j}",
            )
        for x in range(i + 2):
            r.check(
                _eval_poly(coeffs, x) == falling_factorial(x - 1, i),
                f"row {i} does not expand (x-1)_({i}) at x={x}",
            )
        for x in range(1, 11):
            lhs = sum(abs(c) * x**j for j, c in enumerate(coeffs))
            r.check(
                lhs == falling_factorial(x + i, i),
                f"unsigned row {i} does not expand (x+{i})_({i}) at x={x}",
            )
    for i in range(1, 13):
        for j in range(1, i + 1):
            r.check(
                unsigned_stirling_subset_oracle(i, j) == unsigned_stirling(i, j),
                f"subset oracle mismatch at ({i},{j})",
            )
    return r


def suite_bounds() -> SuiteResult:
    r = SuiteResult("bounds")
    for i in range(41):
        for j in range(i + 1):
            cert = check_bound_f(i, j)
            r.check(cert.holds, f"f-bound fails at (i={i}, j={j}): {cert.lhs} > {cert.rhs}")
    for N in range(4, 41):
        for i in range(1, N - 2):
            cert = check_lemma_P(i, N)
            r.check(cert.equality_holds, f"P/h decomposition fails at (i={i}, N={N})")
            if cert.strong_gate:
                r.check(
                    bool(cert.inequalities_hold),
                    f"P sandwich fails at (i={i}, N={N})",
                )
    for N in range(1, 201):
        for i in range(math.isqrt(2 * N - 1) + 1):
            cert = check_product_bound(i, N)
            r.check(
                cert.holds,
                f"product bound fails at (i={i}, N={N}): {float(cert.product)}",
            )
    return r


def suite_pmf(max_n: int = 25) -> SuiteResult:
    r = SuiteResult("pmf")
    for N in range(1, max_n + 1):
        for alpha in ALPHA_GRID:
            params = Params.exact(N, alpha=alpha)
            for family in dist.FAMILIES:
                table = dist.pmf_table(family, params)
                r.check(
                    sum(table.probs_exact) == 1,
                    f"{family} pmf sum != 1 at N={N}, alpha={alpha}",
                )
                r.check(
                    all(q >= 0 for q in table.probs_exact),
                    f"{family} pmf has negative mass at N={N}, alpha={alpha}",
                )
    return r


def suite_moments(max_n: int = 25) -> SuiteResult:
    r = SuiteResult("moments")
    for N in range(1, max_n + 1):
        for alpha in ALPHA_GRID:
            params = Params.exact(N, alpha=alpha)
            m = dist.abelian_variance(params)
            r.check(
                m.mean == dist.brute_force_moment("abelian", params, 1),
                f"abelian mean mismatch at N={N}, alpha={alpha}",
            )
            r.check(
                m.second_moment == dist.brute_force_moment("abelian", params, 2),
                f"abelian second moment mismatch at N={N}, alpha={alpha}",
            )
            r.check(
                m.variance == m.second_moment - m.mean**2 and m.variance >= 0,
                f"abelian variance inconsistent at N={N}, alpha={alpha}",
            )
            if N <= 20:
                r.check(
                    dist.avalanche_mean(params)
                    == dist.brute_force_moment("avalanche", params, 1),
                    f"avalanche mean mismatch at N={N}, alpha={alpha}",
                )
    return r


def suite_shift(max_n: int = 20) -> SuiteResult:
    # Parametrized by p = alpha/(N+1) so the (N+1)-parameter Abelian family
    # on the right-hand side of the mean identity is itself valid.
    r = SuiteResult("shift")
    for N in range(1, max_n + 1):
        for alpha in ALPHA_GRID:
            p = alpha / (N + 1)
            params = Params.exact(N, p=p)
            mean_y = dist.brute_force_moment("shifted", params, 1)
            mean_x = dist.avalanche_mean(params)
            r.check(
                mean_y == mean_x + 1,
                f"shift mean identity fails at N={N}, alpha={alpha}",
            )
            up = Params.exact(N + 1, p=p)
            C_up = dist.normalization_C(up)
            rhs = (
                dist.abelian_mean(up) / C_up
                - p * dist.abelian_second_moment(up) / C_up
            )
            r.check(
                mean_y == rhs,
                f"shift/abelian mean relation fails at N={N}, alpha={alpha}",
            )
    return r


def suite_jdecomp(max_n: int = 20) -> SuiteResult:
    r = SuiteResult("jdecomp")
    for N in range(2, max_n + 1):
        for alpha in ALPHA_GRID:
            params = Params.exact(N, alpha=alpha)
            try:
                jd = dist.j_decomposition(params)
            except ArithmeticError as exc:
                r.checks += 1
                r.failures.append(str(exc))
                continue
            r.check(
                jd.J2 == jd.J3 + jd.J4 and jd.J4 == jd.J5 + jd.J6,
                f"J splits broken at N={N}, alpha={alpha}",
            )
            r.check(
                jd.C * (jd.J1 - jd.J2)
                == dist.brute_force_moment("abelian", params, 2),
                f"C*(J1-J2) != E[Z^2] at N={N}, alpha={alpha}",
            )
    return r


def _relative_gap(approx: float, exact: Fraction) -> float:
    e = float(exact)
    if e <= _FLOAT_FLOOR:
        return 0.0 if abs(approx) <= _FLOAT_FLOOR else math.inf
    return abs(approx - e) / e


def suite_float() -> SuiteResult:
    r = SuiteResult("float")
    for family in dist.FAMILIES:
        for N, tol, alphas in (
            (10**3, 1e-10, (0.3, 0.5, 0.9)),
            (10**4, 1e-10, (0.5,)),
            (10**5, 1e-8, (0.5,)),
        ):
            for alpha in alphas:
                table = dist.pmf_table(family, Params.stable(N, alpha=alpha))
                gap = abs(math.fsum(table.probs_float) - 1.0)
                r.check(
                    gap <= tol,
                    f"float {family} sum off by {gap:.3e} at N={N}, alpha={alpha}",
                )
    agreement = [(n, Fraction(a, 10)) for n in (2, 10, 100) for a in (3, 5, 7)]
    agreement.append((1000, Fraction(1, 2)))
    for N, alpha in agreement:
        exact = Params.exact(N, alpha=alpha)
        approx = Params.stable(N, alpha=float(alpha))
        for family in dist.FAMILIES:
            etab = dist.pmf_table(family, exact)
            ftab = dist.pmf_table(family, approx)
            worst = max(
                _relative_gap(f, e)
                for f, e in zip(ftab.probs_float, etab.probs_exact)
            )
            r.check(
                worst <= 1e-9,
                f"float {family} pmf off by {worst:.3e} at N={N}, alpha={alpha}",
            )
        ve = dist.abelian_variance(exact).variance
        vf = dist.abelian_variance(approx).variance
        r.check(
            abs(vf - float(ve)) <= 1e-9 * float(ve),
            f"float variance off at N={N}, alpha={alpha}",
        )
    return r


def suite_limit() -> SuiteResult:
    r = SuiteResult("limit")
    for alpha in (0.3, 0.5, 0.7):
        rows = dist.convergence_table(alpha, [100, 1000, 10000])
        r.check(
            all(row.error is None for row in rows),
            f"error rows in convergence table at alpha={alpha}",
        )
        errs = [row.abs_error for row in rows]
        r.check(
            errs[0] > errs[1] > errs[2],
            f"abs_error not strictly decreasing at alpha={alpha}: {errs}",
        )
        if alpha == 0.5:
            r.check(
                errs[-1] < 0.05,
                f"abs_error {errs[-1]:.4f} >= 0.05 at N=10000, alpha=0.5",
            )
    return r


def total_variation(counts: dict[int, int], M: int, table: dist.PmfTable) -> float:
    probs = table.probs_exact or table.probs_float
    return 0.5 * math.fsum(
        abs(counts.get(b, 0) / M - float(q)) for b, q in zip(table.support, probs)
    )


def suite_sampler(samples: int = 1_000_000, seed: int = 42) -> SuiteResult:
    r = SuiteResult("sampler")
    small = sampler.monte_carlo(Params.stable(4, p=0.2), 2000, seed)
    again = sampler.monte_carlo(Params.stable(4, p=0.2), 2000, seed)
    r.check(small == again, "monte_carlo not deterministic for a fixed seed")
    r.check(
        sum(small.empirical_pmf.values()) == small.M,
        "empirical counts do not sum to M",
    )

    exact = Params.exact(10, p=Fraction(2, 25))
    stats = sampler.monte_carlo(Params.stable(10, p=float(Fraction(2, 25))), samples, seed)
    table = dist.pmf_table("avalanche", exact)
    tv = total_variation(stats.empirical_pmf, stats.M, table)
    r.check(tv < 0.005, f"TV distance {tv:.5f} >= 0.005 at N=10, p=0.08")
    gap = abs(stats.empirical_mean - float(dist.avalanche_mean(exact)))
    r.check(
        gap <= 4 * stats.stderr_mean,
        f"empirical mean off by {gap:.5f} (> 4 stderr) at N=10, p=0.08",
    )

    for N in (3, 5, 10):
        p = Fraction(4, 5 * N)
        ex = Params.exact(N, p=p)
        st = sampler.monte_carlo(Params.stable(N, p=float(p)), samples, seed)
        expected = [float(q) * st.M for q in dist.pmf_table("avalanche", ex).probs_exact]
        scale = st.M / math.fsum(expected)
        observed = [st.empirical_pmf.get(b, 0) for b in range(N + 1)]
        pvalue = scipy_stats.chisquare(observed, [e * scale for e in expected]).pvalue
        r.check(
            pvalue >= 1e-4,
            f"chi-square rejects at N={N}, p=0.8/{N}: p-value {pvalue:.2e}",
        )
        mean_gap = abs(st.empirical_mean - float(dist.avalanche_mean(ex)))
        r.check(
            mean_gap <= 4 * st.stderr_mean,
            f"empirical mean off by {mean_gap:.5f} (> 4 stderr) at N={N}, p=0.8/{N}",
        )
    return r


def run_suites(
    names=None,
    max_n: int = 25,
    samples: int = 1_000_000,
    seed: int = 42,
    fault: str | None = None,
) -> list[SuiteResult]:
    runners = {
        "stirling": lambda: suite_stirling(fault=fault),
        "bounds": suite_bounds,
        "pmf": lambda: suite_pmf(max_n),
        "moments": lambda: suite_moments(max_n),
        "shift": lambda: suite_shift(min(max_n, 20)),
        "jdecomp": lambda: suite_jdecomp(min(max_n, 20)),
        "float": suite_float,
        "limit": suite_limit,
        "sampler": lambda: suite_sampler(samples, seed),
    }
    if names is None:
        names = list(runners)
    unknown = [n for n in names if n not in runners]
    if unknown:
        raise ValueError(f"unknown suite(s): {', '.join(unknown)}")
    return [runners[n]() for n in names]


SUITE_NAMES = ("stirling", "bounds", "pmf", "moments", "shift", "jdecomp", "float", "limit", "sampler")
