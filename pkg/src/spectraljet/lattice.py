"""The angle metric d(alpha, beta) = arccos B(alpha, beta) on Z_+^n.

The limiting angles between derivative directions of the embedding turn the
multi-index lattice into a metric space: d is a genuine metric with values in
[0, pi), adjacent lattice points sit at right angles, and the lattice splits
into 2^n mutually orthogonal parity cosets.  Wherever possible, decisions
(identity of points, monotonicity, the comparison inequality) are made on the
exact rational squares of B rather than on floats.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction

from .multiindex import (
    MultiIndex,
    check_same_dimension,
    pair_profile,
    symmetric_difference_size,
)
from .wick import WickB, wick_b

#: Constant tested in the distance-comparison inequality.  The bound chain
#: prod (1 - x/(2s))^s <= exp(-x/2) <= 1 - (1 - e^(-1/2)) x on [0,1] justifies
#: delta = 1 - e^(-1/2) ~ 0.393 for the squared cosine; 1/4 is tested as the
#: safer constant and holds with a wide sampled margin.
COMPARISON_DELTA = Fraction(1, 4)


@dataclass(frozen=True)
class AngleDistance:
    """d(alpha, beta) in radians, together with the exact cosine it came from."""

    radians: float
    exact_cos: WickB


def angle_distance(alpha: MultiIndex, beta: MultiIndex) -> AngleDistance:
    """arccos of B(alpha, beta); always in [0, pi) since B > -1."""
    b = wick_b(alpha, beta)
    return AngleDistance(math.acos(b.value), b)


def is_orthogonal(alpha: MultiIndex, beta: MultiIndex) -> bool:
    """d = pi/2 exactly when some index has odd total multiplicity."""
    return not pair_profile(alpha, beta).even_total()


def coset_of(alpha: MultiIndex) -> tuple[int, ...]:
    """Parity coset of alpha in Z_+^n / (2Z_+)^n; two points in different
    cosets are orthogonal."""
    return alpha.parity()


@dataclass(frozen=True)
class DistanceComparisonCheck:
    lhs: float   # |cos d(alpha, beta)|
    rhs: float   # 1 - delta * |alpha (sym diff) beta| / (|alpha| + |beta|)
    holds: bool  # decided on exact squares


def distance_comparison_check(
    alpha: MultiIndex, beta: MultiIndex, delta: Fraction = COMPARISON_DELTA
) -> DistanceComparisonCheck:
    """Check |cos d| <= 1 - delta * d0 / (|alpha| + |beta|) exactly."""
    check_same_dimension(alpha, beta)
    total = alpha.degree + beta.degree
    if total < 1:
        raise ValueError("comparison needs |alpha| + |beta| >= 1")
    b = wick_b(alpha, beta)
    d0 = symmetric_difference_size(alpha, beta)
    rhs = 1 - delta * Fraction(d0, total)
    holds = b.square <= rhs * rhs  # rhs >= 1 - delta >= 0, so squaring is safe
    return DistanceComparisonCheck(abs(b.value), float(rhs), holds)


@dataclass(frozen=True)
class LatticeStabilizationScan:
    """Angle sequences under repeated shifts along one coordinate axis.

    ``diagonal_limit`` is the limit of the achievable distances; since the
    cosine sequence keeps the sign of B(alpha, beta) while its magnitude
    tends to |B(alpha*, beta*)|, the limit is arccos of the signed magnitude
    and may equal pi even though every single distance stays below it.
    ``stabilized_pair`` is d(alpha*, beta*) itself (j-th components zeroed).
    """

    diagonal: tuple[AngleDistance, ...]       # d(alpha + k e_j, beta + k e_j)
    diagonal_limit: float                     # limit of the sequence, in [0, pi]
    stabilized_pair: AngleDistance            # d with j-th components zeroed
    one_sided: tuple[AngleDistance, ...]      # d(alpha, beta + k e_j)
    one_sided_limit: float                    # pi/2
    monotone_ok: bool                         # |d - pi/2| nondecreasing, exact


def stabilization_scan(
    alpha: MultiIndex, beta: MultiIndex, j: int, k_max: int
) -> LatticeStabilizationScan:
    """Shift both or one endpoint k times along e_j and track the angle.

    Distance to pi/2 can only grow per diagonal step (equality iff the j-th
    multiplicities agree); |d - pi/2| >= |d' - pi/2| is equivalent to
    B^2 >= B'^2, which is checked on exact squares.
    """
    from .wick import b_stabilization_scan

    if k_max < 1:
        raise ValueError("k_max must be at least 1")
    check_same_dimension(alpha, beta)
    scan = b_stabilization_scan(alpha, beta, j, k_max)
    diagonal = tuple(
        AngleDistance(math.acos(b.value), b) for b in scan.diagonal
    )
    one_sided = tuple(
        AngleDistance(math.acos(b.value), b) for b in scan.one_sided
    )
    monotone_ok = scan.monotone_ok()
    return LatticeStabilizationScan(
        diagonal=diagonal,
        diagonal_limit=math.acos(scan.diagonal_limit.value),
        stabilized_pair=angle_distance(alpha.without(j), beta.without(j)),
        one_sided=one_sided,
        one_sided_limit=math.pi / 2,
        monotone_ok=monotone_ok,
    )


# ---------------------------------------------------------------------------
# Random sampling of lattice points and the triple suite
# ---------------------------------------------------------------------------

def _task_rng(seed: int, task_index: int) -> random.Random:
    # Deterministic per-task stream: mixing keeps tasks independent of order.
    return random.Random((seed * 1_000_003 + task_index) & 0xFFFFFFFFFFFFFFFF)


def _degree_weights(n: int, max_degree: int) -> list[int]:
    return [math.comb(d + n - 1, n - 1) for d in range(max_degree + 1)]


def sample_multiindex(rng: random.Random, n: int, max_degree: int) -> MultiIndex:
    """Uniform sample from {alpha in Z_+^n : degree <= max_degree}.

    Picks the degree with stars-and-bars weights, then a uniformly random
    composition of that degree into n parts.
    """
    weights = _degree_weights(n, max_degree)
    d = rng.choices(range(max_degree + 1), weights=weights, k=1)[0]
    if n == 1:
        return MultiIndex((d,))
    bars = sorted(rng.sample(range(d + n - 1), n - 1))
    counts = []
    prev = -1
    for bar in bars:
        counts.append(bar - prev - 1)
        prev = bar
    counts.append(d + n - 2 - prev)
    return MultiIndex(tuple(counts))


@dataclass(frozen=True)
class TripleRow:
    """One sampled triple, in the CSV column layout of the lattice suite."""

    alpha: MultiIndex
    beta: MultiIndex
    gamma: MultiIndex
    d_ab: float
    d_bc: float
    d_ac: float
    triangle_slack: float
    comparison_lhs: float
    comparison_rhs: float


@dataclass(frozen=True)
class TripleSuiteReport:
    n: int
    max_degree: int
    count: int
    seed: int
    triangle_violations: int
    identity_violations: int
    orthogonality_violations: int
    comparison_violations: int
    stabilization_violations: int
    max_triangle_slack: float
    worst_triple: tuple[str, str, str] | None
    #: sampled min of (1 - |cos d|)(|alpha|+|beta|)/d0: the largest delta the
    #: comparison inequality would tolerate on this sample (must stay > 1/4)
    min_comparison_margin: float

    def passed(self) -> bool:
        return (
            self.triangle_violations == 0
            and self.identity_violations == 0
            and self.orthogonality_violations == 0
            and self.comparison_violations == 0
            and self.stabilization_violations == 0
        )


def run_triple_suite(
    n: int,
    max_degree: int,
    count: int,
    seed: int,
    triangle_slack_tol: float = 1e-12,
) -> tuple[list[TripleRow], TripleSuiteReport]:
    """Sample ``count`` triples and exercise every lattice invariant on them.

    Per triple: all three triangle inequalities (float slack tolerance),
    d = 0 <=> equality (exact squares), orthogonality <=> parity cosets,
    the distance-comparison inequality with delta = 1/4 (exact squares), and
    one diagonal stabilization step per coordinate (exact squares).
    """
    rows: list[TripleRow] = []
    triangle_violations = 0
    identity_violations = 0
    orthogonality_violations = 0
    comparison_violations = 0
    stabilization_violations = 0
    max_slack = -math.inf
    worst: tuple[str, str, str] | None = None
    min_margin = math.inf

    for i in range(count):
        rng = _task_rng(seed, i)
        a = sample_multiindex(rng, n, max_degree)
        b = sample_multiindex(rng, n, max_degree)
        c = sample_multiindex(rng, n, max_degree)

        d_ab = angle_distance(a, b)
        d_bc = angle_distance(b, c)
        d_ac = angle_distance(a, c)

        slack = max(
            d_ac.radians - d_ab.radians - d_bc.radians,
            d_ab.radians - d_ac.radians - d_bc.radians,
            d_bc.radians - d_ab.radians - d_ac.radians,
        )
        if slack > triangle_slack_tol:
            triangle_violations += 1
        if slack > max_slack:
            max_slack = slack
            worst = (a.text(), b.text(), c.text())

        # d(a, b) = 0 <=> a = b, on the exact square representation.
        zero_dist = d_ab.exact_cos.sign == 1 and d_ab.exact_cos.square == 1
        if zero_dist != (a == b):
            identity_violations += 1

        if is_orthogonal(a, b) != (coset_of(a) != coset_of(b)):
            orthogonality_violations += 1

        if a.degree + b.degree >= 1:
            cmp_check = distance_comparison_check(a, b)
            if not cmp_check.holds:
                comparison_violations += 1
            lhs, rhs = cmp_check.lhs, cmp_check.rhs
            d0 = symmetric_difference_size(a, b)
            if d0:
                min_margin = min(
                    min_margin, (1.0 - lhs) * (a.degree + b.degree) / d0
                )
        else:
            lhs, rhs = 1.0, 1.0

        for j in range(1, n + 1):
            shifted = wick_b(a.add(j), b.add(j))
            if shifted.square < d_ab.exact_cos.square:
                stabilization_violations += 1
                break

        rows.append(
            TripleRow(
                a, b, c,
                d_ab.radians, d_bc.radians, d_ac.radians,
                slack, lhs, rhs,
            )
        )

    report = TripleSuiteReport(
        n=n,
        max_degree=max_degree,
        count=count,
        seed=seed,
        triangle_violations=triangle_violations,
        identity_violations=identity_violations,
        orthogonality_violations=orthogonality_violations,
        comparison_violations=comparison_violations,
        stabilization_violations=stabilization_violations,
        max_triangle_slack=max_slack,
        worst_triple=worst,
        min_comparison_margin=min_margin,
    )
    return rows, report


@dataclass(frozen=True)
class MetricAxiomReport:
    triples_checked: int
    symmetry_violations: int
    identity_violations: int
    triangle_violations: int
    max_triangle_slack: float
    worst_triple: tuple[str, str, str] | None

    def passed(self) -> bool:
        return (
            self.symmetry_violations == 0
            and self.identity_violations == 0
            and self.triangle_violations == 0
        )


def verify_metric_axioms(
    n: int,
    max_degree: int,
    sample_count: int,
    seed: int,
    triangle_slack_tol: float = 1e-12,
) -> MetricAxiomReport:
    """Property test of the metric axioms on random triples.

    Symmetry and the identity axiom are decided exactly; the triangle
    inequality is checked in floats with ``triangle_slack_tol`` slack.
    """
    if sample_count < 1:
        raise ValueError("sample_count must be at least 1")
    symmetry_violations = identity_violations = triangle_violations = 0
    max_slack = -math.inf
    worst = None
    for i in range(sample_count):
        rng = _task_rng(seed, i)
        a = sample_multiindex(rng, n, max_degree)
        b = sample_multiindex(rng, n, max_degree)
        c = sample_multiindex(rng, n, max_degree)
        if wick_b(a, b) != wick_b(b, a):
            symmetry_violations += 1
        bab = wick_b(a, b)
        if ((bab.sign == 1 and bab.square == 1)) != (a == b):
            identity_violations += 1
        d_ab = math.acos(bab.value)
        d_bc = math.acos(wick_b(b, c).value)
        d_ac = math.acos(wick_b(a, c).value)
        slack = max(
            d_ac - d_ab - d_bc, d_ab - d_ac - d_bc, d_bc - d_ab - d_ac
        )
        if slack > triangle_slack_tol:
            triangle_violations += 1
        if slack > max_slack:
            max_slack = slack
            worst = (a.text(), b.text(), c.text())
    return MetricAxiomReport(
        triples_checked=sample_count,
        symmetry_violations=symmetry_violations,
        identity_violations=identity_violations,
        triangle_violations=triangle_violations,
        max_triangle_slack=max_slack,
        worst_triple=worst,
    )
