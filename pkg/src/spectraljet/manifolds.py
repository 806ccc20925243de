"""Closed-spectrum manifold models and their heat-kernel diagonal jets.

Each model exposes J(t, alpha, beta) = D_y^beta D_x^alpha H(t, x, y) | x=y in
normal coordinates at a fixed base point (origin for circle/torus, north pole
for spheres), together with the normalized embedding Gram entries

    G(alpha, beta) = 2 (4 pi)^(n/2) t^((n+2)/2) * J(t, alpha, beta),

which are the inner products of the jet vectors of the normalized embedding.

Flat models use termwise-differentiated trigonometric series in closed form.
Spheres build the zonal kernel as a truncated Taylor series in the chart
offsets through the entire functions c(z) = cos(sqrt z), s(z) = sin(sqrt z)/
sqrt z (the chart expression of the cosine of geodesic distance), then read
off mixed partials; the degree-l zonal polynomial enters only through its few
leading Taylor coefficients at 1, for which closed forms are used.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np

from .multiindex import MultiIndex, empty, from_indices
from .jets import (
    SQRT_COS,
    SQRT_SINC,
    SQUARED_GEODESIC,
    TruncatedSeries,
    compose_univariate,
)

TWO_PI = 2.0 * math.pi


class TruncationError(RuntimeError):
    """Raised when a spectral sum hits its hard cap before the tail bound."""


@dataclass(frozen=True)
class TruncationPolicy:
    """Eigenvalue cutoff policy for spectral sums.

    relative_tail: stop once terms are past their peak and the next term
    (derivative growth factors included, since the actual summand is tested)
    drops below epsilon times the accumulated absolute sum.  rho is the
    exponent margin entering the estimated peak index.  fixed_cutoff: sum a
    prescribed number of modes, used for truncation-stability rechecks.
    """

    mode: str = "relative_tail"
    epsilon: float = 1e-14
    rho: float = 0.5
    hard_cap: int | None = None  # None: model default
    fixed_cutoff: int | None = None

    def __post_init__(self):
        if self.mode not in ("relative_tail", "fixed_cutoff"):
            raise ValueError(f"unknown policy mode {self.mode!r}")
        if self.mode == "fixed_cutoff" and not self.fixed_cutoff:
            raise ValueError("fixed_cutoff mode needs a cutoff")
        if self.epsilon <= 0 or self.rho <= 0:
            raise ValueError("epsilon and rho must be positive")

    def doubled(self, chosen_cutoff: int) -> "TruncationPolicy":
        return replace(self, mode="fixed_cutoff", fixed_cutoff=2 * chosen_cutoff)


DEFAULT_POLICY = TruncationPolicy()


def _tail_sum(term, start: int, min_index: int, policy: TruncationPolicy,
              hard_cap: int) -> tuple[float, int]:
    """Kahan-compensated sum of term(k), k = start, start+1, ...

    Returns (sum, last index summed).  The tail rule never fires while terms
    are still growing toward their peak.
    """
    if policy.mode == "fixed_cutoff":
        s = c = 0.0
        last = start - 1
        for k in range(start, start + policy.fixed_cutoff):
            y = term(k) - c
            tmp = s + y
            c = (tmp - s) - y
            s = tmp
            last = k
        return s, last

    s = c = 0.0
    abs_acc = 0.0
    prev = math.inf
    k = start
    while True:
        v = term(k)
        y = v - c
        tmp = s + y
        c = (tmp - s) - y
        s = tmp
        av = abs(v)
        abs_acc += av
        if k >= min_index and av <= prev and av <= policy.epsilon * abs_acc:
            return s, k
        if k - start + 1 >= hard_cap:
            raise TruncationError(
                f"hard cap {hard_cap} reached before the tail bound "
                f"(epsilon={policy.epsilon}); lower t or raise the cap"
            )
        prev = av
        k += 1


class SpectralModel:
    """Shared interface of the closed-spectrum models."""

    n: int
    volume: float
    label: str
    default_hard_cap: int

    # true curvature data, used as verification targets
    scalar_curvature: float
    ricci_coefficient: float      # Ric = coefficient * g
    sectional_curvature: float
    is_flat: bool

    def _cap(self, policy: TruncationPolicy) -> int:
        return policy.hard_cap if policy.hard_cap else self.default_hard_cap

    def diag_jet_with_cutoff(self, t, alpha, beta, policy=DEFAULT_POLICY,
                             include_constant_mode=True):
        raise NotImplementedError

    def diag_jet(self, t: float, alpha: MultiIndex, beta: MultiIndex,
                 policy: TruncationPolicy = DEFAULT_POLICY,
                 include_constant_mode: bool = True) -> float:
        """J(t, alpha, beta); the constant eigenfunction only matters for the
        order-(0,0) entry (the heat-kernel diagonal keeps it, the embedding
        drops it)."""
        value, _ = self.diag_jet_with_cutoff(
            t, alpha, beta, policy, include_constant_mode
        )
        return value

    def heat_diagonal(self, t: float, policy: TruncationPolicy = DEFAULT_POLICY,
                      include_constant_mode: bool = True) -> float:
        e = empty(self.n)
        return self.diag_jet(t, e, e, policy, include_constant_mode)

    def gram_prefactor(self, t: float) -> float:
        return 2.0 * (4.0 * math.pi) ** (self.n / 2.0) * t ** ((self.n + 2) / 2.0)

    def gram_entry(self, t: float, alpha: MultiIndex, beta: MultiIndex,
                   policy: TruncationPolicy = DEFAULT_POLICY) -> float:
        """<D^alpha psi_t, D^beta psi_t> at the base point."""
        j = self.diag_jet(t, alpha, beta, policy, include_constant_mode=False)
        return self.gram_prefactor(t) * j

    def gram_difference(self, t, pair1, pair2,
                        policy: TruncationPolicy = DEFAULT_POLICY) -> float:
        """G(pair1) - G(pair2); models override where the leading parts must
        be cancelled mode by mode."""
        a1, b1 = pair1
        a2, b2 = pair2
        return self.gram_entry(t, a1, b1, policy) - self.gram_entry(t, a2, b2, policy)

    def _validate_time(self, t: float) -> None:
        if not t > 0:
            raise ValueError(f"heat time must be positive, got {t}")

    def _validate_pair(self, alpha: MultiIndex, beta: MultiIndex) -> None:
        if alpha.n != self.n or beta.n != self.n:
            raise ValueError(
                f"multi-index dimension must be {self.n}, "
                f"got {alpha.n} and {beta.n}"
            )
        if alpha.degree + beta.degree > 8:
            raise ValueError("jet order above 8 is not supported")


class FlatTorus(SpectralModel):
    """Rectangular flat torus, the product of circles of the given radii.

    The heat kernel factorizes per axis; every jet is a finite product of
    one-dimensional mode sums M_m(t) = sum_k (k/R)^m exp(-k^2 t / R^2).
    """

    label = "torus"
    default_hard_cap = 200_000
    is_flat = True
    scalar_curvature = 0.0
    ricci_coefficient = 0.0
    sectional_curvature = 0.0

    def __init__(self, radii):
        radii = tuple(float(r) for r in radii)
        if not radii or any(r <= 0 for r in radii):
            raise ValueError("radii must be positive")
        self.radii = radii
        self.n = len(radii)
        self.volume = math.prod(TWO_PI * r for r in radii)

    def describe(self) -> dict:
        return {"kind": self.label, "radii": list(self.radii)}

    def _mode_sum(self, axis: int, m: int, t: float,
                  policy: TruncationPolicy) -> tuple[float, int]:
        R = self.radii[axis]
        scale = t / (R * R)

        def term(k):
            return math.exp(-k * k * scale) * (k / R) ** m

        peak = R * math.sqrt((m + policy.rho) / (2.0 * t))
        min_index = max(8, int(math.ceil(peak)) + 2)
        return _tail_sum(term, 1, min_index, policy, self._cap(policy))

    def diag_jet_with_cutoff(self, t, alpha, beta, policy=DEFAULT_POLICY,
                             include_constant_mode=True):
        self._validate_time(t)
        self._validate_pair(alpha, beta)
        orders = [a + b for a, b in zip(alpha.counts, beta.counts)]
        if any(m % 2 for m in orders):
            return 0.0, 0  # odd derivative of an even kernel vanishes exactly
        value = 1.0
        cutoff = 0
        for axis, m in enumerate(orders):
            R = self.radii[axis]
            msum, used = self._mode_sum(axis, m, t, policy)
            cutoff = max(cutoff, used)
            if m == 0:
                value *= (1.0 + 2.0 * msum) / (TWO_PI * R)
            else:
                sign = -1.0 if (beta.counts[axis] + m // 2) % 2 else 1.0
                value *= sign * 2.0 * msum / (TWO_PI * R)
        if alpha.degree == 0 and beta.degree == 0 and not include_constant_mode:
            value -= 1.0 / self.volume
        return value, cutoff

    def kernel_value(self, t: float, u, v,
                     policy: TruncationPolicy = DEFAULT_POLICY) -> float:
        """H(t, x, y) for chart offsets u, v (the chart is globally flat).

        The cutoff is chosen on the monotone Gaussian envelope; the cosine
        factors oscillate and would trip the tail rule early.
        """
        self._validate_time(t)
        value = 1.0
        for axis in range(self.n):
            R = self.radii[axis]
            d = (u[axis] - v[axis]) / R
            _, cutoff = self._mode_sum(axis, 0, t, policy)
            scale = t / (R * R)
            s = math.fsum(
                math.exp(-k * k * scale) * math.cos(k * d)
                for k in range(1, cutoff + 1)
            )
            value *= (1.0 + 2.0 * s) / (TWO_PI * R)
        return value

    def embedding_point(self, t: float, x, modes_per_axis: int) -> np.ndarray:
        """Finite-dimensional normalized embedding psi_t^q at the point x.

        Components are products over axes of the circle eigenfunctions
        (constant, cos, sin up to ``modes_per_axis``), weighted by
        exp(-lambda t / 2) and the psi normalization; the global constant
        mode is dropped.
        """
        self._validate_time(t)
        axis_funcs: list[list[tuple[float, float]]] = []  # (lambda, value)
        for axis in range(self.n):
            R = self.radii[axis]
            funcs = [(0.0, 1.0 / math.sqrt(TWO_PI * R))]
            for k in range(1, modes_per_axis + 1):
                lam = (k / R) ** 2
                funcs.append((lam, math.cos(k * x[axis] / R) / math.sqrt(math.pi * R)))
                funcs.append((lam, math.sin(k * x[axis] / R) / math.sqrt(math.pi * R)))
            axis_funcs.append(funcs)
        # all products of per-axis modes, skipping the global constant
        lams = [0.0]
        vals = [1.0]
        for funcs in axis_funcs:
            lams = [l0 + l1 for l0 in lams for l1, _ in funcs]
            vals = [v0 * v1 for v0 in vals for _, v1 in funcs]
        norm = math.sqrt(2.0) * (4.0 * math.pi) ** (self.n / 4.0) * t ** ((self.n + 2) / 4.0)
        comps = [
            norm * math.exp(-lam * t / 2.0) * val
            for lam, val in zip(lams, vals)
        ][1:]  # drop the constant eigenfunction
        return np.array(comps)


class Circle(FlatTorus):
    label = "circle"

    def __init__(self, radius: float = 1.0):
        super().__init__((radius,))
        self.radius = float(radius)

    def describe(self) -> dict:
        return {"kind": self.label, "radius": self.radius}


@lru_cache(maxsize=32)
def _sphere_series_tables(dim: int, radius: float, max_degree: int):
    """Powers of w = cos(Theta) - 1 as truncated series in the chart offsets.

    Theta is the angle between exp(u) and exp(v) on the sphere of the given
    radius: cos Theta = c(|u|^2/a^2) c(|v|^2/a^2) + s(|u|^2/a^2) s(|v|^2/a^2)
    <u, v>/a^2, assembled from entire kernels so the norm never appears bare.
    Returns [w^0, w^1, ..., w^(max_degree // 2)].
    """
    nv = 2 * dim
    inv_a2 = 1.0 / (radius * radius)
    u_sq = TruncatedSeries(nv, max_degree)
    v_sq = TruncatedSeries(nv, max_degree)
    dot = TruncatedSeries(nv, max_degree)
    for i in range(dim):
        eu = [0] * nv
        eu[i] = 2
        u_sq = u_sq + TruncatedSeries(nv, max_degree, {tuple(eu): inv_a2})
        ev = [0] * nv
        ev[dim + i] = 2
        v_sq = v_sq + TruncatedSeries(nv, max_degree, {tuple(ev): inv_a2})
        ed = [0] * nv
        ed[i] = 1
        ed[dim + i] = 1
        dot = dot + TruncatedSeries(nv, max_degree, {tuple(ed): inv_a2})
    cos_theta = (
        compose_univariate(SQRT_COS, u_sq) * compose_univariate(SQRT_COS, v_sq)
        + compose_univariate(SQRT_SINC, u_sq)
        * compose_univariate(SQRT_SINC, v_sq)
        * dot
    )
    w = cos_theta - 1.0
    powers = [TruncatedSeries.constant(1.0, nv, max_degree)]
    for _ in range(max_degree // 2):
        powers.append(powers[-1] * w)
    return tuple(powers)


class Sphere(SpectralModel):
    """Round sphere S^2 or S^3 of the given radius.

    S^2: eigenvalues l(l+1)/a^2 with multiplicity 2l+1 and zonal polynomial
    P_l; S^3: l(l+2)/a^2 with multiplicity (l+1)^2 and zonal polynomial U_l
    (Chebyshev, second kind).  Only the Taylor coefficients of the zonal
    polynomial at argument 1 enter the diagonal jets; closed forms:

        P_l^(m)(1) / m! = C(l+m, 2m) C(2m, m) / 2^m,
        U_l^(m)(1) / m! = 2^m C(l+m+1, 2m+1).
    """

    is_flat = False
    default_hard_cap = 5_000

    def __init__(self, dim: int, radius: float = 1.0):
        if dim not in (2, 3):
            raise ValueError("sphere dimension must be 2 or 3")
        if radius <= 0:
            raise ValueError("radius must be positive")
        self.n = dim
        self.radius = float(radius)
        self.label = f"sphere{dim}"
        if dim == 2:
            self.volume = 4.0 * math.pi * radius**2
        else:
            self.volume = 2.0 * math.pi**2 * radius**3
        a2 = radius * radius
        self.scalar_curvature = dim * (dim - 1) / a2
        self.ricci_coefficient = (dim - 1) / a2
        self.sectional_curvature = 1.0 / a2
        self._extract_cache: dict = {}

    def describe(self) -> dict:
        return {"kind": self.label, "radius": self.radius}

    def eigenvalue(self, l: int) -> float:
        if self.n == 2:
            return l * (l + 1) / (self.radius * self.radius)
        return l * (l + 2) / (self.radius * self.radius)

    def multiplicity(self, l: int) -> int:
        return 2 * l + 1 if self.n == 2 else (l + 1) ** 2

    def _zonal_taylor(self, l: int, m: int) -> float:
        """m-th Taylor coefficient at 1 of (multiplicity-weighted) zonal
        polynomial, before the 1/Vol normalization.  Exact in doubles: the
        only division is by a power of two."""
        if m > l:
            return 0.0
        if self.n == 2:
            # (2l+1) * P_l^(m)(1)/m! with P_l^(m)(1)/m! = C(l+m,2m) C(2m,m)/2^m
            return (2 * l + 1) * math.comb(l + m, 2 * m) * (
                math.comb(2 * m, m) / (1 << m)
            )
        # (l+1) * U_l^(m)(1)/m! with U_l^(m)(1)/m! = 2^m C(l+m+1, 2m+1)
        return float((l + 1) * (1 << m) * math.comb(l + m + 1, 2 * m + 1))

    def _zonal_scale(self) -> float:
        if self.n == 2:
            return 1.0 / (4.0 * math.pi * self.radius**2)
        return 1.0 / (2.0 * math.pi**2 * self.radius**3)

    def _series_degree(self, total: int) -> int:
        return max(2, total + (total % 2))

    def _extract_vector(self, alpha: MultiIndex, beta: MultiIndex,
                        degree: int) -> tuple[float, ...]:
        key = (degree, alpha.counts, beta.counts)
        cached = self._extract_cache.get(key)
        if cached is not None:
            return cached
        powers = _sphere_series_tables(self.n, self.radius, degree)
        exps = alpha.counts + beta.counts
        factor = 1
        for m in exps:
            factor *= math.factorial(m)
        vec = tuple(p.coeffs.get(exps, 0.0) * factor for p in powers)
        self._extract_cache[key] = vec
        return vec

    def _min_index(self, t: float, power: float, policy: TruncationPolicy) -> int:
        peak = self.radius * math.sqrt((power + policy.rho) / (2.0 * t))
        return max(8, int(math.ceil(peak)) + 2)

    def diag_jet_with_cutoff(self, t, alpha, beta, policy=DEFAULT_POLICY,
                             include_constant_mode=True):
        self._validate_time(t)
        self._validate_pair(alpha, beta)
        total = alpha.degree + beta.degree
        if total == 0:
            start = 0 if include_constant_mode else 1

            def term(l):
                return math.exp(-self.eigenvalue(l) * t) * self.multiplicity(l)

            min_index = self._min_index(t, self.n - 1.0, policy)
            s, used = _tail_sum(term, start, min_index, policy, self._cap(policy))
            return s / self.volume, used

        degree = self._series_degree(total)
        em = self._extract_vector(alpha, beta, degree)
        if all(e == 0.0 for e in em):
            return 0.0, 0
        scale = self._zonal_scale()

        def term(l):
            acc = 0.0
            for m, e in enumerate(em):
                if e:
                    acc += self._zonal_taylor(l, m) * e
            return math.exp(-self.eigenvalue(l) * t) * acc

        min_index = self._min_index(t, 2 * (len(em) - 1) + self.n - 1.0, policy)
        s, used = _tail_sum(term, 0, min_index, policy, self._cap(policy))
        return s * scale, used

    def gram_difference(self, t, pair1, pair2,
                        policy: TruncationPolicy = DEFAULT_POLICY) -> float:
        """G(pair1) - G(pair2) with the difference taken per eigenvalue term.

        Both entries carry the same O(1/t) leading part when their Wick
        constants agree; differencing inside the mode sum keeps the O(1)
        remainder free of catastrophic cancellation.
        """
        self._validate_time(t)
        a1, b1 = pair1
        a2, b2 = pair2
        self._validate_pair(a1, b1)
        self._validate_pair(a2, b2)
        total = max(a1.degree + b1.degree, a2.degree + b2.degree)
        degree = self._series_degree(total)
        em1 = self._extract_vector(a1, b1, degree)
        em2 = self._extract_vector(a2, b2, degree)
        delta = tuple(x - y for x, y in zip(em1, em2))
        if all(d == 0.0 for d in delta):
            return 0.0

        def term(l):
            acc = 0.0
            for m, d in enumerate(delta):
                if d:
                    acc += self._zonal_taylor(l, m) * d
            return math.exp(-self.eigenvalue(l) * t) * acc

        min_index = self._min_index(t, 2 * (len(delta) - 1) + self.n - 1.0, policy)
        s, _ = _tail_sum(term, 0, min_index, policy, self._cap(policy))
        return self.gram_prefactor(t) * s * self._zonal_scale()

    # -- closed-form kernel evaluation (finite-difference cross checks) ------

    def chart_cosine(self, u, v) -> float:
        """cos Theta between exp(u) and exp(v), from the entire kernels."""
        a2 = self.radius * self.radius
        zu = sum(x * x for x in u) / a2
        zv = sum(x * x for x in v) / a2
        dot = sum(x * y for x, y in zip(u, v)) / a2
        z = SQRT_COS(zu) * SQRT_COS(zv) + SQRT_SINC(zu) * SQRT_SINC(zv) * dot
        return min(1.0, max(-1.0, z))

    def kernel_value(self, t: float, u, v,
                     policy: TruncationPolicy = DEFAULT_POLICY) -> float:
        """H(t, exp(u), exp(v)) by direct zonal summation."""
        self._validate_time(t)
        z = self.chart_cosine(u, v)
        # cutoff: reuse the diagonal tail rule (|zonal(z)| <= zonal(1))

        def diag_term(l):
            return math.exp(-self.eigenvalue(l) * t) * self.multiplicity(l)

        min_index = self._min_index(t, self.n - 1.0, policy)
        _, cutoff = _tail_sum(diag_term, 0, min_index, policy, self._cap(policy))
        weights = np.exp(
            -np.array([self.eigenvalue(l) for l in range(cutoff + 1)]) * t
        )
        if self.n == 2:
            coeffs = weights * (2 * np.arange(cutoff + 1) + 1)
            from numpy.polynomial.legendre import legval

            return float(legval(z, coeffs)) * self._zonal_scale()
        theta = math.acos(z)
        ls = np.arange(cutoff + 1)
        if theta < 1e-8:
            vals = (ls + 1.0) ** 2  # sin((l+1)theta)/sin(theta) -> l+1
        else:
            vals = (ls + 1.0) * np.sin((ls + 1.0) * theta) / math.sin(theta)
        return float(np.dot(weights, vals)) * self._zonal_scale()


def make_model(kind: str, radius: float = 1.0, radii=None) -> SpectralModel:
    """Model factory used by the CLI specifiers."""
    if kind == "circle":
        return Circle(radius)
    if kind == "torus":
        if not radii:
            raise ValueError("torus needs --radii")
        return FlatTorus(radii)
    if kind == "sphere2":
        return Sphere(2, radius)
    if kind == "sphere3":
        return Sphere(3, radius)
    raise ValueError(f"unknown model kind {kind!r}")


def heat_kernel_diag_jet(model: SpectralModel, t: float, alpha: MultiIndex,
                         beta: MultiIndex,
                         policy: TruncationPolicy = DEFAULT_POLICY) -> float:
    """J(t, alpha, beta) = D_y^beta D_x^alpha H(t, x, y) at x = y.

    Functional form of :meth:`SpectralModel.diag_jet`.
    """
    return model.diag_jet(t, alpha, beta, policy)


# ---------------------------------------------------------------------------
# Jet Gram matrices
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class JetGram:
    """All normalized Gram entries G(alpha, beta) for |alpha|, |beta| <= order."""

    t: float
    order: int
    basis: tuple[MultiIndex, ...]
    entries: dict

    def entry(self, alpha: MultiIndex, beta: MultiIndex) -> float:
        key = (alpha.counts, beta.counts)
        if key in self.entries:
            return self.entries[key]
        return self.entries[(beta.counts, alpha.counts)]

    def matrix(self) -> np.ndarray:
        m = len(self.basis)
        out = np.empty((m, m))
        for i, a in enumerate(self.basis):
            for j, b in enumerate(self.basis):
                out[i, j] = self.entry(a, b)
        return out


def jet_gram(model: SpectralModel, t: float, max_order: int,
             policy: TruncationPolicy = DEFAULT_POLICY) -> JetGram:
    if max_order > 4:
        raise ValueError("jet Gram is supported up to order 4")
    from .multiindex import enumerate_multiindices

    basis = tuple(enumerate_multiindices(model.n, max_order))
    entries = {}
    for i, a in enumerate(basis):
        for b in basis[i:]:
            entries[(a.counts, b.counts)] = model.gram_entry(t, a, b, policy)
    return JetGram(t=t, order=max_order, basis=basis, entries=entries)


# ---------------------------------------------------------------------------
# Geometry read off the Gram entries
# ---------------------------------------------------------------------------

def pullback_metric(model: SpectralModel, t: float,
                    policy: TruncationPolicy = DEFAULT_POLICY) -> np.ndarray:
    """Induced metric of the embedding: the first-derivative Gram matrix."""
    n = model.n
    out = np.empty((n, n))
    for i in range(1, n + 1):
        for j in range(i, n + 1):
            g = model.gram_entry(
                t, from_indices([i], n), from_indices([j], n), policy
            )
            out[i - 1, j - 1] = g
            out[j - 1, i - 1] = g
    return out


@dataclass(frozen=True)
class ScalarRicciReport:
    scalar_estimate: float
    scalar_slope: float
    scalar_slope_stderr: float
    pullback_c0: np.ndarray
    pullback_c1: np.ndarray
    ricci_estimate: np.ndarray
    condition_number: float


def ricci_scalar_extract(model: SpectralModel, ts,
                         policy: TruncationPolicy = DEFAULT_POLICY) -> ScalarRicciReport:
    """Scalar curvature from the diagonal slope, Ricci from the pullback slope.

    (4 pi t)^(n/2) H(t, x, x) = 1 + t S/6 + O(t^2) gives S; the pullback
    expands as  delta_ij + t c1_ij + O(t^2)  with  c1 = (1/3)((S/2) delta - Ric),
    so Ric_ij = (S/2) delta_ij - 3 c1_ij.
    """
    from .asymptotics import limit_fit

    ts = sorted(ts)
    if len(ts) < 4:
        raise ValueError("need at least 4 grid points for the quadratic fits")
    n = model.n
    diag = [
        (t, (4.0 * math.pi * t) ** (n / 2.0) * model.heat_diagonal(t, policy))
        for t in ts
    ]
    cond = np.linalg.cond(np.vander(np.array(ts), 3, increasing=True))
    if not np.isfinite(cond) or cond > 1e12:
        raise ValueError(f"ill-conditioned fit grid (condition number {cond:.3g})")
    scalar_fit = limit_fit(diag, order=2)
    pulls = [(t, pullback_metric(model, t, policy)) for t in ts]
    c0 = np.empty((n, n))
    c1 = np.empty((n, n))
    for i in range(n):
        for j in range(n):
            fit = limit_fit([(t, p[i, j]) for t, p in pulls], order=2)
            c0[i, j] = fit.c0
            c1[i, j] = fit.c1
    scalar = 6.0 * scalar_fit.c1
    ricci = (scalar / 2.0) * np.eye(n) - 3.0 * c1
    return ScalarRicciReport(
        scalar_estimate=scalar,
        scalar_slope=scalar_fit.c1,
        scalar_slope_stderr=scalar_fit.stderr,
        pullback_c0=c0,
        pullback_c1=c1,
        ricci_estimate=ricci,
        condition_number=float(cond),
    )


def mean_curvature_proxy(model: SpectralModel, t: float,
                         policy: TruncationPolicy = DEFAULT_POLICY) -> float:
    """sqrt(t) * |mean of the pure second jets|, the mean-curvature length proxy.

    t |(1/n) sum_k D_kk psi|^2 = (t/n^2) sum_{k,l} G((k,k),(l,l)); the
    tangential part is not subtracted since it vanishes in the limit.
    """
    n = model.n
    acc = 0.0
    for k in range(1, n + 1):
        for l in range(k, n + 1):
            g = model.gram_entry(
                t, from_indices([k, k], n), from_indices([l, l], n), policy
            )
            acc += g if k == l else 2.0 * g
    return math.sqrt(t * acc / (n * n))


def third_jet_umbilical(model: SpectralModel, t: float, i: int, j: int, k: int,
                        policy: TruncationPolicy = DEFAULT_POLICY) -> float:
    """2t <D_i D_k D_k psi_t, D_j psi_t>; limits are -3, -1, 0 for
    i=j=k, i=j!=k, i!=j."""
    n = model.n
    return 2.0 * t * model.gram_entry(
        t, from_indices([i, k, k], n), from_indices([j], n), policy
    )


@dataclass(frozen=True)
class CurvatureEstimate:
    value: float
    fit_c1: float
    stderr: float
    cancellation_limited: bool


def gauss_curvature_difference(model: SpectralModel, t: float, ijkl,
                               policy: TruncationPolicy = DEFAULT_POLICY) -> float:
    """G((i,l),(j,k)) - G((i,k),(j,l)) at one time; the t -> 0 limit is
    R(V_i, V_j, V_k, V_l)."""
    i, j, k, l = ijkl
    n = model.n
    pair1 = (from_indices([i, l], n), from_indices([j, k], n))
    pair2 = (from_indices([i, k], n), from_indices([j, l], n))
    return model.gram_difference(t, pair1, pair2, policy)


def gauss_curvature_estimate(model: SpectralModel, ts, ijkl,
                             policy: TruncationPolicy = DEFAULT_POLICY) -> CurvatureEstimate:
    """Fitted t -> 0 limit of the Gram difference, i.e. R(V_i,V_j,V_k,V_l)."""
    from .asymptotics import limit_fit

    ts = sorted(ts)
    if len(ts) < 4:
        raise ValueError("need at least 4 grid points")
    samples = [(t, gauss_curvature_difference(model, t, ijkl, policy)) for t in ts]
    fit = limit_fit(samples, order=2)
    # cancellation diagnostic at the smallest time
    i, j, k, l = ijkl
    n = model.n
    t0 = ts[0]
    g1 = model.gram_entry(t0, from_indices([i, l], n), from_indices([j, k], n), policy)
    g2 = model.gram_entry(t0, from_indices([i, k], n), from_indices([j, l], n), policy)
    scale = max(abs(g1), abs(g2), 1.0)
    limited = abs(g1 - g2) <= 1e-12 * scale and samples[0][1] != 0.0
    return CurvatureEstimate(
        value=fit.c0, fit_c1=fit.c1, stderr=fit.stderr, cancellation_limited=limited
    )


def fitted_curvature_tensor(model: SpectralModel, ts,
                            policy: TruncationPolicy = DEFAULT_POLICY) -> np.ndarray:
    """R(V_i, V_j, V_k, V_l) for all index quadruples, as fitted limits."""
    if model.n < 2:
        raise ValueError("curvature needs dimension at least 2")
    n = model.n
    out = np.empty((n, n, n, n))
    cache: dict = {}
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            for k in range(1, n + 1):
                for l in range(1, n + 1):
                    key = (i, j, k, l)
                    if key not in cache:
                        cache[key] = gauss_curvature_estimate(
                            model, ts, key, policy
                        ).value
                    out[i - 1, j - 1, k - 1, l - 1] = cache[key]
    return out


@dataclass(frozen=True)
class SymmetryResidualReport:
    tensor: np.ndarray
    max_abs: float
    antisymmetry_first: float   # R_ijkl + R_jikl
    antisymmetry_last: float    # R_ijkl + R_ijlk
    pair_symmetry: float        # R_ijkl - R_klij
    first_bianchi: float        # R_ijkl + R_jkil + R_kijl

    def max_relative_residual(self) -> float:
        scale = max(self.max_abs, 1e-30)
        return max(
            self.antisymmetry_first, self.antisymmetry_last,
            self.pair_symmetry, self.first_bianchi,
        ) / scale


def curvature_symmetry_residuals(model: SpectralModel, ts,
                                 policy: TruncationPolicy = DEFAULT_POLICY) -> SymmetryResidualReport:
    """Residuals of the algebraic curvature symmetries on the fitted tensor."""
    r = fitted_curvature_tensor(model, ts, policy)
    a1 = float(np.max(np.abs(r + np.transpose(r, (1, 0, 2, 3)))))
    a2 = float(np.max(np.abs(r + np.transpose(r, (0, 1, 3, 2)))))
    pair = float(np.max(np.abs(r - np.transpose(r, (2, 3, 0, 1)))))
    bianchi = float(
        np.max(np.abs(r + np.transpose(r, (1, 2, 0, 3)) + np.transpose(r, (2, 0, 1, 3))))
    )
    return SymmetryResidualReport(
        tensor=r,
        max_abs=float(np.max(np.abs(r))),
        antisymmetry_first=a1,
        antisymmetry_last=a2,
        pair_symmetry=pair,
        first_bianchi=bianchi,
    )


# ---------------------------------------------------------------------------
# Levi-Civita connection read off the 2-jets
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PolynomialField:
    """Vector field Y = f V_k with f polynomial (degree <= 2) in the chart.

    Only f and its gradient at the base point enter the connection there, so
    the quadratic part never contributes (it and its gradient vanish at 0).
    """

    direction: int
    constant: float = 0.0
    linear: tuple[float, ...] = ()
    quadratic: tuple = ()


@dataclass(frozen=True)
class LeviCivitaReport:
    limit_vector: tuple[float, ...]
    target_vector: tuple[float, ...]
    max_abs_error: float


def levi_civita_check(model: SpectralModel, ts, i: int, field: PolynomialField,
                      policy: TruncationPolicy = DEFAULT_POLICY) -> LeviCivitaReport:
    """Verify nabla_i Y at the base point from embedding 2-jets.

    With Y = f V_k, the product rule gives D_i D_Y psi = (d_i f) D_k psi +
    f D_i D_k psi at the point, so sum_j <D_i D_Y psi, D_j psi> V_j is a
    combination of Gram entries; its limit must be (d_i f)(p) V_k since
    chart coordinate fields are parallel at the base point.
    """
    from .asymptotics import limit_fit

    n = model.n
    k = field.direction
    if not 1 <= k <= n or not 1 <= i <= n:
        raise ValueError("field direction and i must be coordinate indices")
    linear = tuple(field.linear) if field.linear else (0.0,) * n
    if len(linear) != n:
        raise ValueError("linear coefficient tuple has wrong length")
    f0 = field.constant
    df_i = linear[i - 1]
    ts = sorted(ts)
    limits = []
    for j in range(1, n + 1):
        samples = []
        for t in ts:
            g_kj = model.gram_entry(t, from_indices([k], n), from_indices([j], n), policy)
            g_ikj = model.gram_entry(
                t, from_indices([i, k], n), from_indices([j], n), policy
            )
            samples.append((t, df_i * g_kj + f0 * g_ikj))
        limits.append(limit_fit(samples, order=2).c0)
    target = tuple(df_i if j == k else 0.0 for j in range(1, n + 1))
    err = max(abs(a - b) for a, b in zip(limits, target))
    return LeviCivitaReport(tuple(limits), target, err)


# ---------------------------------------------------------------------------
# Squared-distance jets (spheres)
# ---------------------------------------------------------------------------

def squared_distance_jets(model: Sphere, alpha: MultiIndex,
                          beta: MultiIndex) -> float:
    """Mixed partial D_v^beta D_u^alpha of r^2(exp u, exp v) at u = v = 0.

    r^2 = a^2 (arccos(cos Theta))^2 passes through the chart origin via the
    analytic kernel g(w) = (arccos(1+w))^2 applied to w = cos Theta - 1.
    Closed-form targets on the sphere: first jets 0, D_ij r^2 = 2 delta_ij =
    -D_i Dbar_j r^2, all third jets 0, pure fourth jets 0, and the mixed
    fourth jets carry the curvature combination -(2/3)(R_ikjl + R_iljk).
    """
    if not isinstance(model, Sphere):
        raise ValueError("squared-distance jets use the closed-form sphere kernel")
    total = alpha.degree + beta.degree
    if total > 4:
        raise ValueError("squared-distance jets are supported up to order 4")
    degree = 4
    powers = _sphere_series_tables(model.n, model.radius, degree)
    gcoeffs = SQUARED_GEODESIC.coefficients(0.0, len(powers))
    a2 = model.radius * model.radius
    exps = alpha.counts + beta.counts
    factor = 1
    for m in exps:
        factor *= math.factorial(m)
    coeff = math.fsum(
        gcoeffs[m] * powers[m].coeffs.get(exps, 0.0) for m in range(1, len(powers))
    )
    return a2 * coeff * factor


def squared_distance_target(model: Sphere, alpha: MultiIndex,
                            beta: MultiIndex) -> float:
    """Closed-form value of the squared-distance jet on the round sphere."""
    K = model.sectional_curvature

    def riemann(a, b, c, d):
        return K * ((a == c) * (b == d) - (a == d) * (b == c))

    total = alpha.degree + beta.degree
    if total % 2 == 1 or total == 0:
        return 0.0
    if total == 2:
        if alpha.degree == 2:
            i, j = alpha.indices()
            return 2.0 * (i == j)
        if beta.degree == 2:
            i, j = beta.indices()
            return 2.0 * (i == j)
        (i,), (j,) = alpha.indices(), beta.indices()
        return -2.0 * (i == j)
    # total degree 4: only the (2,2)-mixed pattern is nonzero
    if alpha.degree == 2 and beta.degree == 2:
        i, j = alpha.indices()
        k, l = beta.indices()
        return -(2.0 / 3.0) * (riemann(i, k, j, l) + riemann(i, l, j, k))
    return 0.0


# ---------------------------------------------------------------------------
# Truncation stability
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TruncationStability:
    value: float
    doubled_value: float
    delta: float
    cutoff: int


def truncation_stability(model: SpectralModel, t: float, alpha: MultiIndex,
                         beta: MultiIndex,
                         policy: TruncationPolicy = DEFAULT_POLICY) -> TruncationStability:
    """Re-evaluate a jet with the policy-chosen cutoff doubled."""
    value, cutoff = model.diag_jet_with_cutoff(t, alpha, beta, policy)
    if cutoff == 0:  # structurally zero jet; doubling changes nothing
        return TruncationStability(value, value, 0.0, cutoff)
    doubled, _ = model.diag_jet_with_cutoff(
        t, alpha, beta, policy.doubled(cutoff)
    )
    return TruncationStability(value, doubled, abs(value - doubled), cutoff)
