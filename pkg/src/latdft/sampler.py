"""Exact-amplitude simulation of the lattice sampling algorithm.

The pipeline reduces the input basis to a nearby SysNF lattice, prepares the
transform-side amplitudes on the residue grid, aligns each grid point onto
the finite lattice through the coset bijection, decodes the coset tag with
the nearest-plane algorithm, applies the lattice DFT through the circuit
simulator, and finally maps the exact output distribution back through the
inverse of the reduction map.  Physical measurement is replaced by exact
bookkeeping plus seeded draws, so total-variation statements can be checked
directly.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .errors import ParameterError, SizeGuardError, ZeroMassError
from .intlat import (
    ExactMatrix,
    determinant,
    dual_basis,
    gram_schmidt,
    lambda1_sq,
    lll_reduce,
    membership,
    nearest_plane,
    norm_sq,
    sqrt_upper_bound,
)
from .qcirc import lattice_qft_values
from .sysnf import ModVector, ReductionCertificate, SysNFBasis, reduce_to_sysnf

GRID_GUARD = 5 * 10**6
CARRYING_MASS = 1e-12
PRUNE_MASS = 1e-13


@dataclass(frozen=True)
class QESSpec:
    """Amplitude oracle for a state preparable on the integer grid.

    ``amplitude`` must accept real (including rational) arguments, since the
    sampler evaluates it at scaled grid points.  ``grid_radius`` declares the
    support radius in the oracle's own argument space: squared mass outside
    it is treated as negligible.
    """

    amplitude: Callable[[Sequence[float]], complex]
    grid_radius: float
    label: str = ""

    def amplitudes(self, points: np.ndarray) -> np.ndarray:
        """Vectorized evaluation; subclass-free hook via ``vector_amplitude``."""
        return np.array([self.amplitude(tuple(p)) for p in points], dtype=complex)


@dataclass(frozen=True)
class VectorizedQESSpec(QESSpec):
    vector_amplitude: Callable[[np.ndarray], np.ndarray] | None = None

    def amplitudes(self, points: np.ndarray) -> np.ndarray:
        if self.vector_amplitude is not None:
            return np.asarray(self.vector_amplitude(points), dtype=complex)
        return super().amplitudes(points)


def gaussian_spec(s: float, grid_radius: float, label: str | None = None) -> QESSpec:
    """Gaussian amplitude F(x) = exp(-pi ||x||^2 / (2 s^2)).

    The square |F|^2 is then the Gaussian density with width parameter s, so
    measured probabilities track the density directly.
    """
    if s <= 0:
        raise ParameterError("gaussian width must be positive")

    def amp(x):
        r2 = sum(float(c) ** 2 for c in x)
        return math.exp(-math.pi * r2 / (2 * s * s))

    def vec_amp(pts):
        r2 = np.sum(np.asarray(pts, dtype=float) ** 2, axis=1)
        return np.exp(-np.pi * r2 / (2 * s * s))

    return VectorizedQESSpec(
        amplitude=amp,
        grid_radius=float(grid_radius),
        label=label if label is not None else f"gaussian({s})",
        vector_amplitude=vec_amp,
    )


@dataclass(frozen=True)
class BoundednessReport:
    """Fraction of squared mass outside the ball of radius s."""

    s: float
    epsilon: float


def _integer_ball(dim: int, radius: float, guard: int = GRID_GUARD) -> np.ndarray:
    r = int(math.floor(radius))
    side = 2 * r + 1
    if side**dim > guard:
        raise SizeGuardError(f"{side ** dim} grid points exceed guard {guard}")
    axes = [np.arange(-r, r + 1)] * dim
    pts = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, dim)
    keep = (pts.astype(float) ** 2).sum(axis=1) <= radius * radius + 1e-12
    return pts[keep]


def bounded_check(spec: QESSpec, s: float, dim: int = 2) -> BoundednessReport:
    """Exact mass ratio of |F|^2 inside the radius-s ball over the declared support."""
    if s <= 0:
        raise ParameterError("radius must be positive")
    pts = _integer_ball(dim, spec.grid_radius)
    mass = np.abs(spec.amplitudes(pts)) ** 2
    total = mass.sum()
    if total == 0:
        raise ZeroMassError("spec has zero squared mass on its declared support")
    inside = mass[(pts.astype(float) ** 2).sum(axis=1) <= s * s + 1e-12].sum()
    return BoundednessReport(s=s, epsilon=float(1.0 - inside / total))


def mass_radius(spec: QESSpec, dim: int, mass_fraction: float) -> float:
    """Smallest grid radius containing the given fraction of squared mass."""
    pts = _integer_ball(dim, spec.grid_radius)
    r2 = (pts.astype(float) ** 2).sum(axis=1)
    mass = np.abs(spec.amplitudes(pts)) ** 2
    total = mass.sum()
    if total == 0:
        raise ZeroMassError("spec has zero squared mass on its declared support")
    order = np.argsort(r2, kind="stable")
    cum = np.cumsum(mass[order])
    idx = int(np.searchsorted(cum, mass_fraction * total))
    idx = min(idx, len(order) - 1)
    return float(math.sqrt(r2[order[idx]]))


@dataclass(frozen=True)
class DiscreteDistribution:
    """Finite distribution over integer lattice vectors."""

    points: tuple[tuple[int, ...], ...]
    probs: np.ndarray

    def __post_init__(self):
        if len(self.points) != len(self.probs):
            raise ValueError("points/probs length mismatch")
        if len(set(self.points)) != len(self.points):
            raise ValueError("support points must be pairwise distinct")
        if np.any(self.probs < 0):
            raise ValueError("negative probability")
        if abs(float(self.probs.sum()) - 1.0) > 1e-12:
            raise ValueError(f"probabilities sum to {self.probs.sum()}, not 1")

    @classmethod
    def from_weights(
        cls, points: Sequence[tuple[int, ...]], weights: np.ndarray, prune_mass: float = 0.0
    ) -> "DiscreteDistribution":
        weights = np.asarray(weights, dtype=float)
        total = weights.sum()
        if total <= 0:
            raise ZeroMassError("empty or zero-mass support")
        probs = weights / total
        if prune_mass > 0 and len(probs):
            keep = probs >= prune_mass / len(probs)
            points = [p for p, k in zip(points, keep) if k]
            probs = probs[keep]
            probs = probs / probs.sum()
        return cls(tuple(points), probs)

    def as_dict(self) -> dict[tuple[int, ...], float]:
        return {p: float(q) for p, q in zip(self.points, self.probs)}


def brute_force_target(
    f: Callable[[Sequence[float]], complex], b: ExactMatrix, box_radius: float
) -> DiscreteDistribution:
    """P(x) proportional to |f(x)|^2 over lattice points within the radius.

    Enumeration oracle: the coefficient box is derived from the rows of the
    basis inverse, so every lattice point inside the ball is visited.
    """
    n = b.ncols
    binv = b.inverse()
    rad = Fraction(box_radius)
    ranges = []
    for i in range(n):
        bound = math.ceil(sqrt_upper_bound(norm_sq(binv.row(i))) * rad)
        ranges.append(np.arange(-bound, bound + 1))
    mesh = np.stack(np.meshgrid(*ranges, indexing="ij"), axis=-1).reshape(-1, n)
    if not b.is_integer():
        raise ParameterError("target enumeration expects an integer basis")
    bint = np.array([[int(x) for x in row] for row in b.rows()], dtype=np.int64)
    pts = mesh @ bint.T
    keep = (pts.astype(float) ** 2).sum(axis=1) <= float(box_radius) ** 2 + 1e-12
    pts = pts[keep]
    if len(pts) == 0:
        raise ZeroMassError("no lattice points inside the box")
    weights = np.array([abs(f(tuple(int(c) for c in p))) ** 2 for p in pts], dtype=float)
    if weights.sum() == 0:
        raise ZeroMassError("target density vanishes on the box")
    order = np.lexsort(pts.T[::-1])
    pts = pts[order]
    weights = weights[order]
    points = tuple(tuple(int(c) for c in p) for p in pts)
    return DiscreteDistribution.from_weights(points, weights)


def pac_distance(
    observed: DiscreteDistribution,
    target: DiscreteDistribution,
    match_radius: float,
) -> tuple[float, float]:
    """Greedy support matching within the radius; returns (tv, max displacement).

    Each observed point relocates its mass to the nearest target support
    point within ``match_radius`` (exact hits first); the total-variation
    distance of the relocated distribution from the target is returned along
    with the largest displacement used.
    """
    tgt = target.as_dict()
    tgt_pts = np.array(target.points, dtype=np.int64)
    relocated: dict[tuple[int, ...], float] = {}
    rad_sq = Fraction(match_radius) ** 2
    max_disp_sq = Fraction(0)
    order = sorted(range(len(observed.points)), key=lambda i: (-observed.probs[i], observed.points[i]))
    for i in order:
        p = observed.points[i]
        mass = float(observed.probs[i])
        if p in tgt:
            relocated[p] = relocated.get(p, 0.0) + mass
            continue
        diffs = tgt_pts - np.array(p, dtype=np.int64)
        d2 = (diffs * diffs).sum(axis=1)
        j = int(np.argmin(d2))
        ties = np.flatnonzero(d2 == d2[j])
        if len(ties) > 1:
            j = min(ties, key=lambda t: target.points[t])
        if Fraction(int(d2[j])) <= rad_sq:
            dest = target.points[j]
            relocated[dest] = relocated.get(dest, 0.0) + mass
            max_disp_sq = max(max_disp_sq, Fraction(int(d2[j])))
        else:
            relocated[p] = relocated.get(p, 0.0) + mass
    l1 = 0.0
    for p in set(relocated) | set(tgt):
        l1 += abs(relocated.get(p, 0.0) - tgt.get(p, 0.0))
    return 0.5 * l1, math.sqrt(float(max_disp_sq))


@dataclass(frozen=True)
class SampleResult:
    """Everything the sampling run produced, exact distribution included."""

    samples: list[tuple[int, ...]]
    distribution: DiscreteDistribution
    certificate: ReductionCertificate
    decode_mismatch_rate: float
    ancilla_residual: float
    norm_defect: float
    boundedness_ok: bool
    grid_points: int = 0
    diagnostics: dict = field(default_factory=dict)


def _ceil_sqrt(n: int) -> int:
    return math.isqrt(n - 1) + 1 if n > 0 else 0


def _short_dual_vectors(basis: ExactMatrix, radius: float) -> list[tuple[int, ...]]:
    """All nonzero lattice vectors of the integer basis within the radius."""
    n = basis.ncols
    binv = basis.inverse()
    rad = Fraction(radius)
    ranges = []
    for i in range(n):
        bound = math.ceil(sqrt_upper_bound(norm_sq(binv.row(i))) * rad)
        ranges.append(np.arange(-bound, bound + 1))
    mesh = np.stack(np.meshgrid(*ranges, indexing="ij"), axis=-1).reshape(-1, n)
    bint = np.array([[int(xx) for xx in row] for row in basis.rows()], dtype=np.int64)
    pts = mesh @ bint.T
    r2 = (pts.astype(float) ** 2).sum(axis=1)
    keep = (r2 <= float(radius) ** 2 + 1e-9) & (r2 > 0)
    return [tuple(int(c) for c in p) for p in pts[keep]]


def sample(
    spec: QESSpec,
    b: ExactMatrix,
    epsilon,
    shots: int,
    seed: int,
    mismatch_warn_threshold: float = 0.0,
    grid_guard: int = GRID_GUARD,
) -> SampleResult:
    """Run the sampling algorithm with exact amplitude bookkeeping.

    ``spec`` is the transform-side amplitude oracle of the target density
    (the state prepared on the integer grid); the returned distribution lives
    on the input lattice after the inverse reduction map, and ``shots`` seeded
    draws from it are included.
    """
    epsilon = Fraction(epsilon)
    if not 0 < epsilon < 1:
        raise ParameterError("epsilon must lie strictly between 0 and 1")
    if shots < 0:
        raise ParameterError("shots must be non-negative")
    n = b.ncols

    # Step 1: nearby SysNF lattice with accuracy epsilon / (sqrt(n) det(B)),
    # using an integer upper bound for sqrt(n) (a smaller parameter only
    # tightens the certificate).
    det_abs = abs(determinant(b))
    eps_reduce = epsilon / (_ceil_sqrt(n) * det_abs)
    cert = reduce_to_sysnf(b, eps_reduce)
    s = cert.basis
    big_n, t_scale = s.N, cert.T
    # Modular dot products below must stay inside int64.
    if (n - 1) * s.N * s.N >= 2**62:
        raise SizeGuardError("reduced modulus too large for vectorized index arithmetic")

    # Hypothesis check (warning only): the oracle's mass radius against
    # lambda_1 of the dual, scaled by 2^(n/2 + 2).
    boundedness_ok = True
    try:
        t_mass = mass_radius(spec, n, 1.0 - 2.0**-n)
        lam_dual_sq = lambda1_sq(dual_basis(b))
        if Fraction(t_mass) ** 2 * 2 ** (n + 4) > lam_dual_sq:
            boundedness_ok = False
            warnings.warn(
                f"mass radius {t_mass:.4g} exceeds lambda1(dual)/2^(n/2+2); "
                "decoding guarantees may fail",
                stacklevel=2,
            )
    except SizeGuardError:
        boundedness_ok = False

    # Step 2: amplitudes F(T x / N) on the centered residue grid, truncated to
    # the declared support radius.
    r_grid = spec.grid_radius * big_n / t_scale
    lo_cap, hi_cap = -((big_n - 1) // 2), big_n // 2
    r_int = min(int(math.floor(r_grid)), max(-lo_cap, hi_cap))
    axes = [np.arange(max(-r_int, lo_cap), min(r_int, hi_cap) + 1, dtype=np.int64)] * n
    total_pts = math.prod(len(a) for a in axes)
    if total_pts > grid_guard:
        raise SizeGuardError(f"{total_pts} grid points exceed guard {grid_guard}")
    u = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, n)
    keep = (u.astype(float) ** 2).sum(axis=1) <= r_grid * r_grid + 1e-12
    u = u[keep]
    amps = spec.amplitudes(u.astype(float) * (t_scale / big_n))
    total_mass = float((np.abs(amps) ** 2).sum())
    if total_mass == 0:
        raise ZeroMassError("spec has zero squared mass on the prepared grid")
    amps = amps / math.sqrt(total_mass)

    # Step 3: coset alignment x = u + y with y the scaled-dual tag of u's coset.
    inv = s.condition_inverse()
    b_arr = np.array(s.b, dtype=np.int64)
    u_mod = u % big_n
    residue = (u_mod[:, 0] - u_mod[:, 1:] @ b_arr) % big_n
    a_par = (-inv * residue) % big_n
    y = np.column_stack([a_par, (-b_arr[None, :] * a_par[:, None]) % big_n])
    x = (u_mod + y) % big_n

    # Step 4: nearest-plane decode of the tag against the reduced scaled dual.
    # N B'^-T has the closed form: first column (1, -b_2, ..., -b_n), then N
    # times the identity on the remaining columns.
    dual_rows = [[0] * n for _ in range(n)]
    dual_rows[0][0] = 1
    for i in range(1, n):
        dual_rows[i][0] = -s.b[i - 1]
        dual_rows[i][i] = big_n
    dual_scaled = ExactMatrix(dual_rows)
    dual_red = lll_reduce(dual_scaled)
    gs = gram_schmidt(dual_red)
    lam_dual_scaled_sq = lambda1_sq(dual_scaled)

    mass = np.abs(amps) ** 2
    carrying = mass >= CARRYING_MASS
    strides = np.array([big_n**i for i in range(n - 2, -1, -1)], dtype=np.int64)
    m_order = big_n ** (n - 1)
    acc = np.zeros(m_order, dtype=complex)
    ancilla_mass = 0.0
    norm_u_sq = (u * u).sum(axis=1)
    tag_ok = np.zeros(len(u), dtype=bool)
    for i in range(len(u)):
        decoded = nearest_plane(dual_red, tuple(int(c) for c in x[i]), gs=gs)
        tag_ok[i] = all(int(d) % big_n == int(yy) for d, yy in zip(decoded, y[i]))
        if tag_ok[i]:
            acc[int(x[i, 1:] @ strides)] += amps[i]
        else:
            ancilla_mass += float(mass[i])

    # Correct-closest verification on amplitude-carrying points.  Within half
    # the first minimum the tag is provably the unique closest scaled-dual
    # point; beyond that, compare against every dual vector short enough to
    # matter (dist(x, NL'*) equals dist(u, NL'*) by shift invariance).
    closest_is_tag = (4 * norm_u_sq) < float(lam_dual_scaled_sq)
    unresolved = carrying & ~closest_is_tag
    if unresolved.any():
        r_max = math.sqrt(float(norm_u_sq[unresolved].max()))
        rivals = _short_dual_vectors(dual_scaled, 2.0 * r_max + 1.0)
        uu = u[unresolved]
        ok = np.ones(len(uu), dtype=bool)
        for d in rivals:
            dv = np.array(d, dtype=np.int64)
            ok &= ((uu - dv) ** 2).sum(axis=1) >= norm_u_sq[unresolved]
        closest_is_tag[unresolved] = ok
    mismatch = carrying & ~(tag_ok & closest_is_tag)
    carrying_mass_total = float(mass[carrying].sum())
    mismatch_mass = float(mass[mismatch].sum())

    decode_mismatch_rate = (
        mismatch_mass / carrying_mass_total if carrying_mass_total > 0 else 0.0
    )
    if decode_mismatch_rate > mismatch_warn_threshold or ancilla_mass > 1e-10:
        warnings.warn(
            f"decode mismatch rate {decode_mismatch_rate:.3e}, "
            f"ancilla residual {ancilla_mass:.3e}",
            stacklevel=2,
        )

    # Step 5: lattice DFT on the finite lattice through the circuit.
    psi4 = lattice_qft_values(s, acc)
    probs = np.abs(psi4) ** 2
    total_prob = float(probs.sum())
    norm_defect = abs(total_prob - 1.0)
    if total_prob == 0:
        raise ZeroMassError("no amplitude survived decoding")

    # Step 6: exact output distribution mapped through the inverse reduction.
    # Pruning removes at most PRUNE_MASS of the conditional mass, and the
    # heaviest point always survives.
    keep_idx = np.flatnonzero(probs >= PRUNE_MASS * total_prob / len(probs))
    kept = probs[keep_idx] / probs[keep_idx].sum()
    points: list[tuple[int, ...]] = []
    for idx in keep_idx:
        tail = []
        rem = int(idx)
        for _ in range(n - 1):
            tail.append(rem % big_n)
            rem //= big_n
        tail.reverse()
        z = ModVector(big_n, (s.first_coordinate(tail), *tail))
        w = cert.apply_sigma_inverse(z.centered())
        points.append(w)
    order = sorted(range(len(points)), key=lambda i: points[i])
    dist = DiscreteDistribution(tuple(points[i] for i in order), kept[order])
    for w in dist.points:
        if not membership(b, w):
            raise RuntimeError(f"support point {w} escaped the input lattice")

    rng = np.random.default_rng(seed)
    if shots and len(dist.points):
        draws = rng.choice(len(dist.points), size=shots, p=dist.probs / dist.probs.sum())
        samples = [dist.points[int(i)] for i in draws]
    else:
        samples = []

    return SampleResult(
        samples=samples,
        distribution=dist,
        certificate=cert,
        decode_mismatch_rate=decode_mismatch_rate,
        ancilla_residual=float(ancilla_mass),
        norm_defect=norm_defect,
        boundedness_ok=boundedness_ok,
        grid_points=len(u),
        diagnostics={"lambda1_scaled_dual_sq": float(lam_dual_scaled_sq)},
    )
