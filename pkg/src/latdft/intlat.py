"""Exact integer/rational lattice linear algebra.

Lattices are integer spans of the *columns* of a basis matrix.  All
arithmetic is carried out over Python integers and ``fractions.Fraction``;
nothing in this module rounds.  Operations that need floating point
(statevectors, DFT matrices) live elsewhere and convert at the boundary.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, NamedTuple, Sequence

from .errors import MembershipError, RankError

Vec = tuple[Fraction, ...]


def as_fraction_vec(v: Sequence) -> Vec:
    return tuple(Fraction(x) for x in v)


def dot(u: Sequence, v: Sequence) -> Fraction:
    return sum((Fraction(a) * Fraction(b) for a, b in zip(u, v, strict=True)), Fraction(0))


def norm_sq(v: Sequence) -> Fraction:
    return dot(v, v)


def vec_sub(u: Sequence, v: Sequence) -> Vec:
    return tuple(Fraction(a) - Fraction(b) for a, b in zip(u, v, strict=True))


def vec_add(u: Sequence, v: Sequence) -> Vec:
    return tuple(Fraction(a) + Fraction(b) for a, b in zip(u, v, strict=True))


def vec_scale(v: Sequence, c) -> Vec:
    c = Fraction(c)
    return tuple(c * Fraction(a) for a in v)


_SQRT_SCALE = 2**24


def sqrt_upper_bound(r: Fraction) -> Fraction:
    """Rational upper bound on sqrt(r), tight to about 2^-24 relative."""
    if r < 0:
        raise ValueError("negative radicand")
    p, q = r.numerator, r.denominator
    # sqrt(p/q) = sqrt(p*q*K^2) / (q*K) <= ceil(sqrt(p*q*K^2)) / (q*K)
    m = p * q * _SQRT_SCALE**2
    s = math.isqrt(m)
    if s * s < m:
        s += 1
    return Fraction(s, q * _SQRT_SCALE)


class ExactMatrix:
    """Immutable matrix with arbitrary-precision rational entries."""

    __slots__ = ("_rows", "_nrows", "_ncols")

    def __init__(self, rows: Iterable[Iterable]):
        data = tuple(tuple(Fraction(x) for x in row) for row in rows)
        if not data or not data[0]:
            raise ValueError("matrix must have positive dimensions")
        width = len(data[0])
        if any(len(r) != width for r in data):
            raise ValueError("ragged rows")
        self._rows = data
        self._nrows = len(data)
        self._ncols = width

    # -- construction -----------------------------------------------------

    @classmethod
    def identity(cls, n: int) -> "ExactMatrix":
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def from_columns(cls, cols: Sequence[Sequence]) -> "ExactMatrix":
        n = len(cols[0])
        return cls([[cols[j][i] for j in range(len(cols))] for i in range(n)])

    # -- basic access ------------------------------------------------------

    @property
    def nrows(self) -> int:
        return self._nrows

    @property
    def ncols(self) -> int:
        return self._ncols

    @property
    def is_square(self) -> bool:
        return self._nrows == self._ncols

    def __getitem__(self, ij) -> Fraction:
        i, j = ij
        return self._rows[i][j]

    def row(self, i: int) -> Vec:
        return self._rows[i]

    def column(self, j: int) -> Vec:
        return tuple(r[j] for r in self._rows)

    def columns(self) -> list[Vec]:
        return [self.column(j) for j in range(self._ncols)]

    def rows(self) -> tuple[Vec, ...]:
        return self._rows

    def is_integer(self) -> bool:
        return all(x.denominator == 1 for row in self._rows for x in row)

    def __eq__(self, other) -> bool:
        return isinstance(other, ExactMatrix) and self._rows == other._rows

    def __hash__(self):
        return hash(self._rows)

    def __repr__(self):
        body = "; ".join(" ".join(str(x) for x in row) for row in self._rows)
        return f"ExactMatrix[{body}]"

    # -- arithmetic ----------------------------------------------------------

    def __matmul__(self, other: "ExactMatrix") -> "ExactMatrix":
        if self._ncols != other._nrows:
            raise ValueError("dimension mismatch")
        ot = list(zip(*other._rows))
        return ExactMatrix(
            [[sum(a * b for a, b in zip(row, col)) for col in ot] for row in self._rows]
        )

    def mul_vec(self, v: Sequence) -> Vec:
        if len(v) != self._ncols:
            raise ValueError("dimension mismatch")
        vf = [Fraction(x) for x in v]
        return tuple(sum(a * b for a, b in zip(row, vf)) for row in self._rows)

    def scale(self, c) -> "ExactMatrix":
        c = Fraction(c)
        return ExactMatrix([[c * x for x in row] for row in self._rows])

    def transpose(self) -> "ExactMatrix":
        return ExactMatrix(list(zip(*self._rows)))

    def inverse(self) -> "ExactMatrix":
        """Exact inverse by Gauss-Jordan elimination."""
        if not self.is_square:
            raise RankError("inverse requires a square matrix")
        n = self._nrows
        aug = [list(self._rows[i]) + [Fraction(int(i == j)) for j in range(n)] for i in range(n)]
        for col in range(n):
            piv = next((r for r in range(col, n) if aug[r][col] != 0), None)
            if piv is None:
                raise RankError("matrix is singular")
            aug[col], aug[piv] = aug[piv], aug[col]
            inv_p = 1 / aug[col][col]
            aug[col] = [x * inv_p for x in aug[col]]
            for r in range(n):
                if r != col and aug[r][col] != 0:
                    f = aug[r][col]
                    aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
        return ExactMatrix([row[n:] for row in aug])

    def solve(self, v: Sequence) -> Vec:
        """Exact solution x of self @ x = v."""
        return self.inverse().mul_vec(v)

    def to_float_rows(self) -> list[list[float]]:
        return [[float(x) for x in row] for row in self._rows]


# -- text format -------------------------------------------------------------
#
# Shared file format: first line "rows cols", then one line per row with
# entries separated by single spaces; rationals rendered "p/q".


def format_matrix_text(m: ExactMatrix) -> str:
    lines = [f"{m.nrows} {m.ncols}"]
    for i in range(m.nrows):
        lines.append(" ".join(str(x) for x in m.row(i)))
    return "\n".join(lines) + "\n"


def parse_matrix_text(text: str) -> ExactMatrix:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty matrix file")
    head = lines[0].split()
    if len(head) != 2:
        raise ValueError("header must be 'rows cols'")
    nrows, ncols = int(head[0]), int(head[1])
    if len(lines) - 1 != nrows:
        raise ValueError(f"expected {nrows} rows, found {len(lines) - 1}")
    rows = []
    for ln in lines[1 : nrows + 1]:
        toks = ln.split()
        if len(toks) != ncols:
            raise ValueError(f"expected {ncols} entries per row")
        rows.append([Fraction(t) for t in toks])
    return ExactMatrix(rows)


# -- determinant ---------------------------------------------------------------


def determinant(m: ExactMatrix):
    """Exact signed determinant; returns int for integer-valued results."""
    if not m.is_square:
        raise RankError("determinant requires a square matrix")
    n = m.nrows
    a = [list(m.row(i)) for i in range(n)]
    det = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            return 0
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            det = -det
        det *= a[col][col]
        inv_p = 1 / a[col][col]
        for r in range(col + 1, n):
            if a[r][col] != 0:
                f = a[r][col] * inv_p
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return int(det) if det.denominator == 1 else det


def _require_square_integer(m: ExactMatrix, op: str) -> None:
    if not m.is_square:
        raise RankError(f"{op} requires a square matrix")
    if not m.is_integer():
        raise ValueError(f"{op} requires integer entries")


# -- Hermite normal form -------------------------------------------------------


def hnf(m: ExactMatrix) -> tuple[ExactMatrix, ExactMatrix]:
    """Column-style Hermite normal form of a full-rank integer matrix.

    Returns (H, U) with H = m @ U, U unimodular.  H is the canonical
    upper-triangular basis of the column-span lattice: positive diagonal
    and 0 <= H[i][j] < H[i][i] for j > i.  Invariant under any right
    unimodular transform of the input, so it doubles as a same-lattice test.
    """
    _require_square_integer(m, "hnf")
    n = m.nrows
    cols = [[int(x) for x in m.column(j)] for j in range(n)]
    u = [[int(i == j) for i in range(n)] for j in range(n)]  # u[j] = column j of U

    def combine(ci, cj, a, b, c, d):
        # (col_i, col_j) <- (a*col_i + b*col_j, c*col_i + d*col_j); det must be +-1
        for arr in (cols, u):
            x, y = arr[ci], arr[cj]
            arr[ci] = [a * p + b * q for p, q in zip(x, y)]
            arr[cj] = [c * p + d * q for p, q in zip(x, y)]

    # Triangularize from the bottom row up; pivots end on the diagonal.
    for i in range(n - 1, -1, -1):
        for j in range(i):
            p, q = cols[i][i], cols[j][i]
            if q == 0:
                continue
            g, a, b = _xgcd(p, q)
            combine(i, j, a, b, -(q // g), p // g)
        if cols[i][i] == 0:
            raise RankError("matrix is singular")
        if cols[i][i] < 0:
            cols[i] = [-x for x in cols[i]]
            u[i] = [-x for x in u[i]]
    # Reduce entries right of each pivot into [0, pivot).
    for i in range(n - 1, -1, -1):
        for j in range(i + 1, n):
            q = cols[j][i] // cols[i][i]
            if q:
                cols[j] = [x - q * y for x, y in zip(cols[j], cols[i])]
                u[j] = [x - q * y for x, y in zip(u[j], u[i])]
    h_mat = ExactMatrix.from_columns(cols)
    u_mat = ExactMatrix.from_columns(u)
    return h_mat, u_mat


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    """g, x, y with a*x + b*y = g = gcd(a, b) > 0 (for (a, b) != (0, 0))."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def is_hnf(m: ExactMatrix) -> bool:
    if not m.is_square or not m.is_integer():
        return False
    n = m.nrows
    for i in range(n):
        if m[i, i] <= 0:
            return False
        for j in range(n):
            if j < i and m[i, j] != 0:
                return False
            if j > i and not (0 <= m[i, j] < m[i, i]):
                return False
    return True


# -- duals, membership, coefficients ------------------------------------------


def dual_basis(b: ExactMatrix) -> ExactMatrix:
    """Exact rational basis of the dual lattice: the transposed inverse."""
    if not b.is_square:
        raise RankError("dual basis requires a square matrix")
    return b.inverse().transpose()


def membership(b: ExactMatrix, v: Sequence) -> bool:
    """True iff v lies in the column-span lattice of b."""
    try:
        z = b.solve(v)
    except RankError:
        raise
    return all(x.denominator == 1 for x in z)


def coefficients_in_basis(b: ExactMatrix, v: Sequence) -> tuple[int, ...]:
    """Integer coefficients z with b @ z = v; raises if v is not a lattice point."""
    z = b.solve(v)
    if any(x.denominator != 1 for x in z):
        raise MembershipError(f"{tuple(v)} is not in the lattice")
    return tuple(int(x) for x in z)


# -- Gram-Schmidt ---------------------------------------------------------------


@dataclass(frozen=True)
class GramSchmidtData:
    """Exact Gram-Schmidt orthogonalization of basis columns.

    ``orthogonal[i]`` is b*_i; ``mu[i][j]`` (j < i) are the projection
    coefficients, so b_i = b*_i + sum_j mu[i][j] b*_j holds exactly.
    """

    orthogonal: tuple[Vec, ...]
    mu: tuple[tuple[Fraction, ...], ...]

    def reconstruct_column(self, i: int) -> Vec:
        v = self.orthogonal[i]
        for j in range(i):
            v = vec_add(v, vec_scale(self.orthogonal[j], self.mu[i][j]))
        return v


def gram_schmidt(b: ExactMatrix) -> GramSchmidtData:
    cols = b.columns()
    ortho: list[Vec] = []
    mus: list[tuple[Fraction, ...]] = []
    for i, v in enumerate(cols):
        row = []
        w = as_fraction_vec(v)
        for j in range(i):
            m_ij = dot(v, ortho[j]) / norm_sq(ortho[j])
            row.append(m_ij)
            w = vec_sub(w, vec_scale(ortho[j], m_ij))
        if norm_sq(w) == 0:
            raise RankError("linearly dependent columns")
        ortho.append(w)
        mus.append(tuple(row))
    return GramSchmidtData(tuple(ortho), tuple(mus))


# -- LLL ----------------------------------------------------------------------


def lll_reduce(b: ExactMatrix, delta: Fraction = Fraction(3, 4)) -> ExactMatrix:
    """LLL reduction of an integer column basis in exact rational arithmetic.

    The output spans the same lattice, is size-reduced (|mu_ij| <= 1/2) and
    satisfies the Lovasz condition with the given delta.
    """
    _require_square_integer(b, "lll_reduce")
    delta = Fraction(delta)
    if not Fraction(1, 4) < delta <= 1:
        raise ValueError("delta must lie in (1/4, 1]")
    n = b.ncols
    cols = [list(map(int, b.column(j))) for j in range(n)]

    def gso():
        gs = gram_schmidt(ExactMatrix.from_columns(cols))
        return gs.orthogonal, [list(r) for r in gs.mu]

    ortho, mu = gso()
    k = 1
    while k < n:
        for j in range(k - 1, -1, -1):
            q = _round_half_even(mu[k][j])
            if q:
                cols[k] = [x - q * y for x, y in zip(cols[k], cols[j])]
                for t in range(j):
                    mu[k][t] -= q * mu[j][t]
                mu[k][j] -= q
        if norm_sq(ortho[k]) >= (delta - mu[k][k - 1] ** 2) * norm_sq(ortho[k - 1]):
            k += 1
        else:
            cols[k], cols[k - 1] = cols[k - 1], cols[k]
            ortho, mu = gso()
            k = max(k - 1, 1)
    return ExactMatrix.from_columns(cols)


def _round_half_even(x: Fraction) -> int:
    return round(x)


def is_size_reduced(b: ExactMatrix) -> bool:
    gs = gram_schmidt(b)
    return all(
        abs(gs.mu[i][j]) <= Fraction(1, 2) for i in range(b.ncols) for j in range(i)
    )


def satisfies_lovasz(b: ExactMatrix, delta: Fraction = Fraction(3, 4)) -> bool:
    gs = gram_schmidt(b)
    for k in range(1, b.ncols):
        lhs = norm_sq(gs.orthogonal[k])
        rhs = (Fraction(delta) - gs.mu[k][k - 1] ** 2) * norm_sq(gs.orthogonal[k - 1])
        if lhs < rhs:
            return False
    return True


# -- Babai nearest plane ---------------------------------------------------------


def nearest_plane(b: ExactMatrix, u: Sequence, gs: GramSchmidtData | None = None) -> Vec:
    """Babai's nearest-plane lattice point for target u.

    The approximation factor 2^(n/2) against the true closest vector holds
    when the caller passes an LLL-reduced basis; the routine itself runs on
    any full-rank basis.  A precomputed Gram-Schmidt decomposition of b can
    be supplied by callers decoding many targets against one basis.
    """
    if gs is None:
        gs = gram_schmidt(b)
    n = b.ncols
    rem = as_fraction_vec(u)
    for j in range(n - 1, -1, -1):
        c = _round_half_even(dot(rem, gs.orthogonal[j]) / norm_sq(gs.orthogonal[j]))
        rem = vec_sub(rem, vec_scale(b.column(j), c))
    return vec_sub(as_fraction_vec(u), rem)


# -- brute-force CVP / SVP oracles ------------------------------------------------


class CVPResult(NamedTuple):
    point: Vec
    dist_sq: Fraction


def brute_force_cvp(b: ExactMatrix, u: Sequence, coeff_bound: int) -> CVPResult:
    """Exact closest vector among all b @ z with |z_i| <= coeff_bound.

    Enumeration oracle for desk-scale tests; ties broken toward the
    lexicographically smallest coefficient vector.
    """
    n = b.ncols
    uf = as_fraction_vec(u)
    cols = b.columns()
    best: tuple[Fraction, tuple[int, ...], Vec] | None = None
    for z in itertools.product(range(-coeff_bound, coeff_bound + 1), repeat=n):
        pt = tuple(
            sum((z[j] * cols[j][i] for j in range(n)), Fraction(0)) for i in range(len(uf))
        )
        d = norm_sq(vec_sub(uf, pt))
        if best is None or d < best[0] or (d == best[0] and z < best[1]):
            best = (d, z, pt)
    assert best is not None
    return CVPResult(best[2], best[0])


def cvp_exact(b: ExactMatrix, u: Sequence) -> CVPResult:
    """True closest vector, with the enumeration box derived so it must contain it.

    Any lattice point at least as close as the Babai point has coefficients
    within |(B^-1 u)_i| + ||row_i(B^-1)|| * ||u - v_babai||, so enumerating that
    box is guaranteed to see the optimum.
    """
    v0 = nearest_plane(b, u)
    r_sq = norm_sq(vec_sub(as_fraction_vec(u), v0))
    binv = b.inverse()
    zu = binv.mul_vec(u)
    r_ub = sqrt_upper_bound(r_sq)
    n = b.ncols
    ranges = []
    for i in range(n):
        slack = sqrt_upper_bound(norm_sq(binv.row(i))) * r_ub
        lo = math.floor(zu[i] - slack)
        hi = math.ceil(zu[i] + slack)
        ranges.append(range(lo, hi + 1))
    uf = as_fraction_vec(u)
    cols = b.columns()
    best: tuple[Fraction, tuple[int, ...], Vec] | None = None
    for z in itertools.product(*ranges):
        pt = tuple(
            sum((z[j] * cols[j][i] for j in range(n)), Fraction(0)) for i in range(len(uf))
        )
        d = norm_sq(vec_sub(uf, pt))
        if best is None or d < best[0] or (d == best[0] and z < best[1]):
            best = (d, z, pt)
    assert best is not None
    return CVPResult(best[2], best[0])


def lambda1_sq(b: ExactMatrix) -> Fraction:
    """Exact squared first minimum by guaranteed enumeration (n <= 4 scale).

    LLL gives an upper bound ||b1||; every nonzero vector at most that long
    has coefficients inside the Cauchy-Schwarz box below, so the minimum over
    the box is the true lambda_1.  Rational bases are scaled to integers
    first; lengths scale uniformly.
    """
    if b.is_integer():
        return _lambda1_sq_integer(b)
    den = math.lcm(*[x.denominator for row in b.rows() for x in row])
    return _lambda1_sq_integer(b.scale(den)) / (den * den)


def _lambda1_sq_integer(b: ExactMatrix) -> Fraction:
    red = lll_reduce(b)
    cols = red.columns()
    best_d = norm_sq(cols[0])
    binv = red.inverse()
    r_ub = sqrt_upper_bound(best_d)
    n = red.ncols
    ranges = []
    for i in range(n):
        m = math.ceil(sqrt_upper_bound(norm_sq(binv.row(i))) * r_ub)
        ranges.append(range(-m, m + 1))
    for z in itertools.product(*ranges):
        if all(c == 0 for c in z):
            continue
        pt = tuple(
            sum((z[j] * cols[j][i] for j in range(n)), Fraction(0)) for i in range(n)
        )
        d = norm_sq(pt)
        if 0 < d < best_d:
            best_d = d
    return best_d
