"""Desk-scale acceptance battery.

Each criterion is a standalone function returning a :class:`CriterionResult`;
``run_all`` executes the battery in order.  The same functions back the
pytest acceptance module and the ``latdft selftest`` subcommand, so the suite
is runnable both ways.  Every random quantity is derived from fixed seeds.
"""

from __future__ import annotations

import random
import time
import warnings
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .dft import (
    check_fourth_power,
    check_shift_phase,
    dft_matrix,
    full_grid_dft_restricted,
    smoothness_estimate,
)
from .dft import LatticeFunction
from .errors import ConditionError
from .intlat import (
    ExactMatrix,
    as_fraction_vec,
    cvp_exact,
    determinant,
    lambda1_sq,
    lll_reduce,
    membership,
    nearest_plane,
    norm_sq,
    vec_sub,
)
from .qcirc import basis_state, simulate_sysnf_qft
from .sampler import brute_force_target, gaussian_spec, pac_distance, sample
from .sysnf import (
    ModVector,
    SysNFBasis,
    enumerate_ln,
    enumerate_scaled_dual,
    ln_membership,
    phi3,
    reduce_to_sysnf,
    scaled_dual_membership,
    validate,
)

# (n, N, b): the unitarity instance set.  Two members violate the coprimality
# condition and are expected to be rejected by validation.
INSTANCE_SET = [
    (2, 4, (3,)),
    (2, 5, (1,)),
    (2, 9, (2,)),
    (3, 5, (1, 2)),
    (3, 7, (2, 3)),
    (4, 3, (1, 1, 1)),
]
EXPECTED_VALID = {(2, 5, (1,)), (2, 9, (2,)), (3, 5, (1, 2)), (4, 3, (1, 1, 1))}


@dataclass(frozen=True)
class CriterionResult:
    number: int
    name: str
    passed: bool
    details: str
    seconds: float

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] criterion {self.number:2d} ({self.name}): {self.details} [{self.seconds:.2f}s]"


def _validated_instances() -> list[SysNFBasis]:
    out = []
    for n, N, b in INSTANCE_SET:
        try:
            out.append(validate(SysNFBasis(N, b).to_matrix()))
        except ConditionError:
            continue
    return out


def _timed(number, name, fn) -> CriterionResult:
    t0 = time.time()
    try:
        passed, details = fn()
    except Exception as exc:  # a crash is a failure, not an abort
        return CriterionResult(number, name, False, f"exception: {exc!r}", time.time() - t0)
    return CriterionResult(number, name, passed, details, time.time() - t0)


def criterion_1_unitarity() -> CriterionResult:
    def run():
        valid = []
        for n, N, b in INSTANCE_SET:
            try:
                valid.append((n, N, b, validate(SysNFBasis(N, b).to_matrix())))
            except ConditionError:
                if (n, N, b) in EXPECTED_VALID:
                    return False, f"instance ({n},{N},{b}) unexpectedly rejected"
        if {(n, N, b) for n, N, b, _ in valid} != EXPECTED_VALID:
            return False, "validated set does not match the expected subset"
        worst = 0.0
        for n, N, b, s in valid:
            cm = dft_matrix(s)
            dev = float(np.abs(cm.matrix.conj().T @ cm.matrix - np.eye(cm.order)).max())
            worst = max(worst, dev)
        return worst <= 1e-10, f"{len(valid)} validated instances, max ||F*F - I|| = {worst:.2e}"

    res = _timed(1, "unitarity", run)
    if res.seconds > 10:
        return CriterionResult(1, res.name, False, res.details + " (over 10s budget)", res.seconds)
    return res


def criterion_2_circuit_equivalence() -> CriterionResult:
    def run():
        worst = 0.0
        for s in _validated_instances():
            cm = dft_matrix(s)
            probe = basis_state(s.N, s.n, (0,) * s.n)
            for j, x in enumerate(cm.points):
                psi = basis_state(s.N, s.n, x.coords)
                out = simulate_sysnf_qft(s, psi)
                expected = np.zeros(s.N**s.n, dtype=complex)
                for i, p in enumerate(cm.points):
                    expected[probe.index_of(p.coords)] = cm.matrix[i, j]
                worst = max(worst, float(np.abs(out.amps - expected).max()))
        return worst <= 1e-10, f"max circuit/matrix amplitude deviation = {worst:.2e}"

    res = _timed(2, "circuit equals dense transform", run)
    if res.seconds > 30:
        return CriterionResult(2, res.name, False, res.details + " (over 30s budget)", res.seconds)
    return res


def criterion_3_negative_control() -> CriterionResult:
    def run():
        s = SysNFBasis(4, (1,))
        try:
            validate(s.to_matrix())
            return False, "validator accepted N=4, b=(1)"
        except ConditionError as exc:
            if exc.gcd != 2:
                return False, f"rejection carried gcd {exc.gcd}, expected 2"
        cm = dft_matrix(s)  # force-built despite invalidity
        dev = float(np.abs(cm.matrix.conj().T @ cm.matrix - np.eye(cm.order)).max())
        return dev >= 0.5, f"rejected with gcd 2; forced transform deviates by {dev:.3f}"

    return _timed(3, "negative control N=4 b=(1)", run)


def criterion_4_cardinalities() -> CriterionResult:
    extra = [SysNFBasis(101, (5,)), SysNFBasis(31, (3, 7))]
    def run():
        for s in _validated_instances() + extra:
            if s.N**s.n > 10**6:
                continue
            want = s.N ** (s.n - 1)
            if len(enumerate_ln(s)) != want:
                return False, f"enumerate_ln count wrong at N={s.N}"
            count = 0
            dual_count = 0
            for flat in range(s.N**s.n):
                coords = []
                rem = flat
                for _ in range(s.n):
                    coords.append(rem % s.N)
                    rem //= s.N
                x = ModVector(s.N, tuple(reversed(coords)))
                count += ln_membership(s, x)
                dual_count += scaled_dual_membership(s, x)
            if count != want:
                return False, f"|L_N| = {count} != {want} at N={s.N}"
            if dual_count != s.N:
                return False, f"|(NL*)_N| = {dual_count} != {s.N} at N={s.N}"
            duals = enumerate_scaled_dual(s)
            if len(set(d.coords for d in duals)) != s.N:
                return False, f"scaled dual enumeration not N distinct points at N={s.N}"
            both = [d for d in duals if ln_membership(s, d)]
            if [d.coords for d in both] != [(0,) * s.n]:
                return False, f"L_N and (NL*)_N intersect beyond 0 at N={s.N}"
        return True, "exhaustive counts N^(n-1) and N confirmed; intersection trivial"

    return _timed(4, "cardinalities", run)


def criterion_5_phi3_bijection() -> CriterionResult:
    cases = [SysNFBasis(5, (1,)), SysNFBasis(9, (2,)), SysNFBasis(5, (1, 2))]
    def run():
        for s in cases:
            lattice = enumerate_ln(s)
            images = set()
            for flat in range(s.N**s.n):
                coords = []
                rem = flat
                for _ in range(s.n):
                    coords.append(rem % s.N)
                    rem //= s.N
                x = ModVector(s.N, tuple(reversed(coords)))
                y = phi3(s, x)
                if not ln_membership(s, x + y):
                    return False, f"x + phi3(x) escapes L_N at N={s.N}, x={x.coords}"
                if not scaled_dual_membership(s, y):
                    return False, f"phi3 image off the scaled dual at N={s.N}"
                images.add(y.coords)
                for ell in lattice:
                    if phi3(s, x + ell).coords != y.coords:
                        return False, f"phi3 not coset-constant at N={s.N}"
            if len(images) != s.N:
                return False, f"phi3 image has {len(images)} values, expected {s.N}"
        return True, "section property, coset constancy, and N-value image all exhaustive"

    return _timed(5, "quotient-dual bijection", run)


def criterion_6_shift_phase() -> CriterionResult:
    cases = [SysNFBasis(5, (1,)), SysNFBasis(5, (1, 2))]
    def run():
        worst = 0.0
        for s in cases:
            for v in enumerate_ln(s):
                worst = max(worst, check_shift_phase(s, v))
        return worst <= 1e-10, f"max conjugacy deviation over all lattice shifts = {worst:.2e}"

    return _timed(6, "shift-phase conjugacy", run)


def criterion_7_fourth_power() -> CriterionResult:
    def run():
        worst2 = worst4 = worst_eig = 0.0
        roots = np.array([1, 1j, -1, -1j])
        for s in _validated_instances():
            d2, d4 = check_fourth_power(s)
            worst2, worst4 = max(worst2, d2), max(worst4, d4)
            vals = np.linalg.eigvals(dft_matrix(s).matrix)
            worst_eig = max(worst_eig, float(np.abs(vals[:, None] - roots[None, :]).min(axis=1).max()))
        ok = worst2 <= 1e-10 and worst4 <= 1e-10 and worst_eig <= 1e-8
        return ok, (
            f"||F^2 - negation|| = {worst2:.2e}, ||F^4 - I|| = {worst4:.2e}, "
            f"spectrum distance to 4th roots = {worst_eig:.2e}"
        )

    return _timed(7, "fourth-power structure", run)


def criterion_8_reduction_contract() -> CriterionResult:
    def run():
        rng = random.Random(20260810)
        bases = []
        for dim in (2, 3):
            while sum(1 for b in bases if b.nrows == dim) < 10:
                m = ExactMatrix(
                    [[rng.randint(-9, 9) for _ in range(dim)] for _ in range(dim)]
                )
                if determinant(m) != 0:
                    bases.append(m)
        checked = 0
        for b in bases:
            for eps in (Fraction(1, 16), Fraction(1, 256)):
                cert = reduce_to_sysnf(b, eps)
                validate(cert.basis.to_matrix())
                bprime = cert.basis.to_matrix()
                for _ in range(100):
                    c = [rng.randint(-100, 100) for _ in range(b.nrows)]
                    v = b.mul_vec(c)
                    w = cert.apply_sigma(v)
                    if not membership(bprime, w):
                        return False, f"sigma(v) not in L(B') for coefficients {c}"
                    if not cert.relative_error_holds(v):
                        return False, f"relative error bound fails for coefficients {c}"
                    checked += 1
        return True, f"20 bases x 2 tolerances, {checked} exact vector checks"

    res = _timed(8, "reduction contract", run)
    if res.seconds > 60:
        return CriterionResult(8, res.name, False, res.details + " (over 60s budget)", res.seconds)
    return res


def criterion_9_nearest_plane_bound() -> CriterionResult:
    def run():
        rng = random.Random(987654321)
        violations = 0
        for dim in (2, 3):
            done = 0
            while done < 100:
                m = ExactMatrix(
                    [[rng.randint(-5, 5) for _ in range(dim)] for _ in range(dim)]
                )
                if determinant(m) == 0:
                    continue
                red = lll_reduce(m)
                u = tuple(Fraction(rng.randint(-160, 160), 8) for _ in range(dim))
                v = nearest_plane(red, u)
                err_sq = norm_sq(vec_sub(as_fraction_vec(u), v))
                best = cvp_exact(red, u)
                if err_sq > (2**dim) * best.dist_sq:
                    violations += 1
                done += 1
        return violations == 0, f"200 instances, {violations} violations of the 2^(n/2) bound"

    return _timed(9, "nearest-plane bound", run)


def criterion_10_sampler_pac() -> CriterionResult:
    def run():
        b = ExactMatrix([[2, 1], [0, 1]])
        n = 2
        lam1 = float(lambda1_sq(b)) ** 0.5
        s_target = 2 ** (n / 2 + 2) * n**0.5 * lam1
        s_f = 1.0 / (2.0 * s_target)
        spec = gaussian_spec(s_f, grid_radius=6 * s_f)
        eps = Fraction(1, 16)
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            res = sample(spec, b, eps, shots=0, seed=20260810)
        target = brute_force_target(
            lambda p: np.exp(-np.pi * sum(c * c for c in p) / (2 * s_target**2)),
            b,
            box_radius=6 * s_target,
        )
        tv, disp = pac_distance(res.distribution, target, match_radius=float(eps))
        ok = (
            tv <= 0.05
            and res.decode_mismatch_rate == 0.0
            and res.ancilla_residual == 0.0
            and res.norm_defect <= 1e-10
        )
        return ok, (
            f"TV = {tv:.4f} (limit 0.05), displacement = {disp}, "
            f"decode mismatch = {res.decode_mismatch_rate}, norm defect = {res.norm_defect:.1e}"
        )

    res = _timed(10, "sampler PAC quality", run)
    if res.seconds > 300:
        return CriterionResult(10, res.name, False, res.details + " (over 5min budget)", res.seconds)
    return res


def criterion_11_restriction_identity() -> CriterionResult:
    cases = [SysNFBasis(5, (1,)), SysNFBasis(8, (2,))]
    def run():
        from .dft import apply_dft

        rng = np.random.default_rng(4242)
        worst = 0.0
        for s in cases:
            m = s.N ** (s.n - 1)
            for _ in range(20):
                f = LatticeFunction(s, rng.normal(size=m) + 1j * rng.normal(size=m))
                lhs = apply_dft(s, f).values
                rhs = full_grid_dft_restricted(s, f)
                rel = float(np.linalg.norm(lhs - rhs) / np.linalg.norm(rhs))
                worst = max(worst, rel)
        return worst <= 1e-10, f"max relative L2 error vs full-grid oracle = {worst:.2e}"

    return _timed(11, "restriction identity", run)


def criterion_12_smoothness() -> CriterionResult:
    def run():
        s = SysNFBasis(8, (2,))
        coords = np.indices((8, 8)).reshape(2, -1).T
        centered = np.where(coords > 4, coords - 8, coords)
        r2 = (centered**2).sum(axis=1).reshape(8, 8)
        wide = np.exp(-np.pi * r2 / (80.0**2))
        est_wide = smoothness_estimate(s, wide, samples=1000, seed=123)
        delta = np.zeros((8, 8))
        delta[0, 0] = 1.0
        est_delta = smoothness_estimate(s, delta, samples=1000, seed=123)
        ok = est_wide < 0.1 and est_delta > 0.9
        return ok, f"wide gaussian estimate = {est_wide:.4f} (< 0.1), delta estimate = {est_delta:.4f} (> 0.9)"

    return _timed(12, "smoothness estimator sanity", run)


ALL_CRITERIA = [
    criterion_1_unitarity,
    criterion_2_circuit_equivalence,
    criterion_3_negative_control,
    criterion_4_cardinalities,
    criterion_5_phi3_bijection,
    criterion_6_shift_phase,
    criterion_7_fourth_power,
    criterion_8_reduction_contract,
    criterion_9_nearest_plane_bound,
    criterion_10_sampler_pac,
    criterion_11_restriction_identity,
    criterion_12_smoothness,
]


def run_all(echo=None) -> list[CriterionResult]:
    results = []
    for fn in ALL_CRITERIA:
        res = fn()
        results.append(res)
        if echo is not None:
            echo(res.line())
    return results
