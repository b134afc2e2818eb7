"""Command-line front end.

Subcommands: validate, reduce, dft, qft-sim, sample, selftest.
Exit codes: 0 success, 1 usage or I/O error, 2 domain rejection (invalid
SysNF input or similar), 3 invariant failure in selftest.

All randomness flows from a single 64-bit seed through numpy's default
PCG64 generator, so runs are reproducible bit for bit; summary documents
embed a hash of the effective configuration together with that seed.
The environment variable LATDFT_THREADS caps internal (BLAS/FFT) parallelism
and is applied before the numeric modules load.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from fractions import Fraction
from pathlib import Path


def _apply_thread_cap() -> None:
    cap = os.environ.get("LATDFT_THREADS")
    if not cap:
        return
    for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS",
                "NUMEXPR_NUM_THREADS", "VECLIB_MAXIMUM_THREADS"):
        os.environ.setdefault(var, cap)


def _config_hash(payload) -> str:
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def _read_matrix(path: str):
    from .intlat import parse_matrix_text

    return parse_matrix_text(Path(path).read_text())


def cmd_validate(args) -> int:
    from .errors import ConditionError, StructureError
    from .sysnf import validate

    try:
        m = _read_matrix(args.input)
    except (OSError, ValueError) as exc:
        print(f"error: cannot read matrix: {exc}", file=sys.stderr)
        return 1
    try:
        basis = validate(m)
    except StructureError as exc:
        print(f"INVALID (structure): {exc}")
        return 2
    except ConditionError as exc:
        print(f"INVALID (condition): {exc}")
        print(f"gcd(sum(b^2)+1, N) = {exc.gcd}")
        return 2
    print("VALID SysNF basis")
    print(f"N = {basis.N}")
    print(f"b = {list(basis.b)}")
    print(f"gcd(sum(b^2)+1, N) = gcd({basis.condition_sum}, {basis.N}) = {basis.condition_gcd}")
    return 0


def cmd_reduce(args) -> int:
    from .errors import ParameterError, RankError, SearchExhaustedError
    from .intlat import as_fraction_vec, norm_sq, sqrt_upper_bound, vec_sub
    from .sysnf import reduce_to_sysnf

    try:
        m = _read_matrix(args.input)
        epsilon = Fraction(args.epsilon)
    except (OSError, ValueError, ZeroDivisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    try:
        cert = reduce_to_sysnf(m, epsilon)
    except (ParameterError, RankError, SearchExhaustedError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    # Largest verified relative error over the basis vectors, as a float.
    worst = 0.0
    for j in range(m.ncols):
        v = as_fraction_vec(m.column(j))
        w = [Fraction(x, cert.T) for x in cert.apply_sigma(v)]
        err = float(sqrt_upper_bound(norm_sq(vec_sub(w, v)))) / max(
            float(sqrt_upper_bound(norm_sq(v))), 1e-300
        )
        worst = max(worst, err)
    out = Path(args.out) if args.out else Path("certificate.json")
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(cert.to_json())
    print(f"T = {cert.T}")
    print(f"delta = {cert.delta}")
    print(f"N = {cert.basis.N}")
    print(f"max relative error over basis vectors <= {worst:.3e} (epsilon = {epsilon})")
    print(f"certificate written to {out}")
    return 0


def _load_basis_or_fail(args):
    from .errors import ConditionError, StructureError
    from .sysnf import validate

    m = _read_matrix(args.input)
    try:
        return validate(m), None
    except (StructureError, ConditionError) as exc:
        return None, exc


def cmd_dft(args) -> int:
    from .dft import dft_matrix, export_character_matrix_csv
    from .errors import SizeGuardError

    try:
        basis, err = _load_basis_or_fail(args)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if basis is None:
        print(f"INVALID SysNF input: {err}")
        return 2
    try:
        cm = dft_matrix(basis, size_guard=args.size_guard)
    except SizeGuardError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    outdir = Path(args.out or ".")
    outdir.mkdir(parents=True, exist_ok=True)
    export_character_matrix_csv(cm, outdir / "dft_matrix.csv", outdir / "dft_header.json")
    import numpy as np

    dev = float(np.abs(cm.matrix.conj().T @ cm.matrix - np.eye(cm.order)).max())
    print(f"order = {cm.order}")
    print(f"unitarity deviation = {dev:.3e}")
    print(f"matrix written to {outdir / 'dft_matrix.csv'}")
    return 0


def cmd_qft_sim(args) -> int:
    import numpy as np

    from .dft import dft_matrix
    from .errors import SizeGuardError
    from .qcirc import (
        basis_state,
        qft_mod_n,
        save_snapshot,
        simulate_sysnf_qft,
        step_apply_basis,
        step_shear,
        step_uncompute_first,
    )

    try:
        basis, err = _load_basis_or_fail(args)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if basis is None:
        print(f"INVALID SysNF input: {err}")
        return 2
    try:
        cm = dft_matrix(basis, size_guard=args.size_guard)
    except SizeGuardError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    outdir = Path(args.out or ".")
    outdir.mkdir(parents=True, exist_ok=True)

    probe = basis_state(basis.N, basis.n, (0,) * basis.n)
    worst = 0.0
    for j, x in enumerate(cm.points):
        psi = basis_state(basis.N, basis.n, x.coords)
        out = simulate_sysnf_qft(basis, psi)
        expected = np.zeros(basis.N**basis.n, dtype=complex)
        for i, p in enumerate(cm.points):
            expected[probe.index_of(p.coords)] = cm.matrix[i, j]
        worst = max(worst, float(np.abs(out.amps - expected).max()))

    if args.dump_state:
        coords = tuple(int(t) for t in args.dump_state.split(","))
        psi = basis_state(basis.N, basis.n, coords)
        save_snapshot(psi, outdir / "step0_input")
        psi = step_shear(basis, psi)
        save_snapshot(psi, outdir / "step1_shear")
        psi = step_uncompute_first(basis, psi)
        save_snapshot(psi, outdir / "step2_uncompute")
        for reg in range(psi.n):
            psi = qft_mod_n(psi, reg)
        save_snapshot(psi, outdir / "step3_qft")
        psi = step_apply_basis(basis, psi)
        save_snapshot(psi, outdir / "step4_output")

    report = {
        "N": basis.N,
        "n": basis.n,
        "b": list(basis.b),
        "basis_states_checked": cm.order,
        "max_amplitude_deviation": worst,
        "tolerance": 1e-10,
        "agrees": worst <= 1e-10,
    }
    (outdir / "qft_sim_report.json").write_text(json.dumps(report, indent=2))
    print(f"max amplitude deviation vs dense transform = {worst:.3e}")
    print(f"report written to {outdir / 'qft_sim_report.json'}")
    return 0 if worst <= 1e-10 else 3


def cmd_sample(args) -> int:
    import numpy as np

    from .errors import LatdftError
    from .sampler import brute_force_target, gaussian_spec, pac_distance, sample

    try:
        config = json.loads(Path(args.config).read_text())
        m = _read_matrix(config["basis"])
        spec_cfg = config["spec"]
        epsilon = Fraction(str(config["epsilon"]))
        shots = int(config["shots"])
        seed = int(config["seed"])
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: bad config: {exc}", file=sys.stderr)
        return 1
    if spec_cfg.get("kind") != "gaussian":
        print(f"error: unsupported spec kind {spec_cfg.get('kind')!r}", file=sys.stderr)
        return 1
    s_target = float(spec_cfg["s"])
    s_f = 1.0 / (2.0 * s_target)
    grid_radius = float(spec_cfg.get("grid_radius", 6.0 * s_f))
    spec = gaussian_spec(s_f, grid_radius=grid_radius)

    try:
        result = sample(spec, m, epsilon, shots=shots, seed=seed)
        target = brute_force_target(
            lambda p: np.exp(-np.pi * sum(c * c for c in p) / (2 * s_target**2)),
            m,
            box_radius=6.0 * s_target,
        )
        tv, disp = pac_distance(result.distribution, target, match_radius=float(epsilon))
    except LatdftError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    outdir = Path(args.out or ".")
    outdir.mkdir(parents=True, exist_ok=True)
    samples_path = outdir / "samples.csv"
    with open(samples_path, "w") as fh:
        for row in result.samples:
            fh.write(",".join(str(c) for c in row) + "\n")
    report = {
        "config_hash": _config_hash(config),
        "seed": seed,
        "tv_distance": tv,
        "max_displacement": disp,
        "decode_mismatch_rate": result.decode_mismatch_rate,
        "ancilla_residual": result.ancilla_residual,
        "norm_defect": result.norm_defect,
        "sigma_inverse_applied": True,
        "reduced_modulus": result.certificate.basis.N,
        "scale_T": result.certificate.T,
        "shots": shots,
    }
    (outdir / "sample_report.json").write_text(json.dumps(report, indent=2))
    print(f"samples written to {samples_path}")
    print(f"tv_distance = {tv:.6f}, max_displacement = {disp}")
    print(f"report written to {outdir / 'sample_report.json'}")
    return 0


def cmd_selftest(args) -> int:
    from .acceptance import run_all

    results = run_all(echo=print)
    config = {"seed": args.seed, "suite": "acceptance", "criteria": len(results)}
    summary = {
        "config_hash": _config_hash(config),
        "seed": args.seed,
        "criteria": [
            {
                "number": r.number,
                "name": r.name,
                "passed": r.passed,
                "details": r.details,
                "seconds": round(r.seconds, 3),
            }
            for r in results
        ],
        "all_passed": all(r.passed for r in results),
    }
    outdir = Path(args.out or ".")
    outdir.mkdir(parents=True, exist_ok=True)
    (outdir / "selftest_summary.json").write_text(json.dumps(summary, indent=2))
    print(f"summary written to {outdir / 'selftest_summary.json'}")
    return 0 if summary["all_passed"] else 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="latdft",
        description="Exact-arithmetic lattice toolkit: SysNF reduction, lattice DFT, "
        "circuit simulation, and PAC sampling.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a matrix file for SysNF validity")
    p.add_argument("--input", required=True, help="matrix file")
    p.set_defaults(fn=cmd_validate)

    p = sub.add_parser("reduce", help="reduce an integer basis to a nearby SysNF lattice")
    p.add_argument("--input", required=True, help="matrix file")
    p.add_argument("--epsilon", required=True, help="exact rational tolerance, e.g. 1/16")
    p.add_argument("--out", help="certificate output path (default certificate.json)")
    p.set_defaults(fn=cmd_reduce)

    p = sub.add_parser("dft", help="build and export the dense lattice DFT matrix")
    p.add_argument("--input", required=True, help="SysNF matrix file")
    p.add_argument("--out", help="output directory")
    p.add_argument("--size-guard", type=int, default=4096)
    p.set_defaults(fn=cmd_dft)

    p = sub.add_parser("qft-sim", help="simulate the circuit and compare to the dense transform")
    p.add_argument("--input", required=True, help="SysNF matrix file")
    p.add_argument("--out", help="output directory")
    p.add_argument("--size-guard", type=int, default=4096)
    p.add_argument("--dump-state", help="comma-separated basis state to snapshot after each step")
    p.set_defaults(fn=cmd_qft_sim)

    p = sub.add_parser("sample", help="run the lattice sampler from a JSON config")
    p.add_argument("--config", required=True, help="JSON config file")
    p.add_argument("--out", help="output directory")
    p.set_defaults(fn=cmd_sample)

    p = sub.add_parser("selftest", help="run the full acceptance battery")
    p.add_argument("--out", help="output directory")
    p.add_argument("--seed", type=int, default=20260810, help="recorded in the summary")
    p.set_defaults(fn=cmd_selftest)

    return parser


def main(argv=None) -> int:
    _apply_thread_cap()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code not in (0, None) else 0
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
