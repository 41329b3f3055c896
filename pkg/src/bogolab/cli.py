"""Command-line interface.

Exit codes: 0 success, 2 a verification or tolerance check failed,
3 malformed input.  All randomized subcommands take a seed and are
reproducible.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

import numpy as np

from . import atom, coherent, fock, onepdm, quadham, quasifree, symplectic

EXIT_OK = 0
EXIT_VERIFY = 2
EXIT_INPUT = 3


def _emit(payload: dict, path: str | None):
    text = json.dumps(payload, indent=2, sort_keys=True)
    if path:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _load_json(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise SystemExit(EXIT_INPUT) from exc


def _floats(text: str) -> list:
    return [float(tok) for tok in text.split(",") if tok]


def cmd_diag(args) -> int:
    obj = _load_json(args.input)
    try:
        p = onepdm.from_json(obj)
        result = symplectic.diagonalize_onepdm(p)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    payload = result.to_json()
    payload["admissible_defect"] = onepdm.is_admissible(p)[1]
    payload["purity_defect"] = onepdm.purity_defect(p)
    _emit(payload, args.output)
    return EXIT_OK if result.residual <= args.tol else EXIT_VERIFY


def cmd_quadham(args) -> int:
    obj = _load_json(args.input)
    try:
        a = onepdm._complex_from_json(obj["a"])
        b = onepdm._complex_from_json(obj["b"])
        ham = quadham.QuadraticHamiltonian(a=a, b=b)
        energy, dvals = quadham.ground_energy(ham)
        gp = quadham.ground_onepdm(ham)
    except (KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    payload = {
        "ground_energy": energy,
        "symplectic_eigenvalues": dvals.tolist(),
        "ground_onepdm": onepdm.to_json(gp),
        "purity_defect": onepdm.purity_defect(gp),
    }
    status = EXIT_OK
    if args.cutoffs:
        cutoffs = [int(c) for c in args.cutoffs.split(",")]
        report = quadham.fock_verify_ground(ham, cutoffs)
        payload["oracle"] = report
        if report and report[-1]["abs_error"] > args.tol:
            status = EXIT_VERIFY
    _emit(payload, args.output)
    return status


def cmd_wick(args) -> int:
    lams = _floats(args.lambdas)
    try:
        spec = quasifree.QuasiFreeSpec(np.asarray(lams))
        space = fock.enumerate_basis(len(lams), args.cutoff)
        report = quasifree.verify_quasifree(spec, space, max_degree=args.max_degree)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if not args.full:
        report = {k: v for k, v in report.items() if k != "entries"}
    _emit(report, args.output)
    return EXIT_OK if report["worst_abs_error"] <= args.tol else EXIT_VERIFY


def cmd_toy(args) -> int:
    ns = _floats(args.n)
    rows = []
    for n in ns:
        energy, lam = coherent.toy_bogoliubov_energy(n)
        exact = n * n - n
        rows.append({
            "N": n,
            "bogoliubov_energy": energy,
            "lambda_star": lam,
            "exact_energy": exact,
            "gap": energy - exact,
            "gap_over_n23": (energy - exact) / n ** (2.0 / 3.0) if n > 0 else 0.0,
        })
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=list(rows[0].keys()))
            writer.writeheader()
            writer.writerows(rows)
    _emit({"rows": rows}, args.output)
    bad = any(row["gap"] < -1e-9 for row in rows)
    return EXIT_VERIFY if bad else EXIT_OK


def _make_grid(args) -> atom.RadialGrid:
    return atom.make_grid(n=args.points, r_min=args.r_min, r_max=args.r_max)


def cmd_atom_scf(args) -> int:
    grid = _make_grid(args)
    try:
        sol = atom.hartree_scf(args.t, grid)
    except (ValueError, atom.SCFError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VERIFY if isinstance(exc, atom.SCFError) else EXIT_INPUT
    payload = {
        "t": sol.t,
        "energy": sol.energy,
        "multiplier": sol.multiplier,
        "gap": sol.gap,
        "residual": sol.residual,
        "iterations": sol.iterations,
    }
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["r", "orbital"])
            writer.writerows(zip(sol.grid.r.tolist(), sol.v.tolist()))
    _emit(payload, args.output)
    return EXIT_OK


def cmd_atom_tc(args) -> int:
    grid = _make_grid(args)
    try:
        tc = atom.critical_t(grid, lo=args.lo, hi=args.hi)
    except (ValueError, atom.SCFError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    _emit({"critical_t": tc}, args.output)
    return EXIT_OK


def cmd_atom_mu(args) -> int:
    grid = _make_grid(args)
    try:
        sol = atom.hartree_scf(args.t, grid)
        ells = tuple(int(c) for c in args.channels.split(","))
        prob = atom.build_qt_problem(sol, ells=ells, basis_per_channel=args.basis)
        result = atom.minimize_mu_tilde(prob)
        bound = atom.mu_upper_bound(sol, result.value)
    except (ValueError, atom.SCFError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    payload = {
        "t": sol.t,
        "mu_tilde": result.value,
        "sweeps": result.sweeps,
        "channel_values": result.channel_values,
        "bound": bound["bound"],
        "trial_values": {str(k): v for k, v in bound["trial_values"].items()},
        "identity_gap": bound["identity_gap"],
    }
    _emit(payload, args.output)
    return EXIT_OK if result.value < 0 else EXIT_VERIFY


def cmd_verify_all(args) -> int:
    rng = np.random.default_rng(args.seed)
    failures = []

    # random 1-pdm diagonalizations
    for _ in range(args.samples):
        m = int(rng.integers(1, 5))
        w = symplectic.random_bogoliubov(m, rng, strength=0.4)
        lam = rng.uniform(0.0, 2.0, size=m)
        diag = np.diag(np.concatenate([lam, 1.0 + lam]))
        gamma_full = w.doubled() @ diag @ w.doubled().conj().T
        p = onepdm.OnePdm(gamma=gamma_full[:m, :m], alpha=gamma_full[:m, m:])
        res = symplectic.diagonalize_onepdm(p)
        if res.residual > 1e-8:
            failures.append(f"diagonalization residual {res.residual:.3e} at M={m}")

    # random quadratic Hamiltonians against the oracle
    for _ in range(max(1, args.samples // 4)):
        a = rng.standard_normal((2, 2))
        a = a @ a.T + 1.5 * np.eye(2)
        b = 0.3 * (lambda x: 0.5 * (x + x.T))(rng.standard_normal((2, 2)))
        ham = quadham.QuadraticHamiltonian(a=a, b=b)
        report = quadham.fock_verify_ground(ham, [args.cutoff])
        if report[-1]["abs_error"] > 1e-5:
            failures.append(f"quadham oracle error {report[-1]['abs_error']:.3e}")

    # Wick cross-check
    spec = quasifree.QuasiFreeSpec(np.array([0.7, 0.3]))
    space = fock.enumerate_basis(2, 40)
    rep = quasifree.verify_quasifree(spec, space, max_degree=4)
    if rep["worst_abs_error"] > 1e-7:
        failures.append(f"wick error {rep['worst_abs_error']:.3e}")

    _emit({"seed": args.seed, "failures": failures, "ok": not failures}, args.output)
    return EXIT_OK if not failures else EXIT_VERIFY


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bogolab")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("diag", help="diagonalize a 1-pdm from JSON")
    p.add_argument("--input", required=True)
    p.add_argument("--output", default=None)
    p.add_argument("--tol", type=float, default=1e-9)
    p.set_defaults(func=cmd_diag)

    p = sub.add_parser("quadham", help="ground data of a quadratic Hamiltonian")
    p.add_argument("--input", required=True)
    p.add_argument("--output", default=None)
    p.add_argument("--cutoffs", default=None, help="comma list of oracle cutoffs")
    p.add_argument("--tol", type=float, default=1e-5)
    p.set_defaults(func=cmd_quadham)

    p = sub.add_parser("wick", help="verify Wick moments against the Gibbs oracle")
    p.add_argument("--lambdas", required=True, help="comma list of occupations")
    p.add_argument("--cutoff", type=int, default=40)
    p.add_argument("--max-degree", type=int, default=4)
    p.add_argument("--tol", type=float, default=1e-7)
    p.add_argument("--full", action="store_true", help="include every product in the report")
    p.add_argument("--output", default=None)
    p.set_defaults(func=cmd_wick)

    p = sub.add_parser("toy", help="toy-model Bogoliubov energies")
    p.add_argument("--n", required=True, help="comma list of particle budgets")
    p.add_argument("--csv", default=None)
    p.add_argument("--output", default=None)
    p.set_defaults(func=cmd_toy)

    p = sub.add_parser("atom", help="radial bosonic-atom computations")
    asub = p.add_subparsers(dest="atom_command", required=True)
    for name, func in (("scf", cmd_atom_scf), ("tc", cmd_atom_tc), ("mu", cmd_atom_mu)):
        q = asub.add_parser(name)
        q.add_argument("--points", type=int, default=atom.DEFAULT_POINTS)
        q.add_argument("--r-min", type=float, default=atom.DEFAULT_RMIN)
        q.add_argument("--r-max", type=float, default=atom.DEFAULT_RMAX)
        q.add_argument("--output", default=None)
        if name in ("scf", "mu"):
            q.add_argument("--t", type=float, default=1.0)
        if name == "scf":
            q.add_argument("--csv", default=None)
        if name == "tc":
            q.add_argument("--lo", type=float, default=1.0)
            q.add_argument("--hi", type=float, default=1.35)
        if name == "mu":
            q.add_argument("--basis", type=int, default=25)
            q.add_argument("--channels", default="0,1")
        q.set_defaults(func=func)

    p = sub.add_parser("verify-all", help="seeded randomized cross-check suite")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=20)
    p.add_argument("--cutoff", type=int, default=30)
    p.add_argument("--output", default=None)
    p.set_defaults(func=cmd_verify_all)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        code = args.func(args)
    except SystemExit as exc:
        code = exc.code if isinstance(exc.code, int) else EXIT_INPUT
    sys.exit(code)


if __name__ == "__main__":
    main()
