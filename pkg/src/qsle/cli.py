"""Command-line entry point: one `qsle` binary with verification subcommands.

Exit codes: 0 when every assertion passes, 1 on an assertion failure,
2 on a usage error (click's convention).
"""

from __future__ import annotations

import csv
import json
import sys
from pathlib import Path

import click
import numpy as np

from . import boundaryvisits as bv
from . import closedform as cf
from . import sampler as sm
from .interface import VerificationReport, serialize_table
from .linkpatterns import catalan, enumerate_patterns, format_pattern
from .purevectors import (
    MAX_TABLE_N,
    cached_table,
    check_recursion_all_j,
    check_system,
    dual_functional,
    symmetric_vector,
)
from .qfield import ONE, ZERO
from .uqsl2 import singlet_project_hat, trivial_subspace_dim

COV_TOL_AFFINE = 1e-9
COV_TOL_MOBIUS = 1e-8
GENERIC_MOBIUS = (2.0, 1.0, 1.0, 3.0)


def parse_points(text: str) -> np.ndarray:
    try:
        x = np.array([float(t) for t in text.split(",") if t.strip()])
    except ValueError as exc:
        raise click.BadParameter(str(exc)) from None
    try:
        return cf.check_config(x)
    except ValueError as exc:
        raise click.BadParameter(str(exc)) from None


# suites (each returns a report)


def run_purevec(n: int) -> VerificationReport:
    table = cached_table(n)
    rep = VerificationReport("purevec", meta={"max_N": n})
    for N in range(n + 1):
        for alpha in enumerate_patterns(N):
            fails = check_system(table, alpha)
            rep.add(f"system[{format_pattern(alpha)}]", "pure vector projection system", not fails, fails or None)
    return rep


def run_recursion(n: int) -> VerificationReport:
    table = cached_table(n)
    rep = VerificationReport("recursion", meta={"max_N": n})
    for N in range(n + 1):
        for alpha in enumerate_patterns(N):
            bad = check_recursion_all_j(table, alpha)
            rep.add(f"recursion[{format_pattern(alpha)}]", "tying recursion", not bad, bad or None)
    return rep


def run_dualcheck(n: int) -> VerificationReport:
    table = cached_table(n)
    rep = VerificationReport("dualcheck", meta={"max_N": n})
    for N in range(n + 1):
        pats = enumerate_patterns(N)
        wrong = []
        for a in pats:
            for b in pats:
                val = dual_functional(a, table[b])
                if val != (ONE if a == b else ZERO):
                    wrong.append([format_pattern(a), format_pattern(b), str(val)])
        rep.add(f"dual[N={N}]", "dual basis of pure vectors", not wrong, wrong or {"size": len(pats)})
    return rep


def run_symcheck(n: int) -> VerificationReport:
    table = cached_table(n)
    rep = VerificationReport("symcheck", meta={"max_N": n})
    for N in range(1, n + 1):
        v, w = symmetric_vector(N, table), symmetric_vector(N - 1, table)
        for j in range(1, 2 * N):
            rep.add(f"cascade[N={N},j={j}]", "symmetric vector cascade", singlet_project_hat(v, j) == w)
    return rep


def run_bvisit(max_nprime: int, order: str | None = None) -> VerificationReport:
    rep = VerificationReport("bvisit", meta={"max_nprime": max_nprime})
    derived, stated = bv.derive_constants(), bv.stated_constants()
    for k in ("C1", "C2", "C3"):
        rep.add(f"constant[{k}]", "boundary visit system", derived[k] == stated[k], str(derived[k]))
    orders = [bv.VisitOrder.parse(order)] if order is not None else [o for n in range(max_nprime + 1) for o in bv.all_orders(n)]
    for omega in orders:
        fails = [name for name, _ in bv.check_bvisit(omega)]
        fails += bv.collapse_consistency(omega)
        rep.add(f"system[{omega}]", "boundary visit system", not fails, fails or None)
    if order is None:
        for total in range(1, min(max_nprime, 3) + 1):
            for L in range(total + 1):
                k = bv.homogeneous_kernel_dim(L, total - L)
                rep.add(f"kernel[L={L},R={total - L}]", "boundary visit uniqueness", k == 0, k)
    return rep


def run_dims(n: int) -> VerificationReport:
    rep = VerificationReport("dims", meta={"n": n})
    d = trivial_subspace_dim(n)
    want = catalan(n // 2) if n % 2 == 0 else 0
    rep.add(f"dim[n={n}]", "invariant subspace dimension", d == want, d)
    return rep


def run_pdecheck(model: str, n_max: int, count: int, seed: int, tol: float) -> VerificationReport:
    rep = VerificationReport(f"pdecheck_{model}", meta={"configs": count, "seed": seed, "tol": tol})
    params = cf.params_for(model)
    Z = cf.Z_FUNCS[model]
    for N in range(1, n_max + 1):
        worst = 0.0
        rng = np.random.default_rng([seed, N])
        for _ in range(count):
            x = cf.random_config(rng, 2 * N)
            for i in range(2 * N):
                worst = max(worst, cf.pde_residual(Z, x, params, i))
        ok = worst == 0.0 if model == "perco" else worst <= tol
        rep.add(f"pde[{model},N={N}]", "second-order PDE system", ok, worst)
    return rep


def run_covcheck(model: str, n_max: int, count: int, seed: int) -> VerificationReport:
    rep = VerificationReport(f"covcheck_{model}", meta={"configs": count, "seed": seed})
    params = cf.params_for(model)
    Z = cf.Z_FUNCS[model]
    rng = np.random.default_rng(seed)
    for N in range(1, n_max + 1):
        aff, gen = 0.0, 0.0
        for _ in range(count):
            x = cf.random_config(rng, 2 * N)
            s, b = rng.uniform(0.3, 3.0), rng.uniform(-5.0, 5.0)
            aff = max(aff, cf.covariance_check(Z, x, params, s, b, 0.0, 1.0))
            y = x - x[0] - 2.0  # keep clear of the pole at -3
            gen = max(gen, cf.covariance_check(Z, y, params, *GENERIC_MOBIUS))
        rep.add(f"affine[{model},N={N}]", "Mobius covariance", aff <= COV_TOL_AFFINE, aff)
        rep.add(f"mobius[{model},N={N}]", "Mobius covariance", gen <= COV_TOL_MOBIUS, gen)
    return rep


def run_cascadecheck(model: str, n_max: int, count: int, seed: int, gap: float, tol: float) -> VerificationReport:
    """Merge the j-th pair of a random configuration at the midpoint of a gap
    of the remaining points and compare gap^(2h) Z with the smaller function."""
    rep = VerificationReport(f"cascadecheck_{model}", meta={"gap": gap, "tol": tol, "seed": seed})
    rng = np.random.default_rng(seed)
    for N in range(1, n_max + 1):
        worst = 0.0
        for _ in range(count):
            x = cf.random_config(rng, 2 * N)
            j = int(rng.integers(1, 2 * N))  # 1-based pair (j, j+1)
            xi = 0.5 * (x[j - 1] + x[j])
            rest = np.concatenate([x[: j - 1], x[j + 1:]])
            res = cf.cascade_check(model, rest, j, xi, [gap])
            worst = max(worst, res["rel_errors"][0])
        rep.add(f"cascade[{model},N={N}]", "pair-merging asymptotics", worst <= tol, worst)
    return rep


def run_martingale(model: str, points, j: int, dt: float, horizon: float, paths: int, seed: int) -> VerificationReport:
    cfg = sm.default_config(model, dt=dt, seed=seed)
    res = sm.martingale_check(points, cfg, j, horizon, paths)
    rep = VerificationReport(f"martingale_{model}", meta={"points": list(map(float, points)), "j": j, "dt": dt, "horizon": horizon, "paths": paths, "seed": seed})
    ok = not res["variance_overflow"] and (abs(res["mean"] - 1.0) <= 3 * res["se"] if res["se"] > 0 else res["mean"] == 1.0)
    rep.add(f"martingale[{model}]", "Girsanov martingale", ok, res)
    return rep


# click commands


def _finish(rep: VerificationReport, out: str | None) -> None:
    for a in rep.assertions:
        if not a.passed:
            click.echo(f"FAIL {a.id}: {a.residual}")
    click.echo(f"{rep.suite}: {len(rep.assertions) - rep.n_failed}/{len(rep.assertions)} assertions passed")
    if out:
        path = rep.write(out)
        click.echo(f"report: {path}")
    sys.exit(0 if rep.passed else 1)


out_option = click.option("--out", type=click.Path(file_okay=False), default=None, help="Directory for report and data files.")
seed_option = click.option("--seed", type=int, default=0, show_default=True)
model_option = click.option("--model", type=click.Choice(cf.MODELS), required=True)


@click.group()
def main():
    """Exact quantum-group vectors and multiple-SLE partition functions."""


@main.command()
@click.option("--n", "n", type=click.IntRange(0, MAX_TABLE_N), default=4, show_default=True)
@out_option
def purevec(n, out):
    """Build the pure-vector table up to N, verify it, optionally save it."""
    rep = run_purevec(n)
    if out:
        click.echo(f"table manifest: {serialize_table(cached_table(n), Path(out) / 'table')}")
    _finish(rep, out)


@main.command()
@click.option("--n", "n", type=click.IntRange(0, MAX_TABLE_N), default=4, show_default=True)
@out_option
def dualcheck(n, out):
    """Check that the dual functionals form the dual basis."""
    _finish(run_dualcheck(n), out)


@main.command()
@click.option("--n", "n", type=click.IntRange(0, MAX_TABLE_N), default=4, show_default=True)
@out_option
def symcheck(n, out):
    """Singlet projections of the symmetric vector."""
    _finish(run_symcheck(n), out)


@main.command()
@click.option("--n", "n", type=click.IntRange(0, 5), default=3, show_default=True, help="Maximal visit-order length.")
@click.option("--order", default=None, help="A single visit order such as '+-+'; prints its vector.")
@out_option
def bvisit(n, order, out):
    """Build and verify boundary-visit vectors."""
    if order is not None:
        try:
            omega = bv.VisitOrder.parse(order)
        except ValueError as exc:
            raise click.BadParameter(str(exc), param_hint="--order") from None
        click.echo(bv.build_bvisit(omega).vector.dumps())
    _finish(run_bvisit(n, order), out)


@main.command()
@model_option
@click.option("--points", required=True, help="Comma-separated increasing reals, even count.")
def zeval(model, points):
    """Evaluate a closed-form partition function and its log-gradient."""
    x = parse_points(points)
    params = cf.params_for(model)
    Z = cf.Z_FUNCS[model]
    out = {
        "model": model,
        "kappa": params.kappa,
        "Z": float(Z(x)),
        "grad_log_Z": cf.grad_log_z(model, x).tolist(),
        "pde_residuals": [cf.pde_residual(Z, x, params, i) for i in range(len(x))],
        # affine map z -> 2z + 1 always preserves the order
        "covariance_deviation": cf.covariance_check(Z, x, params, 2.0, 1.0, 0.0, 1.0),
    }
    click.echo(json.dumps(out))


@main.command()
@model_option
@click.option("--n-max", type=click.IntRange(1, 5), default=4, show_default=True)
@click.option("--configs", type=click.IntRange(1), default=100, show_default=True)
@click.option("--tol", type=float, default=1e-5, show_default=True)
@seed_option
@out_option
def pdecheck(model, n_max, configs, tol, seed, out):
    """Finite-difference residuals of the second-order PDEs."""
    _finish(run_pdecheck(model, n_max, configs, seed, tol), out)


@main.command()
@model_option
@click.option("--n-max", type=click.IntRange(1, 5), default=4, show_default=True)
@click.option("--configs", type=click.IntRange(1), default=20, show_default=True)
@seed_option
@out_option
def covcheck(model, n_max, configs, seed, out):
    """Mobius covariance under affine and generic maps."""
    _finish(run_covcheck(model, n_max, configs, seed), out)


@main.command()
@click.option("--model", type=click.Choice(["ising", "gff"]), required=True)
@click.option("--n-max", type=click.IntRange(1, 5), default=4, show_default=True)
@click.option("--configs", type=click.IntRange(1), default=20, show_default=True)
@click.option("--gap", type=float, default=1e-4, show_default=True)
@click.option("--tol", type=float, default=1e-5, show_default=True)
@seed_option
@out_option
def cascadecheck(model, n_max, configs, gap, tol, seed, out):
    """Relative error of the pair-merging limit at a fixed small gap."""
    _finish(run_cascadecheck(model, n_max, configs, seed, gap, tol), out)


def _check_kappa(model, kappa):
    if kappa is not None and abs(kappa - cf.MODEL_KAPPA[model]) > 1e-12:
        raise click.BadParameter(f"model {model} requires kappa = {cf.MODEL_KAPPA[model]}", param_hint="--kappa")


@main.command()
@model_option
@click.option("--kappa", type=float, default=None)
@click.option("--points", required=True)
@click.option("--dt", type=float, default=1e-4, show_default=True)
@click.option("--paths", type=click.IntRange(1), default=1, show_default=True)
@click.option("--order", default=None, help="Comma-separated 1-based growth order; default left to right.")
@click.option("--localization", type=float, default=0.4, show_default=True)
@seed_option
@out_option
def sample(model, kappa, points, dt, paths, order, localization, seed, out):
    """Grow the curves one by one and write them as CSV plus metadata JSON."""
    _check_kappa(model, kappa)
    x = parse_points(points)
    try:
        perm = [int(t) - 1 for t in order.split(",")] if order else list(range(len(x)))
        cfg = sm.default_config(model, dt=dt, seed=seed, localization=localization)
        results = sm.sample_one_by_one(x, cfg, perm, replicas=paths)
    except ValueError as exc:
        raise click.UsageError(str(exc)) from None
    outdir = Path(out or ".")
    outdir.mkdir(parents=True, exist_ok=True)
    csv_path = outdir / "curves.csv"
    n = len(x)
    with open(csv_path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["curve_id", "step", "t", "re", "im"])
        for res in results:
            for r in range(paths):
                steps = int(res["steps"][r])
                for k in range(steps + 1):
                    z = res["trace"][k, r]
                    w.writerow([r * n + res["slot"], k, repr(k * dt), repr(float(z.real)), repr(float(z.imag))])
    meta = {
        "cfg": {"model": model, "kappa": cfg.kappa, "dt": dt, "seed": seed, "localization": localization, "gap_floor": cfg.gap_floor, "max_steps": cfg.max_steps},
        "points": x.tolist(),
        "order": [p + 1 for p in perm],
        "curve_id": "replica * n_points + slot (slot 0-based)",
        "stop_reasons": {str(res["slot"] + 1): [sm.STOP_NAMES[int(s)] for s in res["status"]] for res in results},
        "mean_exit": {str(res["slot"] + 1): [float(np.nanmean(res["exit_point"].real)), float(np.nanmean(res["exit_point"].imag))] for res in results},
    }
    (outdir / "run.json").write_text(json.dumps(meta, indent=1, sort_keys=True))
    click.echo(f"curves: {csv_path}")
    click.echo(f"metadata: {outdir / 'run.json'}")


@main.command()
@model_option
@click.option("--kappa", type=float, default=None)
@click.option("--points", required=True)
@click.option("--j", "j", type=click.IntRange(1), default=1, show_default=True, help="1-based growing point.")
@click.option("--dt", type=float, default=1e-4, show_default=True)
@click.option("--horizon", type=float, default=0.05, show_default=True)
@click.option("--paths", type=click.IntRange(2), default=10_000, show_default=True)
@seed_option
@out_option
def martingale(model, kappa, points, j, dt, horizon, paths, seed, out):
    """Monte Carlo mean of the Girsanov martingale at a fixed horizon."""
    _check_kappa(model, kappa)
    x = parse_points(points)
    if j > len(x):
        raise click.BadParameter("j exceeds the number of points", param_hint="--j")
    _finish(run_martingale(model, x, j - 1, dt, horizon, paths, seed), out)


@main.command()
@click.option("--n", "n", type=click.IntRange(0, 12), required=True, help="Number of tensor factors.")
@out_option
def dims(n, out):
    """Dimension of the invariant subspace of n doublets."""
    rep = run_dims(n)
    click.echo(str(rep.assertions[0].residual))
    _finish(rep, out)


def cli_dispatch(argv) -> int:
    try:
        main.main(args=list(argv), prog_name="qsle", standalone_mode=False)
    except SystemExit as exc:
        return int(exc.code or 0)
    except click.UsageError as exc:
        exc.show()
        return 2
    except click.ClickException as exc:
        exc.show()
        return exc.exit_code
    except click.exceptions.Abort:
        return 1
    return 0


if __name__ == "__main__":
    main()
