"""
Command-line entry point for the SUPG tau-learning pipeline.

Commands:
1. solve     Solve one benchmark problem with a chosen tau
2. tauopt    Optimize tau for one configuration or a sweep
3. generate  Build the (r, h, Pe_g) -> tau* dataset
4. train     Train the network on a dataset
5. predict   Predict tau for a feature triple or a grid
6. evaluate  Run one of the comparison suites

Exit codes: 0 success, 2 invalid arguments, 3 missing input file,
4 numerical failure.
"""

import argparse
import logging
import math
import sys
from dataclasses import replace
from pathlib import Path
from typing import List, Optional, Sequence

# Add project root to path
project_root = Path(__file__).parent
sys.path.insert(0, str(project_root))

import numpy as np
import pandas as pd

from core import InvalidArgumentError, NumericalError, OptimizerSettings, Settings, SupgError, configure_logging
from data import (
    NormalizationStats,
    generate_dataset,
    load_dataset,
    load_metadata,
    save_dataset,
    split,
)
from fem import build_mesh, build_space
from metrics import LineSegment, extract_line
from mlp import TrainConfig, init_model, load_model, predict_tau, save_model, train
from pipeline import Evaluator, TauMode, build_sweep_configs, sweep_optimal_tau
from pipeline.evaluator import DEFAULT_PE_SWEEP, THETA_GRID
from pipeline.tau_search import TauObjective, golden_section_log, target_values_for
from problems import ProblemCatalog
from reports import RunManifest, generate_summary_stats, write_csv, write_json
from stabilization import global_from_local, mu_from_peclet, tau_theory

logger = logging.getLogger("main")

THETA_COLUMNS = ["theta", "tau_star", "tau_theory", "tau_ann", "e_star", "e_theory", "e_ann"]


def banner(title: str) -> None:
    print("=" * 60)
    print(title)
    print("=" * 60)
    print()


def parse_floats(text: str) -> List[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise InvalidArgumentError(f"Expected comma-separated numbers, got {text!r}") from None


def parse_ints(text: str) -> List[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise InvalidArgumentError(f"Expected comma-separated integers, got {text!r}") from None


def parse_grid(text: str):
    """
    Parse '<kind>=<lo>:<hi>:<log|lin>:<count>', e.g. 'pe_h=1:250:log:30'.

    Returns:
        (kind, values) with kind 'pe_h' or 'pe_g'
    """
    kind, _, spec = text.partition("=")
    parts = spec.split(":")
    if kind not in ("pe_h", "pe_g") or len(parts) != 4 or parts[2] not in ("log", "lin"):
        raise InvalidArgumentError(f"Grid must look like 'pe_h=1:250:log:30', got {text!r}")
    try:
        lo, hi, count = float(parts[0]), float(parts[1]), int(parts[3])
    except ValueError:
        raise InvalidArgumentError(f"Malformed grid bounds in {text!r}") from None
    if not (0 < lo <= hi) or count < 1:
        raise InvalidArgumentError(f"Grid needs 0 < lo <= hi and count >= 1, got {text!r}")
    values = np.geomspace(lo, hi, count) if parts[2] == "log" else np.linspace(lo, hi, count)
    return kind, [float(v) for v in values]


def resolve_mu(args, problem_id: str, n: int) -> float:
    """mu from exactly one of --mu, --pe-h, --pe-g."""
    given = [name for name in ("mu", "pe_h", "pe_g") if getattr(args, name, None) is not None]
    if len(given) != 1:
        raise InvalidArgumentError("Give exactly one of --mu, --pe-h, --pe-g")
    beta_norm = ProblemCatalog.beta_norm(problem_id)
    h = ProblemCatalog.mesh_size(problem_id, n)
    if args.mu is not None:
        if not args.mu > 0:
            raise InvalidArgumentError(f"mu must be positive, got {args.mu}")
        return args.mu
    if args.pe_h is not None:
        logger.info("Pe_g = Pe_h*L/h = %g", global_from_local(args.pe_h, h))
        return mu_from_peclet(beta_norm, h, args.pe_h)
    logger.info("Pe_h = Pe_g*h/L = %g", args.pe_g * h)
    return mu_from_peclet(beta_norm, 1.0, args.pe_g)


def optimizer_from_args(args, settings: Settings) -> OptimizerSettings:
    current = settings.optimizer
    return OptimizerSettings(
        bracket=tuple(args.bracket) if args.bracket else current.bracket,
        tol=args.tol if args.tol is not None else current.tol,
        budget=args.budget if args.budget is not None else current.budget,
    )


def cmd_solve(args, settings: Settings, manifest: RunManifest) -> None:
    mu = resolve_mu(args, args.problem, args.n)
    problem = ProblemCatalog.build(args.problem, mu, theta=args.theta)
    mode = TauMode.parse(args.tau_mode)
    model = load_model(args.model) if args.model else None
    evaluator = Evaluator(model=model, optimizer=settings.optimizer, reference_n=settings.reference_n,
                          cache_dir=settings.cache_dir, show_progress=not args.quiet)
    result = evaluator.evaluate_single(problem, args.n, args.r, mode)
    space = result.solution.space

    stem = f"solve_{args.problem}_n{args.n}_r{args.r}"
    coords = {axis: space.dof_coords[:, d] for d, axis in enumerate("xy"[:space.dim])}
    nodal = pd.DataFrame({**coords, "value": result.solution.coefficients})
    manifest.add_output(write_csv(nodal, settings.output_dir / f"{stem}_solution.csv"))
    if args.line:
        line = LineSegment.parse(args.line, dim=space.dim)
        manifest.add_output(write_csv(extract_line(result.solution, line, args.samples),
                                      settings.output_dir / f"{stem}_line.csv"))
    summary = result.as_dict()
    summary["problem"] = problem.describe()
    manifest.add_output(write_json(summary, settings.output_dir / f"{stem}_report.json"))

    print(f"✓ Solved {args.problem}: {space.n_dofs} dofs, tau = {result.tau:.6e} ({mode.label})")
    if result.report is not None:
        print(f"  E = {result.report.e_nodal:.4e}   L2 = {result.report.l2:.4e}   H1 = {result.report.h1:.4e}")


def cmd_tauopt(args, settings: Settings, manifest: RunManifest) -> None:
    model = load_model(args.model) if args.model else None
    predictor = (lambda r, h, pe: predict_tau(model, r, h, pe)) if model is not None else None
    r_values = parse_ints(args.r_values) if args.r_values else [args.r]
    n_values = parse_ints(args.n_values) if args.n_values else [args.n]
    if None in n_values:
        raise InvalidArgumentError("tauopt needs --n or --n-values")

    if args.sweep or args.theta_sweep:
        if args.sweep:
            kind, pe_values = parse_grid(args.sweep)
        else:
            kind, pe_values = ("pe_h", [args.pe_h]) if args.pe_h is not None else ("pe_g", [args.pe_g])
            if pe_values[0] is None:
                raise InvalidArgumentError("--theta-sweep needs --pe-g or --pe-h")
        thetas = None
        if args.theta_sweep:
            thetas = list(THETA_GRID) if args.theta_sweep == "default" else parse_floats(args.theta_sweep)
        configs = build_sweep_configs(args.problem, pe_values, r_values, n_values,
                                      pe_kind="local" if kind == "pe_h" else "global", thetas=thetas)
        frame = sweep_optimal_tau(configs, settings.optimizer, tau_predictor=predictor,
                                  workers=settings.workers, reference_n=settings.reference_n,
                                  cache_dir=settings.cache_dir, show_progress=not args.quiet)
        if thetas is not None:
            first = [c for c in THETA_COLUMNS if c in frame.columns]
            frame = frame[first + [c for c in frame.columns if c not in first]]
        name = "tauopt_theta.csv" if thetas is not None else "tauopt_sweep.csv"
        manifest.add_output(write_csv(frame, settings.output_dir / name))
        failed = int((frame["error"] != "").sum())
        print(f"✓ Optimized {len(frame) - failed} of {len(frame)} configurations")
        if failed:
            print(f"  {failed} configurations failed (see the error column)")
        return

    mu = resolve_mu(args, args.problem, args.n)
    problem = ProblemCatalog.build(args.problem, mu, theta=args.theta)
    space = build_space(build_mesh(problem.dim, args.n), args.r)
    objective = TauObjective(problem, space,
                             target_values_for(problem, space, settings.reference_n, settings.cache_dir))
    opt = settings.optimizer
    result = golden_section_log(objective, opt.bracket, opt.tol, opt.budget)
    payload = result.as_dict()
    payload.update({"problem_id": args.problem, "n": args.n, "r": args.r, "mu": mu, "h": space.mesh.h,
                    "theta": args.theta,
                    "tau_theory": tau_theory(problem.beta_norm, space.mesh.h, mu, args.r)})
    payload["e_theory"] = objective(payload["tau_theory"])
    manifest.add_output(write_json(payload, settings.output_dir / "tauopt.json"))
    print(f"✓ tau* = {result.tau_star:.6e}  E(tau*) = {result.e_at_star:.4e}  ({result.evaluations} evaluations)")
    print(f"  tau_theory = {payload['tau_theory']:.6e}  E(tau_theory) = {payload['e_theory']:.4e}")


def cmd_generate(args, settings: Settings, manifest: RunManifest) -> None:
    n_set = parse_ints(args.n_set)
    h_set = [math.sqrt(2.0) / n for n in n_set]
    manifest.seeds["dataset"] = args.seed
    frame = generate_dataset(args.m, r_set=parse_ints(args.r_set), h_set=h_set,
                             pe_range=tuple(args.pe_range), sampling=args.sampling, seed=args.seed,
                             optimizer=settings.optimizer, workers=settings.workers,
                             show_progress=not args.quiet)
    path = Path(args.output) if args.output else settings.output_dir / "dataset.csv"
    metadata = {"problem_id": "train2d", "sampling": args.sampling, "seed": args.seed, "m": args.m,
                "pe_range": list(args.pe_range), "r_set": parse_ints(args.r_set), "h_set": h_set,
                "optimizer": settings.optimizer.as_dict()}
    save_dataset(frame, path, metadata)
    manifest.add_output(path)
    manifest.add_output(path.with_name(path.stem + ".meta.json"))
    print(f"✓ Generated {len(frame)} of {args.m} records -> {path}")


def cmd_train(args, settings: Settings, manifest: RunManifest) -> None:
    dataset_path = Path(args.dataset) if args.dataset else settings.output_dir / "dataset.csv"
    records = load_dataset(dataset_path)
    meta = load_metadata(dataset_path)
    if meta:
        logger.info("Dataset generated with %s sampling (version %s)", meta.get("sampling"), meta.get("version"))
    training, validation = split(records, args.fraction, args.seed)
    stats = NormalizationStats.from_frame(training)
    config = TrainConfig(learning_rate=args.lr, momentum=args.momentum, batch_size=args.batch_size,
                         epochs=args.epochs, seed=args.seed,
                         patience=args.patience if args.patience > 0 else None)
    manifest.seeds.update({"split": args.seed, "init": args.seed, "shuffle": args.seed})
    manifest.config["train"] = config.as_dict()
    model = init_model(args.seed, output_activation="linear" if args.linear_output else "relu", stats=stats)
    result = train(model, training, validation, config, show_progress=not args.quiet)

    model_path = Path(args.model_out) if args.model_out else settings.output_dir / "model.txt"
    manifest.add_output(save_model(result.model, model_path))
    manifest.add_output(write_csv(result.history, model_path.with_name(model_path.stem + "_history.csv")))
    last = result.history.iloc[-1]
    print(f"✓ Trained {len(result.history)} epochs on {len(training)} records "
          f"(validation {len(validation)})")
    print(f"  train MSE = {last['train_mse']:.4e}   val MSE = {last['val_mse']:.4e}   "
          f"best epoch = {result.best_epoch}")


def cmd_predict(args, settings: Settings, manifest: RunManifest) -> None:
    model = load_model(args.model)
    beta_norm = ProblemCatalog.beta_norm("train2d")
    if args.grid:
        r_values = parse_ints(args.r_values)
        h_values = [math.sqrt(2.0) / n for n in parse_ints(args.n_values)]
        pe_values = parse_floats(args.pe_values) if args.pe_values else list(DEFAULT_PE_SWEEP)
        rows = []
        for r in r_values:
            for h in h_values:
                for pe_g in pe_values:
                    mu = mu_from_peclet(beta_norm, 1.0, pe_g)
                    rows.append({"r": r, "h": h, "pe_g": pe_g, "mu": mu,
                                 "tau_ann": predict_tau(model, r, h, pe_g),
                                 "tau_theory": tau_theory(beta_norm, h, mu, r)})
        frame = pd.DataFrame(rows)
        manifest.add_output(write_csv(frame, settings.output_dir / "predictions.csv"))
        print(f"✓ Predicted tau at {len(frame)} grid points")
        return
    if args.r is None or args.h is None or args.pe_g is None:
        raise InvalidArgumentError("predict needs --r, --h and --pe-g (or --grid)")
    tau = predict_tau(model, args.r, args.h, args.pe_g)
    payload = {"r": args.r, "h": args.h, "pe_g": args.pe_g, "tau_ann": tau}
    if args.r <= 4:
        payload["tau_theory"] = tau_theory(beta_norm, args.h, mu_from_peclet(beta_norm, 1.0, args.pe_g), args.r)
    manifest.add_output(write_json(payload, settings.output_dir / "prediction.json"))
    print(f"✓ tau_ANN = {tau:.6e}")


def cmd_evaluate(args, settings: Settings, manifest: RunManifest) -> None:
    model = load_model(args.model) if args.model else None
    if model is None:
        logger.warning("No model given; only the theoretical tau is evaluated")
    evaluator = Evaluator(model=model, optimizer=settings.optimizer, reference_n=settings.reference_n,
                          cache_dir=settings.cache_dir, workers=settings.workers,
                          show_progress=not args.quiet)
    r_values = parse_ints(args.r_values)
    out = settings.output_dir
    if args.test == "1":
        norms, lines = evaluator.test1(samples=args.samples, include_optimal=args.include_optimal)
        frames = {"test1_norms.csv": norms, "test1_lines.csv": lines}
        summary = generate_summary_stats(norms)
    elif args.test == "2":
        n = args.n if args.n is not None else 10
        sweep = evaluator.test2(r_values, n, include_optimal=args.include_optimal)
        frames = {"test2_sweep.csv": sweep}
        summary = generate_summary_stats(sweep)
    elif args.test == "3":
        errors, lines = evaluator.test3(samples=args.samples)
        frames = {"test3_errors.csv": errors, "test3_lines.csv": lines}
        summary = generate_summary_stats(errors)
    elif args.test == "4":
        n_values = [args.n] if args.n is not None else [10, 20]
        sweep = evaluator.test4(r_values, n_values, include_optimal=args.include_optimal)
        frames = {"test4_sweep.csv": sweep}
        summary = generate_summary_stats(sweep)
    else:
        frame = evaluator.theta_study(n=args.n if args.n is not None else 20, r=r_values[-1])
        first = [c for c in THETA_COLUMNS if c in frame.columns]
        frames = {"theta_study.csv": frame[first + [c for c in frame.columns if c not in first]]}
        summary = None

    for name, frame in frames.items():
        manifest.add_output(write_csv(frame, out / name))
    if summary is not None:
        manifest.add_output(write_csv(summary, out / f"test{args.test}_summary.csv"))
        print(summary.round(6).to_string(index=False))
        print()
    print(f"✓ Evaluation {args.test} complete")


def add_problem_args(parser: argparse.ArgumentParser, n_required: bool = True) -> None:
    parser.add_argument("problem", choices=ProblemCatalog.get_problem_ids())
    parser.add_argument("--n", type=int, required=n_required, default=None, help="mesh divisions per side")
    parser.add_argument("--r", type=int, default=1, help="finite element degree (1-4)")
    parser.add_argument("--mu", type=float, help="diffusion coefficient")
    parser.add_argument("--pe-h", type=float, help="local Péclet number")
    parser.add_argument("--pe-g", type=float, help="global Péclet number (L = 1)")
    parser.add_argument("--theta", type=float, help="advection angle in radians (|beta| = sqrt(2))")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="SUPG stabilization parameter learning pipeline")
    parser.add_argument("--output-dir", type=Path, help="directory for all outputs (env SUPG_OUTPUT_DIR)")
    parser.add_argument("--workers", type=int, help="parallel configurations (env SUPG_WORKERS)")
    parser.add_argument("--log-level", help="logging level (env SUPG_LOG_LEVEL)")
    parser.add_argument("--bracket", type=float, nargs=2, metavar=("LO", "HI"), help="tau search bracket")
    parser.add_argument("--tol", type=float, help="tau search tolerance in log10 units")
    parser.add_argument("--budget", type=int, help="maximum E(tau) evaluations per search")
    parser.add_argument("--quiet", action="store_true", help="disable progress bars")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve one problem")
    add_problem_args(p)
    p.add_argument("--tau-mode", default="theory", help="theory | fixed:<v> | ann:<model> | none | optimal")
    p.add_argument("--model", help="model file for --tau-mode ann")
    p.add_argument("--line", help="extract along 'x=<v>' or 'y=<v>'")
    p.add_argument("--samples", type=int, default=200)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("tauopt", help="optimize tau")
    add_problem_args(p, n_required=False)
    p.add_argument("--sweep", help="Péclet grid, e.g. pe_h=1:250:log:30")
    p.add_argument("--theta-sweep", help="comma-separated angles in radians, or 'default'")
    p.add_argument("--r-values", help="comma-separated degrees for sweeps")
    p.add_argument("--n-values", help="comma-separated mesh divisions for sweeps")
    p.add_argument("--model", help="add tau_ann columns from this model")
    p.set_defaults(func=cmd_tauopt)

    p = sub.add_parser("generate", help="generate the training dataset")
    p.add_argument("--m", type=int, default=900)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sampling", choices=["log-uniform", "uniform"], default="log-uniform")
    p.add_argument("--pe-range", type=float, nargs=2, default=[7.0, 70710.0], metavar=("LO", "HI"))
    p.add_argument("--r-set", default="1,2,3")
    p.add_argument("--n-set", default="10,20,40", help="mesh divisions; h = sqrt(2)/n")
    p.add_argument("--output", help="dataset CSV path (default <output-dir>/dataset.csv)")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("train", help="train the network")
    p.add_argument("--dataset", help="dataset CSV (default <output-dir>/dataset.csv)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--epochs", type=int, default=500)
    p.add_argument("--lr", type=float, default=0.01)
    p.add_argument("--momentum", type=float, default=0.9)
    p.add_argument("--batch-size", type=int, default=32)
    p.add_argument("--patience", type=int, default=50, help="0 disables early stopping")
    p.add_argument("--fraction", type=float, default=0.8, help="training share of the dataset")
    p.add_argument("--linear-output", action="store_true", help="no ReLU on the output layer")
    p.add_argument("--model-out", help="model path (default <output-dir>/model.txt)")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="predict tau")
    p.add_argument("--model", required=True)
    p.add_argument("--r", type=int)
    p.add_argument("--h", type=float)
    p.add_argument("--pe-g", type=float)
    p.add_argument("--grid", action="store_true", help="predict over --r-values x --n-values x --pe-values")
    p.add_argument("--r-values", default="1,2,3,4")
    p.add_argument("--n-values", default="10,20")
    p.add_argument("--pe-values", help="comma-separated Pe_g values (default: 20 log-spaced in [7, 70710])")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("evaluate", help="run a comparison suite")
    p.add_argument("--test", choices=["1", "2", "3", "4", "theta"], required=True)
    p.add_argument("--model", help="trained model file")
    p.add_argument("--r-values", default="1,2,3")
    p.add_argument("--n", type=int, help="mesh divisions for sweeps")
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--include-optimal", action="store_true", help="also report tau* and E(tau*)")
    p.set_defaults(func=cmd_evaluate)
    return parser


def resolve_settings(args) -> Settings:
    settings = Settings.from_env()
    overrides = {}
    if args.output_dir is not None:
        overrides["output_dir"] = args.output_dir
        overrides["cache_dir"] = args.output_dir / ".cache"
    if args.workers is not None:
        if args.workers < 1:
            raise InvalidArgumentError(f"--workers must be positive, got {args.workers}")
        overrides["workers"] = args.workers
    if args.log_level is not None:
        overrides["log_level"] = args.log_level.upper()
    settings = replace(settings, **overrides)
    return replace(settings, optimizer=optimizer_from_args(args, settings))


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main execution function."""
    args = build_parser().parse_args(argv)
    manifest = RunManifest(command=args.command, config={"args": {k: v for k, v in vars(args).items()
                                                                   if k != "func"}})
    settings = None
    error = None
    try:
        settings = resolve_settings(args)
        configure_logging(settings.log_level)
        manifest.config["settings"] = settings.as_dict()
        banner(f"SUPG tau pipeline: {args.command}")
        args.func(args, settings, manifest)
        return 0
    except SupgError as e:
        error = e
        print(f"\nError: {e}", file=sys.stderr)
        return e.exit_code
    except KeyboardInterrupt as e:
        error = e
        print("\n\nInterrupted by user.", file=sys.stderr)
        return 130
    except Exception as e:
        error = e
        print(f"\nUnexpected error: {type(e).__name__}: {e}", file=sys.stderr)
        import traceback
        traceback.print_exc()
        return NumericalError.exit_code
    finally:
        manifest.finish(error)
        output_dir = settings.output_dir if settings is not None else Path("results")
        path = manifest.write(output_dir)
        print()
        print("=" * 60)
        print(f"Manifest saved to: {path}")
        print("=" * 60)


if __name__ == "__main__":
    sys.exit(main())
