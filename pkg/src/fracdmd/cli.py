"""Command-line interface: simulate, decompose, predict, validate, ml-eval.

Exit codes: 0 success, 2 configuration problem, 3 numerical failure
(conditioning, divergence, accuracy), 4 validation failure.
"""

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .checks import run_builtin_checks
from .dmdcore import (
    DecompositionConfig,
    decompose,
    load_model,
    predict,
    reconstruction_error,
    save_model,
)
from .errors import AccuracyError, ConditioningError, ConfigError, DivergenceError
from .fodesolver import FodeProblem, solve
from .fraccalc import mittag_leffler
from .kernels import KernelSpec
from .okhs import Trajectory
from .trajio import read_trajectory_csv, write_trajectory_csv

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_VALIDATION = 4


def _load_config(path):
    path = Path(path)
    try:
        with open(path, "r", encoding="utf-8") as handle:
            config = json.load(handle)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})")
    if not isinstance(config, dict):
        raise ConfigError(f"{path}: top level must be an object")
    return config, path.parent


def _require(config, key, kind=None):
    if key not in config:
        raise ConfigError(f"missing config key {key!r}")
    value = config[key]
    if kind is not None and not isinstance(value, kind):
        raise ConfigError(f"config key {key!r} has the wrong type")
    return value


def _initial_conditions(config):
    if "initial_conditions" in config:
        states = [np.atleast_1d(np.asarray(x, dtype=float)) for x in config["initial_conditions"]]
    elif "initial_grid" in config:
        grid = config["initial_grid"]
        states = [
            np.array([v])
            for v in np.linspace(
                float(_require(grid, "start")),
                float(_require(grid, "stop")),
                int(_require(grid, "count")),
            )
        ]
    elif "initial_random" in config:
        rand = config["initial_random"]
        if "seed" not in rand:
            raise ConfigError("initial_random requires an explicit 'seed'")
        rng = np.random.default_rng(int(rand["seed"]))
        low = np.atleast_1d(np.asarray(_require(rand, "low"), dtype=float))
        high = np.atleast_1d(np.asarray(_require(rand, "high"), dtype=float))
        states = [rng.uniform(low, high) for _ in range(int(_require(rand, "count")))]
    else:
        raise ConfigError(
            "config needs 'initial_conditions', 'initial_grid', or 'initial_random'"
        )
    if not states:
        raise ConfigError("no initial conditions configured")
    return states


def cmd_simulate(args):
    config, base = _load_config(args.config)
    system = _require(config, "system", dict)
    out_dir = Path(args.out) if args.out else base / _require(config, "out_dir", str)
    prefix = config.get("prefix", "traj")
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for index, x0 in enumerate(_initial_conditions(config)):
        problem = FodeProblem(
            order=float(_require(config, "order")),
            field_name=_require(system, "name", str),
            params=system.get("params", {}),
            x0=x0,
            horizon=float(_require(config, "horizon")),
            dt=float(_require(config, "dt")),
        )
        trajectory = solve(problem, corrector_sweeps=int(config.get("corrector_sweeps", 1)))
        path = out_dir / f"{prefix}_{index:03d}.csv"
        write_trajectory_csv(path, trajectory)
        written.append(path)
        print(f"wrote {path} ({trajectory.n_samples} rows, dim {trajectory.dim})")
    return EXIT_OK


def _decomposition_config(config, args):
    kernel = args.kernel or _require(config, "kernel", str)
    variant = args.variant or config.get("variant", "fractional")
    order = args.order if args.order is not None else float(_require(config, "order"))
    reg = args.reg if args.reg is not None else float(config.get("reg", 0.0))
    refine = (
        args.quad_refine if args.quad_refine is not None else int(config.get("quad_refine", 1))
    )
    try:
        return DecompositionConfig(
            variant=variant,
            order=order,
            kernel=KernelSpec.from_string(kernel),
            reg=reg,
            quad_refine=refine,
        )
    except ValueError as exc:
        raise ConfigError(str(exc))


def cmd_decompose(args):
    config, base = _load_config(args.config)
    paths = [base / p for p in _require(config, "trajectories", list)]
    if not paths:
        raise ConfigError("config lists no trajectories")
    missing = [str(p) for p in paths if not p.exists()]
    if missing:
        raise ConfigError(f"trajectory files not found: {', '.join(missing)}")
    try:
        trajectories = [read_trajectory_csv(p) for p in paths]
    except ValueError as exc:
        raise ConfigError(str(exc))
    dec_config = _decomposition_config(config, args)
    try:
        model = decompose(trajectories, dec_config)
    except ConditioningError as exc:
        raise ConditioningError(f"{exc} (try a larger --reg)")

    model_out = Path(args.out) if args.out else base / _require(config, "model_out", str)
    save_model(model_out, model)

    lines = [
        f"variant: {model.variant.value}",
        f"order: {model.order}",
        f"kernel: {model.kernel.to_string()}",
        f"reg: {model.reg!r}",
        f"trajectories: {len(model.trajectories)}",
        f"gram condition estimate: {model.diagnostics['gram_condition']:.6e}",
        f"eigenvector condition: {model.diagnostics['eigenvector_condition']:.6e}",
        "eigenvalues:",
    ]
    for value in model.eigenvalues:
        lines.append(f"  {value.real:+.12e} {value.imag:+.12e}j")
    lines.append("training reconstruction relative L2 error:")
    for index, trajectory in enumerate(model.trajectories):
        err = reconstruction_error(model, trajectory)
        lines.append(f"  trajectory {index}: {err:.6e}")
    report = "\n".join(lines) + "\n"

    if "report_out" in config or args.report:
        report_path = Path(args.report) if args.report else base / config["report_out"]
        with open(report_path, "w", encoding="utf-8") as handle:
            handle.write(report)
        print(f"wrote {model_out} and {report_path}")
    else:
        print(f"wrote {model_out}")
    sys.stdout.write(report)
    return EXIT_OK


def _parse_state(text):
    try:
        return np.array([float(v) for v in text.split(",")], dtype=float)
    except ValueError:
        raise ConfigError(f"cannot parse state vector {text!r}")


def cmd_predict(args):
    try:
        model = load_model(args.model)
    except FileNotFoundError:
        raise ConfigError(f"model file not found: {args.model}")
    except (ValueError, KeyError) as exc:
        raise ConfigError(f"{args.model}: {exc}")
    x0 = _parse_state(args.x0)
    if x0.size != model.dim:
        raise ConfigError(
            f"--x0 has dimension {x0.size}, model expects {model.dim}"
        )
    if args.horizon < 0 or args.dt <= 0:
        raise ConfigError("--horizon must be nonnegative and --dt positive")
    n_steps = int(round(args.horizon / args.dt))
    times = args.dt * np.arange(n_steps + 1)
    values, imag_rel = predict(model, x0, times, return_diagnostics=True)
    trajectory = Trajectory(dt=args.dt, states=values) if len(times) > 1 else None
    out = Path(args.out) if args.out else Path("prediction.csv")
    if trajectory is None:
        # single-row grid: write the file by hand since Trajectory wants N >= 2
        with open(out, "w", encoding="utf-8") as handle:
            handle.write("t," + ",".join(f"x{j + 1}" for j in range(model.dim)) + "\n")
            handle.write("0," + ",".join(f"{v:.17g}" for v in values[0]) + "\n")
    else:
        write_trajectory_csv(out, trajectory)
    print(f"wrote {out}")
    print(f"max discarded imaginary part (relative): {imag_rel:.6e}")
    return EXIT_OK


def cmd_validate(args):
    results = run_builtin_checks(weight_perturbation=args.perturb)
    width = max(len(r.name) for r in results)
    print(f"{'check':<{width}}  {'measured':>12}  {'tolerance':>12}  status")
    failed = 0
    for r in results:
        status = "pass" if r.passed else "FAIL"
        failed += not r.passed
        print(f"{r.name:<{width}}  {r.measured:>12.4e}  {r.tolerance:>12.4e}  {status}")
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return EXIT_OK if failed == 0 else EXIT_VALIDATION


def cmd_ml_eval(args):
    try:
        z = complex(args.z)
    except ValueError:
        raise ConfigError(f"cannot parse complex value {args.z!r}")
    value = mittag_leffler(args.order, z)
    print(f"{value.real:.17g}{value.imag:+.17g}j")
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="fracdmd",
        description="Occupation-kernel DMD for fractional-order dynamical systems.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="integrate Caputo systems from a config file")
    p.add_argument("config", help="JSON config with system, order, horizon, dt, initial conditions")
    p.add_argument("--out", help="output directory (overrides config out_dir)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("decompose", help="fit a finite-rank model from trajectory files")
    p.add_argument("config", help="JSON config with kernel, variant, order, trajectory paths")
    p.add_argument("--kernel", help="kernel spec, e.g. gaussian:mu=1.0")
    p.add_argument("--variant", choices=["liouville", "fractional"])
    p.add_argument("--order", type=float, help="fractional order q in (0, 1]")
    p.add_argument("--reg", type=float, help="Tikhonov regularization")
    p.add_argument("--quad-refine", type=int, dest="quad_refine")
    p.add_argument("--out", help="model output path (overrides config model_out)")
    p.add_argument("--report", help="report output path (overrides config report_out)")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("predict", help="predict a trajectory from a model file")
    p.add_argument("model", help="model JSON file written by decompose")
    p.add_argument("--x0", required=True, help="initial state, comma-separated")
    p.add_argument("--horizon", type=float, required=True, help="prediction horizon T")
    p.add_argument("--dt", type=float, required=True, help="prediction time step")
    p.add_argument("--out", help="output CSV path (default prediction.csv)")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("validate", help="run the built-in numerical oracle checks")
    p.add_argument("--perturb", type=float, default=0.0, help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("ml-eval", help="evaluate the Mittag-Leffler function E_q(z)")
    p.add_argument("order", type=float, help="order q in (0, 2]")
    p.add_argument("z", help="argument, e.g. '1.5' or '-1+0.5j'")
    p.set_defaults(func=cmd_ml_eval)
    return parser


def _limit_threads():
    value = os.environ.get("FRACDMD_NUM_THREADS")
    if not value:
        return None
    try:
        from threadpoolctl import threadpool_limits

        return threadpool_limits(limits=int(value))
    except (ImportError, ValueError):
        return None


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    limiter = _limit_threads()
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ConditioningError, DivergenceError, AccuracyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    finally:
        if limiter is not None:
            limiter.unregister()


if __name__ == "__main__":
    sys.exit(main())
