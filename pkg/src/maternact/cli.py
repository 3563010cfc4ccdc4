"""Command-line entry point wiring the library into the desk-scale
experiments. Every subcommand writes plain CSV/JSON artifacts plus a
provenance.json with the full configuration, and reruns with identical
configuration reproduce identical bytes.

Exit codes: 0 success, 2 configuration, 3 I/O, 4 numerics, 5 training.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__, metrics, nn
from .activations import ACTIVATION_NAMES, MaternActivation, activation_from_name
from .data import CsvLoadError, TabularEncoder, gen_banana_like, gen_regression_1d, kfold, read_table
from .estimators import MLPClassifier, MLPRegressor
from .gp import GPRegressor, NumericalError
from .kernels import (
    EnvelopeParams,
    MaternKernel,
    MaternParams,
    MatNNKernel,
    RBFKernel,
    gram_matrix,
    save_gram_csv,
)
from .mc_kernel import BiasPrior, BinaryWhite, GaussianWeights, RandomFeatureConfig, kernel_curve
from .rbf_eigen import EigenParams, eigenfunction_matrix, eigenvalues
from .serialize import write_csv_columns, write_json

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_NUMERIC = 4
EXIT_TRAINING = 5


def _decay_list(text: str) -> tuple[int, ...]:
    text = text.strip()
    if not text:
        return ()
    try:
        return tuple(int(tok) for tok in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"cannot parse epoch list {text!r}") from None


def _effective_decays(args) -> tuple[int, ...]:
    # decay milestones past the training horizon are ignored
    return tuple(e for e in args.lr_decay_epochs if e <= args.epochs)


def _out_dir(args) -> Path:
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _provenance(args, command: str) -> dict:
    cfg = {}
    for key, value in vars(args).items():
        if key == "func":
            continue
        if isinstance(value, Path):
            value = str(value)
        if isinstance(value, tuple):
            value = list(value)
        cfg[key] = value
    return {"artifact_version": __version__, "command": command, "config": cfg}


def _write_provenance(out: Path, args, command: str) -> None:
    write_json(out / "provenance.json", _provenance(args, command))


def _matern_activation_grid(lo: float, hi: float, points: int) -> np.ndarray:
    if points < 2:
        raise ValueError("need at least 2 grid points")
    if not lo < hi:
        raise ValueError(f"grid range must satisfy min < max, got ({lo}, {hi})")
    grid = np.linspace(lo, hi, points)
    # when the intended grid contains 0, kill the ~1e-16 linspace artifact so
    # step-at-zero conventions (activation dumps) land on the exact point
    grid[np.abs(grid) < 1e-12 * (hi - lo)] = 0.0
    return grid


def cmd_kernel_check(args) -> None:
    out = _out_dir(args)
    act = MaternActivation(args.nu, args.ell)
    grid_x = _matern_activation_grid(args.grid_min, args.grid_max, args.grid_points)
    grid = [np.array([v]) for v in grid_x]
    x_ref = np.array([0.0])

    calib_cfg = RandomFeatureConfig(
        BinaryWhite(), BiasPrior(args.sigma_b2), args.calib_K, (args.seed, 101)
    )
    scale = float(np.atleast_1d(kernel_curve(calib_cfg, act, x_ref, [x_ref]))[0])
    exact_kernel = MatNNKernel(
        MaternParams(args.nu, args.ell), EnvelopeParams(args.sigma_b2, args.ell), scale
    )
    exact = np.array([exact_kernel(x_ref, g) for g in grid])

    curves = {}
    for name, prior, tag in (
        ("mc_binary", BinaryWhite(), 102),
        ("mc_gaussian", GaussianWeights(1.0), 103),
    ):
        cfg = RandomFeatureConfig(prior, BiasPrior(args.sigma_b2), args.K, (args.seed, tag))
        curves[name] = kernel_curve(cfg, act, x_ref, grid)

    write_csv_columns(
        out / "kernel_check.csv",
        ["x", "exact", "mc_binary", "mc_gaussian"],
        [grid_x, exact, curves["mc_binary"], curves["mc_gaussian"]],
    )

    mask = exact > 0.05
    summary = {"scale": scale, "n_compared": int(mask.sum())}
    for name, mc in curves.items():
        dev = np.abs(mc[mask] - exact[mask])
        summary[name] = {
            "max_rel_dev_scale": float(np.max(dev) / scale) if mask.any() else None,
            "max_rel_dev_pointwise": float(np.max(dev / exact[mask])) if mask.any() else None,
        }
    write_json(out / "summary.json", summary)
    _write_provenance(out, args, "kernel-check")


def cmd_regress_1d(args) -> None:
    out = _out_dir(args)
    dataset = gen_regression_1d(args.seed)
    grid = np.linspace(-2.5, 2.5, args.grid_points)[:, None]

    gp = GPRegressor(
        kernel=MaternKernel(MaternParams(args.gp_nu, args.gp_ell)), noise_var=args.noise_var
    ).fit(dataset.X, dataset.y)
    gp_mean, gp_std = gp.predict(grid, return_std=True)
    write_csv_columns(out / "gp_curve.csv", ["x", "mean", "std"], [grid[:, 0], gp_mean, gp_std])

    sum_mean = np.zeros(grid.shape[0])
    sum_std = np.zeros(grid.shape[0])
    diverged = 0
    completed = 0
    for rep in range(args.repeats):
        mlp = MLPRegressor(
            hidden_layer_sizes=(args.hidden,),
            activation=args.activation,
            ell=args.ell,
            dropout=args.dropout,
            epochs=args.epochs,
            batch_size=args.batch_size,
            learning_rate=args.lr,
            lr_decay_epochs=_effective_decays(args),
            lr_decay_factor=args.lr_decay_factor,
            seed=(args.seed, rep),
        )
        try:
            mlp.fit(dataset.X, dataset.y)
        except nn.TrainingDivergedError:
            diverged += 1
            continue
        mean, std = mlp.mc_predict(grid, n_samples=args.mc_samples, seed=(args.seed, rep))
        sum_mean += mean
        sum_std += std
        completed += 1
    if completed == 0:
        raise nn.TrainingDivergedError(0, f"all {args.repeats} repeats diverged")
    write_csv_columns(
        out / "mlp_curve.csv",
        ["x", "mean", "std"],
        [grid[:, 0], sum_mean / completed, sum_std / completed],
    )
    write_json(
        out / "summary.json",
        {"repeats": args.repeats, "completed": completed, "diverged": diverged},
    )
    _write_provenance(out, args, "regress-1d")


def _stream_probs(net, X, n_samples: int, seed, reduction: str) -> np.ndarray:
    """Dropout-averaged class probabilities without retaining all samples."""
    acc = None
    for s in range(n_samples):
        outputs = nn.forward(net, X, nn.McSample(seed=(*nn._seed_tuple(seed), s)))
        term = nn.softmax(outputs) if reduction == nn.MEAN_OF_SOFTMAX else outputs
        acc = term if acc is None else acc + term
    acc /= n_samples
    return acc if reduction == nn.MEAN_OF_SOFTMAX else nn.softmax(acc)


def cmd_classify_2d(args) -> None:
    out = _out_dir(args)
    if args.data is not None:
        if args.schema is None:
            raise ValueError("--data requires --schema")
        train_ds = _load_tabular(args.data, args.schema)
        heldout = None
    else:
        train_ds = gen_banana_like(args.seed)
        heldout = gen_banana_like((args.seed, 1))
    if np.unique(train_ds.y).size != 2:
        raise ValueError("classify-2d expects a two-class dataset")
    if train_ds.X.shape[1] != 2:
        raise ValueError("classify-2d expects two input features")

    clf = MLPClassifier(
        hidden_layer_sizes=(args.hidden,),
        activation=args.activation,
        ell=args.ell,
        dropout=args.dropout,
        epochs=args.epochs,
        batch_size=args.batch_size,
        learning_rate=args.lr,
        lr_decay_epochs=_effective_decays(args),
        lr_decay_factor=args.lr_decay_factor,
        seed=args.seed,
    )
    clf.fit(train_ds.X, train_ds.y)

    g = np.linspace(-args.grid_range, args.grid_range, args.grid_size)
    gx, gy = np.meshgrid(g, g)
    grid = np.stack([gx.ravel(), gy.ravel()], axis=1)
    probs = _stream_probs(clf.network_, grid, args.mc_samples, (args.seed, 7), args.reduction)
    p1 = probs[:, 1]
    bern = np.sqrt(np.clip(p1 * (1.0 - p1), 0.0, None))
    write_csv_columns(
        out / "grid.csv",
        ["x1", "x2", "p_class1", "bernoulli_std"],
        [grid[:, 0], grid[:, 1], p1, bern],
    )

    probs_train = _stream_probs(
        clf.network_, train_ds.X, args.mc_samples, (args.seed, 7), args.reduction
    )
    bern_train = np.sqrt(np.clip(probs_train[:, 1] * (1.0 - probs_train[:, 1]), 0.0, None))
    far = np.linalg.norm(grid, axis=1) > args.far_radius
    summary = {
        "train_accuracy": float(np.mean(clf.predict(train_ds.X) == train_ds.y)),
        "mean_bernoulli_far": float(bern[far].mean()) if far.any() else None,
        "mean_bernoulli_train_locations": float(bern_train.mean()),
        "ood_bernoulli_ratio": float(bern[far].mean() / bern_train.mean()) if far.any() else None,
        "far_radius": args.far_radius,
    }
    if heldout is not None:
        summary["held_out_accuracy"] = float(np.mean(clf.predict(heldout.X) == heldout.y))
    write_json(out / "summary.json", summary)
    _write_provenance(out, args, "classify-2d")


def _load_schema(path) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        schema = json.load(fh)
    if not isinstance(schema, dict):
        raise CsvLoadError(f"{path}: schema must be a JSON object of column -> role")
    return schema


def _load_tabular(data_path, schema_path):
    from .data import load_csv

    return load_csv(data_path, _load_schema(schema_path))


def cmd_tabular(args) -> None:
    out = _out_dir(args)
    if args.data is None or args.schema is None:
        raise ValueError("tabular requires --data and --schema")
    schema = _load_schema(args.schema)
    header, rows, dropped = read_table(args.data)
    labels_probe = TabularEncoder(schema).fit((header, rows))
    if len(labels_probe.label_classes_) < 2:
        raise ValueError(
            f"label column must contain at least two classes, got {labels_probe.label_classes_}"
        )

    folds = kfold(len(rows), args.folds, args.seed)
    fold_reports = []
    for fi, (train_idx, test_idx) in enumerate(folds):
        train_rows = [rows[i] for i in train_idx]
        test_rows = [rows[i] for i in test_idx]
        encoder = TabularEncoder(schema).fit((header, train_rows))
        X_train, y_train = encoder.transform((header, train_rows))
        X_test, y_test = encoder.transform((header, test_rows))
        clf = MLPClassifier(
            hidden_layer_sizes=args.hidden_sizes,
            activation=args.activation,
            early_activation=args.early_activation,
            ell=args.ell,
            dropout=args.dropout,
            epochs=args.epochs,
            batch_size=args.batch_size,
            learning_rate=args.lr,
            lr_decay_epochs=_effective_decays(args),
            lr_decay_factor=args.lr_decay_factor,
            seed=(args.seed, fi),
        )
        clf.fit(X_train, y_train)
        probs = clf.mc_predict_proba(
            X_test, n_samples=args.mc_samples, seed=(args.seed, fi), reduction=args.reduction
        )
        fold_reports.append(metrics.classification_report(probs, y_test))

    def stat(name):
        vals = np.array([getattr(r, name) for r in fold_reports])
        return {"mean": float(vals.mean()), "std": float(vals.std())}

    report = {
        "n_rows": len(rows),
        "n_dropped_rows": dropped,
        "folds": [r.to_dict() for r in fold_reports],
        "accuracy": stat("accuracy"),
        "mean_nlpd": stat("mean_nlpd"),
        "mean_nlpd_mod": stat("mean_nlpd_mod"),
        "macro_auc": stat("macro_auc"),
    }
    write_json(out / "report.json", report)
    _write_provenance(out, args, "tabular")


def cmd_activation_dump(args) -> None:
    out = _out_dir(args)
    act = activation_from_name(args.activation, args.ell)
    x = _matern_activation_grid(args.x_min, args.x_max, args.points)
    write_csv_columns(
        out / "activation.csv", ["x", "sigma", "dsigma"], [x, act(x), act.grad(x)]
    )
    _write_provenance(out, args, "activation-dump")


def cmd_eigenbasis(args) -> None:
    out = _out_dir(args)
    params = EigenParams(args.alpha, args.beta)
    gammas = eigenvalues(params, args.n_values)
    write_csv_columns(
        out / "eigenvalues.csv", ["j", "gamma"], [np.arange(args.n_values), gammas]
    )
    x = _matern_activation_grid(args.x_min, args.x_max, args.points)
    phis = eigenfunction_matrix(params, args.n_functions, x)
    write_csv_columns(
        out / "eigenfunctions.csv",
        ["x"] + [f"phi_{j}" for j in range(args.n_functions)],
        [x] + [phis[j] for j in range(args.n_functions)],
    )
    _write_provenance(out, args, "eigenbasis")


def cmd_gram(args) -> None:
    out = _out_dir(args)
    params = MaternParams(args.nu, args.ell)
    if args.kernel == "matern":
        kern = MaternKernel(params)
    elif args.kernel == "rbf":
        kern = RBFKernel(args.ell)
    else:
        kern = MatNNKernel(params, EnvelopeParams(args.sigma_b2, args.ell))
    x = _matern_activation_grid(args.x_min, args.x_max, args.points)[:, None]
    save_gram_csv(gram_matrix(kern, x, args.jitter), out / "gram.csv")
    _write_provenance(out, args, "gram")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="maternact",
        description="Matern activation functions, network kernels, and "
        "MC-dropout uncertainty experiments",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, *, activation="matern52", ell=1.0, epochs=2000, batch=400, lr=0.02,
               decays="250,500,1000"):
        p.add_argument("--activation", choices=ACTIVATION_NAMES, default=activation)
        p.add_argument("--ell", type=float, default=ell, help="Matern length-scale")
        p.add_argument("--dropout", type=float, default=0.2)
        p.add_argument("--epochs", type=int, default=epochs)
        p.add_argument("--batch-size", type=int, default=batch)
        p.add_argument("--lr", type=float, default=lr)
        p.add_argument("--lr-decay-epochs", type=_decay_list, default=_decay_list(decays),
                       help="comma-separated decay milestones; entries past --epochs are ignored")
        p.add_argument("--lr-decay-factor", type=float, default=0.1)

    def out_seed(p):
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out-dir", required=True)

    p = sub.add_parser("kernel-check", help="MC network kernel vs the exact composite kernel")
    p.add_argument("--nu", type=float, default=1.5)
    p.add_argument("--ell", type=float, default=1.0)
    p.add_argument("--sigma-b2", type=float, default=1.0, help="bias-prior variance")
    p.add_argument("--K", type=int, default=10_000, help="hidden units in the MC estimate")
    p.add_argument("--calib-K", type=int, default=100_000, help="sample count for scale calibration")
    p.add_argument("--grid-min", type=float, default=-4.0)
    p.add_argument("--grid-max", type=float, default=4.0)
    p.add_argument("--grid-points", type=int, default=161)
    out_seed(p)
    p.set_defaults(func=cmd_kernel_check)

    p = sub.add_parser("regress-1d", help="1-d cluster regression: GP vs MC-dropout MLP")
    common(p, batch=200)
    p.add_argument("--hidden", type=int, default=50)
    p.add_argument("--repeats", type=int, default=20)
    p.add_argument("--mc-samples", type=int, default=1000)
    p.add_argument("--grid-points", type=int, default=100)
    p.add_argument("--gp-nu", type=float, default=2.5)
    p.add_argument("--gp-ell", type=float, default=1.0)
    p.add_argument("--noise-var", type=float, default=4e-4)
    out_seed(p)
    p.set_defaults(func=cmd_regress_1d)

    p = sub.add_parser("classify-2d", help="two-class 2-d task with an uncertainty grid")
    common(p, ell=0.5)
    p.add_argument("--hidden", type=int, default=50)
    p.add_argument("--mc-samples", type=int, default=5000)
    p.add_argument("--grid-size", type=int, default=300)
    p.add_argument("--grid-range", type=float, default=3.75)
    p.add_argument("--far-radius", type=float, default=3.2)
    p.add_argument("--reduction", choices=[nn.MEAN_OF_SOFTMAX, nn.SOFTMAX_OF_MEAN],
                   default=nn.MEAN_OF_SOFTMAX)
    p.add_argument("--data", default=None, help="optional CSV instead of the generator")
    p.add_argument("--schema", default=None, help="JSON schema for --data")
    out_seed(p)
    p.set_defaults(func=cmd_classify_2d)

    p = sub.add_parser("tabular", help="k-fold tabular classification with MC dropout")
    common(p, activation="matern32", ell=0.5, epochs=20, batch=500, lr=1e-4, decays="10,15")
    p.add_argument("--early-activation", choices=ACTIVATION_NAMES, default="relu")
    p.add_argument("--hidden-sizes", type=lambda s: tuple(int(t) for t in s.split(",")),
                   default=(1000, 1000, 500, 50))
    p.add_argument("--mc-samples", type=int, default=100)
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--reduction", choices=[nn.MEAN_OF_SOFTMAX, nn.SOFTMAX_OF_MEAN],
                   default=nn.MEAN_OF_SOFTMAX)
    p.add_argument("--data", required=True)
    p.add_argument("--schema", required=True)
    out_seed(p)
    p.set_defaults(func=cmd_tabular)

    p = sub.add_parser("activation-dump", help="activation and derivative on a grid")
    p.add_argument("--activation", choices=ACTIVATION_NAMES, default="matern52")
    p.add_argument("--ell", type=float, default=1.0)
    p.add_argument("--x-min", type=float, default=-2.0)
    p.add_argument("--x-max", type=float, default=4.0)
    p.add_argument("--points", type=int, default=601)
    out_seed(p)
    p.set_defaults(func=cmd_activation_dump)

    p = sub.add_parser("eigenbasis", help="RBF-operator eigenvalues and eigenfunctions")
    p.add_argument("--alpha", type=float, default=float(np.sqrt(2.0)))
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--n-values", type=int, default=20)
    p.add_argument("--n-functions", type=int, default=4)
    p.add_argument("--x-min", type=float, default=-3.0)
    p.add_argument("--x-max", type=float, default=3.0)
    p.add_argument("--points", type=int, default=201)
    out_seed(p)
    p.set_defaults(func=cmd_eigenbasis)

    p = sub.add_parser("gram", help="Gram matrix of a kernel over a 1-d grid")
    p.add_argument("--kernel", choices=["matern", "rbf", "matnn"], default="matnn")
    p.add_argument("--nu", type=float, default=1.5)
    p.add_argument("--ell", type=float, default=0.5)
    p.add_argument("--sigma-b2", type=float, default=1.0)
    p.add_argument("--jitter", type=float, default=0.0)
    p.add_argument("--x-min", type=float, default=-3.0)
    p.add_argument("--x-max", type=float, default=3.0)
    p.add_argument("--points", type=int, default=101)
    out_seed(p)
    p.set_defaults(func=cmd_gram)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except (CsvLoadError, OSError) as exc:
        print(f"maternact: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except nn.TrainingDivergedError as exc:
        print(f"maternact: training error: {exc}", file=sys.stderr)
        return EXIT_TRAINING
    except NumericalError as exc:
        print(f"maternact: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"maternact: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
