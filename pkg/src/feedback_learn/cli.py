"""Experiment command line.

One experiment per invocation, no interactivity: runs write full-precision
CSV metrics plus a JSON summary that echoes the fully resolved
configuration, so every run is reconstructible. Identical config and seed
reproduce output files bitwise (the JSON wall_time_sec field is the one
documented exception).

Configuration precedence: built-in defaults, then --config file (flat
``key = value`` lines, '#' comments, unknown keys rejected), then explicit
flags. The seed falls back to the FEEDBACK_LEARN_SEED environment variable
when not given by flag or file.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from pathlib import Path

from . import deep, trainer
from .activations import Activation, ActivationKind, activation_tag, parse_activation
from .data import (
    LabelEncoding,
    RawDataset,
    load_idx_images,
    load_idx_labels,
    make_staircase_dataset,
    prepare,
    subset,
)
from .backend import backend_name
from .errors import FeedbackLearnError, NonFiniteError, UnsupportedPolicyError
from .feedback import FeedbackConfig, run_feedback_loop
from .matrix import Matrix
from .policies import SignPolicy, parse_policy, policy_tag
from .trainer import SingleLayerModel, TrainConfig

SEED_ENV_VAR = "FEEDBACK_LEARN_SEED"


class CliError(Exception):
    """Bad usage or configuration; maps to exit code 2."""


def _parse_bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"cannot parse boolean {text!r}")


def _parse_hidden(text: str) -> list[int]:
    dims = [int(part) for part in str(text).split(",") if part.strip()]
    if not dims or any(d < 1 for d in dims):
        raise ValueError(f"bad hidden layer list {text!r}")
    return dims


# Per-command field registries: name -> (parser, default). A None default
# with no env fallback means the field is required.
_COMMON = {
    "seed": (int, None),
    "out": (str, None),
    "config": (str, None),
}


def _load_config_file(path: str, fields: dict) -> dict:
    values = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise CliError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
        key, _, value = stripped.partition("=")
        key = key.strip().replace("-", "_")
        if key not in fields:
            raise CliError(f"{path}:{lineno}: unknown key {key!r}")
        parse = fields[key][0]
        try:
            values[key] = parse(value.strip())
        except (ValueError, TypeError) as exc:
            raise CliError(f"{path}:{lineno}: bad value for {key}: {exc}") from exc
    return values


def _resolve(args: argparse.Namespace, fields: dict, default_out: str) -> dict:
    resolved = {name: default for name, (_, default) in fields.items()}
    if getattr(args, "config", None):
        resolved.update(_load_config_file(args.config, fields))
    for name in fields:
        value = getattr(args, name, None)
        if value is not None:
            resolved[name] = value
    if resolved.get("seed") is None:
        env = os.environ.get(SEED_ENV_VAR)
        if env is not None:
            try:
                resolved["seed"] = int(env)
            except ValueError as exc:
                raise CliError(f"bad {SEED_ENV_VAR} value {env!r}") from exc
        else:
            resolved["seed"] = 0
    if resolved.get("out") is None:
        resolved["out"] = default_out
    resolved.pop("config", None)
    return resolved


def _outdir(resolved: dict) -> Path:
    out = Path(resolved["out"])
    out.mkdir(parents=True, exist_ok=True)
    return out


def _echo(value):
    if isinstance(value, Activation):
        return activation_tag(value)
    if isinstance(value, SignPolicy):
        return policy_tag(value)
    if isinstance(value, list):
        return [_echo(v) for v in value]
    return value


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(repr(v) if isinstance(v, float) else str(v) for v in row))
    path.write_text("\n".join(lines) + "\n")


def _write_summary(path: Path, experiment: str, resolved: dict, results: dict) -> None:
    payload = {
        "experiment": experiment,
        "backend": backend_name(),
        "config": {k: _echo(v) for k, v in sorted(resolved.items())},
        "results": results,
    }
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


# ---------------------------------------------------------------------------
# invert

_INVERT_FIELDS = {
    **_COMMON,
    "fn": (str, "identity"),
    "input": (float, None),
    "gain": (float, 100.0),
    "rate": (float, 0.002),
    "iters": (int, 20000),
    "tolerance": (float, 1e-9),
    "backward_sign": (int, 1),
}

_BACKWARD_FNS = {
    "identity": lambda v: v,
    "tanh": math.tanh,
    # x^2 restricted to the non-negative half line (clamped below), so it
    # stays monotone non-decreasing everywhere the loop can wander.
    "square-positive-domain": lambda v: max(v, 0.0) ** 2,
}


def cmd_invert(args: argparse.Namespace) -> int:
    resolved = _resolve(args, _INVERT_FIELDS, "runs/invert")
    if resolved["input"] is None:
        raise CliError("invert needs --input VALUE")
    fn_name = resolved["fn"]
    if fn_name not in _BACKWARD_FNS:
        raise CliError(
            f"unknown backward function {fn_name!r}; pick one of {sorted(_BACKWARD_FNS)}"
        )
    if fn_name == "tanh" and not abs(resolved["input"]) < 1.0:
        raise CliError("tanh only takes values in (-1, 1); pick |input| < 1")
    if resolved["backward_sign"] not in (-1, 1):
        raise CliError("--backward-sign must be 1 or -1")
    try:
        cfg = FeedbackConfig(
            forward_gain=resolved["gain"],
            rate=resolved["rate"],
            max_iters=resolved["iters"],
            tolerance=resolved["tolerance"],
        )
    except ValueError as exc:
        raise CliError(str(exc)) from exc

    out = _outdir(resolved)
    started = time.perf_counter()
    try:
        x_output, trace = run_feedback_loop(
            _BACKWARD_FNS[fn_name], resolved["backward_sign"], resolved["input"], cfg
        )
    except NonFiniteError as exc:
        print(f"error: {exc}", file=sys.stderr)
        print(
            "stability requires forward_gain x backward_gain > 0: flip the "
            "backward sign or reduce the rate",
            file=sys.stderr,
        )
        return 1
    wall = time.perf_counter() - started

    _write_csv(
        out / "invert_trace.csv",
        ["iteration", "x_output", "residual"],
        [[i, x, r] for i, x, r in trace.iterates],
    )
    _write_summary(
        out / "invert_summary.json",
        "invert",
        resolved,
        {
            "x_output": x_output,
            "residual": trace.final_residual,
            "iterations": trace.iterations,
            "converged": trace.converged,
            "wall_time_sec": wall,
        },
    )
    print(f"x_output = {x_output!r}")
    print(f"residual = {trace.final_residual!r}")
    print(f"iterations = {trace.iterations} (converged: {trace.converged})")
    return 0


# ---------------------------------------------------------------------------
# staircase-demo

_STAIRCASE_FIELDS = {
    **_COMMON,
    "samples": (int, 200),
    "w_true": (float, 2.0),
    "x_min": (float, -5.0),
    "x_max": (float, 5.0),
    "step_width": (float, 1.0),
    "step_height": (float, 1.0),
    "gain": (float, 100.0),
    "rate": (float, 1e-5),
    "iters": (int, 2000),
    "sgd_rate": (float, 0.01),
    "normalize_error": (_parse_bool, False),
}


def cmd_staircase(args: argparse.Namespace) -> int:
    resolved = _resolve(args, _STAIRCASE_FIELDS, "runs/staircase-demo")
    act = Activation.staircase(resolved["step_width"], resolved["step_height"])
    x_block, y_block = make_staircase_dataset(
        resolved["samples"],
        resolved["w_true"],
        act,
        (resolved["x_min"], resolved["x_max"]),
        resolved["seed"],
    )
    init = trainer.init_weights(2, 1, resolved["seed"])
    fb_model = SingleLayerModel(weights=init.copy(), activation=act)
    sgd_model = SingleLayerModel(weights=init.copy(), activation=act)
    initial_mse = trainer.forward_predict(fb_model, x_block).mean_sq_diff(y_block)

    out = _outdir(resolved)
    started = time.perf_counter()
    try:
        cfg = TrainConfig(
            forward_gain=resolved["gain"],
            rate=resolved["rate"],
            max_iters=resolved["iters"],
            policy=SignPolicy.sign_only(),
            seed=resolved["seed"],
            normalize_error_by_batch=resolved["normalize_error"],
        )
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    _, fb_trace = trainer.fit(fb_model, x_block, y_block, cfg)
    _, sgd_trace = trainer.fit_gd(
        sgd_model, x_block, y_block, resolved["sgd_rate"], resolved["iters"]
    )
    wall = time.perf_counter() - started

    rows = [[0, initial_mse, initial_mse]]
    for (it, fb_mse, _), (_, sgd_mse, _) in zip(fb_trace.records, sgd_trace.records):
        rows.append([it, fb_mse, sgd_mse])
    _write_csv(out / "staircase_errors.csv", ["iteration", "feedback_mse", "sgd_mse"], rows)

    fb_final = fb_trace.final_mse if fb_trace.records else initial_mse
    sgd_final = sgd_trace.final_mse if sgd_trace.records else initial_mse
    _write_summary(
        out / "staircase_summary.json",
        "staircase-demo",
        resolved,
        {
            "initial_mse": initial_mse,
            "feedback_final_mse": fb_final,
            "sgd_final_mse": sgd_final,
            "feedback_reduction": 0.0 if initial_mse == 0.0 else 1.0 - fb_final / initial_mse,
            "wall_time_sec": wall,
        },
    )
    print(f"initial mse  = {initial_mse!r}")
    print(f"feedback mse = {fb_final!r}")
    print(f"sgd mse      = {sgd_final!r}")
    return 0


# ---------------------------------------------------------------------------
# mnist

_MNIST_FIELDS = {
    **_COMMON,
    "data_dir": (str, None),
    "train_images": (str, None),
    "train_labels": (str, None),
    "test_images": (str, None),
    "test_labels": (str, None),
    "hidden": (_parse_hidden, [100, 100]),
    "classes": (int, 10),
    "epochs": (int, 10),
    "batch": (int, 64),
    "gain": (float, 100.0),
    "rate": (float, 0.01),
    "policy": (parse_policy, SignPolicy.magnitude_weighted()),
    "activation": (parse_activation, Activation.leaky_relu(0.01)),
    "output_activation": (parse_activation, Activation.softmax()),
    "eta_plus": (float, 1.2),
    "eta_minus": (float, 0.5),
    "rate_min": (float, 1e-6),
    "rate_max": (float, 0.1),
    "adapt": (_parse_bool, True),
    "subset": (int, None),
    "normalize_error": (_parse_bool, False),
}

_MNIST_DEFAULT_NAMES = {
    "train_images": "train-images-idx3-ubyte",
    "train_labels": "train-labels-idx1-ubyte",
    "test_images": "t10k-images-idx3-ubyte",
    "test_labels": "t10k-labels-idx1-ubyte",
}


def _mnist_paths(resolved: dict) -> dict:
    paths = {}
    for key, default_name in _MNIST_DEFAULT_NAMES.items():
        if resolved[key]:
            paths[key] = Path(resolved[key])
        elif resolved["data_dir"]:
            paths[key] = Path(resolved["data_dir"]) / default_name
        else:
            raise CliError(f"missing --{key.replace('_', '-')} (or --data-dir)")
    return paths


def cmd_mnist(args: argparse.Namespace) -> int:
    resolved = _resolve(args, _MNIST_FIELDS, "runs/mnist")
    paths = _mnist_paths(resolved)
    out_act = resolved["output_activation"]
    if out_act.kind not in (ActivationKind.SOFTMAX, ActivationKind.TANH):
        raise CliError("output activation must be softmax or tanh")
    encoding = (
        LabelEncoding.ZERO_ONE
        if out_act.kind is ActivationKind.SOFTMAX
        else LabelEncoding.PLUS_MINUS_ONE
    )

    started = time.perf_counter()
    try:
        train_raw = RawDataset(
            load_idx_images(paths["train_images"]), load_idx_labels(paths["train_labels"])
        )
        test_raw = RawDataset(
            load_idx_images(paths["test_images"]), load_idx_labels(paths["test_labels"])
        )
    except OSError as exc:
        print(f"error: cannot read dataset: {exc}", file=sys.stderr)
        return 1
    except FeedbackLearnError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    train = prepare(train_raw, encoding, num_classes=resolved["classes"])
    test = prepare(
        test_raw, encoding, feature_mean=train.feature_mean, num_classes=resolved["classes"]
    )
    if resolved["subset"]:
        train = subset(train, resolved["subset"])

    n_features = train.x_block.rows - 1
    dims = [n_features] + resolved["hidden"] + [resolved["classes"]]
    specs = [
        deep.LayerSpec(dims[i], dims[i + 1], resolved["activation"])
        for i in range(len(dims) - 2)
    ]
    specs.append(deep.LayerSpec(dims[-2], dims[-1], out_act))
    model = deep.build_model(specs, resolved["seed"], resolved["rate"])
    try:
        cfg = deep.DeepTrainConfig(
            forward_gain=resolved["gain"],
            rate=resolved["rate"],
            policy=resolved["policy"],
            eta_plus=resolved["eta_plus"],
            eta_minus=resolved["eta_minus"],
            rate_min=resolved["rate_min"],
            rate_max=resolved["rate_max"],
            adapt_rates=resolved["adapt"],
            normalize_error_by_batch=resolved["normalize_error"],
            seed=resolved["seed"],
        )
    except ValueError as exc:
        raise CliError(str(exc)) from exc

    out = _outdir(resolved)
    records = deep.fit_deep(
        model,
        train.x_block,
        train.y_block,
        cfg,
        epochs=resolved["epochs"],
        batch_size=resolved["batch"],
        x_test=test.x_block,
        y_test=test.y_block,
    )
    wall = time.perf_counter() - started

    _write_csv(
        out / "mnist_epochs.csv",
        ["epoch", "train_acc", "test_acc", "mean_sq_diff"],
        [[r.epoch, r.train_accuracy, r.test_accuracy, r.train_mse] for r in records],
    )
    deep.save_checkpoint(model, out / "mnist_model.ckpt")
    final = records[-1] if records else None
    _write_summary(
        out / "mnist_summary.json",
        "mnist",
        resolved,
        {
            "train_accuracy": final.train_accuracy if final else None,
            "test_accuracy": final.test_accuracy if final else None,
            "epochs_run": len(records),
            "train_samples": train.x_block.cols,
            "test_samples": test.x_block.cols,
            "checkpoint": "mnist_model.ckpt",
            "wall_time_sec": wall,
        },
    )
    if final:
        print(f"train accuracy = {final.train_accuracy!r}")
        print(f"test accuracy  = {final.test_accuracy!r}")
    print(f"wall time = {wall:.1f}s")
    return 0


# ---------------------------------------------------------------------------
# compare-gd

_COMPARE_FIELDS = {
    **_COMMON,
    "activation": (parse_activation, Activation.identity()),
    "n_vars": (int, 8),
    "samples": (int, 50),
    "classes": (int, 1),
}

_COMPARE_THRESHOLD = 1e-8


def cmd_compare_gd(args: argparse.Namespace) -> int:
    resolved = _resolve(args, _COMPARE_FIELDS, "runs/compare-gd")
    act = resolved["activation"]
    if act.kind in (ActivationKind.STAIRCASE, ActivationKind.SOFTMAX):
        raise CliError(
            f"{activation_tag(act)} is not supported here: the comparison needs "
            "a differentiable elementwise activation (identity, tanh, leaky-relu)"
        )
    import random as _random

    rng = _random.Random(f"compare-gd:{resolved['seed']}")
    n, m, c = resolved["n_vars"], resolved["samples"], resolved["classes"]
    x_block = Matrix(n, m, [rng.uniform(-1.0, 1.0) for _ in range(n * m)]).with_bias_row()
    weights = Matrix(n + 1, c, [rng.uniform(-1.0, 1.0) for _ in range((n + 1) * c)])
    model = SingleLayerModel(weights=weights, activation=act)
    y_pred = trainer.forward_predict(model, x_block)
    y_target = Matrix(c, m, [rng.uniform(-1.0, 1.0) for _ in range(c * m)])

    e_beta = trainer.compute_error_matrix(
        x_block, y_target, y_pred, SignPolicy.raw_beta(), act
    )
    scaled_gd = trainer.gd_baseline_error(x_block, y_target, y_pred, act).scale(m / 2.0)

    worst = 0.0
    for a, b in zip(e_beta.data, scaled_gd.data):
        denom = max(abs(a), abs(b))
        if denom > 0.0:
            worst = max(worst, abs(a - b) / denom)
        elif a != b:  # pragma: no cover
            worst = math.inf

    out = _outdir(resolved)
    passed = worst <= _COMPARE_THRESHOLD
    _write_summary(
        out / "compare_gd_summary.json",
        "compare-gd",
        resolved,
        {
            "max_relative_discrepancy": worst,
            "threshold": _COMPARE_THRESHOLD,
            "passed": passed,
        },
    )
    print(f"max relative entrywise discrepancy = {worst!r}")
    print(f"threshold = {_COMPARE_THRESHOLD!r} -> {'PASS' if passed else 'FAIL'}")
    return 0 if passed else 1


# ---------------------------------------------------------------------------
# regress

_REGRESS_FIELDS = {
    **_COMMON,
    "n_vars": (int, 1),
    "samples": (int, 200),
    "activation": (parse_activation, Activation.identity()),
    # With the unnormalized (summed) error the bias row's loop gain is
    # forward_gain * samples, so the stable rate scales like 1/(gain*samples).
    "policy": (parse_policy, SignPolicy.raw_beta()),
    "gain": (float, 100.0),
    "rate": (float, 2e-5),
    "iters": (int, 2000),
    "batch": (int, None),
    "normalize_error": (_parse_bool, False),
}


def cmd_regress(args: argparse.Namespace) -> int:
    resolved = _resolve(args, _REGRESS_FIELDS, "runs/regress")
    import random as _random

    rng = _random.Random(f"regress:{resolved['seed']}")
    n, m = resolved["n_vars"], resolved["samples"]
    act = resolved["activation"]
    x_block = Matrix(n, m, [rng.uniform(-1.0, 1.0) for _ in range(n * m)]).with_bias_row()
    true_weights = Matrix(n + 1, 1, [rng.uniform(-2.0, 2.0) for _ in range(n)] + [0.0])
    y_block = trainer.forward_predict(
        SingleLayerModel(weights=true_weights, activation=act), x_block
    )

    model = SingleLayerModel(
        weights=trainer.init_weights(n + 1, 1, resolved["seed"]), activation=act
    )
    try:
        cfg = TrainConfig(
            forward_gain=resolved["gain"],
            rate=resolved["rate"],
            max_iters=resolved["iters"],
            batch_size=resolved["batch"],
            policy=resolved["policy"],
            seed=resolved["seed"],
            normalize_error_by_batch=resolved["normalize_error"],
        )
    except ValueError as exc:
        raise CliError(str(exc)) from exc

    out = _outdir(resolved)
    started = time.perf_counter()
    _, trace = trainer.fit(model, x_block, y_block, cfg)
    wall = time.perf_counter() - started

    _write_csv(
        out / "regress_metrics.csv",
        ["iteration", "mse"],
        [[it, mse] for it, mse, _ in trace.records],
    )
    final_mse = trace.final_mse if trace.records else None
    _write_summary(
        out / "regress_summary.json",
        "regress",
        resolved,
        {
            "final_mse": final_mse,
            "learned_weights": [w for row in model.weights.to_rows() for w in row],
            "true_weights": [w for row in true_weights.to_rows() for w in row],
            "wall_time_sec": wall,
        },
    )
    print(f"final mse = {final_mse!r}")
    return 0


# ---------------------------------------------------------------------------
# argument wiring

def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat key = value config file")
    p.add_argument("--seed", type=int, help=f"RNG seed (falls back to ${SEED_ENV_VAR})")
    p.add_argument("--out", help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="feedback-learn",
        description="negative-feedback training experiments",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("invert", help="invert a function with the feedback loop")
    _add_common(p)
    p.add_argument("--fn", choices=sorted(_BACKWARD_FNS), help="backward function")
    p.add_argument("--input", type=float, help="loop input value")
    p.add_argument("--gain", type=float, help="forward gain (must be positive)")
    p.add_argument("--rate", type=float, help="relaxation rate in (0, 1]")
    p.add_argument("--iters", type=int, help="iteration budget")
    p.add_argument("--tolerance", type=float, help="residual stopping threshold")
    p.add_argument("--backward-sign", dest="backward_sign", type=int, choices=(-1, 1))
    p.set_defaults(func=cmd_invert)

    p = sub.add_parser(
        "staircase-demo",
        help="learn a zero-gradient staircase: feedback vs gradient descent",
    )
    _add_common(p)
    p.add_argument("--samples", type=int)
    p.add_argument("--w-true", dest="w_true", type=float)
    p.add_argument("--x-min", dest="x_min", type=float)
    p.add_argument("--x-max", dest="x_max", type=float)
    p.add_argument("--step-width", dest="step_width", type=float)
    p.add_argument("--step-height", dest="step_height", type=float)
    p.add_argument("--gain", type=float)
    p.add_argument("--rate", type=float)
    p.add_argument("--iters", type=int)
    p.add_argument("--sgd-rate", dest="sgd_rate", type=float)
    p.add_argument("--normalize-error", dest="normalize_error", action="store_const", const=True)
    p.set_defaults(func=cmd_staircase)

    p = sub.add_parser("mnist", help="train the deep classifier on MNIST IDX files")
    _add_common(p)
    p.add_argument("--data-dir", dest="data_dir", help="directory with the four IDX files")
    p.add_argument("--train-images", dest="train_images")
    p.add_argument("--train-labels", dest="train_labels")
    p.add_argument("--test-images", dest="test_images")
    p.add_argument("--test-labels", dest="test_labels")
    p.add_argument("--hidden", type=_parse_hidden, help="comma-separated hidden sizes")
    p.add_argument("--classes", type=int)
    p.add_argument("--epochs", type=int)
    p.add_argument("--batch", type=int)
    p.add_argument("--gain", type=float)
    p.add_argument("--rate", type=float, help="initial per-weight rate")
    p.add_argument("--policy", type=parse_policy)
    p.add_argument("--activation", type=parse_activation, help="hidden activation")
    p.add_argument(
        "--output-activation", dest="output_activation", type=parse_activation,
        help="softmax (default) or tanh",
    )
    p.add_argument("--eta-plus", dest="eta_plus", type=float)
    p.add_argument("--eta-minus", dest="eta_minus", type=float)
    p.add_argument("--rate-min", dest="rate_min", type=float)
    p.add_argument("--rate-max", dest="rate_max", type=float)
    p.add_argument("--no-adapt", dest="adapt", action="store_const", const=False)
    p.add_argument("--subset", type=int, help="train on the first N samples only")
    p.add_argument("--normalize-error", dest="normalize_error", action="store_const", const=True)
    p.set_defaults(func=cmd_mnist)

    p = sub.add_parser(
        "compare-gd", help="check the gradient-descent special case numerically"
    )
    _add_common(p)
    p.add_argument("--activation", type=parse_activation)
    p.add_argument("--n-vars", dest="n_vars", type=int)
    p.add_argument("--samples", type=int)
    p.add_argument("--classes", type=int)
    p.set_defaults(func=cmd_compare_gd)

    p = sub.add_parser("regress", help="fit synthetic single/multi-variable regression")
    _add_common(p)
    p.add_argument("--n-vars", dest="n_vars", type=int)
    p.add_argument("--samples", type=int)
    p.add_argument("--activation", type=parse_activation)
    p.add_argument("--policy", type=parse_policy)
    p.add_argument("--gain", type=float)
    p.add_argument("--rate", type=float)
    p.add_argument("--iters", type=int)
    p.add_argument("--batch", type=int)
    p.add_argument("--normalize-error", dest="normalize_error", action="store_const", const=True)
    p.set_defaults(func=cmd_regress)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except UnsupportedPolicyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NonFiniteError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FeedbackLearnError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
