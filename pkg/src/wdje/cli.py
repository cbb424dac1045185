"""Command-line interface.

Subcommands wire the library into user workflows: ``wasserstein`` for raw
distances, ``bound``/``score`` for the risk bound and the decision,
``baseline`` for the analytical comparison metrics, ``synth`` and ``sweep``
for desk-scale experiments, ``consistency`` for confusion-matrix counts.

Exit codes: 0 success, 1 validation error, 2 runtime/numerical error.
Given identical flags, inputs and seeds, output bytes are identical.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .baselines import SourcePredictions, hscore, leep, logme, nce, pearson
from .bound import (
    BoundConfig,
    lipschitz_cross_entropy,
    lipschitz_mse,
    source_label_moment,
    target_risk_bound,
    target_risk_bound_unsupervised,
    unsupervised_moment,
)
from .errors import NumericalError, ValidationError
from .harness import (
    PipelineConfig,
    SweepGrid,
    SyntheticConfig,
    TrainConfig,
    dumps_csv,
    dumps_json,
    evaluate_sweep,
    gen_synthetic_pair,
    run_sweep,
    sweep_report,
)
from .measures import (
    CLASSIFICATION,
    REGRESSION,
    Dataset,
    LabelEncoding,
    ONE_HOT,
    RAW_SCALAR,
    empirical_measure,
    encode_labels,
    load_dataset,
    save_dataset,
    split_source_labels,
)
from .ot import ABSOLUTE, EUCLIDEAN, METRICS, OTConfig, wasserstein
from .score import ConfusionMatrix, consistency_index, wdje_score


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit 1 on bad flags, not argparse's default 2
        raise ValidationError(message)


def _add_command(subs, name, **kw):
    return subs.add_parser(
        name, formatter_class=argparse.ArgumentDefaultsHelpFormatter, **kw
    )


def _positive(name):
    def parse(text):
        value = float(text)
        if value <= 0:
            raise argparse.ArgumentTypeError(f"{name} must be > 0, got {text}")
        return value

    return parse


def _order_p(text):
    value = float(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"p must be >= 1, got {text}")
    return value


def _int_list(text):
    return tuple(int(v) for v in text.split(",") if v.strip() != "")


def _float_list(text):
    return tuple(float(v) for v in text.split(",") if v.strip() != "")


def _emit(text: str, output: str | None):
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_json(payload: dict, output: str | None):
    _emit(dumps_json(payload), output)


def _load_points(path, fmt):
    # every column is a coordinate; no label column is split off
    ds = load_dataset(path, format=fmt, task_kind=REGRESSION, label_column=None)
    return ds.features


def _load_labelled(path, fmt, task, label_path=None, class_count=None):
    if label_path is None:
        return load_dataset(path, format=fmt, task_kind=task,
                            label_column="label", class_count=class_count)
    feats = _load_points(path, fmt)
    labels = _load_points(label_path, fmt)[:, 0]
    return Dataset(feats, labels, task, class_count=class_count, name=str(path))


def _ot_config(args) -> OTConfig:
    return OTConfig(
        metric=args.metric,
        p=args.p,
        solver=args.solver,
        epsilon=args.epsilon,
        max_iter=args.max_iter,
        tol=args.tol,
    )


def _add_ot_flags(sub, default_metric=EUCLIDEAN):
    sub.add_argument("--metric", choices=METRICS, default=default_metric,
                     help="ground metric")
    sub.add_argument("--p", type=_order_p, default=1.0, help="transport order (>= 1)")
    sub.add_argument("--solver", choices=("exact", "sinkhorn", "auto"),
                     default="auto", help="transport solver")
    sub.add_argument("--epsilon", type=_positive("epsilon"), default=None,
                     help="Sinkhorn regularization; default 0.1 * mean cost")
    sub.add_argument("--max-iter", type=int, default=10_000,
                     help="Sinkhorn iteration cap")
    sub.add_argument("--tol", type=_positive("tol"), default=1e-8,
                     help="Sinkhorn marginal tolerance")


def _add_io_flags(sub):
    sub.add_argument("--output", default=None,
                     help="write result here instead of stdout")
    sub.add_argument("--input-format", choices=("csv", "binary"), default="csv",
                     help="input file format")


def _cmd_wasserstein(args) -> int:
    cfg = _ot_config(args)
    u = empirical_measure(_load_points(args.u, args.input_format))
    v = empirical_measure(_load_points(args.v, args.input_format))
    distance, plan = wasserstein(u, v, cfg)
    _emit_json(
        {
            "distance": distance,
            "objective": plan.objective,
            "solver": plan.solver,
            "iterations": plan.iterations,
            "converged": plan.converged,
            "config": {
                "metric": cfg.metric, "p": cfg.p, "solver": cfg.solver,
                "epsilon": cfg.epsilon, "max_iter": cfg.max_iter, "tol": cfg.tol,
            },
        },
        args.output,
    )
    return 0


def _cmd_bound(args) -> int:
    bound_cfg = BoundConfig(loss=args.loss, k_lambda_product=args.k_lambda,
                            M=args.M, p=args.p, K_weight_sup=args.K)
    ot_cfg = _ot_config(args)
    task = args.task
    source = _load_labelled(args.source_features, args.input_format, task,
                            args.source_labels)
    target = _load_labelled(args.target_features, args.input_format, task,
                            args.target_labels)
    if not source.has_labels:
        raise ValidationError("bound assembly requires source labels")
    if task == CLASSIFICATION:
        class_count = max(source.class_count or 2, target.class_count or 2)
        encoding = LabelEncoding(ONE_HOT, class_count)
    else:
        encoding = LabelEncoding(RAW_SCALAR)
    label_cfg = ot_cfg.with_(metric=EUCLIDEAN if task == CLASSIFICATION else ABSOLUTE)

    W_x, _ = wasserstein(empirical_measure(source.features),
                         empirical_measure(target.features), ot_cfg)

    n_t1 = args.n_t1
    if n_t1 is None:
        n_t1 = target.n_samples if target.has_labels else 0
    n_t1 = min(n_t1, source.n_samples)

    if task == CLASSIFICATION:
        k_est = lipschitz_cross_entropy(target.features,
                                        encoding.class_count)
    else:
        if not target.has_labels or n_t1 == 0:
            raise ValidationError("the MSE Lipschitz constant needs labelled target rows")
        k_est = lipschitz_mse(target.features[:n_t1], target.labels[:n_t1], args.K)

    if n_t1 == 0:
        full = empirical_measure(encode_labels(source.labels, encoding))
        moment = unsupervised_moment(full, bound_cfg.p)
        report = target_risk_bound_unsupervised(args.source_risk, W_x, moment,
                                                k_est.k, bound_cfg)
    else:
        if not target.has_labels:
            raise ValidationError(f"n_t1={n_t1} but the target has no labels")
        s1, s2 = split_source_labels(source, n_t1, encoding)
        tgt_labels = empirical_measure(encode_labels(target.labels[:n_t1], encoding))
        W_y, _ = wasserstein(s1, tgt_labels, label_cfg)
        moment = source_label_moment(s2, bound_cfg.p)
        report = target_risk_bound(args.source_risk, W_x, W_y, moment,
                                   k_est.k, bound_cfg)
    payload = report.to_dict()
    payload["W_x"] = W_x
    payload["n_t1"] = n_t1
    payload["config"] = {
        "loss": bound_cfg.loss, "k_lambda_product": bound_cfg.k_lambda_product,
        "M": bound_cfg.M, "p": bound_cfg.p, "K_weight_sup": bound_cfg.K_weight_sup,
        "metric": ot_cfg.metric, "solver": ot_cfg.solver,
    }
    _emit_json(payload, args.output)
    return 0


def _cmd_score(args) -> int:
    if args.bound_total is None and args.bound_report is None:
        raise ValidationError("provide --bound-total or --bound-report")
    if args.bound_total is not None:
        total = args.bound_total
    else:
        with open(args.bound_report, encoding="utf-8") as fh:
            total = float(json.load(fh)["total"])
    if total < 0:
        raise ValidationError("bound total must be >= 0")
    if args.risk_without < 0:
        raise ValidationError("risk-without must be >= 0")
    tr = total - args.risk_without
    _emit_json(
        {
            "bound_total": total,
            "risk_without": args.risk_without,
            "tr_score": tr,
            "decision": "transfer" if tr < 0 else "no_transfer",
        },
        args.output,
    )
    return 0


def _cmd_baseline(args) -> int:
    fmt = args.input_format
    if args.baseline_metric == "pearson":
        if args.a is None or args.b is None:
            raise ValidationError("pearson requires --a and --b")
        a = _load_points(args.a, fmt)[:, 0]
        b = _load_points(args.b, fmt)[:, 0]
        value = pearson(a, b)
    else:
        if args.target_features is None:
            raise ValidationError(
                f"{args.baseline_metric} requires --target-features"
            )
        target = _load_labelled(args.target_features, fmt, args.task,
                                args.target_labels)
        if not target.has_labels:
            raise ValidationError("baseline metrics require target labels")
        if args.baseline_metric == "logme":
            value = logme(target.features, target.labels, args.task)
        elif args.baseline_metric == "hscore":
            value = hscore(target.features, target.labels)
        else:
            if args.preds is None:
                raise ValidationError(f"{args.baseline_metric} requires --preds")
            preds = SourcePredictions(_load_points(args.preds, fmt))
            if args.baseline_metric == "leep":
                value = leep(preds, target.labels, target.class_count)
            else:
                value = nce(preds.pseudo_labels, target.labels)
    _emit_json({"metric": args.baseline_metric, "value": value}, args.output)
    return 0


def _cmd_consistency(args) -> int:
    counts = args.counts
    if len(counts) != 4 or any(c < 0 for c in counts):
        raise ValidationError("--counts wants four nonnegative integers: n_pp,n_pm,n_mp,n_mm")
    cm = ConfusionMatrix(*counts)
    ci = consistency_index(cm)
    _emit_json({"counts": cm.to_dict(), "ci": ci.to_dict()}, args.output)
    return 0


def _synth_config(args) -> SyntheticConfig:
    label_shift = None
    if args.label_shift is not None:
        if args.task == CLASSIFICATION:
            label_shift = _int_list(args.label_shift)
        else:
            label_shift = float(args.label_shift)
    return SyntheticConfig(
        task_kind=args.task,
        classes=args.classes,
        feature_dim=args.dim,
        samples_per_domain=args.samples,
        mean_shift=args.mean_shift,
        label_shift=label_shift,
        noise_sigma=args.noise_sigma,
        seed=args.seed,
    )


def _cmd_synth(args) -> int:
    source, target = gen_synthetic_pair(_synth_config(args))
    save_dataset(source, args.out_source, args.format)
    save_dataset(target, args.out_target, args.format)
    _emit_json(
        {
            "source": str(args.out_source),
            "target": str(args.out_target),
            "samples_per_domain": args.samples,
            "seed": args.seed,
        },
        args.output,
    )
    return 0


def _cmd_sweep(args) -> int:
    pipeline = PipelineConfig(
        ot=_ot_config(args),
        bound=BoundConfig(loss=args.loss, k_lambda_product=args.k_lambda,
                          M=args.M, p=args.p, K_weight_sup=args.K),
        hyper=TrainConfig(
            learning_rate=args.learning_rate,
            epochs=args.epochs,
            l2=args.l2,
            finetune_epochs=args.finetune_epochs,
        ),
        target_label_fraction=args.label_fraction,
        heldout_fraction=args.heldout_fraction,
    )
    grid = SweepGrid(
        c_values=args.c_values if args.c_values else (None,),
        r_values=args.r_values,
        seeds=args.seeds,
    )
    if args.source_features:
        if not args.target_features:
            raise ValidationError("--target-features is required with --source-features")
        source = _load_labelled(args.source_features, args.input_format, args.task,
                                args.source_labels)
        target = _load_labelled(args.target_features, args.input_format, args.task,
                                args.target_labels)
        rows = run_sweep(grid, pipeline, source=source, target=target)
        synth_cfg = None
    else:
        synth_cfg = _synth_config(args)
        rows = run_sweep(grid, pipeline, synthetic=synth_cfg)
    ok_rows = [r for r in rows if r.status == "ok" and r.empirical_tr is not None]
    evaluation = evaluate_sweep(rows) if len(ok_rows) >= 3 else None
    config = {
        "task": args.task,
        "grid": {"c_values": list(grid.c_values), "r_values": list(grid.r_values),
                 "seeds": list(grid.seeds)},
        "pipeline": pipeline,
        "synthetic": synth_cfg,
    }
    if args.format == "csv":
        _emit(dumps_csv(rows), args.output)
    else:
        _emit_json(sweep_report(config, rows, evaluation), args.output)
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="wdje", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"wdje {__version__}")
    subs = parser.add_subparsers(dest="command", required=True)

    w = _add_command(subs, "wasserstein", help="distance between two point clouds")
    w.add_argument("--u", required=True,
                   help="first point-set file (every CSV column is a coordinate)")
    w.add_argument("--v", required=True, help="second point-set file")
    _add_ot_flags(w)
    _add_io_flags(w)
    w.set_defaults(func=_cmd_wasserstein)

    b = _add_command(subs, "bound", help="assemble the target-risk bound")
    b.add_argument("--source-features", required=True, help="source feature file")
    b.add_argument("--source-labels", default=None,
                   help="separate source label file; else the 'label' column")
    b.add_argument("--target-features", required=True, help="target feature file")
    b.add_argument("--target-labels", default=None, help="separate target label file")
    b.add_argument("--task", choices=(CLASSIFICATION, REGRESSION), required=True,
                   help="task kind")
    b.add_argument("--loss", choices=("cross_entropy", "mse"),
                   default="cross_entropy", help="loss family for the Lipschitz constant")
    b.add_argument("--k-lambda", type=_positive("k-lambda"), default=0.001,
                   help="fixed k*lambda product")
    b.add_argument("--M", type=_positive("M"), default=1.0, help="output-range bound")
    b.add_argument("--K", type=_positive("K"), default=1.0,
                   help="regressor weight supremum (mse)")
    b.add_argument("--n-t1", type=int, default=None,
                   help="labelled target rows (default: all labelled)")
    b.add_argument("--source-risk", type=float, default=0.0,
                   help="precomputed source training risk")
    _add_ot_flags(b)
    _add_io_flags(b)
    b.set_defaults(func=_cmd_bound)

    s = _add_command(subs, "score", help="transfer/no-transfer decision")
    s.add_argument("--bound-total", type=float, default=None, help="bound total")
    s.add_argument("--bound-report", default=None,
                   help="JSON report from the bound subcommand")
    s.add_argument("--risk-without", type=float, required=True,
                   help="target-only risk")
    _add_io_flags(s)
    s.set_defaults(func=_cmd_score)

    base = _add_command(subs, "baseline", help="analytical baseline metrics")
    base.add_argument("--baseline-metric", "--name", dest="baseline_metric",
                      choices=("leep", "nce", "logme", "hscore", "pearson"),
                      required=True, help="which baseline to compute")
    base.add_argument("--target-features", help="target feature file")
    base.add_argument("--target-labels", default=None, help="separate target label file")
    base.add_argument("--preds", default=None, help="source softmax matrix file")
    base.add_argument("--task", choices=(CLASSIFICATION, REGRESSION),
                      default=CLASSIFICATION, help="task kind")
    base.add_argument("--a", help="first vector file (pearson)")
    base.add_argument("--b", help="second vector file (pearson)")
    _add_io_flags(base)
    base.set_defaults(func=_cmd_baseline)

    c = _add_command(subs, "consistency", help="consistency index from counts")
    c.add_argument("--counts", type=_int_list, required=True,
                   help="n_pp,n_pm,n_mp,n_mm")
    _add_io_flags(c)
    c.set_defaults(func=_cmd_consistency)

    def _add_synth_flags(sub):
        sub.add_argument("--task", choices=(CLASSIFICATION, REGRESSION),
                         default=CLASSIFICATION, help="task kind")
        sub.add_argument("--classes", type=int, default=4, help="class count")
        sub.add_argument("--dim", type=int, default=8, help="feature dimension")
        sub.add_argument("--samples", type=int, default=120,
                         help="samples per domain")
        sub.add_argument("--mean-shift", type=float, default=0.0,
                         help="target cluster translation (domain difference)")
        sub.add_argument("--label-shift", default=None,
                         help="class permutation '1,0,...' or additive shift")
        sub.add_argument("--noise-sigma", type=_positive("noise-sigma"), default=0.5,
                         help="cluster/observation noise")
        sub.add_argument("--seed", type=int, default=0, help="generator seed")

    sy = _add_command(subs, "synth", help="generate a synthetic source/target pair")
    _add_synth_flags(sy)
    sy.add_argument("--out-source", required=True, help="source output path")
    sy.add_argument("--out-target", required=True, help="target output path")
    sy.add_argument("--format", choices=("csv", "binary"), default="csv",
                    help="dataset file format")
    _add_io_flags(sy)
    sy.set_defaults(func=_cmd_synth)

    sw = _add_command(subs, "sweep", help="run a subtask sweep and report")
    _add_synth_flags(sw)
    sw.add_argument("--source-features", default=None,
                    help="source feature file (omit to use the synthetic pair)")
    sw.add_argument("--source-labels", default=None, help="separate source label file")
    sw.add_argument("--target-features", default=None, help="target feature file")
    sw.add_argument("--target-labels", default=None, help="separate target label file")
    sw.add_argument("--c-values", type=_int_list, default=(),
                    help="comma-separated class caps")
    sw.add_argument("--r-values", type=_float_list, default=(1.0,),
                    help="comma-separated sampling ratios")
    sw.add_argument("--seeds", type=_int_list, default=(0,),
                    help="comma-separated cell seeds")
    sw.add_argument("--loss", choices=("cross_entropy", "mse"),
                    default="cross_entropy", help="loss family")
    sw.add_argument("--k-lambda", type=_positive("k-lambda"), default=0.001,
                    help="fixed k*lambda product")
    sw.add_argument("--M", type=_positive("M"), default=1.0, help="output-range bound")
    sw.add_argument("--K", type=_positive("K"), default=1.0,
                    help="regressor weight supremum (mse)")
    sw.add_argument("--label-fraction", type=float, default=1.0,
                    help="share of target rows treated as labelled")
    sw.add_argument("--heldout-fraction", type=float, default=0.0,
                    help="share of the target pool reserved for risk evaluation")
    sw.add_argument("--learning-rate", type=_positive("learning-rate"), default=0.5,
                    help="gradient-descent step size")
    sw.add_argument("--epochs", type=int, default=200, help="scratch training epochs")
    sw.add_argument("--l2", type=float, default=1e-4, help="ridge penalty")
    sw.add_argument("--finetune-epochs", type=int, default=40,
                    help="continuation epochs after the source fit")
    sw.add_argument("--format", choices=("json", "csv"), default="json",
                    help="report format")
    _add_ot_flags(sw)
    _add_io_flags(sw)
    sw.set_defaults(func=_cmd_sweep)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (NumericalError, OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
