"""Command-line entry point: config resolution, pipeline dispatch, reports.

Config files are flat JSON with dotted keys (e.g. "augment.kind",
"contrastive.tau"); every key has a mirroring flag, and flags override the
file. All randomness flows from one resolved seed, which is echoed into
every report so any report can be regenerated from its echoed config plus
the dataset file.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import secrets
import sys
from pathlib import Path

import numpy as np

from .augment import AugmentSpec
from .contrastive import ContrastiveBatch, nt_xent_loss
from .data import read_dataset, write_dataset
from .evaluation import (CLINICAL_REFERENCE_CELL, METRIC_NAMES, compare_augmentations,
                         run_loso, sweep_label_fraction, sweep_train_subjects)
from .nn import (build_classifier, build_cnn_encoder, build_mlp_encoder, grad_check,
                 load_network, save_network)
from .nn.losses import cross_entropy_with_grads
from .protocol import TrainConfig, pretrain_encoder, train_classifier
from .rng import derive_rng
from .synth import SynthConfig, synth_dataset

SEED_ENV_VAR = "SSLTSC_SEED"
GRAD_CHECK_THRESHOLD = 1e-4

_TRAIN_KEYS = {
    "train.pretrain_epochs": ("pretrain_epochs", int),
    "train.classifier_epochs": ("classifier_epochs", int),
    "train.learning_rate": ("learning_rate", float),
    "train.batch_size": ("batch_size", int),
    "train.encoder": ("encoder", str),
    "train.embedding_dim": ("embedding_dim", int),
    "train.classifier_hidden": ("classifier_hidden", int),
    "train.pretrain_pool": ("pretrain_pool", str),
}
_AUGMENT_KEYS = {
    "augment.kind": ("kind", str),
    "augment.lambda": ("blockout_fraction", float),
    "augment.mu": ("noise_mean", float),
    "augment.sigma": ("noise_std", float),
}
_CONTRASTIVE_KEYS = {
    "contrastive.tau": ("temperature", float),
    "contrastive.similarity": ("similarity", str),
}
_SYNTH_KEYS = {
    "synth.n_subjects": ("n_subjects", int),
    "synth.wear_minutes": ("wear_minutes", int),
    "synth.sample_rate": ("sample_rate", int),
    "synth.n_events_per_subject": ("n_events_per_subject", int),
    "synth.tonic_level": ("tonic_level", float),
    "synth.tonic_drift_amp": ("tonic_drift_amp", float),
    "synth.scr_rate_per_hour": ("scr_rate_per_hour", float),
    "synth.scr_amp_lo": (None, float),
    "synth.scr_amp_hi": (None, float),
    "synth.scr_rise_minutes": ("scr_rise_minutes", float),
    "synth.scr_decay_minutes": ("scr_decay_minutes", float),
    "synth.effect_window_minutes": ("effect_window_minutes", float),
    "synth.effect_rate_mult": ("effect_rate_mult", float),
    "synth.effect_amp_mult": ("effect_amp_mult", float),
    "synth.subject_variability": ("subject_variability", float),
    "synth.noise_std": ("noise_std", float),
    "synth.window_minutes": (None, int),
    "synth.stride_minutes": (None, int),
    "synth.standardize": (None, bool),
}
_EVAL_KEYS = {
    "eval.label_subjects": (None, int),
    "eval.reps": (None, int),
    "eval.subject_counts": (None, list),
    "eval.n_values": (None, list),
}
_KNOWN_KEYS = ({"seed"} | set(_TRAIN_KEYS) | set(_AUGMENT_KEYS)
               | set(_CONTRASTIVE_KEYS) | set(_SYNTH_KEYS) | set(_EVAL_KEYS))


def _load_config_file(path: str | None) -> dict:
    if path is None:
        return {}
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(raw, dict):
        raise ValueError(f"{path}: config must be a JSON object")
    unknown = set(raw) - _KNOWN_KEYS
    if unknown:
        raise ValueError(f"{path}: unknown config keys: {sorted(unknown)}")
    return raw


def _resolve_seed(flag_seed: int | None, file_cfg: dict) -> int:
    if flag_seed is not None:
        return flag_seed
    if "seed" in file_cfg:
        return int(file_cfg["seed"])
    env = os.environ.get(SEED_ENV_VAR)
    if env is not None:
        return int(env)
    return secrets.randbits(63)


def _overlay(file_cfg: dict, flag_values: dict) -> dict:
    resolved = dict(file_cfg)
    for key, value in flag_values.items():
        if value is not None:
            resolved[key] = value
    return resolved


def _train_config(resolved: dict, seed: int) -> TrainConfig:
    aug_kwargs = {field: resolved[key] for key, (field, _) in _AUGMENT_KEYS.items()
                  if key in resolved}
    kwargs = {field: resolved[key] for key, (field, _) in _TRAIN_KEYS.items()
              if key in resolved}
    kwargs.update({field: resolved[key] for key, (field, _) in _CONTRASTIVE_KEYS.items()
                   if key in resolved})
    return TrainConfig(augment=AugmentSpec(**aug_kwargs), seed=seed, **kwargs)


def _synth_config(resolved: dict, seed: int) -> SynthConfig:
    kwargs = {}
    for key, (field, _) in _SYNTH_KEYS.items():
        if field is not None and key in resolved:
            kwargs[field] = resolved[key]
    lo = resolved.get("synth.scr_amp_lo", SynthConfig.scr_amp_range[0])
    hi = resolved.get("synth.scr_amp_hi", SynthConfig.scr_amp_range[1])
    return SynthConfig(scr_amp_range=(lo, hi), seed=seed, **kwargs)


def _echo_train_config(cfg: TrainConfig) -> dict:
    return {
        "seed": cfg.seed,
        "train.pretrain_epochs": cfg.pretrain_epochs,
        "train.classifier_epochs": cfg.classifier_epochs,
        "train.learning_rate": cfg.learning_rate,
        "train.batch_size": cfg.batch_size,
        "train.encoder": cfg.encoder,
        "train.embedding_dim": cfg.embedding_dim,
        "train.classifier_hidden": cfg.classifier_hidden,
        "train.pretrain_pool": cfg.pretrain_pool,
        "augment.kind": cfg.augment.kind,
        "augment.lambda": cfg.augment.blockout_fraction,
        "augment.mu": cfg.augment.noise_mean,
        "augment.sigma": cfg.augment.noise_std,
        "contrastive.tau": cfg.temperature,
        "contrastive.similarity": cfg.similarity,
    }


def _echo_synth_config(cfg: SynthConfig, window: int, stride: int,
                       standardize: bool) -> dict:
    return {
        "seed": cfg.seed,
        "synth.n_subjects": cfg.n_subjects,
        "synth.wear_minutes": cfg.wear_minutes,
        "synth.sample_rate": cfg.sample_rate,
        "synth.n_events_per_subject": cfg.n_events_per_subject,
        "synth.tonic_level": cfg.tonic_level,
        "synth.tonic_drift_amp": cfg.tonic_drift_amp,
        "synth.scr_rate_per_hour": cfg.scr_rate_per_hour,
        "synth.scr_amp_lo": cfg.scr_amp_range[0],
        "synth.scr_amp_hi": cfg.scr_amp_range[1],
        "synth.scr_rise_minutes": cfg.scr_rise_minutes,
        "synth.scr_decay_minutes": cfg.scr_decay_minutes,
        "synth.effect_window_minutes": cfg.effect_window_minutes,
        "synth.effect_rate_mult": cfg.effect_rate_mult,
        "synth.effect_amp_mult": cfg.effect_amp_mult,
        "synth.subject_variability": cfg.subject_variability,
        "synth.noise_std": cfg.noise_std,
        "synth.window_minutes": window,
        "synth.stride_minutes": stride,
        "synth.standardize": standardize,
    }


def _format_cell(value) -> str:
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, float):
        return f"{value:.6f}"
    if isinstance(value, (list, tuple)):
        return "|".join(str(v) for v in value)
    return str(value)


def emit_report(report: dict, fmt: str, path: str | Path) -> None:
    """Write a report atomically; identical input yields identical bytes.

    JSON keeps full float precision and the whole nested report. CSV writes
    report["rows"] restricted to report["columns"], numbers with 6 decimal
    places.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if fmt == "json":
        payload = json.dumps(report, sort_keys=True, indent=2) + "\n"
    elif fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        columns = report["columns"]
        writer.writerow(columns)
        for row in report["rows"]:
            writer.writerow([_format_cell(row.get(col, "")) for col in columns])
        payload = buf.getvalue()
    else:
        raise ValueError(f"format must be 'csv' or 'json', got {fmt!r}")
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(payload, encoding="utf-8")
    os.replace(tmp, path)


def _emit_both(report: dict, report_dir: str, stem: str) -> None:
    emit_report(report, "json", Path(report_dir) / f"{stem}.json")
    emit_report(report, "csv", Path(report_dir) / f"{stem}.csv")


def _cmd_synth(args, file_cfg: dict, seed: int) -> int:
    resolved = _overlay(file_cfg, {
        "synth.n_subjects": args.subjects,
        "synth.wear_minutes": args.wear_minutes,
        "synth.sample_rate": args.sample_rate,
        "synth.n_events_per_subject": args.events,
        "synth.noise_std": args.noise_std,
        "synth.effect_window_minutes": args.effect_window,
        "synth.effect_rate_mult": args.effect_rate_mult,
        "synth.effect_amp_mult": args.effect_amp_mult,
        "synth.subject_variability": args.subject_variability,
        "synth.window_minutes": args.window,
        "synth.stride_minutes": args.stride,
        "synth.standardize": None if args.standardize is None else args.standardize,
    })
    cfg = _synth_config(resolved, seed)
    window = resolved.get("synth.window_minutes", 60)
    stride = resolved.get("synth.stride_minutes", 10)
    standardize = resolved.get("synth.standardize", True)
    ds = synth_dataset(cfg, window, stride, standardize)
    write_dataset(ds, args.out)
    sidecar = {
        "command": "synth",
        "config": _echo_synth_config(cfg, window, stride, standardize),
        "n_segments": ds.n_segments,
        "n_positive": int(ds.labels.sum()),
        "segment_length": ds.segment_length,
    }
    emit_report(sidecar, "json", Path(args.out).with_suffix(".json"))
    print(f"wrote {ds.n_segments} segments ({int(ds.labels.sum())} positive, "
          f"T={ds.segment_length}) to {args.out}")
    return 0


def _cmd_pretrain(args, file_cfg: dict, seed: int) -> int:
    cfg = _train_config(_overlay(file_cfg, _train_flag_values(args)), seed)
    ds = read_dataset(args.data).strip_labels()
    encoder, curve = pretrain_encoder(ds, cfg)
    save_network(encoder, args.checkpoint)
    if args.report:
        emit_report({
            "command": "pretrain",
            "config": _echo_train_config(cfg),
            "loss_curve": curve,
        }, "json", args.report)
    last = f", final epoch loss {curve[-1]:.6f}" if curve else ""
    print(f"pretrained {cfg.encoder} encoder for {cfg.pretrain_epochs} epochs{last}; "
          f"checkpoint at {args.checkpoint}")
    return 0


def _cmd_train(args, file_cfg: dict, seed: int) -> int:
    cfg = _train_config(_overlay(file_cfg, _train_flag_values(args)), seed)
    ds = read_dataset(args.data)
    if args.labeled_subjects:
        wanted = set(args.labeled_subjects.split(","))
        unknown = wanted - ds.subjects
        if unknown:
            raise ValueError(f"labeled subjects not in dataset: {sorted(unknown)}")
        ds = ds.subset(np.isin(ds.subject_ids, sorted(wanted)))
    encoder = load_network(args.encoder_checkpoint)
    classifier = train_classifier(ds, encoder, cfg)
    save_network(classifier, args.checkpoint)
    print(f"trained classifier on {ds.n_segments} labeled segments; "
          f"checkpoint at {args.checkpoint}")
    return 0


def _fold_rows(reports: list, method: str, k_or_n) -> list[dict]:
    return [
        {"method": method, "fold": r.fold, "k_or_n": k_or_n, **{
            name: getattr(r, name) for name in METRIC_NAMES
        }, "flags": list(r.flags)}
        for r in reports
    ]


_CORE_COLUMNS = ["method", "fold", "k_or_n", "accuracy", "precision", "recall",
                 "f1", "flags"]


def _cmd_eval_loso(args, file_cfg: dict, seed: int) -> int:
    resolved = _overlay(file_cfg, {
        **_train_flag_values(args),
        "eval.label_subjects": args.label_subjects,
        "eval.reps": args.reps,
    })
    cfg = _train_config(resolved, seed)
    k = resolved.get("eval.label_subjects")
    reps = resolved.get("eval.reps", 1)
    ds = read_dataset(args.data)
    all_reports = []
    for rep in range(reps):
        reports, _ = run_loso(ds, args.method, cfg, label_subjects_per_fold=k,
                              rep=rep, jobs=args.jobs)
        all_reports.extend(reports)
    mean = {name: float(np.mean([getattr(r, name) for r in all_reports]))
            for name in METRIC_NAMES}
    report = {
        "command": "eval-loso",
        "config": {**_echo_train_config(cfg), "eval.label_subjects": k,
                   "eval.reps": reps, "method": args.method},
        "columns": _CORE_COLUMNS,
        "rows": _fold_rows(all_reports, args.method, "" if k is None else k),
        "aggregates": mean,
    }
    _emit_both(report, args.report_dir, f"eval_loso_{args.method}")
    print(f"LOSO {args.method}: " + "  ".join(
        f"{name}={mean[name]:.4f}" for name in METRIC_NAMES))
    return 0


def _cmd_sweep_labels(args, file_cfg: dict, seed: int) -> int:
    resolved = _overlay(file_cfg, {
        **_train_flag_values(args),
        "eval.subject_counts": _parse_int_list(args.subject_counts),
        "eval.reps": args.reps,
    })
    cfg = _train_config(resolved, seed)
    counts = tuple(resolved.get("eval.subject_counts", (1, 2, 5, 10, 15, 19)))
    reps = resolved.get("eval.reps", 1)
    ds = read_dataset(args.data)
    rows = sweep_label_fraction(ds, cfg, subject_counts=counts, reps=reps,
                                jobs=args.jobs)
    flat = [{"method": r["method"], "fold": "mean", "k_or_n": r["k"],
             "fraction": r["fraction"],
             **{name: r[name] for name in METRIC_NAMES}, "flags": ""}
            for r in rows]
    report = {
        "command": "sweep-labels",
        "config": {**_echo_train_config(cfg),
                   "eval.subject_counts": list(counts), "eval.reps": reps},
        "columns": _CORE_COLUMNS[:3] + ["fraction"] + _CORE_COLUMNS[3:],
        "rows": flat,
        "detail": rows,
        "aggregates": None,
    }
    _emit_both(report, args.report_dir, "sweep_labels")
    for r in flat:
        print(f"k={r['k_or_n']:>2} {r['method']:<10} accuracy={r['accuracy']:.4f} "
              f"f1={r['f1']:.4f}")
    return 0


def _cmd_sweep_subjects(args, file_cfg: dict, seed: int) -> int:
    resolved = _overlay(file_cfg, {
        **_train_flag_values(args),
        "eval.n_values": _parse_int_list(args.n_values),
    })
    cfg = _train_config(resolved, seed)
    n_values = resolved.get("eval.n_values")
    ds = read_dataset(args.data)
    rows = sweep_train_subjects(
        ds, cfg, n_values=None if n_values is None else tuple(n_values),
        jobs=args.jobs)
    flat = [{"method": r["method"], "fold": "mean", "k_or_n": r["n"],
             **{name: r[name] for name in METRIC_NAMES}, "flags": ""}
            for r in rows]
    report = {
        "command": "sweep-subjects",
        "config": {**_echo_train_config(cfg),
                   "eval.n_values": None if n_values is None else list(n_values)},
        "columns": _CORE_COLUMNS,
        "rows": flat,
        "detail": rows,
        "aggregates": None,
    }
    _emit_both(report, args.report_dir, "sweep_subjects")
    for r in flat:
        print(f"n={r['k_or_n']:>2} {r['method']:<10} accuracy={r['accuracy']:.4f}")
    return 0


def _cmd_compare_aug(args, file_cfg: dict, seed: int) -> int:
    cfg = _train_config(_overlay(file_cfg, _train_flag_values(args)), seed)
    ds = read_dataset(args.data)
    rows = compare_augmentations(ds, cfg, jobs=args.jobs)
    flat = [{"method": "cudle", "fold": "mean", "k_or_n": "",
             "augmentation": r["augmentation"], "encoder": r["encoder"],
             **{name: r[name] for name in METRIC_NAMES}, "flags": ""}
            for r in rows]
    report = {
        "command": "compare-aug",
        "config": _echo_train_config(cfg),
        "columns": _CORE_COLUMNS[:3] + ["augmentation", "encoder"] + _CORE_COLUMNS[3:],
        "rows": flat,
        "detail": rows,
        "reference_cell": CLINICAL_REFERENCE_CELL,
        "aggregates": None,
    }
    _emit_both(report, args.report_dir, "compare_aug")
    print("augmentation x encoder, metrics in percent:")
    for r in flat:
        print(f"  {r['augmentation']:<14} {r['encoder']:<4} "
              + "/".join(f"{r[name]:.2f}" for name in METRIC_NAMES))
    ref = CLINICAL_REFERENCE_CELL
    print(f"  reference cell (clinical study, for format comparison only): "
          f"{ref['augmentation']}/{ref['encoder']} "
          f"{ref['accuracy']}/{ref['precision']}/{ref['recall']}/{ref['f1']}")
    return 0


def grad_check_cases(seed: int = 0) -> dict[str, float]:
    """Finite-difference checks for tiny seeded networks under both losses."""
    rng = derive_rng(seed, "grad-check")
    results: dict[str, float] = {}

    def ce_loss(encoder, classifier, x, y):
        def fn(_net):
            logits = classifier.forward(encoder.forward(x))
            loss, grad = cross_entropy_with_grads(logits, y)
            encoder.backward(classifier.backward(grad))
            return loss
        return fn

    def nt_xent_encoder_loss(encoder, views):
        def fn(net):
            embeddings = net.forward(views)
            loss, grad = nt_xent_loss(ContrastiveBatch(embeddings, temperature=0.5))
            net.backward(grad)
            return loss
        return fn

    class _Pair:
        # exposes two networks' parameters to one grad_check pass
        def __init__(self, a, b):
            self.a, self.b = a, b

        def param_items(self):
            return ([("a." + n, p) for n, p in self.a.param_items()]
                    + [("b." + n, p) for n, p in self.b.param_items()])

        def grad_items(self):
            return ([("a." + n, g) for n, g in self.a.grad_items()]
                    + [("b." + n, g) for n, g in self.b.grad_items()])

        def zero_grads(self):
            self.a.zero_grads()
            self.b.zero_grads()

    for kind in ("mlp", "cnn"):
        if kind == "mlp":
            encoder = build_mlp_encoder(16, embedding_dim=6, hidden=(12,), rng=rng)
        else:
            encoder = build_cnn_encoder(16, embedding_dim=6, channels=(3, 4),
                                        kernel=4, stride=2, rng=rng)
        classifier = build_classifier(6, hidden=5, rng=rng)
        x = rng.normal(size=(6, 16))
        y = rng.integers(0, 2, size=6)
        results[f"{kind}+classifier/cross_entropy"] = grad_check(
            _Pair(encoder, classifier), ce_loss(encoder, classifier, x, y))
        views = rng.normal(size=(8, 16))
        results[f"{kind}/nt_xent"] = grad_check(
            encoder, nt_xent_encoder_loss(encoder, views))
    return results


def _cmd_grad_check(args, file_cfg: dict, seed: int) -> int:
    results = grad_check_cases(seed)
    worst = max(results.values())
    for name, rel in sorted(results.items()):
        print(f"{name}: max relative error {rel:.3e}")
    print(f"overall max relative error {worst:.3e} "
          f"({'OK' if worst < GRAD_CHECK_THRESHOLD else 'FAIL'}, "
          f"threshold {GRAD_CHECK_THRESHOLD:g})")
    return 0 if worst < GRAD_CHECK_THRESHOLD else 1


def _train_flag_values(args) -> dict:
    return {
        "train.pretrain_epochs": args.pretrain_epochs,
        "train.classifier_epochs": args.classifier_epochs,
        "train.learning_rate": args.lr,
        "train.batch_size": args.batch_size,
        "train.encoder": args.encoder,
        "train.embedding_dim": args.embedding_dim,
        "train.classifier_hidden": args.classifier_hidden,
        "train.pretrain_pool": args.pretrain_pool,
        "augment.kind": args.augment_kind,
        "augment.lambda": args.augment_lambda,
        "augment.mu": args.augment_mu,
        "augment.sigma": args.augment_sigma,
        "contrastive.tau": args.tau,
        "contrastive.similarity": args.similarity,
    }


def _parse_int_list(text: str | None) -> list[int] | None:
    if text is None:
        return None
    return [int(part) for part in text.split(",") if part.strip()]


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", help="flat JSON config file; flags override it")
    sub.add_argument("--seed", type=int, help=f"master seed (falls back to config, "
                                              f"then ${SEED_ENV_VAR}, then entropy)")


def _add_train_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--pretrain-epochs", type=int)
    sub.add_argument("--classifier-epochs", type=int)
    sub.add_argument("--lr", type=float)
    sub.add_argument("--batch-size", type=int)
    sub.add_argument("--encoder", choices=("mlp", "cnn"))
    sub.add_argument("--embedding-dim", type=int)
    sub.add_argument("--classifier-hidden", type=int)
    sub.add_argument("--pretrain-pool", choices=("full", "complement"))
    sub.add_argument("--augment-kind",
                     choices=("flip", "blockout", "crop_resize", "gaussian_noise"))
    sub.add_argument("--augment-lambda", type=float)
    sub.add_argument("--augment-mu", type=float)
    sub.add_argument("--augment-sigma", type=float)
    sub.add_argument("--tau", type=float)
    sub.add_argument("--similarity", choices=("cosine", "dot"))


def _add_eval_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--data", required=True, help="dataset CSV")
    sub.add_argument("--report-dir", default="reports")
    sub.add_argument("--jobs", type=int, default=1,
                     help="parallel fold workers; results identical to serial")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ssltsc",
        description="Contrastive self-supervised learning pipeline for "
                    "windowed physiological time series.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("synth", help="generate a synthetic cohort dataset CSV")
    _add_common(p)
    p.add_argument("--subjects", type=int)
    p.add_argument("--wear-minutes", type=int)
    p.add_argument("--sample-rate", type=int)
    p.add_argument("--events", type=int)
    p.add_argument("--noise-std", type=float)
    p.add_argument("--effect-window", type=float)
    p.add_argument("--effect-rate-mult", type=float)
    p.add_argument("--effect-amp-mult", type=float)
    p.add_argument("--subject-variability", type=float)
    p.add_argument("--window", type=int, help="window length in minutes")
    p.add_argument("--stride", type=int, help="stride in minutes")
    std = p.add_mutually_exclusive_group()
    std.add_argument("--standardize", dest="standardize", action="store_true",
                     default=None)
    std.add_argument("--no-standardize", dest="standardize", action="store_false")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_synth)

    p = subs.add_parser("pretrain", help="contrastive pretraining of the encoder")
    _add_common(p)
    _add_train_flags(p)
    p.add_argument("--data", required=True)
    p.add_argument("--checkpoint", required=True, help="encoder checkpoint output")
    p.add_argument("--report", help="optional loss-curve report JSON")
    p.set_defaults(func=_cmd_pretrain)

    p = subs.add_parser("train", help="fit the classifier on a frozen encoder")
    _add_common(p)
    _add_train_flags(p)
    p.add_argument("--data", required=True)
    p.add_argument("--encoder-checkpoint", required=True)
    p.add_argument("--checkpoint", required=True, help="classifier checkpoint output")
    p.add_argument("--labeled-subjects", help="comma-separated subject ids to keep")
    p.set_defaults(func=_cmd_train)

    p = subs.add_parser("eval-loso", help="leave-one-subject-out evaluation")
    _add_common(p)
    _add_train_flags(p)
    _add_eval_flags(p)
    p.add_argument("--method", choices=("cudle", "supervised"), required=True)
    p.add_argument("--label-subjects", type=int,
                   help="labeled training subjects per fold (default: all)")
    p.add_argument("--reps", type=int, help="label-selection repetitions")
    p.set_defaults(func=_cmd_eval_loso)

    p = subs.add_parser("sweep-labels", help="label-fraction sweep, both methods")
    _add_common(p)
    _add_train_flags(p)
    _add_eval_flags(p)
    p.add_argument("--subject-counts", help="comma-separated labeled-subject counts")
    p.add_argument("--reps", type=int)
    p.set_defaults(func=_cmd_sweep_labels)

    p = subs.add_parser("sweep-subjects", help="training-subject-count sweep")
    _add_common(p)
    _add_train_flags(p)
    _add_eval_flags(p)
    p.add_argument("--n-values", help="comma-separated subject counts "
                                      "(default: 1..n_subjects-1)")
    p.set_defaults(func=_cmd_sweep_subjects)

    p = subs.add_parser("compare-aug", help="augmentation x encoder comparison table")
    _add_common(p)
    _add_train_flags(p)
    _add_eval_flags(p)
    p.set_defaults(func=_cmd_compare_aug)

    p = subs.add_parser("grad-check", help="finite-difference gradient verification")
    _add_common(p)
    p.set_defaults(func=_cmd_grad_check)

    return parser


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        file_cfg = _load_config_file(args.config)
        seed = _resolve_seed(args.seed, file_cfg)
        return args.func(args, file_cfg, seed)
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
