"""Command-line surface: eval, calibrate, cood, compare, oracle.

Reports are JSON (scalars) and CSV (curves/tables). Every report echoes
its configuration so a run can be reproduced bit-for-bit from the report
alone. Exit codes: 0 success, 1 input error, 2 computation undefined.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import coodgen, metrics, oracles
from .errors import ScoreRangeError, UQBenchError
from .kappa import KappaSpec, ScoreVector, fit_temperature, score_log
from .metrics import MetricReport, RCCurve, Undefined, metric_value_to_json
from .predlog import LogKind, PredictionLog, load_log, make_log, stratified_split

DEFAULT_SAC_TARGETS = (0.95, 0.99)
DEFAULT_COVERAGES = tuple(round(0.1 * i, 1) for i in range(1, 11))

EXIT_OK = 0
EXIT_INPUT_ERROR = 1
EXIT_UNDEFINED = 2


def _default_seed():
    return int(os.environ.get("UQBENCH_SEED", "0"))


def _float_list(text):
    return tuple(float(v) for v in text.split(",") if v.strip())


def _build_spec(args, log: PredictionLog) -> KappaSpec:
    base = args.kappa
    if base == "auto":
        base = "raw-score" if log.kind is LogKind.SCORE_ONLY else "softmax-response"
    return KappaSpec(
        base=base,
        temperature=args.temperature,
        mc_aggregate=log.passes > 1,
    )


def _subset(log: PredictionLog, indices) -> PredictionLog:
    return make_log(
        log.kind, log.num_classes, log.labels[indices], log.payload[indices], log.passes
    )


def evaluate_log(log, spec, bins, sac_targets, coverages,
                 provenance=None) -> tuple[MetricReport, RCCurve]:
    """Full scalar-metric suite for one (log, kappa) pair."""
    sv = score_log(log, spec)
    curve = metrics.rc_curve(sv)
    out = {
        "accuracy": sv.accuracy,
        "aurc": metrics.aurc(curve),
        "e_aurc": metrics.e_aurc(sv),
        "aurc_over_coverages": metrics.aurc_over_coverages(curve, coverages),
    }
    roc = metrics.auroc(sv)
    out["auroc"] = roc
    out["gamma"] = roc if isinstance(roc, Undefined) else metrics.gamma_from_auroc(roc)
    for target in sac_targets:
        out[f"sac@{target:g}"] = metrics.sac_coverage(curve, target)
    try:
        out["ece"] = metrics.ece(sv, bins)
    except ScoreRangeError as exc:
        out["ece"] = Undefined(str(exc))
    if log.kind is LogKind.SCORE_ONLY:
        reason = Undefined("score-only log has no probability semantics")
        out["nll"] = reason
        out["brier"] = reason
    else:
        mlog = log
        if log.passes > 1:
            from .kappa import mc_aggregate

            mlog = mc_aggregate(log, spec.temperature)
            out["nll"] = metrics.nll(mlog)
            out["brier"] = metrics.brier(mlog)
        else:
            out["nll"] = metrics.nll(log, spec.temperature)
            out["brier"] = metrics.brier(log, spec.temperature)
    report = MetricReport(
        metrics=out,
        config={
            "kappa_spec": spec.to_dict(),
            "ece_bins": bins,
            "sac_targets": list(sac_targets),
            "coverage_set": list(coverages),
        },
        provenance=provenance or {},
    )
    return report, curve


def _write_json(path, payload):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n")


def _write_rc_csv(path, curve: RCCurve):
    lines = ["threshold,coverage,risk"]
    for t, c, r in zip(curve.thresholds, curve.coverages, curve.risks):
        lines.append(f"{float(t)!r},{float(c)!r},{float(r)!r}")
    Path(path).write_text("\n".join(lines) + "\n")


def cmd_eval(args) -> int:
    log = load_log(args.log, args.format)
    spec = _build_spec(args, log)
    report, curve = evaluate_log(
        log, spec, args.bins, args.sac, args.coverages,
        provenance={"log": str(args.log), "seed": args.seed},
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    _write_json(out / "report.json", report.to_dict())
    _write_rc_csv(out / "rc.csv", curve)
    print(json.dumps(report.to_dict(), sort_keys=True, indent=2))
    if isinstance(report.metrics["auroc"], Undefined):
        return EXIT_UNDEFINED
    return EXIT_OK


def cmd_calibrate(args) -> int:
    log = load_log(args.log, args.format)
    if log.kind is not LogKind.LOGITS:
        raise UQBenchError("calibrate needs a logits log")
    split = stratified_split(log, args.calib_size, args.seed)
    fit = fit_temperature(log, split)
    test_log = _subset(log, split.test)
    provenance = {"log": str(args.log), "seed": args.seed}
    spec_t1 = KappaSpec(args.kappa if args.kappa != "auto" else "softmax-response", 1.0)
    spec_fit = KappaSpec(spec_t1.base, fit.temperature)
    before, _ = evaluate_log(test_log, spec_t1, args.bins, args.sac, args.coverages,
                             provenance)
    after, _ = evaluate_log(test_log, spec_fit, args.bins, args.sac, args.coverages,
                            provenance)
    deltas = {}
    for key, b in before.metrics.items():
        a = after.metrics[key]
        if isinstance(a, Undefined) or isinstance(b, Undefined):
            deltas[key] = Undefined("undefined on one side")
        else:
            deltas[key] = a - b
    doc = {
        "temperature_fit": fit.to_dict(),
        "before": before.to_dict(),
        "after": after.to_dict(),
        "deltas": {k: metric_value_to_json(v) for k, v in deltas.items()},
    }
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    _write_json(out / "calibration.json", doc)
    print(json.dumps(doc, sort_keys=True, indent=2))
    return EXIT_OK


def _load_pool(args, spec):
    pool_path = Path(args.pool)
    if pool_path.is_dir():
        logs = {
            p.stem: load_log(p) for p in sorted(pool_path.iterdir())
            if p.suffix in (".uql", ".uql1")
        }
        if not logs:
            raise UQBenchError(f"no .uql logs in {pool_path}")
        return coodgen.build_pool_from_logs(
            logs, spec, args.est_size, args.test_size, args.seed
        )
    return coodgen.load_pool_csv(pool_path, spec)


def cmd_cood(args) -> int:
    log = load_log(args.log, args.format)
    spec = _build_spec(args, log)
    sv = score_log(log, spec)
    pool = _load_pool(args, spec)
    window = args.window if args.window else log.num_classes
    manifest, profile = coodgen.severity_profile(
        sv.scores, pool, spec, window, id_identity=str(args.log)
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "manifest.json").write_text(manifest.to_manifest(spec, args.seed))
    (out / "profile.csv").write_text(profile.to_csv())
    print(profile.to_csv(), end="")
    return EXIT_OK


def cmd_compare(args) -> int:
    paths = [Path(p) for p in args.reports]
    stems = [p.stem for p in paths]
    # every `eval` writes report.json, so fall back to the parent directory
    # name when stems alone would collide
    ids = [
        p.stem if stems.count(p.stem) == 1 else f"{p.parent.name}/{p.stem}"
        for p in paths
    ]
    if len(set(ids)) != len(ids):
        raise UQBenchError(f"ambiguous report ids: {ids}")
    reports = {}
    for rid, path in zip(ids, paths):
        doc = json.loads(path.read_text())
        reports[rid] = doc["metrics"]
    if len(reports) < 2:
        raise UQBenchError("compare needs at least two reports")
    schemas = {name: tuple(sorted(m)) for name, m in reports.items()}
    if len(set(schemas.values())) != 1:
        raise UQBenchError(f"metric schema mismatch across reports: {schemas}")
    names = sorted(reports)
    keys = sorted(next(iter(reports.values())))

    def cell(name, key):
        v = reports[name][key]
        return v if isinstance(v, (int, float)) else None

    table_lines = ["model," + ",".join(keys)]
    for name in names:
        row = [
            "undefined" if cell(name, k) is None else repr(float(cell(name, k)))
            for k in keys
        ]
        table_lines.append(name + "," + ",".join(row))

    corr_lines = ["metric_a,metric_b,spearman"]
    for i, ka in enumerate(keys):
        for kb in keys[i + 1:]:
            pairs = [
                (cell(n, ka), cell(n, kb))
                for n in names
                if cell(n, ka) is not None and cell(n, kb) is not None
            ]
            if len(pairs) < 2:
                corr_lines.append(f"{ka},{kb},undefined")
                continue
            xs, ys = zip(*pairs)
            rho = metrics.spearman(np.array(xs), np.array(ys))
            text = "undefined" if isinstance(rho, Undefined) else repr(rho)
            corr_lines.append(f"{ka},{kb},{text}")

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "table.csv").write_text("\n".join(table_lines) + "\n")
    (out / "correlations.csv").write_text("\n".join(corr_lines) + "\n")

    if args.pairs:
        delta_lines = ["baseline,variant,metric,delta"]
        for pair in args.pairs:
            base, _, variant = pair.partition(":")
            if base not in reports or variant not in reports:
                raise UQBenchError(f"unknown report id in pair {pair!r}")
            for k in keys:
                b, v = cell(base, k), cell(variant, k)
                text = "undefined" if b is None or v is None else repr(v - b)
                delta_lines.append(f"{base},{variant},{k},{text}")
        (out / "deltas.csv").write_text("\n".join(delta_lines) + "\n")
    print("\n".join(table_lines))
    return EXIT_OK


def cmd_oracle(args) -> int:
    log = load_log(args.log, args.format)
    spec = _build_spec(args, log)
    sv = score_log(log, spec)
    doc = {
        "aurc_enumeration": oracles.aurc_enumeration(sv.scores, sv.correctness),
    }
    try:
        doc["auroc_pair_count"] = oracles.auroc_pair_count(sv.scores, sv.correctness)
    except ValueError as exc:
        doc["auroc_pair_count"] = {"status": "undefined", "reason": str(exc)}
    try:
        doc["ece_two_pass"] = oracles.ece_two_pass(sv.scores, sv.correctness, args.bins)
    except ValueError:
        doc["ece_two_pass"] = {"status": "undefined", "reason": "score outside [0,1]"}
    print(json.dumps(doc, sort_keys=True, indent=2))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="uqbench",
        description="Selective-prediction, calibration, and C-OOD evaluation "
                    "over classifier prediction logs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, log_required=True):
        p.add_argument("--log", required=log_required, help="prediction log path")
        p.add_argument("--format", choices=["csv", "uql1"], default=None)
        p.add_argument("--kappa", default="auto",
                       choices=["auto", "softmax-response", "negative-entropy",
                                "raw-score"])
        p.add_argument("--temperature", type=float, default=1.0)
        p.add_argument("--bins", type=int, default=metrics.DEFAULT_ECE_BINS)
        p.add_argument("--sac", type=_float_list, default=DEFAULT_SAC_TARGETS,
                       help="comma-separated SAC accuracy targets")
        p.add_argument("--coverages", type=_float_list, default=DEFAULT_COVERAGES,
                       help="comma-separated coverage set")
        p.add_argument("--seed", type=int, default=_default_seed())
        p.add_argument("--out", default="uqbench-out")

    p_eval = sub.add_parser("eval", help="metric suite + RC curve for one log")
    common(p_eval)
    p_eval.set_defaults(func=cmd_eval)

    p_cal = sub.add_parser("calibrate", help="fit temperature, report deltas")
    common(p_cal)
    p_cal.add_argument("--calib-size", type=int, default=5000)
    p_cal.set_defaults(func=cmd_calibrate)

    p_cood = sub.add_parser("cood", help="build severity levels and detection profile")
    common(p_cood)
    p_cood.add_argument("--pool", required=True,
                        help="pool table CSV or directory of per-class .uql logs")
    p_cood.add_argument("--window", type=int, default=0,
                        help="sliding-window size (default: ID class count)")
    p_cood.add_argument("--est-size", type=int, default=coodgen.DEFAULT_EST_SIZE)
    p_cood.add_argument("--test-size", type=int, default=coodgen.DEFAULT_TEST_SIZE)
    p_cood.set_defaults(func=cmd_cood)

    p_cmp = sub.add_parser("compare", help="multi-report table and correlations")
    p_cmp.add_argument("reports", nargs="+", help="report JSON files")
    p_cmp.add_argument("--pairs", action="append", default=[],
                       metavar="BASELINE:VARIANT")
    p_cmp.add_argument("--out", default="uqbench-out")
    p_cmp.set_defaults(func=cmd_compare)

    p_orc = sub.add_parser("oracle", help="brute-force oracle values for a log")
    common(p_orc)
    p_orc.set_defaults(func=cmd_oracle)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (UQBenchError, FileNotFoundError, json.JSONDecodeError, KeyError) as exc:
        error = {"error": str(exc), "type": type(exc).__name__}
        print(json.dumps(error), file=sys.stderr)
        return EXIT_INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
