"""Command-line experiment harness.

Runs one learner over one stream (CSV, synthetic, or precomputed-kernel),
evaluates the requested guarantee checks, and emits a JSON report plus an
optional per-step CSV log. Exit code 0 means every asserted check passed;
1 means some check failed; 2 means the run could not be executed.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from dataclasses import dataclass

from . import verify
from .bayes import PredictiveGaussian, gaussian_log_loss
from .errors import ParamError, RidgestreamError
from .kernel_online import kernel_run_gram
from .kernels import KernelSpec, gram
from .online import clip, ridge_run
from .streams import (SyntheticSpec, generate_synthetic, load_csv,
                      load_kernel_csv, write_csv, write_step_log)

SCHEMA_VERSION = 1

KERNEL_ALGOS = ("krr", "kbrr")
PRECOMPUTED = "precomputed"

CHECKS_BY_ALGO = {
    "ridge": {"thm1", "cor1", "cor2", "det_identity", "det_bound", "cor3_trend"},
    "brr": {"thm1", "thm2", "cor1", "cor2", "det_identity", "det_bound", "cor3_trend"},
    "vaw": {"det_identity", "det_bound", "cor3_trend"},
    "krr": {"thm3", "cor5", "det_identity", "cor3_trend"},
    "kbrr": {"thm3", "thm4", "cor5", "det_identity", "cor3_trend"},
}


@dataclass(frozen=True)
class ExperimentConfig:
    algo: str
    a: float = 1.0
    sigma: float | None = None
    kernel: KernelSpec | str | None = None
    clip_y: float | None = None
    data: str | None = None
    synthetic: SyntheticSpec | None = None
    checks: tuple[str, ...] = ()
    seed: int = 0
    report_path: str | None = None
    steps_path: str | None = None
    dump_data_path: str | None = None
    refactor_every: int = 256
    max_steps: int = 100_000


def validate_config(cfg: ExperimentConfig) -> None:
    if cfg.algo not in CHECKS_BY_ALGO:
        raise ParamError(f"unknown algo {cfg.algo!r}")
    if not cfg.a > 0.0:
        raise ParamError(f"a must be positive, got {cfg.a}")
    bayesian = cfg.algo in ("brr", "kbrr")
    if bayesian and (cfg.sigma is None or not cfg.sigma > 0.0):
        raise ParamError(f"algo {cfg.algo} needs --sigma > 0")
    if not bayesian and cfg.sigma is not None:
        raise ParamError(f"--sigma is only meaningful for brr/kbrr, not {cfg.algo}")
    kernelized = cfg.algo in KERNEL_ALGOS
    if kernelized and cfg.kernel is None:
        raise ParamError(f"algo {cfg.algo} needs --kernel")
    if not kernelized and cfg.kernel is not None:
        raise ParamError(f"--kernel is only meaningful for krr/kbrr, not {cfg.algo}")
    if (cfg.data is None) == (cfg.synthetic is None):
        raise ParamError("exactly one of --data and --synthetic is required")
    if cfg.kernel == PRECOMPUTED and cfg.data is None:
        raise ParamError("--kernel precomputed needs --data with ragged kernel rows")
    if cfg.clip_y is not None and not cfg.clip_y > 0.0:
        raise ParamError(f"--clip must be positive, got {cfg.clip_y}")
    allowed = CHECKS_BY_ALGO[cfg.algo]
    for check in cfg.checks:
        if check not in allowed:
            raise ParamError(
                f"check {check!r} is not available for algo {cfg.algo} "
                f"(allowed: {sorted(allowed)})"
            )
    if ("cor1" in cfg.checks or "cor5" in cfg.checks) and cfg.clip_y is None:
        raise ParamError("cor1/cor5 need --clip to declare the outcome bound Y")


@dataclass(frozen=True)
class ExperimentResult:
    config: ExperimentConfig
    records: list
    reports: list
    trends: list
    meta: dict

    @property
    def all_passed(self) -> bool:
        return all(r.passed for r in self.reports)


def _config_dict(cfg: ExperimentConfig) -> dict:
    out = dataclasses.asdict(cfg)
    out["kernel"] = None if cfg.kernel is None else str(cfg.kernel)
    if cfg.synthetic is not None:
        synth = dataclasses.asdict(cfg.synthetic)
        if not isinstance(synth["theta_star"], str):
            synth["theta_star"] = [float(v) for v in synth["theta_star"]]
        out["synthetic"] = synth
    out["checks"] = list(cfg.checks)
    return out


def _load_stream(cfg: ExperimentConfig):
    """Returns (xs, ys, kmat, meta); xs is None for precomputed streams."""
    if cfg.synthetic is not None:
        xs, ys, meta = generate_synthetic(cfg.synthetic, cfg.seed)
        return xs, ys, None, meta
    if cfg.kernel == PRECOMPUTED:
        kmat, ys = load_kernel_csv(cfg.data)
        return None, ys, kmat, {"source": cfg.data, "format": "kernel"}
    xs, ys = load_csv(cfg.data)
    return xs, ys, None, {"source": cfg.data, "format": "xy"}


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    """Execute the online protocol in order, then the requested checks."""
    validate_config(cfg)
    xs, ys, kmat, meta = _load_stream(cfg)
    if cfg.dump_data_path is not None and xs is not None:
        write_csv(cfg.dump_data_path, xs, ys)

    kernelized = cfg.algo in KERNEL_ALGOS
    if kernelized:
        if kmat is None:
            kmat = gram(cfg.kernel, xs)
        run = kernel_run_gram(kmat, ys, cfg.a, cfg.refactor_every)
    else:
        run = ridge_run(xs, ys, cfg.a)

    records = run.records(clip_y=cfg.clip_y)
    if cfg.algo == "vaw":
        records = [
            dataclasses.replace(
                r,
                gamma=float(g),
                sq_loss=(r.y - float(g)) ** 2,
                weighted_sq_loss=(r.y - float(g)) ** 2 / r.denom,
                gamma_clipped=None if cfg.clip_y is None else clip(float(g), cfg.clip_y),
            )
            for r, g in zip(records, run.vaw_gammas)
        ]
    if cfg.algo in ("brr", "kbrr"):
        records = [
            dataclasses.replace(
                r,
                log_loss=gaussian_log_loss(
                    PredictiveGaussian(r.gamma, cfg.sigma ** 2 * r.denom), r.y
                ),
            )
            for r in records
        ]

    reports, trends = [], []
    for check in cfg.checks:
        if check == "thm1":
            reports.append(verify.verify_thm1(xs, ys, cfg.a))
        elif check == "thm2":
            reports.append(verify.verify_thm2(xs, ys, cfg.a, cfg.sigma))
        elif check == "cor1":
            reports.append(verify.verify_cor1(xs, ys, cfg.a, cfg.clip_y))
        elif check == "cor2":
            reports.append(verify.verify_cor2(xs, ys, cfg.a))
        elif check == "det_bound":
            reports.append(verify.verify_det_bound(xs, ys, cfg.a))
        elif check == "det_identity" and not kernelized:
            reports.append(verify.verify_det_identity(xs, ys, cfg.a))
        elif check == "det_identity":
            reports.append(verify.verify_kernel_det_identity(
                kmat, ys, cfg.a, _kernel_or_none(cfg), cfg.refactor_every))
        elif check == "thm3":
            reports.append(verify.verify_thm3(
                kmat, ys, cfg.a, _kernel_or_none(cfg), cfg.refactor_every))
        elif check == "thm4":
            reports.append(verify.verify_thm4(
                kmat, ys, cfg.a, cfg.sigma, _kernel_or_none(cfg), cfg.refactor_every))
        elif check == "cor5":
            reports.append(verify.verify_cor5(
                kmat, ys, cfg.a, cfg.clip_y, _kernel_or_none(cfg), cfg.refactor_every))
        elif check == "cor3_trend":
            if kernelized:
                trends.append(verify.trend_from_run(
                    run, cfg.a, meta={"kernel": str(cfg.kernel)}))
            else:
                trends.append(verify.verify_trend_cor3(xs, ys, cfg.a))

    if cfg.steps_path is not None:
        write_step_log(cfg.steps_path, records)
    if cfg.report_path is not None:
        payload = {
            "schema_version": SCHEMA_VERSION,
            "config": _config_dict(cfg),
            "reports": [r.to_dict() for r in reports],
            "steps_path": cfg.steps_path,
            "stream_meta": meta,
        }
        if trends:
            payload["trends"] = [t.to_dict() for t in trends]
        with open(cfg.report_path, "w") as handle:
            json.dump(payload, handle, indent=2)
            handle.write("\n")

    return ExperimentResult(config=cfg, records=records, reports=reports,
                            trends=trends, meta=meta)


def _kernel_or_none(cfg: ExperimentConfig):
    return cfg.kernel if isinstance(cfg.kernel, KernelSpec) else None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ridgestream",
        description="Run an online regression experiment and verify its guarantees.",
    )
    parser.add_argument("--algo", required=True,
                        choices=sorted(CHECKS_BY_ALGO),
                        help="learner to run")
    parser.add_argument("--a", type=float, default=1.0,
                        help="ridge regularization a > 0 (default 1.0)")
    parser.add_argument("--sigma", type=float, default=None,
                        help="noise scale for brr/kbrr")
    parser.add_argument("--kernel", default=None,
                        help="kernel spec, e.g. rbf:gamma=0.5, polynomial:degree=2,"
                             "offset=1, linear, or 'precomputed'")
    parser.add_argument("--clip", dest="clip_y", type=float, default=None,
                        help="clip predictions (and declare |y| bound) to [-Y, Y]")
    parser.add_argument("--data", default=None,
                        help="CSV stream path (f1..fn,y header, or ragged kernel "
                             "rows with --kernel precomputed)")
    parser.add_argument("--synthetic", default=None,
                        help="inline spec, e.g. n=3,T=100,x=cube:1.0,theta=random,"
                             "noise=0.5,adversarial=constant_x")
    parser.add_argument("--checks", default="",
                        help="comma-separated guarantee names to verify")
    parser.add_argument("--seed", type=int, default=0,
                        help="stream generator seed (default 0)")
    parser.add_argument("--report", dest="report_path", default=None,
                        help="write the JSON report here")
    parser.add_argument("--steps", dest="steps_path", default=None,
                        help="write the per-step CSV log here")
    parser.add_argument("--dump-data", dest="dump_data_path", default=None,
                        help="write the realized stream as a loadable CSV")
    parser.add_argument("--refactor-every", type=int, default=256,
                        help="kernel inverse re-sync cadence (default 256)")
    return parser


def config_from_args(args) -> ExperimentConfig:
    kernel = None
    if args.kernel is not None:
        text = args.kernel.strip().lower()
        kernel = PRECOMPUTED if text == PRECOMPUTED else KernelSpec.from_string(args.kernel)
    synthetic = None
    if args.synthetic is not None:
        synthetic = SyntheticSpec.from_string(args.synthetic)
    checks = tuple(c.strip() for c in args.checks.split(",") if c.strip())
    return ExperimentConfig(
        algo=args.algo,
        a=args.a,
        sigma=args.sigma,
        kernel=kernel,
        clip_y=args.clip_y,
        data=args.data,
        synthetic=synthetic,
        checks=checks,
        seed=args.seed,
        report_path=args.report_path,
        steps_path=args.steps_path,
        dump_data_path=args.dump_data_path,
        refactor_every=args.refactor_every,
    )


def _print_summary(result: ExperimentResult) -> None:
    T = len(result.records)
    plain = sum(r.sq_loss for r in result.records)
    weighted = sum(r.weighted_sq_loss for r in result.records)
    print(f"steps={T} plain_loss={plain:.6g} weighted_loss={weighted:.6g}")
    for report in result.reports:
        verdict = "PASS" if report.passed else "FAIL"
        rel = "=" if report.relation == "equality" else "<="
        print(f"{verdict} {report.name}: lhs={report.lhs:.9g} {rel} "
              f"rhs={report.rhs:.9g} gap={report.gap:.3g}")
    for trend in result.trends:
        print(f"INFO {trend.name}: tail_max={trend.tail_max:.3g} "
              f"(from step {trend.tail_start + 1})")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from_args(args)
        result = run_experiment(cfg)
    except RidgestreamError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    _print_summary(result)
    return 0 if result.all_passed else 1


if __name__ == "__main__":
    sys.exit(main())
