"""Command-line interface.

Subcommands: ``generate``, ``truth`` (tail-index / quantile / spectral /
preasymptotic), ``estimate``, ``bootstrap``, ``study run`` / ``study report``
and ``diagnose`` (cluster / os / sre / clt / covariance).  Models are given
either as a built-in name (``garch-normal``, ``garch-t4``, ``tcop-r0.25``,
``gumcop-t1.2``, ...), as an inline JSON object, or as ``@path`` to a JSON
file.  All randomness flows from ``--seed``.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from .asymptotics import (
    clt_normality_check,
    cluster_moment_check,
    degenerate_tail_chain,
    garch_tail_chain,
    limit_covariance_mc,
    os_consistency_check,
    sre_condition_diagnostics,
    tcopula_tail_chain,
)
from .bootstrap import MultiplierSpec, bootstrap_ci
from .errors import SpectailError
from .estimators import (
    Deterministic,
    ExceedanceIndicator,
    ForwardRatioIndicator,
    LogExcess,
    OrderStatistic,
    backward_cdf,
    forward_cdf,
    hill_record,
    resolve_threshold,
)
from .models import (
    GarchSpec,
    GumbelHougaard,
    MarkovCopulaSpec,
    ModelSpec,
    SeriesRequest,
    SreSpec,
    TCopula,
    generate,
    lognormal_sre,
    recommended_burn_in,
)
from .streams import make_stream
from .study import (
    StudyConfig,
    config_from_json,
    config_to_json,
    default_models,
    emit_report,
    model_from_dict,
    read_estimates,
    run_study,
    StudyResult,
)
from .truth import (
    SpectralQuery,
    garch_tail_index,
    garch_tail_index_quadrature,
    marginal_quantile,
    preasymptotic,
    spectral_survival_extrapolated,
    spectral_survival_garch,
    spectral_survival_tcopula,
    sre_tail_index,
)


def _model_from_arg(text: str) -> ModelSpec:
    if text.startswith("@"):
        text = Path(text[1:]).read_text()
    text = text.strip()
    if text.startswith("{"):
        return model_from_dict(json.loads(text))
    by_label = {m.label: m for m in default_models()}
    by_label["sre-lognormal"] = lognormal_sre()
    if text in by_label:
        return by_label[text]
    raise SystemExit(
        f"unknown model {text!r}; use one of {sorted(by_label)} or a JSON object"
    )


def _threshold_from_arg(text: str, model: ModelSpec, seed: int):
    mode, _, value = text.partition(":")
    if mode == "u":
        return Deterministic(float(value))
    if mode == "os":
        return OrderStatistic(int(value))
    if mode == "beta":
        beta = float(value)
        q = marginal_quantile(model, beta, rng=make_stream(seed, ("cli-quantile",))).value
        return Deterministic(q)
    raise SystemExit(f"threshold must look like u:3.39, os:200 or beta:0.9, got {text!r}")


def _emit(obj) -> None:
    json.dump(obj, sys.stdout, indent=2, default=_jsonable)
    sys.stdout.write("\n")


def _jsonable(v):
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, np.ndarray):
        return v.tolist()
    if hasattr(v, "__dataclass_fields__"):
        return asdict(v)
    return str(v)


# ---------------------------------------------------------------------------
# Subcommand implementations
# ---------------------------------------------------------------------------

def _cmd_generate(args) -> None:
    model = _model_from_arg(args.model)
    burn = args.burn_in if args.burn_in is not None else recommended_burn_in(model)
    req = SeriesRequest(args.n, args.max_lag, burn)
    series = generate(model, req, make_stream(args.seed, ("generate",)))
    out = Path(args.out) if args.out else Path(f"{model.label}-n{args.n}.csv")
    out.parent.mkdir(parents=True, exist_ok=True)
    with out.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["index", "value"])
        for i, v in enumerate(series.values, start=1 - series.max_lag):
            w.writerow([i, f"{v:.17g}"])
    _emit({"model": model.label, "n": args.n, "max_lag": args.max_lag,
           "burn_in": burn, "checksum": series.checksum(), "path": str(out)})


def _cmd_truth(args) -> None:
    model = _model_from_arg(args.model)
    if args.truth_cmd == "tail-index":
        if isinstance(model, GarchSpec):
            if args.quadrature:
                res = garch_tail_index_quadrature(model)
            else:
                res = garch_tail_index(model, n_mc=args.n_mc,
                                       rng=make_stream(args.seed, ("tail-index",)))
        elif isinstance(model, SreSpec):
            res = sre_tail_index(model, n_mc=args.n_mc,
                                 rng=make_stream(args.seed, ("tail-index",)))
        elif isinstance(model, MarkovCopulaSpec):
            _emit({"alpha": model.marginal_nu, "method": "analytic", "mc_std_error": 0.0})
            return
        _emit(asdict(res))
    elif args.truth_cmd == "quantile":
        res = marginal_quantile(model, args.beta, m=args.m, repetitions=args.reps,
                                rng=make_stream(args.seed, ("quantile",)))
        _emit(asdict(res))
    elif args.truth_cmd == "spectral":
        q = SpectralQuery(args.lag, args.x)
        if isinstance(model, GarchSpec):
            alpha = garch_tail_index_quadrature(model).alpha
            res = spectral_survival_garch(model, q, alpha, n_mc=args.n_mc,
                                          rng=make_stream(args.seed, ("spectral",)))
        elif isinstance(model, MarkovCopulaSpec) and isinstance(model.copula, TCopula):
            res = spectral_survival_tcopula(model.marginal_nu, model.copula.rho, q,
                                            n_mc=args.n_mc,
                                            rng=make_stream(args.seed, ("spectral",)))
        elif isinstance(model, MarkovCopulaSpec):
            res = spectral_survival_extrapolated(model, q, n_mc=args.n_mc,
                                                 rng=make_stream(args.seed, ("spectral",)))
        else:
            raise SystemExit("spectral truth is available for GARCH and copula models")
        _emit(asdict(res))
    elif args.truth_cmd == "preasymptotic":
        res = preasymptotic(model, args.beta, t=args.lag, x=args.x,
                            path_length=args.path_length, repetitions=args.reps,
                            rng=make_stream(args.seed, ("preasym",)))
        _emit(asdict(res))


def _record_payload(rec) -> dict:
    d = asdict(rec)
    d["threshold"] = str(rec.threshold)
    return d


def _cmd_estimate(args) -> None:
    model = _model_from_arg(args.model)
    req = SeriesRequest(args.n, max(abs(args.lag), 1), recommended_burn_in(model))
    series = generate(model, req, make_stream(args.seed, ("series",)))
    spec = _threshold_from_arg(args.threshold, model, args.seed)
    exc = resolve_threshold(series, spec)
    if args.kind == "hill":
        rec = hill_record(series, exc, spec)
    elif args.kind == "forward":
        rec = forward_cdf(series, args.lag, args.x, exc, spec)
    else:
        from .estimators import hill_alpha

        rec = backward_cdf(series, args.lag, args.x, exc, hill_alpha(series, exc), spec)
    payload = _record_payload(rec)
    if args.kind != "hill":
        payload["survival_estimate"] = 1.0 - rec.estimate
    _emit(payload)


def _cmd_bootstrap(args) -> None:
    model = _model_from_arg(args.model)
    req = SeriesRequest(args.n, max(abs(args.lag), 1), recommended_burn_in(model))
    series = generate(model, req, make_stream(args.seed, ("series",)))
    spec = _threshold_from_arg(args.threshold, model, args.seed)
    mult = MultiplierSpec(law=args.law, replicates=args.replicates,
                          block_length=args.block_length)
    res = bootstrap_ci(series, args.kind, args.lag, args.x, spec, mult,
                       level=args.level, rng=make_stream(args.seed, ("xi",)))
    _emit({
        "point": _record_payload(res.point),
        "ci": list(res.ci),
        "level": res.level,
        "replicates": len(res.replicates),
        "degenerate_count": res.degenerate_count,
        "block_length": res.block_length,
        "n_blocks": res.n_blocks,
    })


def _cmd_study_run(args) -> None:
    from dataclasses import replace

    if args.config:
        text = Path(args.config).read_text()
        config = config_from_json(text)
    else:
        config = StudyConfig()
    if args.seed is not None:
        config = replace(config, master_seed=args.seed)
    if args.out:
        config = replace(config, output_dir=args.out)
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "config.json").write_text(config_to_json(config))
    result = run_study(config, jobs=args.jobs, quantile_cache=out / "quantile_cache.json")
    files = emit_report(result, formats=tuple(args.formats.split(",")), out_dir=out)
    _emit({"records": len(result.records), "files": [str(f) for f in files]})


def _cmd_study_report(args) -> None:
    out = Path(args.out)
    config = config_from_json((out / "config.json").read_text())
    records = read_estimates(out / "estimates.csv")
    result = StudyResult(config, tuple(records), {}, {})
    files = emit_report(result, formats=tuple(args.formats.split(",")), out_dir=out)
    _emit({"files": [str(f) for f in files]})


_PSI = {
    "exceedance": lambda a: ExceedanceIndicator(),
    "log-excess": lambda a: LogExcess(),
    "forward-ratio": lambda a: ForwardRatioIndicator(a.psi_lag, a.psi_x),
}


def _cmd_diagnose(args) -> None:
    seed_rng = make_stream(args.seed, ("diagnose", args.diag_cmd))
    if args.diag_cmd == "cluster":
        model = _model_from_arg(args.model)
        rep = cluster_moment_check(model, tuple(float(b) for b in args.levels.split(",")),
                                   r=args.r, epsilon=args.epsilon, n_mc=args.n_mc, rng=seed_rng)
    elif args.diag_cmd == "os":
        model = _model_from_arg(args.model)
        grid = tuple(int(n) for n in args.n_grid.split(","))
        power = args.k_power
        rep = os_consistency_check(model, grid, lambda n: int(n**power),
                                   reps=args.reps, rng=seed_rng)
    elif args.diag_cmd == "sre":
        spec = lognormal_sre(args.mu, args.sigma)
        rep = sre_condition_diagnostics(spec, args.xi,
                                        tuple(float(b) for b in args.levels.split(",")),
                                        r=args.r, n_mc=args.n_mc, rng=seed_rng)
    elif args.diag_cmd == "clt":
        model = _model_from_arg(args.model)
        rep = clt_normality_check(model, args.n, OrderStatistic(args.k), args.reps,
                                  args.target, kind=args.kind, t=args.lag, x=args.x,
                                  rng=seed_rng)
    else:  # covariance
        if args.chain == "tcop":
            sampler = tcopula_tail_chain(args.nu, args.rho)
        elif args.chain == "garch-normal":
            spec = GarchSpec(0.1, 0.14, 0.84)
            sampler = garch_tail_chain(spec, garch_tail_index_quadrature(spec).alpha)
        else:
            sampler = degenerate_tail_chain(args.nu)
        psi1 = _PSI[args.psi1](args)
        psi2 = _PSI[args.psi2](args)
        value, se = limit_covariance_mc(sampler, psi1, psi2, n_mc=args.n_mc,
                                        truncation=args.truncation, rng=seed_rng)
        _emit({"covariance": value, "std_error": se, "chain": sampler.name})
        return
    payload = asdict(rep)
    if args.diag_cmd == "clt":
        payload["values"] = {k: v for k, v in payload["values"].items() if k != "sample"}
    _emit(payload)


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="spectail", description=__doc__)
    sub = p.add_subparsers(dest="cmd", required=True)

    g = sub.add_parser("generate", help="simulate one padded series to CSV")
    g.add_argument("--model", required=True)
    g.add_argument("--n", type=int, default=2000)
    g.add_argument("--max-lag", type=int, default=5)
    g.add_argument("--burn-in", type=int, default=None)
    g.add_argument("--seed", type=int, default=1)
    g.add_argument("--out", default=None)
    g.set_defaults(func=_cmd_generate)

    t = sub.add_parser("truth", help="ground-truth quantities")
    ts = t.add_subparsers(dest="truth_cmd", required=True)
    ti = ts.add_parser("tail-index")
    ti.add_argument("--model", required=True)
    ti.add_argument("--n-mc", type=int, default=10**7)
    ti.add_argument("--quadrature", action="store_true")
    ti.add_argument("--seed", type=int, default=1)
    tq = ts.add_parser("quantile")
    tq.add_argument("--model", required=True)
    tq.add_argument("--beta", type=float, required=True)
    tq.add_argument("--m", type=int, default=10**6)
    tq.add_argument("--reps", type=int, default=20)
    tq.add_argument("--seed", type=int, default=1)
    tsp = ts.add_parser("spectral")
    tsp.add_argument("--model", required=True)
    tsp.add_argument("--lag", type=int, default=1)
    tsp.add_argument("--x", type=float, default=1.0)
    tsp.add_argument("--n-mc", type=int, default=10**6)
    tsp.add_argument("--seed", type=int, default=1)
    tpa = ts.add_parser("preasymptotic")
    tpa.add_argument("--model", required=True)
    tpa.add_argument("--beta", type=float, required=True)
    tpa.add_argument("--lag", type=int, default=1)
    tpa.add_argument("--x", type=float, default=1.0)
    tpa.add_argument("--path-length", type=int, default=10**6)
    tpa.add_argument("--reps", type=int, default=10)
    tpa.add_argument("--seed", type=int, default=1)
    t.set_defaults(func=_cmd_truth)

    e = sub.add_parser("estimate", help="evaluate one estimator on a simulated series")
    e.add_argument("--model", required=True)
    e.add_argument("--kind", choices=("forward", "backward", "hill"), default="forward")
    e.add_argument("--n", type=int, default=2000)
    e.add_argument("--lag", type=int, default=1)
    e.add_argument("--x", type=float, default=1.0)
    e.add_argument("--threshold", default="os:200")
    e.add_argument("--seed", type=int, default=1)
    e.set_defaults(func=_cmd_estimate)

    b = sub.add_parser("bootstrap", help="multiplier block bootstrap interval")
    b.add_argument("--model", required=True)
    b.add_argument("--kind", choices=("forward", "backward", "hill"), default="forward")
    b.add_argument("--n", type=int, default=2000)
    b.add_argument("--lag", type=int, default=1)
    b.add_argument("--x", type=float, default=1.0)
    b.add_argument("--threshold", default="os:200")
    b.add_argument("--law", choices=("rademacher", "uniform_symmetric"), default="rademacher")
    b.add_argument("--replicates", type=int, default=500)
    b.add_argument("--block-length", type=int, default=None)
    b.add_argument("--level", type=float, default=0.95)
    b.add_argument("--seed", type=int, default=1)
    b.set_defaults(func=_cmd_bootstrap)

    s = sub.add_parser("study", help="run or re-report a simulation study")
    ss = s.add_subparsers(dest="study_cmd", required=True)
    sr = ss.add_parser("run")
    sr.add_argument("--config", default=None)
    sr.add_argument("--seed", type=int, default=None)
    sr.add_argument("--out", default=None)
    sr.add_argument("--jobs", type=int, default=1)
    sr.add_argument("--formats", default="csv")
    sr.set_defaults(func=_cmd_study_run)
    sp = ss.add_parser("report")
    sp.add_argument("--out", required=True)
    sp.add_argument("--formats", default="csv,svg")
    sp.set_defaults(func=_cmd_study_report)

    d = sub.add_parser("diagnose", help="limit-theory diagnostics")
    ds = d.add_subparsers(dest="diag_cmd", required=True)
    dc = ds.add_parser("cluster")
    dc.add_argument("--model", required=True)
    dc.add_argument("--levels", default="0.99,0.999,0.9999")
    dc.add_argument("--r", type=int, default=10)
    dc.add_argument("--epsilon", type=float, default=0.1)
    dc.add_argument("--n-mc", type=int, default=10**6)
    dc.add_argument("--seed", type=int, default=1)
    do = ds.add_parser("os")
    do.add_argument("--model", required=True)
    do.add_argument("--n-grid", default="2000,8000,32000")
    do.add_argument("--k-power", type=float, default=0.7)
    do.add_argument("--reps", type=int, default=50)
    do.add_argument("--seed", type=int, default=1)
    dr = ds.add_parser("sre")
    dr.add_argument("--mu", type=float, default=-0.5)
    dr.add_argument("--sigma", type=float, default=1.0)
    dr.add_argument("--xi", type=float, default=0.5)
    dr.add_argument("--levels", default="0.99,0.999,0.9999")
    dr.add_argument("--r", type=int, default=20)
    dr.add_argument("--n-mc", type=int, default=10**6)
    dr.add_argument("--seed", type=int, default=1)
    dl = ds.add_parser("clt")
    dl.add_argument("--model", required=True)
    dl.add_argument("--n", type=int, default=2000)
    dl.add_argument("--k", type=int, default=200)
    dl.add_argument("--reps", type=int, default=500)
    dl.add_argument("--target", type=float, required=True)
    dl.add_argument("--kind", choices=("forward", "backward", "hill"), default="forward")
    dl.add_argument("--lag", type=int, default=1)
    dl.add_argument("--x", type=float, default=1.0)
    dl.add_argument("--seed", type=int, default=1)
    dv = ds.add_parser("covariance")
    dv.add_argument("--chain", choices=("tcop", "garch-normal", "degenerate"), default="tcop")
    dv.add_argument("--nu", type=float, default=4.0)
    dv.add_argument("--rho", type=float, default=0.25)
    dv.add_argument("--psi1", choices=tuple(_PSI), default="exceedance")
    dv.add_argument("--psi2", choices=tuple(_PSI), default="exceedance")
    dv.add_argument("--psi-lag", type=int, default=1)
    dv.add_argument("--psi-x", type=float, default=1.0)
    dv.add_argument("--n-mc", type=int, default=10**5)
    dv.add_argument("--truncation", type=int, default=50)
    dv.add_argument("--seed", type=int, default=1)
    for dd in (dc, do, dr, dl, dv):
        dd.set_defaults(func=_cmd_diagnose)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except SpectailError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
