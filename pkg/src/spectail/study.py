"""Simulation-study harness: configuration, replication, summaries, reports.

A study generates ``replications`` independent series per model and evaluates
every requested estimator on the same series under both threshold modes:

* ``tq`` - deterministic threshold at the marginal quantile of ``|X_0|``
  (analytic for copula models, cached Monte Carlo for the rest),
* ``os`` - the matching intermediate order statistic ``|X|_{n-k:n}`` with
  ``k = round(n (1 - beta))``.

Estimates are recorded in survival form (``1 - cdf``), the orientation in
which backward estimates can exceed 1.  Replicates with zero exceedances are
recorded as missing, never fatal.  Everything is deterministic given the
master seed; replicates are seeded individually so they can run in parallel.
"""

from __future__ import annotations

import csv
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .distributions import StandardizedT, StandardNormal
from .errors import DomainError
from .estimators import (
    Deterministic,
    OrderStatistic,
    backward_cdf,
    forward_cdf,
    hill_alpha,
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
    constant_factor_sre,
    generate,
    iid_pareto_sre,
    lognormal_sre,
    recommended_burn_in,
)
from .streams import derive_seed, make_stream
from .truth import marginal_quantile

__all__ = [
    "StudyConfig",
    "StudyRecord",
    "StudyResult",
    "QuerySummary",
    "default_models",
    "model_to_dict",
    "model_from_dict",
    "config_to_json",
    "config_from_json",
    "resolve_tq_thresholds",
    "run_study",
    "summarize",
    "emit_report",
    "read_estimates",
    "derive_seed",
]

_KINDS = ("forward", "backward", "hill")
_MODES = ("tq", "os")


# ---------------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------------

def default_models() -> list[ModelSpec]:
    """The simulation-study model set: two GARCH and six copula chains."""
    return [
        GarchSpec(0.1, 0.14, 0.84, StandardNormal()),
        GarchSpec(0.1, 0.14, 0.84, StandardizedT(4)),
        MarkovCopulaSpec(4, TCopula(4, 0.25)),
        MarkovCopulaSpec(4, TCopula(4, 0.50)),
        MarkovCopulaSpec(4, TCopula(4, 0.75)),
        MarkovCopulaSpec(4, GumbelHougaard(1.2)),
        MarkovCopulaSpec(4, GumbelHougaard(1.5)),
        MarkovCopulaSpec(4, GumbelHougaard(2.0)),
    ]


@dataclass(frozen=True)
class StudyConfig:
    models: tuple[ModelSpec, ...] = ()
    n: int = 2000
    replications: int = 1000
    levels: tuple[float, ...] = (0.9, 0.95)
    lags: tuple[int, ...] = (1, 3, 5)
    arguments: tuple[float, ...] = (0.5, 1.0)
    kinds: tuple[str, ...] = ("forward", "backward")
    threshold_modes: tuple[str, ...] = ("tq", "os")
    master_seed: int = 0x5EC7A11
    output_dir: str = "study-out"
    quantile_m: int = 10**6
    quantile_reps: int = 20

    def __post_init__(self):
        if not self.models:
            object.__setattr__(self, "models", tuple(default_models()))
        else:
            object.__setattr__(self, "models", tuple(self.models))
        if self.replications < 2:
            raise DomainError("a study needs at least 2 replications")
        if self.n < 10:
            raise DomainError("core length implausibly small")
        for kind in self.kinds:
            if kind not in _KINDS:
                raise DomainError(f"unknown estimator kind {kind!r}")
        for mode in self.threshold_modes:
            if mode not in _MODES:
                raise DomainError(f"unknown threshold mode {mode!r}")
        for beta in self.levels:
            if not 0.0 < beta < 1.0:
                raise DomainError(f"level {beta} outside (0,1)")
            if round(self.n * (1.0 - beta)) < 1:
                raise DomainError(f"level {beta} leaves no exceedances at n={self.n}")
        for lag in self.lags:
            if lag == 0:
                raise DomainError("lags must be nonzero")

    @property
    def max_lag(self) -> int:
        return max(abs(t) for t in self.lags)


def model_to_dict(model: ModelSpec) -> dict:
    if isinstance(model, GarchSpec):
        innov = (
            {"kind": "normal"}
            if isinstance(model.innovation, StandardNormal)
            else {"kind": "student_t", "nu": model.innovation.nu}
        )
        return {
            "kind": "garch",
            "alpha0": model.alpha0,
            "alpha1": model.alpha1,
            "beta1": model.beta1,
            "innovation": innov,
        }
    if isinstance(model, MarkovCopulaSpec):
        if isinstance(model.copula, TCopula):
            return {
                "kind": "t_copula",
                "marginal_nu": model.marginal_nu,
                "nu": model.copula.nu,
                "rho": model.copula.rho,
            }
        return {
            "kind": "gumbel_copula",
            "marginal_nu": model.marginal_nu,
            "theta": model.copula.theta,
        }
    if isinstance(model, SreSpec):
        if model.name.startswith("sre-logn"):
            raise DomainError(
                "serialize lognormal SREs through their parameters: "
                'use {"kind": "sre_lognormal", ...}'
            )
        raise DomainError(f"model {model.name!r} has no JSON form")
    raise DomainError(f"unknown model type {type(model).__name__}")


def model_from_dict(d: dict) -> ModelSpec:
    kind = d.get("kind")
    if kind == "garch":
        innov_d = d.get("innovation", {"kind": "normal"})
        innov = (
            StandardNormal()
            if innov_d["kind"] == "normal"
            else StandardizedT(float(innov_d["nu"]))
        )
        return GarchSpec(float(d["alpha0"]), float(d["alpha1"]), float(d["beta1"]), innov)
    if kind == "t_copula":
        nu = float(d.get("marginal_nu", d.get("nu")))
        return MarkovCopulaSpec(nu, TCopula(float(d.get("nu", nu)), float(d["rho"])))
    if kind == "gumbel_copula":
        return MarkovCopulaSpec(float(d.get("marginal_nu", 4.0)), GumbelHougaard(float(d["theta"])))
    if kind == "sre_lognormal":
        return lognormal_sre(float(d.get("mu", -0.5)), float(d.get("sigma", 1.0)), float(d.get("d_mean", 1.0)))
    if kind == "sre_constant":
        return constant_factor_sre(float(d["c"]), float(d.get("d_mean", 1.0)))
    if kind == "sre_iid_pareto":
        return iid_pareto_sre(float(d["alpha"]))
    raise DomainError(f"unknown model kind {kind!r}")


def config_to_json(config: StudyConfig) -> str:
    payload = {
        "models": [model_to_dict(m) for m in config.models],
        "n": config.n,
        "replications": config.replications,
        "levels": list(config.levels),
        "lags": list(config.lags),
        "arguments": list(config.arguments),
        "kinds": list(config.kinds),
        "threshold_modes": list(config.threshold_modes),
        "master_seed": config.master_seed,
        "output_dir": config.output_dir,
        "quantile_m": config.quantile_m,
        "quantile_reps": config.quantile_reps,
    }
    return json.dumps(payload, indent=2)


def config_from_json(text: str) -> StudyConfig:
    d = json.loads(text)
    kwargs = {}
    if "models" in d:
        kwargs["models"] = tuple(model_from_dict(m) for m in d["models"])
    for key in (
        "n", "replications", "master_seed", "output_dir", "quantile_m", "quantile_reps",
    ):
        if key in d:
            kwargs[key] = d[key]
    for key in ("levels", "lags", "arguments", "kinds", "threshold_modes"):
        if key in d:
            kwargs[key] = tuple(d[key])
    return StudyConfig(**kwargs)


# ---------------------------------------------------------------------------
# Records
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StudyRecord:
    model: str
    replicate: int
    kind: str
    lag: int
    x: float | None
    beta: float
    mode: str
    threshold_value: float
    exceedances: int
    alpha_hat: float | None
    estimate: float | None  # survival form; None when the replicate is missing


@dataclass(frozen=True)
class StudyResult:
    config: StudyConfig
    records: tuple[StudyRecord, ...]
    replicate_meta: dict[tuple[str, int], dict]
    quantiles: dict[tuple[str, float], dict]


# ---------------------------------------------------------------------------
# Threshold resolution with a cached quantile table
# ---------------------------------------------------------------------------

def resolve_tq_thresholds(
    config: StudyConfig, cache_path: str | Path | None = None
) -> dict[tuple[str, float], dict]:
    """Quantile table for every (model, level) pair the study needs.

    Monte Carlo entries carry their own standard error and are cached as JSON
    so repeated runs do not repeat the simulation.
    """
    cache: dict[str, dict] = {}
    path = Path(cache_path) if cache_path is not None else None
    if path is not None and path.exists():
        cache = json.loads(path.read_text())
    out: dict[tuple[str, float], dict] = {}
    dirty = False
    for model in config.models:
        for beta in config.levels:
            key = f"{model.label}|{beta:.12g}|m={config.quantile_m}|reps={config.quantile_reps}"
            if key not in cache:
                est = marginal_quantile(
                    model,
                    beta,
                    m=config.quantile_m,
                    repetitions=config.quantile_reps,
                    rng=make_stream(config.master_seed, ("quantile", model.label, f"{beta:.12g}")),
                )
                cache[key] = {
                    "value": est.value,
                    "std_error": est.std_error,
                    "method": est.method,
                    "m": est.m,
                    "repetitions": est.repetitions,
                }
                dirty = True
            out[(model.label, beta)] = cache[key]
    if path is not None and dirty:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(cache, indent=2, sort_keys=True))
    return out


# ---------------------------------------------------------------------------
# Running
# ---------------------------------------------------------------------------

def _evaluate_replicate(
    config: StudyConfig,
    model: ModelSpec,
    rep: int,
    thresholds: dict[float, float],
) -> tuple[list[StudyRecord], dict]:
    seed_labels = (model.label, "replicate", rep)
    stream = make_stream(config.master_seed, seed_labels)
    req = SeriesRequest(config.n, config.max_lag, recommended_burn_in(model))
    series = generate(model, req, stream)
    records: list[StudyRecord] = []
    for beta in config.levels:
        k = round(config.n * (1.0 - beta))
        for mode in config.threshold_modes:
            spec = Deterministic(thresholds[beta]) if mode == "tq" else OrderStatistic(k)
            exc = resolve_threshold(series, spec)
            count = exc.count
            alpha = hill_alpha(series, exc) if count >= 1 else None
            if "hill" in config.kinds:
                records.append(StudyRecord(
                    model.label, rep, "hill", 0, None, beta, mode,
                    exc.threshold_value, count, alpha, alpha,
                ))
            for kind in config.kinds:
                if kind == "hill":
                    continue
                for t in config.lags:
                    for x in config.arguments:
                        if count == 0:
                            records.append(StudyRecord(
                                model.label, rep, kind, t, x, beta, mode,
                                exc.threshold_value, 0, None, None,
                            ))
                            continue
                        if kind == "forward":
                            cdf = forward_cdf(series, t, x, exc, spec).estimate
                            # survival as an integer ratio keeps OS estimates
                            # exactly on the lattice {i/k}
                            surv = (count - round(cdf * count)) / count
                        else:
                            surv = 1.0 - backward_cdf(series, t, x, exc, alpha, spec).estimate
                        records.append(StudyRecord(
                            model.label, rep, kind, t, x, beta, mode,
                            exc.threshold_value, count, alpha, surv,
                        ))
    meta = {
        "seed": derive_seed(config.master_seed, seed_labels),
        "checksum": series.checksum(),
    }
    return records, meta


def _worker(payload: tuple[str, dict, int, int, dict]) -> list:
    config_json, model_dict, lo, hi, thresholds = payload
    config = config_from_json(config_json)
    model = model_from_dict(model_dict)
    out = []
    for rep in range(lo, hi):
        records, meta = _evaluate_replicate(config, model, rep, thresholds)
        out.append((rep, records, meta))
    return out


def run_study(
    config: StudyConfig,
    jobs: int = 1,
    quantile_cache: str | Path | None = None,
) -> StudyResult:
    """Execute the full study; deterministic given the configuration."""
    quantiles = resolve_tq_thresholds(config, quantile_cache)
    all_records: list[StudyRecord] = []
    meta: dict[tuple[str, int], dict] = {}
    for model in config.models:
        thresholds = {beta: quantiles[(model.label, beta)]["value"] for beta in config.levels}
        if jobs <= 1:
            for rep in range(config.replications):
                records, m = _evaluate_replicate(config, model, rep, thresholds)
                all_records.extend(records)
                meta[(model.label, rep)] = m
        else:
            config_json = config_to_json(config)
            model_dict = model_to_dict(model)
            bounds = np.linspace(0, config.replications, jobs + 1).astype(int)
            payloads = [
                (config_json, model_dict, int(lo), int(hi), thresholds)
                for lo, hi in zip(bounds, bounds[1:])
                if hi > lo
            ]
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                for chunk in pool.map(_worker, payloads):
                    for rep, records, m in chunk:
                        all_records.extend(records)
                        meta[(model.label, rep)] = m
    all_records.sort(key=lambda r: (r.model, r.replicate, r.kind, r.lag, r.x if r.x is not None else -1e9, r.beta, r.mode))
    return StudyResult(config, tuple(all_records), meta, quantiles)


# ---------------------------------------------------------------------------
# Summaries
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QuerySummary:
    model: str
    kind: str
    lag: int
    x: float
    beta: float
    n_pairs: int
    tq: np.ndarray
    os: np.ndarray
    mean_tq: float
    sd_tq: float
    mean_os: float
    sd_os: float
    variance_ratio: float | None  # var(tq - os) / var(tq); None when undefined
    ks_distance: float
    out_of_unit_tq: int
    out_of_unit_os: int
    missing_tq: int
    missing_os: int


def summarize(result: StudyResult, model: str, kind: str, lag: int, x: float, beta: float) -> QuerySummary:
    """Paired TQ/OS summary for one estimator cell."""
    by_rep: dict[int, dict[str, float | None]] = {}
    miss = {"tq": 0, "os": 0}
    for rec in result.records:
        if (rec.model, rec.kind, rec.lag, rec.beta) != (model, kind, lag, beta):
            continue
        if kind != "hill" and rec.x != x:
            continue
        by_rep.setdefault(rec.replicate, {})[rec.mode] = rec.estimate
        if rec.estimate is None:
            miss[rec.mode] += 1
    if not by_rep:
        raise DomainError(
            f"no records for query ({model}, {kind}, lag={lag}, x={x}, beta={beta})"
        )
    pairs = [
        (v["tq"], v["os"])
        for v in by_rep.values()
        if v.get("tq") is not None and v.get("os") is not None
    ]
    if not pairs:
        raise DomainError("every replicate is missing at least one threshold mode")
    tq = np.array([p[0] for p in pairs])
    osv = np.array([p[1] for p in pairs])
    var_tq = float(np.var(tq, ddof=1))
    ratio = None if var_tq == 0.0 else float(np.var(tq - osv, ddof=1) / var_tq)
    # two-sample KS between the TQ and OS estimate distributions
    grid = np.union1d(tq, osv)
    cdf_tq = np.searchsorted(np.sort(tq), grid, side="right") / len(tq)
    cdf_os = np.searchsorted(np.sort(osv), grid, side="right") / len(osv)
    ks = float(np.max(np.abs(cdf_tq - cdf_os)))
    return QuerySummary(
        model=model, kind=kind, lag=lag, x=x, beta=beta,
        n_pairs=len(pairs),
        tq=tq, os=osv,
        mean_tq=float(np.mean(tq)), sd_tq=float(np.std(tq, ddof=1)),
        mean_os=float(np.mean(osv)), sd_os=float(np.std(osv, ddof=1)),
        variance_ratio=ratio,
        ks_distance=ks,
        out_of_unit_tq=int(np.count_nonzero((tq < 0) | (tq > 1))),
        out_of_unit_os=int(np.count_nonzero((osv < 0) | (osv > 1))),
        missing_tq=miss["tq"],
        missing_os=miss["os"],
    )


# ---------------------------------------------------------------------------
# Report emission
# ---------------------------------------------------------------------------

def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return f"{v:.17g}"
    return str(v)


def _slug(model: str, kind: str, lag: int, x: float, beta: float) -> str:
    return f"{model}_{kind}_t{lag}_x{x:g}_b{beta:g}".replace("/", "-")


def _svg_header(w: int, h: int) -> list[str]:
    return [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" '
        f'viewBox="0 0 {w} {h}">',
        f'<rect width="{w}" height="{h}" fill="white"/>',
    ]


def _svg_qq(summary: QuerySummary, size: int = 420) -> str:
    pad = 40
    span = size - 2 * pad
    xs = np.sort(summary.tq)
    ys = np.sort(summary.os)
    lo = min(xs[0], ys[0], 0.0)
    hi = max(xs[-1], ys[-1], 1e-9)
    scale = span / (hi - lo) if hi > lo else 1.0

    def px(v):
        return pad + (v - lo) * scale

    def py(v):
        return size - pad - (v - lo) * scale

    parts = _svg_header(size, size)
    parts.append(
        f'<path class="diagonal" d="M {px(lo):.2f} {py(lo):.2f} L {px(hi):.2f} {py(hi):.2f}" '
        'stroke="red" stroke-dasharray="6,4" fill="none"/>'
    )
    for a, b in zip(xs, ys):
        parts.append(f'<circle cx="{px(a):.2f}" cy="{py(b):.2f}" r="2" fill="#1f4e9c"/>')
    parts.append(
        f'<text x="{size/2:.0f}" y="{size-8}" text-anchor="middle" font-size="12">'
        f"{summary.model} {summary.kind} t={summary.lag} x={summary.x:g} "
        f"beta={summary.beta:g} (TQ vs OS)</text>"
    )
    parts.append("</svg>")
    return "\n".join(parts)


def _ecdf(valuesarr: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    v = np.sort(valuesarr)
    return v, np.arange(1, len(v) + 1) / len(v)


def _svg_ecdf(summary: QuerySummary, references: dict[str, float] | None, size: int = 420) -> str:
    pad = 40
    span = size - 2 * pad
    curves = {"tq": _ecdf(summary.tq), "os": _ecdf(summary.os)}
    all_v = np.concatenate([c[0] for c in curves.values()])
    lo, hi = float(all_v.min()), float(all_v.max())
    if references:
        lo = min(lo, min(references.values()))
        hi = max(hi, max(references.values()))
    if hi <= lo:
        hi = lo + 1e-9
    sx = span / (hi - lo)

    def px(v):
        return pad + (v - lo) * sx

    def py(f):
        return size - pad - f * span

    colors = {"tq": "#c0392b", "os": "#1f4e9c"}
    parts = _svg_header(size, size)
    for mode, (v, f) in curves.items():
        d = [f"M {px(v[0]):.2f} {py(0.0):.2f}"]
        for vi, fi in zip(v, f):
            d.append(f"L {px(vi):.2f} {py(fi - 1 / len(v)):.2f}")
            d.append(f"L {px(vi):.2f} {py(fi):.2f}")
        parts.append(
            f'<path class="ecdf-{mode}" d="{" ".join(d)}" stroke="{colors[mode]}" fill="none"/>'
        )
    for name, val in (references or {}).items():
        parts.append(
            f'<path class="reference" d="M {px(val):.2f} {py(0.0):.2f} L {px(val):.2f} {py(1.0):.2f}" '
            f'stroke="black" stroke-width="1" fill="none"><title>{name}</title></path>'
        )
    parts.append(
        f'<text x="{size/2:.0f}" y="{size-8}" text-anchor="middle" font-size="12">'
        f"ECDF {summary.model} {summary.kind} t={summary.lag} x={summary.x:g} beta={summary.beta:g}</text>"
    )
    parts.append("</svg>")
    return "\n".join(parts)


def emit_report(
    result: StudyResult,
    formats: tuple[str, ...] = ("csv",),
    out_dir: str | Path | None = None,
    references: dict[tuple[str, str, int, float, float], dict[str, float]] | None = None,
) -> list[Path]:
    """Write the estimates table plus per-query Q-Q/ECDF data (and SVG panels).

    ``references`` may attach vertical reference values (limit probability,
    pre-asymptotic value) to ECDF panels, keyed by (model, kind, lag, x, beta).
    """
    out = Path(out_dir) if out_dir is not None else Path(result.config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    est_path = out / "estimates.csv"
    with est_path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow([
            "model", "replicate", "kind", "lag", "x", "beta", "mode",
            "threshold_value", "exceedances", "alpha_hat", "estimate",
        ])
        for r in result.records:
            w.writerow([
                r.model, r.replicate, r.kind, r.lag, _fmt(r.x), _fmt(r.beta), r.mode,
                _fmt(r.threshold_value), r.exceedances, _fmt(r.alpha_hat), _fmt(r.estimate),
            ])
    written.append(est_path)

    manifest = out / "replicates.csv"
    with manifest.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["model", "replicate", "seed", "checksum"])
        for (model, rep), m in sorted(result.replicate_meta.items()):
            w.writerow([model, rep, m["seed"], m["checksum"]])
    written.append(manifest)

    qpath = out / "quantiles.csv"
    with qpath.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["model", "beta", "value", "std_error", "method"])
        for (model, beta), entry in sorted(result.quantiles.items()):
            w.writerow([model, _fmt(beta), _fmt(entry["value"]), _fmt(entry["std_error"]), entry["method"]])
    written.append(qpath)

    config = result.config
    cells = [
        (m.label, kind, lag, x, beta)
        for m in config.models
        for kind in config.kinds
        if kind != "hill"
        for lag in config.lags
        for x in config.arguments
        for beta in config.levels
    ]
    for model, kind, lag, x, beta in cells:
        try:
            summary = summarize(result, model, kind, lag, x, beta)
        except DomainError:
            continue
        slug = _slug(model, kind, lag, x, beta)
        qq_path = out / f"qq_{slug}.csv"
        with qq_path.open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["rank", "tq_sorted", "os_sorted"])
            for i, (a, b) in enumerate(zip(np.sort(summary.tq), np.sort(summary.os)), start=1):
                w.writerow([i, _fmt(float(a)), _fmt(float(b))])
        written.append(qq_path)
        for mode, arr in (("tq", summary.tq), ("os", summary.os)):
            epath = out / f"ecdf_{slug}_{mode}.csv"
            v, f = _ecdf(arr)
            with epath.open("w", newline="") as fh:
                w = csv.writer(fh)
                w.writerow(["value", "cum_fraction"])
                for vi, fi in zip(v, f):
                    w.writerow([_fmt(float(vi)), _fmt(float(fi))])
            written.append(epath)
        if "svg" in formats:
            svg_path = out / f"qq_{slug}.svg"
            svg_path.write_text(_svg_qq(summary))
            written.append(svg_path)
            refs = (references or {}).get((model, kind, lag, x, beta))
            ecdf_path = out / f"ecdf_{slug}.svg"
            ecdf_path.write_text(_svg_ecdf(summary, refs))
            written.append(ecdf_path)

    vr_path = out / "variance_ratios.csv"
    with vr_path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow([
            "model", "kind", "lag", "x", "beta", "n_pairs", "mean_tq", "sd_tq",
            "mean_os", "sd_os", "variance_ratio", "ks_distance",
            "out_of_unit_tq", "out_of_unit_os", "missing_tq", "missing_os",
        ])
        for model, kind, lag, x, beta in cells:
            try:
                s = summarize(result, model, kind, lag, x, beta)
            except DomainError:
                continue
            w.writerow([
                model, kind, lag, _fmt(x), _fmt(beta), s.n_pairs,
                _fmt(s.mean_tq), _fmt(s.sd_tq), _fmt(s.mean_os), _fmt(s.sd_os),
                _fmt(s.variance_ratio) if s.variance_ratio is not None else "undefined",
                _fmt(s.ks_distance),
                s.out_of_unit_tq, s.out_of_unit_os, s.missing_tq, s.missing_os,
            ])
    written.append(vr_path)
    return written


def read_estimates(path: str | Path) -> list[StudyRecord]:
    """Parse an estimates.csv back into records."""
    records = []
    with Path(path).open() as fh:
        for row in csv.DictReader(fh):
            records.append(StudyRecord(
                model=row["model"],
                replicate=int(row["replicate"]),
                kind=row["kind"],
                lag=int(row["lag"]),
                x=float(row["x"]) if row["x"] else None,
                beta=float(row["beta"]),
                mode=row["mode"],
                threshold_value=float(row["threshold_value"]),
                exceedances=int(row["exceedances"]),
                alpha_hat=float(row["alpha_hat"]) if row["alpha_hat"] else None,
                estimate=float(row["estimate"]) if row["estimate"] else None,
            ))
    return records
