"""Config-driven probes of the boundedness results and report persistence.

A probe builds one trajectory ``T^n (I - T)^m f`` per test function ``f``
(``delta_0`` plus seeded random ``f``), evaluates one or more *arms* (a
functional with fixed parameters) at the levels ``N``, and records the ratio
table ``R(N)``.  Arms inside the hypothesis regime of the result being probed
carry a verdict.  Contrast arms and exploratory arms only carry diagnostics.

Verdict rule: ``consistent-with-bounded`` iff ``R(N_top) - R(N_prev) <= 0.05 R(N_prev)``
for every tested ``f``; otherwise ``growth-observed``.
"""

from __future__ import annotations

import csv
import json
import logging
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields, is_dataclass
from pathlib import Path
from typing import Any, Callable

import numpy as np
import yaml

from . import __version__
from .certificates import (
    angular_ratio,
    check_m1,
    lemma2_quantities,
    lemma_quantities,
    ritt_constant,
)
from .fractional import Trajectory, trajectory
from .functionals import (
    BLOCK_MODES,
    block_functional,
    gap_subsequence,
    lp_square_function,
    maximal_function,
    square_function,
    variation_functional,
)
from .kernels import kernel_for, kernel_trajectory
from .measure import SpatialSequence, indicator
from .registry import canonical, resolve_measure, resolve_symbol

logger = logging.getLogger(__name__)

PROBES = ("main_theorem", "open_question", "corollary_sup", "variation", "longvar",
          "lp_square", "open_question_2")
CONSISTENT = "consistent-with-bounded"
GROWTH = "growth-observed"
VERDICT_RTOL = 0.05
THREADS_ENV = "RITTL1_THREADS"


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------------------
# configuration


@dataclass
class MeasureSpec:
    key: str = "nu_alpha:0.5"
    K: int = 1 << 14
    eps: float = 0.0


@dataclass
class F0Spec:
    delta: bool = True
    n_random: int = 20
    radius: int = 4


@dataclass
class TrajectorySpec:
    m: float = 1.0
    N_levels: list[int] = field(default_factory=lambda: [256, 512, 1024, 2048, 4096])
    method: str = "auto"            # auto | kernel | iterate
    w_max: int | None = 8192
    f0: F0Spec = field(default_factory=F0Spec)


@dataclass
class FunctionalSpec:
    alpha: float = 1.0
    s: float = 3.0
    beta: float = 0.0
    gaps_alpha: float = 0.5
    modes: list[str] = field(default_factory=lambda: list(BLOCK_MODES))
    p: float = 2.0
    s_offsets: list[float] = field(default_factory=lambda: [-0.1, 0.1])
    betas: list[float] = field(default_factory=lambda: [-0.5, -0.25, 0.0])
    extra_arms: list[dict] = field(default_factory=list)
    expect_bounded: bool | None = None


@dataclass
class CertificateSpec:
    enabled: bool = False
    tol: float = 1e-6
    t_min: float | None = None
    N: int = 1 << 17
    check_stability: bool = True


@dataclass
class ConditionSpec:
    enabled: bool = False
    grid_size: int = 4096
    m1_exponent: float | None = None


@dataclass
class OutputSpec:
    dir: str = "results"
    trajectory_csv: bool = False
    trajectory_levels: list[int] = field(default_factory=lambda: [1, 16, 256])


@dataclass
class ExperimentConfig:
    probe: str = "main_theorem"
    name: str = ""
    seed: int = 20240101
    measure: MeasureSpec = field(default_factory=MeasureSpec)
    trajectory: TrajectorySpec = field(default_factory=TrajectorySpec)
    functional: FunctionalSpec = field(default_factory=FunctionalSpec)
    certificate: CertificateSpec = field(default_factory=CertificateSpec)
    conditions: ConditionSpec = field(default_factory=ConditionSpec)
    output: OutputSpec = field(default_factory=OutputSpec)

    @property
    def label(self) -> str:
        return self.name or self.probe

    def to_dict(self) -> dict:
        return asdict(self)

    def validate(self) -> "ExperimentConfig":
        validate_config(self)
        return self


def _build(cls, data: Any, path: str):
    if not is_dataclass(cls):
        return data
    if data is None:
        return cls()
    if not isinstance(data, dict):
        raise ConfigError(f"{path or 'config'}: expected a mapping")
    known = {f.name: f for f in fields(cls)}
    unknown = sorted(set(data) - set(known))
    if unknown:
        raise ConfigError(f"{path or 'config'}: unknown keys {unknown}")
    kw = {}
    for name, value in data.items():
        sub = _SUBSPECS.get((cls, name))
        kw[name] = _build(sub, value, f"{path}.{name}".lstrip(".")) if sub else value
    return cls(**kw)


_SUBSPECS = {
    (ExperimentConfig, "measure"): MeasureSpec,
    (ExperimentConfig, "trajectory"): TrajectorySpec,
    (ExperimentConfig, "functional"): FunctionalSpec,
    (ExperimentConfig, "certificate"): CertificateSpec,
    (ExperimentConfig, "conditions"): ConditionSpec,
    (ExperimentConfig, "output"): OutputSpec,
    (TrajectorySpec, "f0"): F0Spec,
}


def config_from_dict(data: dict) -> ExperimentConfig:
    return _build(ExperimentConfig, data, "").validate()


def load_config(path) -> ExperimentConfig:
    with open(path, encoding="utf-8") as fh:
        data = yaml.safe_load(fh) or {}
    return config_from_dict(data)


def save_config(cfg: ExperimentConfig, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        yaml.safe_dump(cfg.to_dict(), fh, sort_keys=True)


def _is_int(x) -> bool:
    return float(x) == int(x)


def validate_config(cfg: ExperimentConfig) -> None:
    """Check every parameter against the preconditions of the operations it feeds."""
    tr, fn = cfg.trajectory, cfg.functional
    if cfg.probe not in PROBES:
        raise ConfigError(f"probe must be one of {PROBES}")
    try:
        resolve_symbol(cfg.measure.key, K=16)
    except (KeyError, ValueError, OSError) as exc:
        raise ConfigError(f"bad measure key {cfg.measure.key!r}: {exc}") from exc
    if cfg.measure.K < 1 or cfg.measure.eps < 0:
        raise ConfigError("measure.K must be >= 1 and measure.eps >= 0")
    levels = [int(n) for n in tr.N_levels]
    if len(levels) < 2 or levels != sorted(set(levels)) or levels[0] < 1:
        raise ConfigError("trajectory.N_levels must be >= 2 strictly increasing positive ints")
    tr.N_levels = levels
    if tr.m < 0:
        raise ConfigError("trajectory.m must be >= 0")
    if tr.method not in ("auto", "kernel", "iterate"):
        raise ConfigError("trajectory.method must be one of ('auto', 'kernel', 'iterate')")
    if tr.method == "kernel" and (kernel_for(canonical(cfg.measure.key)) is None
                                  or not _is_int(tr.m)):
        raise ConfigError("kernel method needs a closed-form kernel and integer m")
    if tr.w_max is not None and tr.w_max < 1:
        raise ConfigError("trajectory.w_max must be positive")
    f0 = tr.f0
    if f0.n_random < 0 or f0.radius < 0 or not (f0.delta or f0.n_random):
        raise ConfigError("trajectory.f0 must request at least one test function")
    if cfg.probe != "lp_square":
        for arm in _arm_params(cfg):
            if arm.get("s", 1.0) < 1.0:
                raise ConfigError("functional s must be >= 1")
    if cfg.probe == "open_question":
        if abs(fn.s * tr.m - (fn.alpha + 1.0)) > 1e-12:
            raise ConfigError("open_question probe needs s*m = alpha + 1 exactly")
    if cfg.probe == "corollary_sup" and fn.alpha < 0:
        raise ConfigError("corollary_sup needs alpha >= 0")
    if cfg.probe == "longvar":
        if not 0.0 < fn.gaps_alpha < 1.0:
            raise ConfigError("longvar needs gaps_alpha in (0, 1)")
        for arm in _arm_params(cfg):
            if not 0.0 <= arm["beta"] < 1.0 - fn.gaps_alpha:
                raise ConfigError("longvar needs 0 <= beta < 1 - gaps_alpha")
        bad = [m for m in fn.modes if m not in BLOCK_MODES]
        if bad:
            raise ConfigError(f"unknown block modes {bad}")
    if cfg.probe == "lp_square":
        if fn.p != 2.0:
            raise ConfigError("lp_square probe supports p = 2 only")
        if tr.m < 1:
            raise ConfigError("lp_square probe needs m >= 1")
    if cfg.probe == "open_question_2":
        if tr.m != 0:
            raise ConfigError("open_question_2 probe needs m = 0")
        if any(b <= -1 for b in fn.betas):
            raise ConfigError("open_question_2 needs beta > -1")
    if cfg.certificate.tol <= 0 or cfg.certificate.N < 2:
        raise ConfigError("certificate.tol must be > 0 and certificate.N >= 2")
    if cfg.conditions.grid_size < 16:
        raise ConfigError("conditions.grid_size must be >= 16")


# ---------------------------------------------------------------------------
# arms and regimes


@dataclass
class Arm:
    name: str
    kind: str                  # square | maximal | variation | oscillation | block | lp
    params: dict
    regime: bool | None        # True: hypothesis arm, False: contrast, None: exploratory
    regime_rule: str

    @property
    def has_verdict(self) -> bool:
        return self.regime is True


def _arm_params(cfg: ExperimentConfig) -> list[dict]:
    fn = cfg.functional
    base = {"alpha": fn.alpha, "s": fn.s, "beta": fn.beta}
    out = [dict(base)]
    if cfg.probe == "open_question":
        out += [dict(base, s=round(fn.s + off, 12)) for off in fn.s_offsets]
    if cfg.probe == "open_question_2":
        out = [dict(base, beta=b) for b in fn.betas]
    for extra in fn.extra_arms:
        unknown = set(extra) - {"alpha", "s", "beta"}
        if unknown:
            raise ConfigError(f"extra_arms accept alpha, s, beta only; got {sorted(unknown)}")
        out.append(dict(base, **extra))
    return out


def _fmt(params: dict, keys) -> str:
    return ",".join(f"{k}={params[k]:g}" for k in keys)


def build_arms(cfg: ExperimentConfig, ritt_ok: bool | None = None) -> list[Arm]:
    m = float(cfg.trajectory.m)
    fn = cfg.functional
    arms: list[Arm] = []
    for i, p in enumerate(_arm_params(cfg)):
        a, s, b = p["alpha"], p["s"], p["beta"]
        if cfg.probe == "main_theorem":
            arms.append(Arm(f"square[{_fmt(p, ('alpha', 's'))}]", "square", p,
                            s * m > a + 1, "s*m > alpha+1"))
        elif cfg.probe == "open_question":
            if i == 0:
                regime, rule = None, "s*m = alpha+1 (open; exploratory)"
            else:
                regime, rule = s * m > a + 1, "s*m > alpha+1"
            arms.append(Arm(f"square[{_fmt(p, ('alpha', 's'))}]", "square", p, regime, rule))
        elif cfg.probe == "corollary_sup":
            arms.append(Arm(f"maximal[{_fmt(p, ('alpha',))}]", "maximal", p, a < m,
                            "alpha < m"))
        elif cfg.probe in ("variation", "open_question_2"):
            if cfg.probe == "variation":
                regime, rule = (b == 0 or s * (m - b) > 1), "beta = 0 or s(m-beta) > 1"
            else:
                regime, rule = None, "beta > -1, m = 0 (open; exploratory)"
            for kind in ("variation", "oscillation"):
                arms.append(Arm(f"{kind}[{_fmt(p, ('beta', 's'))}]", kind, p, regime, rule))
        elif cfg.probe == "longvar":
            g = fn.gaps_alpha
            for mode in fn.modes:
                if mode == "block-variation":
                    thr, rule = 1.0 / (1.0 - g - b), "s > 1/(1-a-beta)"
                else:
                    thr, rule = (1.0 - g) / (1.0 - g - b), "s > (1-a)/(1-a-beta)"
                q = dict(p, mode=mode, gaps_alpha=g, threshold=thr)
                arms.append(Arm(f"block[{mode},{_fmt(p, ('beta', 's'))}]", "block", q,
                                s > thr, rule))
        elif cfg.probe == "lp_square":
            regime = fn.expect_bounded if fn.expect_bounded is not None else ritt_ok
            q = {"p": fn.p, "m": m}
            arms.append(Arm(f"lp_square[p={fn.p:g}]", "lp", q, regime,
                            "operator is Ritt (explicit or empirical trend)"))
            break
    return arms


# ---------------------------------------------------------------------------
# test functions and trajectories


@dataclass
class ProbeInput:
    label: str
    f: SpatialSequence


def make_test_functions(spec: F0Spec, seed: int, w_max: int | None = None) -> list[ProbeInput]:
    """``delta_0`` plus ``n_random`` seeded random functions supported on ``[-r, r]``.

    Random functions have standard normal entries and are scaled to unit l1 norm.
    """
    out = []
    if spec.delta:
        out.append(ProbeInput("delta0", indicator(0, w_max)))
    rng = np.random.default_rng(seed)
    r = spec.radius
    for i in range(spec.n_random):
        v = rng.standard_normal(2 * r + 1)
        v /= np.abs(v).sum()
        out.append(ProbeInput(f"random{i:02d}", SpatialSequence(-r, v, 0.0, w_max)))
    return out


def choose_method(cfg: ExperimentConfig) -> str:
    tr = cfg.trajectory
    if tr.method != "auto":
        return tr.method
    if kernel_for(canonical(cfg.measure.key)) is not None and _is_int(tr.m):
        return "kernel"
    return "iterate"


def build_trajectory(cfg: ExperimentConfig, f: SpatialSequence, N: int, mu=None) -> Trajectory:
    tr = cfg.trajectory
    if choose_method(cfg) == "kernel":
        return kernel_trajectory(kernel_for(canonical(cfg.measure.key)), int(tr.m), f, N)
    mu = resolve_measure(cfg.measure.key, cfg.measure.K) if mu is None else mu
    return trajectory(mu, tr.m, f, N, eps=cfg.measure.eps, w_max=tr.w_max, K=cfg.measure.K)


def _norm(f: SpatialSequence, p: float = 1.0) -> float:
    return float(np.sum(np.abs(f.values) ** p) ** (1.0 / p))


def evaluate_arm(arm: Arm, traj: Trajectory, levels: list[int], f: SpatialSequence) -> list[float]:
    """``R(N)`` for each level: the functional's l1 norm over ``||f||_1``."""
    p = arm.params
    if arm.kind == "square":
        res = square_function(traj, p["alpha"], p["s"], N=levels)
    elif arm.kind == "maximal":
        res = maximal_function(traj, p["alpha"], N=levels)
    elif arm.kind in ("variation", "oscillation"):
        pairs = variation_functional(traj, p["beta"], p["s"], N=levels)
        res = [v if arm.kind == "variation" else o for v, o in pairs]
    elif arm.kind == "block":
        gaps = gap_subsequence(p["gaps_alpha"], max(levels))
        res = block_functional(traj, gaps, p["beta"], p["s"], p["mode"], N=levels)
    elif arm.kind == "lp":
        res = lp_square_function(traj, p["p"], N=levels)
        return [r.l1_norm / _norm(f, p["p"]) for r in res]
    else:  # pragma: no cover - guarded by build_arms
        raise ValueError(arm.kind)
    return [r.l1_norm / _norm(f) for r in res]


def terminal_decay(traj: Trajectory, alpha: float, levels: list[int]) -> list[float]:
    """``n^alpha max_x |terms[n](x)|`` at each level ``n``."""
    return [float(n ** alpha * np.max(np.abs(traj.values[n]))) for n in levels]


# ---------------------------------------------------------------------------
# verdicts and diagnostics


def growth_exponent(levels, values) -> float | None:
    """Least-squares slope of ``log R`` against ``log N`` over the top three levels."""
    x = np.log(np.asarray(levels[-3:], dtype=float))
    y = np.asarray(values[-3:], dtype=float)
    if y.size < 2 or np.any(y <= 0) or not np.all(np.isfinite(y)):
        return None
    return float(np.polyfit(x, np.log(y), 1)[0])


def diagnostics(levels, values) -> dict:
    v = np.asarray(values, dtype=float)
    inc = np.diff(v)
    with np.errstate(divide="ignore", invalid="ignore"):
        rel = np.where(v[:-1] > 0, inc / v[:-1], 0.0)
    return {
        "zero": bool(np.all(v == 0)),
        "monotone_growth": bool(np.all(inc > 0)),
        "increments": inc.tolist(),
        "relative_increments": rel.tolist(),
        "growth_exponent": growth_exponent(levels, values),
    }


def convergence_verdict(values) -> str:
    a, b = float(values[-2]), float(values[-1])
    return CONSISTENT if b - a <= VERDICT_RTOL * a else GROWTH


# ---------------------------------------------------------------------------
# report


@dataclass
class ReportRecord:
    config: dict
    probe: str
    levels: list[int]
    method: str
    test_functions: list[str]
    tables: dict                     # arm name -> f label -> [R(N)]
    arms: list[dict]
    verdicts: dict                   # arm name -> verdict or None
    diagnostics: dict                # arm name -> f label -> diagnostics
    extras: dict = field(default_factory=dict)
    certificates: dict = field(default_factory=dict)
    conditions: dict = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)
    wall_time: float | None = None   # persisted separately, see write_report

    def verdict(self, arm: str | None = None) -> str | None:
        return self.verdicts[arm if arm is not None else self.arms[0]["name"]]

    def table(self, arm: str | None = None, f: str = "delta0") -> list[float]:
        return self.tables[arm if arm is not None else self.arms[0]["name"]][f]

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("wall_time")
        return jsonable(d)


def jsonable(obj):
    """Convert numpy scalars/arrays and non-finite floats into plain JSON values."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    return obj


def _slug(name: str) -> str:
    keep = [c if c.isalnum() or c in "-_." else "_" for c in name]
    return "".join(keep).strip("_")


def write_report(rec: ReportRecord, outdir) -> dict[str, Path]:
    """Write ``report.json``, ``table.csv``, one ``.dat`` plot file per arm and f,
    and ``timing.json``.  Everything except ``timing.json`` is a deterministic
    function of the config.
    """
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {"report": out / "report.json", "table": out / "table.csv",
             "timing": out / "timing.json"}
    with open(paths["report"], "w", encoding="utf-8") as fh:
        json.dump(rec.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    with open(paths["table"], "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["arm", "f", "N", "R"])
        for arm, per_f in rec.tables.items():
            for lab, vals in per_f.items():
                for n, v in zip(rec.levels, vals):
                    w.writerow([arm, lab, n, repr(float(v))])
    plot_dir = out / "plot_data"
    plot_dir.mkdir(exist_ok=True)
    for arm, per_f in rec.tables.items():
        for lab, vals in per_f.items():
            write_plot_data(plot_dir / f"{_slug(arm)}__{lab}.dat", rec.levels, vals)
    with open(paths["timing"], "w", encoding="utf-8") as fh:
        json.dump({"wall_time_seconds": rec.wall_time}, fh)
    return paths


def write_plot_data(path, xs, ys) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for x, y in zip(xs, ys):
            fh.write(f"{x!r} {float(y)!r}\n")


# ---------------------------------------------------------------------------
# runner


def thread_count() -> int:
    raw = os.environ.get(THREADS_ENV, "").strip()
    if not raw:
        return 1
    try:
        n = int(raw)
    except ValueError as exc:
        raise ConfigError(f"{THREADS_ENV} must be a positive integer, got {raw!r}") from exc
    return max(1, n)


def _ritt_check(cfg: ExperimentConfig, N: int = 512) -> dict:
    mu = resolve_measure(cfg.measure.key, min(cfg.measure.K, 4096))
    tr = ritt_constant(mu, N, eps=1e-12)
    half = tr.trend[N // 2 - 1]
    top = tr.sup_between(N // 2, N)
    ok = bool(top <= (1.0 + VERDICT_RTOL) * half) if half > 0 else bool(top == 0)
    return {"N": N, "trend_at_N/2": float(half), "sup_N/2_to_N": float(top), "ritt": ok}


def _certificates(cfg: ExperimentConfig, arms: list[Arm]) -> dict:
    cs = cfg.certificate
    sym = resolve_symbol(cfg.measure.key, cfg.measure.K)
    out = {}
    for arm in arms:
        p = arm.params
        if arm.kind == "square":
            rep = lemma_quantities(sym, p["alpha"], p["s"], cfg.trajectory.m, N=cs.N,
                                   tol=cs.tol, t_min=cs.t_min,
                                   check_stability=cs.check_stability)
        elif arm.kind == "block" and p["mode"] != "block-variation":
            gaps = gap_subsequence(p["gaps_alpha"], cs.N)
            rep = lemma2_quantities(sym, gaps, p["beta"], p["s"], tol=cs.tol, t_min=cs.t_min,
                                    mode=p["mode"], check_stability=cs.check_stability)
        else:
            out[arm.name] = {"skipped": f"no certificate family for {arm.kind} arms"}
            continue
        out[arm.name] = rep.to_dict()
    return out


def _conditions(cfg: ExperimentConfig) -> dict:
    sym = resolve_symbol(cfg.measure.key, cfg.measure.K)
    cs = cfg.conditions
    out = {"angular_ratio": angular_ratio(sym, cs.grid_size).to_dict()}
    a = cs.m1_exponent if cs.m1_exponent is not None else sym.m1_exponent
    if a is not None:
        out["M1"] = check_m1(sym, a, cs.grid_size).to_dict()
    return out


def run_probe(cfg: ExperimentConfig, progress: Callable[[str], None] | None = None) -> ReportRecord:
    """Run the probe named by ``cfg.probe``."""
    cfg.validate()
    t0 = time.perf_counter()
    levels = list(cfg.trajectory.N_levels)
    N = levels[-1]
    extras: dict = {}
    ritt_ok = None
    if cfg.probe == "lp_square" and cfg.functional.expect_bounded is None:
        extras["ritt_check"] = _ritt_check(cfg)
        ritt_ok = extras["ritt_check"]["ritt"]
    arms = build_arms(cfg, ritt_ok)
    method = choose_method(cfg)
    tests = make_test_functions(cfg.trajectory.f0, cfg.seed,
                                None if method == "kernel" else cfg.trajectory.w_max)
    mu = None if method == "kernel" else resolve_measure(cfg.measure.key, cfg.measure.K)
    logger.info("%s: %d arms, %d test functions, method=%s, N=%d", cfg.label, len(arms),
                len(tests), method, N)

    def one(tf: ProbeInput):
        traj = build_trajectory(cfg, tf.f, N, mu)
        row = {arm.name: evaluate_arm(arm, traj, levels, tf.f) for arm in arms}
        decay = None
        if cfg.probe == "corollary_sup":
            decay = terminal_decay(traj, cfg.functional.alpha, levels)
        budget = float(traj.error_budget[-1])
        if cfg.output.trajectory_csv and tf.label == "delta0":
            out = Path(cfg.output.dir)
            out.mkdir(parents=True, exist_ok=True)
            ns = [n for n in cfg.output.trajectory_levels if n <= N]
            traj.to_csv(out / "trajectory_delta0.csv", ns)
        if progress:
            progress(tf.label)
        return row, decay, budget, traj.meta

    workers = min(thread_count(), len(tests))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(one, tests))
    else:
        results = [one(tf) for tf in tests]

    tables = {arm.name: {} for arm in arms}
    diags = {arm.name: {} for arm in arms}
    for tf, (row, _, _, _) in zip(tests, results):
        for arm in arms:
            tables[arm.name][tf.label] = row[arm.name]
            diags[arm.name][tf.label] = diagnostics(levels, row[arm.name])
    verdicts = {}
    for arm in arms:
        if not arm.has_verdict:
            verdicts[arm.name] = None
            continue
        per_f = [convergence_verdict(v) for v in tables[arm.name].values()]
        verdicts[arm.name] = CONSISTENT if all(v == CONSISTENT for v in per_f) else GROWTH
    if cfg.probe == "corollary_sup":
        decay = {tf.label: d for tf, (_, d, _, _) in zip(tests, results)}
        extras["terminal_decay"] = {
            lab: {"values": d, "decay_observed": bool(d[-1] < d[0] or d[-1] == d[0] == 0.0)}
            for lab, d in decay.items()}
    metadata = {
        "package_version": __version__,
        "verdict_rule": f"R(N_top) - R(N_prev) <= {VERDICT_RTOL} R(N_prev)",
        "ratio": "l1 norm of the functional over l1 norm of f" if cfg.probe != "lp_square"
                 else "l2 norm of the square function over l2 norm of f",
        "trajectory_error_budget": {tf.label: b for tf, (_, _, b, _) in zip(tests, results)},
        "trajectory_meta": results[0][3] if results else {},
        "measure_truncation": {"K": cfg.measure.K, "eps": cfg.measure.eps},
    }
    rec = ReportRecord(
        config=cfg.to_dict(), probe=cfg.probe, levels=levels, method=method,
        test_functions=[t.label for t in tests], tables=tables,
        arms=[asdict(a) for a in arms], verdicts=verdicts, diagnostics=diags,
        extras=extras, metadata=metadata)
    if cfg.certificate.enabled:
        rec.certificates = _certificates(cfg, arms)
    if cfg.conditions.enabled:
        rec.conditions = _conditions(cfg)
    rec.wall_time = time.perf_counter() - t0
    return rec


def run_config(cfg: ExperimentConfig, write: bool = True) -> ReportRecord:
    rec = run_probe(cfg)
    if write:
        write_report(rec, cfg.output.dir)
    return rec


# named entry points, one per probe ------------------------------------------------


def _named(probe: str):
    def runner(cfg: ExperimentConfig) -> ReportRecord:
        if cfg.probe != probe:
            raise ConfigError(f"config is for probe {cfg.probe!r}, not {probe!r}")
        return run_probe(cfg)
    runner.__name__ = f"run_{probe}_probe"
    runner.__doc__ = f"Run the ``{probe}`` probe (see :func:`run_probe`)."
    return runner


run_main_theorem_probe = _named("main_theorem")
run_open_question_probe = _named("open_question")
run_corollary_sup_probe = _named("corollary_sup")
run_variation_probe = _named("variation")
run_longvar_probe = _named("longvar")
run_lp_square_probe = _named("lp_square")
run_open_question_2_probe = _named("open_question_2")


def default_config(probe: str, **overrides) -> ExperimentConfig:
    """Preset parameters for each probe.  ``overrides`` are nested dicts merged on top."""
    presets: dict[str, dict] = {
        "main_theorem": {"functional": {"alpha": 1.0, "s": 3.0, "extra_arms": [{"s": 1.0}]}},
        "open_question": {"functional": {"alpha": 1.0, "s": 2.0, "s_offsets": [-0.1, 0.1]}},
        "corollary_sup": {"measure": {"key": "lazy_walk"},
                          "functional": {"alpha": 0.5}},
        "variation": {"functional": {"beta": 0.0, "s": 1.0,
                                     "extra_arms": [{"beta": 0.3, "s": 2.0}]}},
        "longvar": {"trajectory": {"m": 0},
                    "functional": {"gaps_alpha": 0.5, "beta": 0.0, "s": 2.0,
                                   "extra_arms": [{"s": 2.5}, {"beta": 0.4, "s": 1.1}]}},
        "lp_square": {"measure": {"key": "lazy_walk"}, "functional": {"p": 2.0}},
        "open_question_2": {"trajectory": {"m": 0}, "functional": {"s": 2.0}},
    }
    if probe not in presets:
        raise ConfigError(f"unknown probe {probe!r}; choose from {PROBES}")
    data = merge_config({"probe": probe, "output": {"dir": f"results/{probe}"}}, presets[probe])
    return config_from_dict(merge_config(data, overrides))


def merge_config(a: dict, b: dict) -> dict:
    out = dict(a)
    for k, v in b.items():
        out[k] = merge_config(out[k], v) if isinstance(v, dict) and isinstance(out.get(k), dict) else v
    return out
