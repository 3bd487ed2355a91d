"""Monte Carlo experiments: MSE curves, size and power of the quantization test.

Every replication draws from its own counter-based stream
(:func:`rng_stream`), so results do not depend on execution order or on the
number of worker processes. Each replication draws one response vector per
(n, r) design cell and reuses it for the non-quantized baseline and for every
bit budget b, so the comparisons across b are paired.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .estimator import default_lambda_grid, evaluate, fit, gcv_select, sine_l2_error_sq
from .exceptions import ConfigurationError
from .inference import linearity_test, quantization_test
from .quantizer import quantize_sample

SCENARIOS = ("mse", "size", "power", "linearity-size", "linearity-power")
CSV_HEADER = ("scenario", "n", "b", "r", "noise_sd", "alpha_signal", "metric", "value", "mc_stderr", "replications", "seed")
EVAL_GRID_SIZE = 4096
NONQUANT = "nonquant"


def rng_stream(seed: int, replication: int, cell: int = 0) -> np.random.Generator:
    """Independent Philox stream keyed by (seed, replication).

    ``cell`` selects a disjoint block of the counter space for a design cell
    inside one replication. Normal draws use ``Generator.standard_normal``.
    """
    if seed < 0 or replication < 0 or cell < 0:
        raise ConfigurationError("seed, replication and cell must be non-negative")
    bitgen = np.random.Philox(key=[seed, replication], counter=[0, 0, 0, cell])
    return np.random.Generator(bitgen)


def beta_density(x, a: float, b: float) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    lognorm = math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
    with np.errstate(divide="ignore"):
        logpdf = lognorm + (a - 1) * np.log(x) + (b - 1) * np.log1p(-x)
    return np.where((x > 0) & (x < 1), np.exp(logpdf), 0.0)


def _parse_lambda_rule(rule):
    if isinstance(rule, (int, float)) and not isinstance(rule, bool):
        return ("fixed", float(rule))
    if isinstance(rule, str):
        if rule in ("gcv", "gcv-over-log-n"):
            return (rule, None)
        if rule.startswith("fixed(") and rule.endswith(")"):
            return ("fixed", float(rule[6:-1]))
        try:
            return ("fixed", float(rule))
        except ValueError:
            pass
    if isinstance(rule, dict) and "fixed" in rule:
        return ("fixed", float(rule["fixed"]))
    raise ConfigurationError(f"unknown lambda rule {rule!r}")


@dataclass(frozen=True)
class ExperimentConfig:
    scenario: str
    n_list: tuple = (100, 200, 500, 1000)
    b_list: tuple = (1, 2, 3, 5)
    r_list: tuple = (0.0,)
    alpha_signal: int = 2
    noise_sd: float = 1.0
    replications: int = 1000
    seed: int = 0
    alpha_level: float = 0.1
    m: int = 2
    lambda_rule: object = None
    marks: str = "empirical"
    include_nonquant: bool = True

    def __post_init__(self):
        object.__setattr__(self, "n_list", tuple(int(n) for n in self.n_list))
        object.__setattr__(self, "b_list", tuple(int(b) for b in self.b_list))
        object.__setattr__(self, "r_list", tuple(float(r) for r in self.r_list))
        if self.lambda_rule is None:
            default = "gcv" if self.scenario == "mse" else "gcv-over-log-n"
            object.__setattr__(self, "lambda_rule", default)
        self.validate()

    def validate(self):
        if self.scenario not in SCENARIOS:
            raise ConfigurationError(f"scenario must be one of {SCENARIOS}, got {self.scenario!r}")
        if self.replications < 1:
            raise ConfigurationError("replications must be >= 1")
        for n in self.n_list:
            if n < 8 or n % 2:
                raise ConfigurationError(f"sample sizes must be even and >= 8, got {n}")
        for b in self.b_list:
            if not 1 <= b <= 12:
                raise ConfigurationError(f"bit budgets must lie in 1..12, got {b}")
        if not self.noise_sd > 0:
            raise ConfigurationError("noise_sd must be positive")
        if not 0 < self.alpha_level < 1:
            raise ConfigurationError("alpha_level must lie in (0, 1)")
        if self.marks not in ("empirical", "midpoint"):
            raise ConfigurationError(f"unknown mark rule {self.marks!r}")
        if self.seed < 0:
            raise ConfigurationError("seed must be non-negative")
        _parse_lambda_rule(self.lambda_rule)

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        known = set(cls.__dataclass_fields__)
        unknown = set(d) - known
        if unknown:
            raise ConfigurationError(f"unknown config keys: {sorted(unknown)}")
        if "scenario" not in d:
            raise ConfigurationError("config needs a 'scenario'")
        return cls(**d)

    @classmethod
    def from_json(cls, path) -> "ExperimentConfig":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def to_dict(self) -> dict:
        d = asdict(self)
        for key in ("n_list", "b_list", "r_list"):
            d[key] = list(d[key])
        return d


@dataclass
class ExperimentResult:
    rows: list
    config: ExperimentConfig
    # per-cell replication arrays, e.g. {(n, b, r): {"reject": ..., "standardized": ...}}
    samples: dict = field(default_factory=dict, repr=False)

    def to_csv(self, fh=None) -> str | None:
        own = fh is None
        if own:
            fh = io.StringIO()
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for row in self.rows:
            writer.writerow([_fmt(row[k]) for k in CSV_HEADER])
        return fh.getvalue() if own else None

    def lookup(self, metric: str, n: int, b, r: float = 0.0) -> dict:
        for row in self.rows:
            if row["metric"] == metric and row["n"] == n and row["b"] == b and row["r"] == float(r):
                return row
        raise KeyError((metric, n, b, r))


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _select_lambda(values, m, rule, grid):
    kind, value = rule
    if kind == "fixed":
        return value
    lam, _ = gcv_select(values, m, grid)
    if kind == "gcv-over-log-n":
        lam /= math.log(values.size)
    return lam


def _signal(config: ExperimentConfig, x: np.ndarray, r: float) -> np.ndarray:
    if config.scenario in ("linearity-size", "linearity-power"):
        return 3.0 * x + 2.0 + r * beta_density(x, 11.0, 3.0)
    return r * np.sin(config.alpha_signal * np.pi * x)


def _variants(config: ExperimentConfig):
    out = [NONQUANT] if config.include_nonquant else []
    return out + list(config.b_list)


def _one_replication(config: ExperimentConfig, rep: int) -> dict:
    rule = _parse_lambda_rule(config.lambda_rule)
    grid = default_lambda_grid()
    out = {}
    cell = 0
    r_values = (1.0,) if config.scenario == "mse" else config.r_list
    x_eval = np.arange(1, EVAL_GRID_SIZE + 1) / EVAL_GRID_SIZE
    for n in config.n_list:
        x = np.arange(1, n + 1) / n
        for r in r_values:
            rng = rng_stream(config.seed, rep, cell)
            cell += 1
            y = _signal(config, x, r) + config.noise_sd * rng.standard_normal(n)
            for variant in _variants(config):
                if variant == NONQUANT:
                    z, q = y, None
                else:
                    z, q = quantize_sample(y, variant, config.marks)
                lam = _select_lambda(z, config.m, rule, grid)
                key = (n, variant, float(r))
                if config.scenario == "mse":
                    f = fit(z, config.m, lam, source="raw" if q is None else "quantized")
                    f0 = np.sin(config.alpha_signal * np.pi * x_eval)
                    rec = {"mse": float(np.mean((evaluate(f, x_eval) - f0) ** 2)), "lambda": lam}
                    if config.alpha_signal % 2 == 0:
                        rec["mse_l2"] = sine_l2_error_sq(f, 1.0, config.alpha_signal // 2)
                else:
                    if config.scenario.startswith("linearity"):
                        res = linearity_test(z, config.m, lam, config.alpha_level)
                    else:
                        res = quantization_test(z, None, config.m, lam, config.alpha_level)
                    rec = {"reject": float(res.reject), "standardized": res.standardized, "lambda": lam}
                out[key] = rec
    return out


def _run_rep(args):
    config, rep = args
    return _one_replication(config, rep)


def run_experiment(config: ExperimentConfig, workers: int = 1) -> ExperimentResult:
    reps = range(config.replications)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            per_rep = list(ex.map(_run_rep, [(config, r) for r in reps], chunksize=16))
    else:
        per_rep = [_one_replication(config, r) for r in reps]
    samples = {}
    for rec in per_rep:
        for key, vals in rec.items():
            bucket = samples.setdefault(key, {})
            for name, v in vals.items():
                bucket.setdefault(name, []).append(v)
    samples = {k: {name: np.asarray(v) for name, v in d.items()} for k, d in samples.items()}
    rows = []
    metrics = ("mse", "mse_l2") if config.scenario == "mse" else ("reject_rate",)
    for (n, variant, r), d in samples.items():
        for metric in metrics:
            vals = d["reject"] if metric == "reject_rate" else d.get(metric)
            if vals is None:
                continue
            rows.append(
                {
                    "scenario": config.scenario,
                    "n": n,
                    "b": variant,
                    "r": r,
                    "noise_sd": float(config.noise_sd),
                    "alpha_signal": config.alpha_signal,
                    "metric": metric,
                    "value": float(np.mean(vals)),
                    "mc_stderr": float(np.std(vals) / math.sqrt(vals.size)),
                    "replications": int(vals.size),
                    "seed": config.seed,
                }
            )
    rows.sort(key=_row_key)
    return ExperimentResult(rows=rows, config=config, samples=samples)


def _row_key(row):
    b = row["b"]
    return (row["scenario"], row["n"], -1 if b == NONQUANT else b, row["r"], row["metric"])


def _require(config: ExperimentConfig, allowed):
    if config.scenario not in allowed:
        raise ConfigurationError(f"scenario {config.scenario!r} not valid here; expected one of {allowed}")


def run_mse(config: ExperimentConfig, workers: int = 1) -> ExperimentResult:
    _require(config, ("mse",))
    return run_experiment(config, workers)


def run_size(config: ExperimentConfig, workers: int = 1) -> ExperimentResult:
    _require(config, ("size",))
    if any(r != 0 for r in config.r_list):
        raise ConfigurationError("size runs use r = 0 only")
    return run_experiment(config, workers)


def run_power(config: ExperimentConfig, workers: int = 1) -> ExperimentResult:
    _require(config, ("power",))
    if all(r == 0 for r in config.r_list):
        raise ConfigurationError("power runs need at least one r != 0")
    return run_experiment(config, workers)


def run_linearity(config: ExperimentConfig, workers: int = 1) -> ExperimentResult:
    _require(config, ("linearity-size", "linearity-power"))
    return run_experiment(config, workers)


def run(config: ExperimentConfig, workers: int = 1) -> ExperimentResult:
    dispatch = {
        "mse": run_mse,
        "size": run_size,
        "power": run_power,
        "linearity-size": run_linearity,
        "linearity-power": run_linearity,
    }
    return dispatch[config.scenario](config, workers)
