"""Statistical checks, experiment reports and the seed policy.

A *check* is a small dict.  It passes when

* ``p_value`` is present and at least ``ALPHA_LEVEL`` (KS, chi-square), or
* ``z`` is present and ``|z| <= Z_LIMIT`` (moment checks in standard errors), or
* ``passed`` is present and true (deterministic checks), or
* ``informational`` is true (recorded, never decisive).

An experiment run passes when all its checks pass.  A statistical
experiment is run under up to three master seeds and passes when two runs
pass.
"""

import json
import math
import time
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import stats

ALPHA_LEVEL = 1e-3
Z_LIMIT = 4.0
N_SEEDS = 3
NEEDED = 2


@dataclass
class ExperimentReport:
    name: str
    parameters: dict
    n: int
    seeds: list
    statistics: dict
    verdict: str
    runtime: float = 0.0
    runs: list = field(default_factory=list)

    @property
    def passed(self):
        return self.verdict == "pass"

    def to_dict(self):
        return _jsonable(asdict(self))

    def to_json(self, indent=2):
        return json.dumps(self.to_dict(), indent=indent)


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return [_jsonable(v) for v in x.tolist()]
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else repr(x)
    return x


def check_passes(check):
    if check.get("informational"):
        return True
    if "passed" in check:
        return bool(check["passed"])
    if "p_value" in check:
        return bool(check["p_value"] >= check.get("level", ALPHA_LEVEL))
    if "z" in check:
        return bool(abs(check["z"]) <= check.get("limit", Z_LIMIT))
    raise ValueError(f"check without a decision rule: {check}")


def verdict_from_checks(checks):
    return "pass" if all(check_passes(c) for c in checks.values()) else "fail"


def ks_two_sample(a, b):
    """Two-sample Kolmogorov-Smirnov distance and asymptotic p-value."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.size == 0 or b.size == 0:
        raise ValueError("both samples must be nonempty")
    res = stats.ks_2samp(a, b, method="asymp")
    return float(res.statistic), float(res.pvalue)


def ks_check(a, b):
    d, p = ks_two_sample(a, b)
    return {"distance": d, "p_value": p}


def ks_one_sample_check(a, cdf):
    res = stats.kstest(np.asarray(a, dtype=float), cdf, method="asymp")
    return {"distance": float(res.statistic), "p_value": float(res.pvalue)}


def mean_check(x, target):
    """Sample mean against a known value, in standard errors."""
    x = np.asarray(x, dtype=float)
    se = x.std(ddof=1) / math.sqrt(x.size)
    z = (x.mean() - target) / se if se > 0 else (0.0 if x.mean() == target else math.inf)
    return {"mean": float(x.mean()), "target": float(target), "se": float(se), "z": float(z)}


def proportion_check(hits, n, p):
    se = math.sqrt(p * (1 - p) / n)
    phat = hits / n
    z = (phat - p) / se if se > 0 else (0.0 if phat == p else math.inf)
    return {"estimate": phat, "target": p, "se": se, "z": z}


def two_proportion_check(h1, n1, h2, n2):
    p = (h1 + h2) / (n1 + n2)
    se = math.sqrt(max(p * (1 - p), 1e-300) * (1 / n1 + 1 / n2))
    z = (h1 / n1 - h2 / n2) / se
    return {"first": h1 / n1, "second": h2 / n2, "se": se, "z": z}


def chisquare_counts(counts, pmf, min_expected=5.0):
    """Chi-square goodness of fit for integer counts against ``pmf(k)``.

    Cells are pooled from the upper tail (and the lower end) until every
    cell has expected count at least ``min_expected``.
    """
    counts = np.asarray(counts, dtype=np.int64)
    n = counts.size
    kmax = int(counts.max()) if n else 0
    ks = np.arange(kmax + 1)
    probs = np.array([pmf(k) for k in ks])
    observed = np.bincount(counts, minlength=kmax + 1).astype(float)
    # fold the tail beyond kmax into the last cell
    probs[-1] += max(0.0, 1.0 - probs.sum())
    expected = probs * n
    cells_o, cells_e = [], []
    acc_o = acc_e = 0.0
    for o, e in zip(observed, expected):
        acc_o += o
        acc_e += e
        if acc_e >= min_expected:
            cells_o.append(acc_o)
            cells_e.append(acc_e)
            acc_o = acc_e = 0.0
    if acc_e > 0 or acc_o > 0:
        if cells_e:
            cells_o[-1] += acc_o
            cells_e[-1] += acc_e
        else:
            cells_o.append(acc_o)
            cells_e.append(acc_e)
    if len(cells_e) < 2:
        return {"chi2": 0.0, "dof": 0, "p_value": 1.0, "cells": len(cells_e)}
    res = stats.chisquare(cells_o, cells_e)
    return {"chi2": float(res.statistic), "dof": len(cells_e) - 1,
            "p_value": float(res.pvalue), "cells": len(cells_e)}


def run_with_policy(name, fn, parameters, master_seed, n, statistical=True):
    """Run ``fn(seed) -> checks`` under the 2-of-3 seed policy.

    Seeds are ``master_seed + k`` for k = 0, 1, 2; the third run is skipped
    once the verdict is settled.  Non-statistical experiments run once.
    """
    t0 = time.perf_counter()
    runs = []
    seeds = [master_seed + k for k in range(N_SEEDS if statistical else 1)]
    needed = NEEDED if statistical else 1
    for seed in seeds:
        checks = fn(seed)
        runs.append({"seed": seed, "statistics": checks, "verdict": verdict_from_checks(checks)})
        n_pass = sum(r["verdict"] == "pass" for r in runs)
        n_fail = len(runs) - n_pass
        if n_pass >= needed or n_fail > len(seeds) - needed:
            break
    n_pass = sum(r["verdict"] == "pass" for r in runs)
    verdict = "pass" if n_pass >= needed else "fail"
    return ExperimentReport(
        name=name, parameters=parameters, n=n, seeds=[r["seed"] for r in runs],
        statistics=runs[0]["statistics"], verdict=verdict,
        runtime=time.perf_counter() - t0, runs=runs)


@dataclass
class SuiteConfig:
    """Names of suites or experiments, the master seed and an optional sample size override."""
    names: tuple = ("acceptance",)
    master_seed: int = 0
    n: int = None
    workers: int = 1


def resolve_names(names):
    """Expand suite names into experiment names (order kept, duplicates dropped)."""
    from .experiments import REGISTRY, SUITES
    out = []
    for name in names:
        if name in SUITES:
            members = SUITES[name]
        elif name in REGISTRY:
            members = (name,)
        else:
            known = ", ".join(sorted(set(SUITES) | set(REGISTRY)))
            raise KeyError(f"unknown suite or experiment {name!r}; available: {known}")
        out.extend(m for m in members if m not in out)
    return out


def run_suite(config):
    """Run every experiment named by ``config`` and return their reports.

    ``config`` is a SuiteConfig, a name or a list of names.  Each experiment
    builds its own streams from the master seed, so the reports do not
    depend on ``workers``.
    """
    from concurrent.futures import ThreadPoolExecutor

    from .experiments import run_experiment
    if isinstance(config, str):
        config = SuiteConfig((config,))
    elif not isinstance(config, SuiteConfig):
        config = SuiteConfig(tuple(config))
    names = resolve_names(config.names)
    run = lambda name: run_experiment(name, config.master_seed, config.n)
    if config.workers > 1 and len(names) > 1:
        with ThreadPoolExecutor(config.workers) as pool:
            return list(pool.map(run, names))
    return [run(name) for name in names]
