"""Seeded Monte Carlo experiment driver with CSV emission.

A sweep runs every enabled algorithm on freshly drawn instances for each
(K, trial) cell. Child seeds are a pure function of (master_seed, K, trial),
so trials can run in any order, or in parallel, without changing a single
record. CSV bodies carry no timestamps and print floats with repr, making
reruns byte-identical and parse-back lossless.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .solvers import (DEFAULT_BRUTE_CAP, solve_1a_only, solve_3c_only,
                      solve_brute_force, solve_proposed, solve_stronger)
from .allocation import RateCalcCounter
from .topology import ScenarioParams, make_instance

__all__ = [
    "ALGORITHM_ORDER",
    "DEFAULT_MASTER_SEED",
    "ExperimentConfig",
    "TrialRecord",
    "trial_seed",
    "analytic_brute_count",
    "run_trial",
    "run_experiment",
    "summarize",
    "emit_csv",
    "load_records",
    "load_config",
    "ratio_config",
    "capacity_config",
]

ALGORITHM_ORDER = ("optimal", "proposed", "3c_only", "1a_only", "stronger")

DEFAULT_MASTER_SEED = 20240816

_SCENARIO_FLOAT_KEYS = ("area_side_m", "p_macro_dbm", "p_small_dbm", "alpha_macro",
                        "alpha_small", "bw_macro_hz", "bw_small_hz",
                        "n_macro_dbm_hz", "n_small_dbm_hz")


@dataclass
class ExperimentConfig:
    scenario: ScenarioParams
    ue_sweep: tuple
    algorithms: tuple
    trials: int
    master_seed: int
    output_path: str
    override_cap: bool = False

    def __post_init__(self):
        self.ue_sweep = tuple(int(k) for k in self.ue_sweep)
        unknown = [a for a in self.algorithms if a not in ALGORITHM_ORDER]
        if unknown:
            raise ValueError(f"unknown algorithms: {unknown}")
        picked = set(self.algorithms)
        self.algorithms = tuple(a for a in ALGORITHM_ORDER if a in picked)

    def validate(self) -> None:
        self.scenario.validate()
        if not self.ue_sweep:
            raise ValueError("ue_sweep must not be empty")
        if any(k < 1 for k in self.ue_sweep):
            raise ValueError("ue_sweep entries must be >= 1")
        if len(set(self.ue_sweep)) != len(self.ue_sweep):
            raise ValueError("ue_sweep entries must be unique")
        if not self.algorithms:
            raise ValueError("algorithms must not be empty")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not 0 <= self.master_seed < 2 ** 64:
            raise ValueError("master_seed must fit in 64 bits")
        if "optimal" in self.algorithms and not self.override_cap:
            worst = max(self.ue_sweep)
            if worst > DEFAULT_BRUTE_CAP:
                raise ValueError(
                    f"ue_sweep reaches K={worst} with the exhaustive solver enabled; "
                    f"the cap is {DEFAULT_BRUTE_CAP} (set override_cap to force)")


@dataclass
class TrialRecord:
    k_ues: int
    trial: int
    seed: int
    sum_rates: dict = field(default_factory=dict)
    op_counts: dict = field(default_factory=dict)
    ratio: float | None = None


def trial_seed(master_seed: int, k_ues: int, trial: int) -> int:
    """Child seed for one (K, trial) cell; positional, not sequential."""
    seq = np.random.SeedSequence([master_seed, k_ues, trial])
    return int(seq.generate_state(1, np.uint64)[0])


def analytic_brute_count(k_ues: int) -> int:
    """Exhaustive-search rate-calculation count in closed form."""
    return k_ues * 3 ** k_ues


def run_trial(args) -> TrialRecord:
    """One (K, trial) cell. Module-level and tuple-argumented so process
    pools can ship it around."""
    k_ues, trial, seed, scenario, algorithms, override_cap = args
    params = replace(scenario, num_ue=k_ues, seed=seed)
    _, table = make_instance(params)
    rec = TrialRecord(k_ues=k_ues, trial=trial, seed=seed)
    for algo in algorithms:
        counter = RateCalcCounter()
        if algo == "optimal":
            res = solve_brute_force(table, counter, override_cap=override_cap)
        elif algo == "proposed":
            res = solve_proposed(table, counter)
        elif algo == "3c_only":
            res = solve_3c_only(table, counter)
        elif algo == "1a_only":
            res = solve_1a_only(table, counter)
        else:
            res = solve_stronger(table, counter)
        rec.sum_rates[algo] = float(res.sum_rate)
        rec.op_counts[algo] = int(res.op_count)
    if "optimal" in rec.sum_rates and "proposed" in rec.sum_rates:
        rec.ratio = rec.sum_rates["proposed"] / rec.sum_rates["optimal"]
    return rec


def run_experiment(cfg: ExperimentConfig, threads: int = 1):
    """All (K, trial) cells of a config; returns (records, summary).

    Records are ordered by (K position in the sweep, trial) no matter how
    many workers run them.
    """
    cfg.validate()
    if threads < 1:
        raise ValueError("threads must be >= 1")
    tasks = [(k, t, trial_seed(cfg.master_seed, k, t), cfg.scenario,
              cfg.algorithms, cfg.override_cap)
             for k in cfg.ue_sweep for t in range(cfg.trials)]
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            records = list(pool.map(run_trial, tasks))
    else:
        records = [run_trial(t) for t in tasks]
    return records, summarize(cfg.algorithms, cfg.ue_sweep, records)


def summarize(algorithms, ue_sweep, records) -> dict:
    """Per-K aggregates: mean sum-rates, geometric-mean op counts, mean and
    sample-std of the proposed/optimal ratio, and the analytic exhaustive
    count for comparison at any K."""
    rows = []
    for k in ue_sweep:
        recs = [r for r in records if r.k_ues == k]
        row = {"k_ues": k, "trials": len(recs)}
        for algo in algorithms:
            rates = [r.sum_rates[algo] for r in recs]
            counts = [r.op_counts[algo] for r in recs]
            row[f"mean_sumrate_{algo}"] = float(np.mean(rates)) if rates else None
            row[f"geomean_opcount_{algo}"] = (
                float(math.exp(np.mean([math.log(c) for c in counts]))) if counts else None)
        ratios = [r.ratio for r in recs if r.ratio is not None]
        row["mean_ratio_proposed_optimal"] = float(np.mean(ratios)) if ratios else None
        row["std_ratio_proposed_optimal"] = (
            float(np.std(ratios, ddof=1)) if len(ratios) > 1 else (0.0 if ratios else None))
        row["optimal_opcount_analytic"] = analytic_brute_count(k)
        rows.append(row)
    return {"algorithms": tuple(algorithms), "rows": rows}


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def emit_csv(records, summary, path: str) -> None:
    """Trial CSV at `path` plus per-K aggregates at `<path>.summary.csv`."""
    algorithms = summary["algorithms"]
    header = ["k_ues", "trial", "seed"]
    for algo in algorithms:
        header += [f"{algo}_sumrate", f"{algo}_opcount"]
    header.append("ratio_proposed_optimal")
    with open(path, "w", newline="") as f:
        wr = csv.writer(f, lineterminator="\n")
        wr.writerow(header)
        for rec in records:
            row = [rec.k_ues, rec.trial, rec.seed]
            for algo in algorithms:
                row += [_fmt(rec.sum_rates[algo]), rec.op_counts[algo]]
            row.append(_fmt(rec.ratio))
            wr.writerow(row)

    srows = summary["rows"]
    sheader = ["k_ues", "trials"]
    for algo in algorithms:
        sheader.append(f"mean_sumrate_{algo}")
    for algo in algorithms:
        sheader.append(f"geomean_opcount_{algo}")
    sheader += ["mean_ratio_proposed_optimal", "std_ratio_proposed_optimal",
                "optimal_opcount_analytic"]
    with open(path + ".summary.csv", "w", newline="") as f:
        wr = csv.writer(f, lineterminator="\n")
        wr.writerow(sheader)
        for row in srows:
            wr.writerow([_fmt(row[c]) for c in sheader])


def load_records(path: str):
    """Parse a trial CSV back into TrialRecords; floats round-trip exactly."""
    with open(path, newline="") as f:
        reader = csv.reader(f)
        header = next(reader)
        algorithms = tuple(c[:-len("_sumrate")] for c in header if c.endswith("_sumrate"))
        records = []
        for row in reader:
            cells = dict(zip(header, row))
            rec = TrialRecord(k_ues=int(cells["k_ues"]), trial=int(cells["trial"]),
                              seed=int(cells["seed"]))
            for algo in algorithms:
                rec.sum_rates[algo] = float(cells[f"{algo}_sumrate"])
                rec.op_counts[algo] = int(cells[f"{algo}_opcount"])
            ratio = cells["ratio_proposed_optimal"]
            rec.ratio = float(ratio) if ratio else None
            records.append(rec)
    return records, algorithms


_CONFIG_DEFAULTS = {
    "trials": 200,
    "master_seed": DEFAULT_MASTER_SEED,
    "output_path": "dcpa_results.csv",
    "override_cap": False,
}

_REQUIRED_KEYS = ("ue_sweep", "algorithms")

_BOOL_WORDS = {"true": True, "1": True, "yes": True, "on": True,
               "false": False, "0": False, "no": False, "off": False}


def load_config(path: str) -> ExperimentConfig:
    """Flat `key = value` config file; '#' starts a comment. Scenario keys
    mirror ScenarioParams fields; sweep keys mirror ExperimentConfig."""
    raw = {}
    with open(path) as f:
        for lineno, line in enumerate(f, start=1):
            text = line.split("#", 1)[0].strip()
            if not text:
                continue
            if "=" not in text:
                raise ValueError(f"{path}:{lineno}: expected 'key = value'")
            key, _, value = text.partition("=")
            key = key.strip()
            value = value.strip()
            if key in raw:
                raise ValueError(f"{path}:{lineno}: duplicate key {key!r}")
            raw[key] = value

    for key in _REQUIRED_KEYS:
        if key not in raw:
            raise ValueError(f"{path}: missing required key {key!r}")

    scenario_kwargs = {}
    cfg_kwargs = dict(_CONFIG_DEFAULTS)
    for key, value in raw.items():
        if key in _SCENARIO_FLOAT_KEYS:
            scenario_kwargs[key] = float(value)
        elif key == "num_sbs":
            scenario_kwargs[key] = int(value)
        elif key == "ue_sweep":
            cfg_kwargs[key] = tuple(int(tok) for tok in value.split(",") if tok.strip())
        elif key == "algorithms":
            cfg_kwargs[key] = tuple(tok.strip() for tok in value.split(",") if tok.strip())
        elif key in ("trials", "master_seed"):
            cfg_kwargs[key] = int(value)
        elif key == "output_path":
            cfg_kwargs[key] = value
        elif key == "override_cap":
            low = value.lower()
            if low not in _BOOL_WORDS:
                raise ValueError(f"{path}: override_cap must be true/false, got {value!r}")
            cfg_kwargs[key] = _BOOL_WORDS[low]
        else:
            raise ValueError(f"{path}: unknown key {key!r}")

    scenario = ScenarioParams(**scenario_kwargs)
    cfg = ExperimentConfig(scenario=scenario, **cfg_kwargs)
    cfg.validate()
    return cfg


def ratio_config(output_path: str, trials: int = 200,
                 master_seed: int = DEFAULT_MASTER_SEED) -> ExperimentConfig:
    """Optimality-gap sweep: every algorithm, K small enough for the oracle."""
    return ExperimentConfig(scenario=ScenarioParams(), ue_sweep=tuple(range(4, 13)),
                            algorithms=ALGORITHM_ORDER, trials=trials,
                            master_seed=master_seed, output_path=output_path)


def capacity_config(output_path: str, trials: int = 200,
                    master_seed: int = DEFAULT_MASTER_SEED) -> ExperimentConfig:
    """Capacity/complexity sweep: larger K, exhaustive search left out."""
    return ExperimentConfig(scenario=ScenarioParams(), ue_sweep=tuple(range(10, 21)),
                            algorithms=("proposed", "3c_only", "1a_only", "stronger"),
                            trials=trials, master_seed=master_seed,
                            output_path=output_path)
