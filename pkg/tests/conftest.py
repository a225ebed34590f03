"""Shared fixtures and independent oracles.

The oracles here are deliberately plain Python (math module, lists, no
vectorization) so they cannot share a bug with the package's numpy/numba
paths. Tolerances: oracle comparisons allow 1e-12 relative error for the
different summation orders; identities that must hold exactly (counters,
serialization round-trips, backend agreement) are compared with ==.
"""

import math

import numpy as np
import pytest

from dcalloc import ChannelTable, ScenarioParams, make_instance

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def seeded_table(num_ue: int, num_sbs: int = 4, seed: int = 0) -> ChannelTable:
    params = ScenarioParams(num_sbs=num_sbs, num_ue=num_ue, seed=seed)
    return make_instance(params)[1]


def python_rates(digits, snr, sinr, assoc, num_sbs, bw_m, bw_s):
    """Per-UE (macro, small) rates of one profile digit vector, plain Python."""
    n_macro = sum(1 for d in digits if d != 2)
    n_small = [0] * num_sbs
    for k, d in enumerate(digits):
        if d != 1:
            n_small[assoc[k]] += 1
    rates_m, rates_s = [], []
    for k, d in enumerate(digits):
        rates_m.append(bw_m / n_macro * math.log2(1.0 + snr[k]) if d != 2 else 0.0)
        rates_s.append(bw_s / n_small[assoc[k]] * math.log2(1.0 + sinr[k]) if d != 1 else 0.0)
    return rates_m, rates_s


def python_objective(digits, table: ChannelTable) -> float:
    rates_m, rates_s = python_rates(
        list(digits), table.snr_macro.tolist(), table.sinr_small.tolist(),
        table.assoc_sbs.tolist(), table.num_sbs,
        table.params.bw_macro_hz, table.params.bw_small_hz)
    return sum(rates_m) + sum(rates_s)


def python_brute(table: ChannelTable):
    """Exhaustive optimum with the canonical enumeration: UE 0 is the least
    significant base-3 digit, first maximizer kept."""
    k_ues = table.num_ue
    best_val, best_idx, best_digits = -1.0, -1, None
    for idx in range(3 ** k_ues):
        digits = [(idx // 3 ** k) % 3 for k in range(k_ues)]
        val = python_objective(digits, table)
        if val > best_val:
            best_val, best_idx, best_digits = val, idx, digits
    return best_val, best_idx, best_digits


def adversarial_table(num_ue: int) -> ChannelTable:
    """Instance family whose greedy run funnels every post-initialization
    commit to SBS 0 while the MBS candidate window widens by one row per
    pass. With N = 3 stations (2 SBSs + the MBS) the subset evaluations sum
    to 2^(K-1) - 2^(N-1) + (K-N)(N-1) exactly.

    Layout: UE 0 heads the MBS column but sits uselessly on SBS 1; UE 1
    heads SBS 0; UE 2 heads SBS 1 (its column ends there because UE 0 is
    macro-served at initialization). UEs 3..K-1 tie at SINR 1.0 on SBS 0,
    so joining t of them costs SBS 0 exactly nothing per join, while their
    descending macro SNRs keep them between the MBS cursor and UE 2."""
    if num_ue < 4:
        raise ValueError("the family needs at least 4 UEs")
    snr = np.empty(num_ue)
    sinr = np.empty(num_ue)
    assoc = np.empty(num_ue, dtype=np.int64)
    snr[0], sinr[0], assoc[0] = 1e6, 1e-9, 1
    snr[1], sinr[1], assoc[1] = 100.0, 1.0, 0
    snr[2], sinr[2], assoc[2] = 1e-6, 0.5, 1
    for t in range(1, num_ue - 2):
        k = t + 2
        snr[k], sinr[k], assoc[k] = 50.0 / t, 1.0, 0
    params = ScenarioParams(num_sbs=2, num_ue=num_ue, seed=0)
    return ChannelTable(snr_macro=snr, assoc_sbs=assoc, sinr_small=sinr, params=params)


@pytest.fixture
def small_table() -> ChannelTable:
    return seeded_table(num_ue=6, num_sbs=4, seed=7)
