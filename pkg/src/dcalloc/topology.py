"""Two-tier network geometry, pathloss gains, and per-UE link quality tables.

One macro base station (MBS) sits at the exact center of a square region;
small base stations (SBSs) on a separate carrier and user terminals (UEs) are
drawn i.i.d. uniform over the square, SBSs first, then UEs, so an instance is
a pure function of (parameters, seed).

Powers enter in dBm and noise densities in dBm/Hz at the config boundary
only. Everything downstream of the constructors works in linear watts and
hertz. The channel is a bare log-distance law g(d) = max(d, 1 m)^-alpha with
a 1 m reference and no fading or shadowing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "MIN_GAIN_DISTANCE_M",
    "ScenarioParams",
    "Topology",
    "ChannelTable",
    "dbm_to_watts",
    "channel_gain",
    "generate_topology",
    "build_channel_table",
    "make_instance",
    "format_channel_table",
    "write_channel_table",
    "parse_channel_table",
]

# Gains are clamped below this distance so a UE sitting on top of a
# transmitter cannot produce an unbounded gain.
MIN_GAIN_DISTANCE_M = 1.0


def dbm_to_watts(value_dbm: float) -> float:
    """Convert dBm to linear watts: 10 ** ((x - 30) / 10)."""
    return 10.0 ** ((value_dbm - 30.0) / 10.0)


@dataclass(frozen=True)
class ScenarioParams:
    """Scenario knobs for one simulated drop.

    Defaults are the reference parameter set used across the experiment
    harness. Power/noise fields carry dBm units; the *_w properties expose
    the linear-watt view used by all rate math.
    """

    area_side_m: float = 500.0      # square side, meters
    num_sbs: int = 4                # SBS count (I)
    num_ue: int = 10                # UE count (K)
    p_macro_dbm: float = 46.0       # MBS transmit power
    p_small_dbm: float = 20.0       # SBS transmit power
    alpha_macro: float = 4.5        # macro-tier pathloss exponent
    alpha_small: float = 5.0        # small-tier pathloss exponent
    bw_macro_hz: float = 10e6       # macro carrier bandwidth
    bw_small_hz: float = 10e6      # small-cell carrier bandwidth
    n_macro_dbm_hz: float = -90.0   # macro noise PSD, dBm/Hz
    n_small_dbm_hz: float = -140.0  # small-cell noise PSD, dBm/Hz
    seed: int = 0                   # drop seed, 64-bit unsigned

    def validate(self) -> None:
        if not (self.area_side_m > 0.0 and math.isfinite(self.area_side_m)):
            raise ValueError(f"area_side_m must be positive and finite, got {self.area_side_m}")
        if self.num_sbs < 1:
            raise ValueError(f"num_sbs must be >= 1, got {self.num_sbs}")
        if self.num_ue < 1:
            raise ValueError(f"num_ue must be >= 1, got {self.num_ue}")
        # exponents <= 2 break the far-field decay assumptions baked into the tests
        if not (self.alpha_macro > 2.0 and self.alpha_small > 2.0):
            raise ValueError("pathloss exponents must exceed 2")
        if not (self.bw_macro_hz > 0.0 and self.bw_small_hz > 0.0):
            raise ValueError("bandwidths must be positive")
        for name in ("p_macro_dbm", "p_small_dbm", "n_macro_dbm_hz", "n_small_dbm_hz"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if not (0 <= int(self.seed) < 2 ** 64):
            raise ValueError("seed must fit in an unsigned 64-bit integer")

    # linear-unit views; conversion from dBm happens here and nowhere else
    @property
    def p_macro_w(self) -> float:
        return dbm_to_watts(self.p_macro_dbm)

    @property
    def p_small_w(self) -> float:
        return dbm_to_watts(self.p_small_dbm)

    @property
    def noise_macro_w(self) -> float:
        """Total macro-band noise power: bandwidth times noise PSD."""
        return self.bw_macro_hz * dbm_to_watts(self.n_macro_dbm_hz)

    @property
    def noise_small_w(self) -> float:
        """Total small-cell-band noise power: bandwidth times noise PSD."""
        return self.bw_small_hz * dbm_to_watts(self.n_small_dbm_hz)


@dataclass(frozen=True)
class Topology:
    """Node positions, all in meters on the same plane."""

    mbs_pos: np.ndarray   # shape (2,)
    sbs_pos: np.ndarray   # shape (I, 2)
    ue_pos: np.ndarray    # shape (K, 2)

    def __post_init__(self):
        object.__setattr__(self, "mbs_pos", np.asarray(self.mbs_pos, dtype=np.float64))
        object.__setattr__(self, "sbs_pos", np.asarray(self.sbs_pos, dtype=np.float64))
        object.__setattr__(self, "ue_pos", np.asarray(self.ue_pos, dtype=np.float64))
        if self.mbs_pos.shape != (2,):
            raise ValueError("mbs_pos must have shape (2,)")
        if self.sbs_pos.ndim != 2 or self.sbs_pos.shape[1] != 2 or self.sbs_pos.shape[0] < 1:
            raise ValueError("sbs_pos must have shape (I, 2) with I >= 1")
        if self.ue_pos.ndim != 2 or self.ue_pos.shape[1] != 2 or self.ue_pos.shape[0] < 1:
            raise ValueError("ue_pos must have shape (K, 2) with K >= 1")


def channel_gain(distance_m, alpha: float):
    """Log-distance gain max(d, 1 m) ** -alpha. Accepts scalars or arrays."""
    if alpha <= 0.0:
        raise ValueError("alpha must be positive")
    d = np.asarray(distance_m, dtype=np.float64)
    if np.any(d < 0.0):
        raise ValueError("distances must be non-negative")
    out = np.maximum(d, MIN_GAIN_DISTANCE_M) ** (-alpha)
    if out.ndim == 0:
        return float(out)
    return out


def generate_topology(params: ScenarioParams, rng: np.random.Generator | None = None) -> Topology:
    """Draw SBS then UE positions uniformly over the square.

    Draw order is fixed (SBS block first, row-major, then the UE block) so a
    given (params, seed) pair always yields the same drop.
    """
    params.validate()
    if rng is None:
        rng = np.random.default_rng(params.seed)
    side = params.area_side_m
    mbs = np.array([side / 2.0, side / 2.0])
    sbs = rng.uniform(0.0, side, size=(params.num_sbs, 2))
    ue = rng.uniform(0.0, side, size=(params.num_ue, 2))
    return Topology(mbs_pos=mbs, sbs_pos=sbs, ue_pos=ue)


@dataclass
class ChannelTable:
    """Per-UE link quality snapshot, the sole input the solvers see.

    snr_macro[k]   macro-tier SNR of UE k (linear)
    assoc_sbs[k]   index of the SBS whose received power is largest at k
    sinr_small[k]  SINR toward assoc_sbs[k] with all other SBSs as interference

    rx_macro_w / rx_small_w keep the raw received powers (watts) around for
    the received-power baseline. log_macro / log_small cache the Shannon
    terms log2(1 + x); every rate path in the package reads these cached
    arrays so identical allocations evaluate to bit-identical sums.
    """

    snr_macro: np.ndarray
    assoc_sbs: np.ndarray
    sinr_small: np.ndarray
    params: ScenarioParams
    rx_macro_w: np.ndarray | None = None
    rx_small_w: np.ndarray | None = None
    log_macro: np.ndarray = field(init=False, repr=False)
    log_small: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self.snr_macro = np.ascontiguousarray(self.snr_macro, dtype=np.float64)
        self.sinr_small = np.ascontiguousarray(self.sinr_small, dtype=np.float64)
        self.assoc_sbs = np.ascontiguousarray(self.assoc_sbs, dtype=np.int64)
        k = self.params.num_ue
        if not (self.snr_macro.shape == self.sinr_small.shape == self.assoc_sbs.shape == (k,)):
            raise ValueError("table arrays must all have shape (num_ue,)")
        if np.any(self.assoc_sbs < 0) or np.any(self.assoc_sbs >= self.params.num_sbs):
            raise ValueError("assoc_sbs entries must index a valid SBS")
        for name, arr in (("snr_macro", self.snr_macro), ("sinr_small", self.sinr_small)):
            if not np.all(np.isfinite(arr)) or np.any(arr <= 0.0):
                raise ValueError(f"{name} must be finite and strictly positive")
        if self.rx_macro_w is None:
            # synthetic tables: back out a consistent received power from the SNR
            self.rx_macro_w = self.snr_macro * self.params.noise_macro_w
        if self.rx_small_w is None:
            # zero-interference stand-in, only the ordering matters downstream
            self.rx_small_w = self.sinr_small * self.params.noise_small_w
        self.rx_macro_w = np.ascontiguousarray(self.rx_macro_w, dtype=np.float64)
        self.rx_small_w = np.ascontiguousarray(self.rx_small_w, dtype=np.float64)
        self.log_macro = np.log2(1.0 + self.snr_macro)
        self.log_small = np.log2(1.0 + self.sinr_small)

    @property
    def num_ue(self) -> int:
        return int(self.snr_macro.shape[0])

    @property
    def num_sbs(self) -> int:
        return int(self.params.num_sbs)


def build_channel_table(topo: Topology, params: ScenarioParams) -> ChannelTable:
    """Compute SNR, association, and SINR for every UE of a drop."""
    params.validate()
    if topo.ue_pos.shape[0] != params.num_ue or topo.sbs_pos.shape[0] != params.num_sbs:
        raise ValueError("topology does not match params (num_ue / num_sbs)")

    d_macro = np.hypot(topo.ue_pos[:, 0] - topo.mbs_pos[0], topo.ue_pos[:, 1] - topo.mbs_pos[1])
    rx_macro = params.p_macro_w * channel_gain(d_macro, params.alpha_macro)
    snr_macro = rx_macro / params.noise_macro_w

    # (K, I) distance matrix UE -> SBS
    diff = topo.ue_pos[:, None, :] - topo.sbs_pos[None, :, :]
    d_small = np.hypot(diff[:, :, 0], diff[:, :, 1])
    rx_small = params.p_small_w * channel_gain(d_small, params.alpha_small)

    # strongest received power wins; argmax takes the lowest index on ties
    assoc = rx_small.argmax(axis=1)
    rows = np.arange(params.num_ue)
    serving_rx = rx_small[rows, assoc]
    others = rx_small.copy()
    others[rows, assoc] = 0.0        # summing the zeroed copy avoids cancellation
    interference = others.sum(axis=1)
    sinr_small = serving_rx / (interference + params.noise_small_w)

    return ChannelTable(
        snr_macro=snr_macro,
        assoc_sbs=assoc,
        sinr_small=sinr_small,
        params=params,
        rx_macro_w=rx_macro,
        rx_small_w=serving_rx,
    )


def make_instance(params: ScenarioParams, rng: np.random.Generator | None = None):
    """Convenience: draw a topology and build its table in one call."""
    topo = generate_topology(params, rng)
    return topo, build_channel_table(topo, params)


_TABLE_HEADER = "index,x,y,snr_macro,assoc_sbs,sinr_small"


def format_channel_table(topo: Topology, table: ChannelTable) -> str:
    """Render a table as plain text, one row per UE.

    Columns: index, x, y, snr_macro, assoc_sbs, sinr_small. Floats carry 17
    significant digits so a parse round-trips bit-exactly.
    """
    if topo.ue_pos.shape[0] != table.num_ue:
        raise ValueError("topology UE count does not match table")
    lines = [_TABLE_HEADER]
    for k in range(table.num_ue):
        lines.append(
            "%d,%s,%s,%s,%d,%s"
            % (
                k,
                format(topo.ue_pos[k, 0], ".17g"),
                format(topo.ue_pos[k, 1], ".17g"),
                format(table.snr_macro[k], ".17g"),
                table.assoc_sbs[k],
                format(table.sinr_small[k], ".17g"),
            )
        )
    return "\n".join(lines) + "\n"


def write_channel_table(path, topo: Topology, table: ChannelTable) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(format_channel_table(topo, table))


def parse_channel_table(text: str) -> dict:
    """Parse format_channel_table output back into arrays."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != _TABLE_HEADER:
        raise ValueError("unrecognized channel table header")
    idx, xs, ys, snr, assoc, sinr = [], [], [], [], [], []
    for ln in lines[1:]:
        parts = ln.split(",")
        if len(parts) != 6:
            raise ValueError(f"malformed row: {ln!r}")
        idx.append(int(parts[0]))
        xs.append(float(parts[1]))
        ys.append(float(parts[2]))
        snr.append(float(parts[3]))
        assoc.append(int(parts[4]))
        sinr.append(float(parts[5]))
    return {
        "index": np.array(idx, dtype=np.int64),
        "ue_pos": np.column_stack([xs, ys]).astype(np.float64),
        "snr_macro": np.array(snr, dtype=np.float64),
        "assoc_sbs": np.array(assoc, dtype=np.int64),
        "sinr_small": np.array(sinr, dtype=np.float64),
    }
