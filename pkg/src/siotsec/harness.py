"""Declarative experiment runner: config parsing, metric sweeps, table output.

A spec file is INI-style text with an [experiment] section naming the kind
and one kind-specific section.  Defaults reproduce the reference operating
points: the secrecy sweep uses 15 m / 18 m links at 0 dB eavesdropper SNR,
rate threshold 1, three antennas everywhere, path loss exponent 2; the
covert sweep uses DEP 0.95, 20 bit/s/Hz, 5 MHz bandwidth, two looks per
second, and a 1 Gbit payload.

Tables render to CSV (leading '# key=value' metadata lines, then header and
rows in 6-digit scientific notation) or columnar JSON; identical spec+seed
gives byte-identical output.
"""
from __future__ import annotations

import configparser
import dataclasses
import hashlib
import io
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .attack import AttackConfig, ToyEncoder, defense_eval, encode, run_attack
from .channel import AntennaConfig, LinkGeometry, RngSeed, SNR_MODES, avg_received_snr, make_snr_model
from .covert import WardenModel, dep_energy_detector, dep_optimal, dfp, dfp_mc
from .images import random_image
from .secrecy import (
    QuadratureError,
    SecrecyScenario,
    SemanticProfile,
    asc,
    asc_mc,
    pnz,
    pnz_mc,
    semantic_sop,
    sop_mc,
    sop_numeric,
)

EXPERIMENT_KINDS = ("fig3_sweep", "fig5_sweep", "attack_demo", "single_metric")
SINGLE_METRICS = ("sop", "pnz", "asc", "ssop", "dep", "dfp")


class SpecError(ValueError):
    """Config text is malformed or violates a field constraint."""


def _require(cond: bool, field: str, message: str):
    if not cond:
        raise SpecError(f"{field}: {message}")


@dataclass(frozen=True)
class Fig3Params:
    """Secrecy-sweep grid and scenario; defaults are the reference operating point."""

    snr_db_start: float = 0.0
    snr_db_stop: float = 15.0
    snr_db_step: float = 0.5
    sdep_list: tuple[float, ...] = (0.3, 0.7)
    eve_snr_db: float = 0.0
    rate_threshold: float = 1.0
    tx_antennas: int = 3
    rx_antennas: int = 3
    eve_antennas: int = 3
    distance_b_m: float = 15.0
    distance_e_m: float = 18.0
    path_loss_exponent: float = 2.0
    snr_mode: str = "direct"

    def __post_init__(self):
        _validate_grid("snr_db", self.snr_db_start, self.snr_db_stop, self.snr_db_step)
        _require(len(self.sdep_list) > 0, "sdep_list", "must be nonempty")
        for v in self.sdep_list:
            _require(0.0 <= v <= 1.0, "sdep_list", f"entries must be in [0, 1], got {v}")
        _require(math.isfinite(self.eve_snr_db), "eve_snr_db", "must be finite")
        _require(self.rate_threshold >= 0, "rate_threshold", "must be >= 0")
        for name in ("tx_antennas", "rx_antennas", "eve_antennas"):
            _require(getattr(self, name) >= 1, name, "must be >= 1")
        _require(self.distance_b_m > 0, "distance_b_m", "must be > 0")
        _require(self.distance_e_m > 0, "distance_e_m", "must be > 0")
        _require(self.path_loss_exponent >= 0, "path_loss_exponent", "must be >= 0")
        _require(self.snr_mode in SNR_MODES, "snr_mode", f"must be one of {SNR_MODES}")


@dataclass(frozen=True)
class Fig5Params:
    """Covert-sweep grid over compression ratios; defaults per the reference setup."""

    ratio_start: float = 0.1
    ratio_stop: float = 1.0
    ratio_step: float = 0.1
    dep: float = 0.95
    detection_rate_hz: float = 2.0
    covert_rate_bps_hz: float = 20.0
    bandwidth_hz: float = 5.0e6
    source_bits: float = 1.0e9

    def __post_init__(self):
        _validate_grid("ratio", self.ratio_start, self.ratio_stop, self.ratio_step)
        _require(0.0 < self.ratio_start, "ratio_start", "must be > 0")
        _require(self.ratio_stop <= 1.0, "ratio_stop", "must be <= 1")
        _require(0.0 < self.dep <= 1.0, "dep", "must be in (0, 1]")
        _require(self.detection_rate_hz >= 0, "detection_rate_hz", "must be >= 0")
        _require(self.covert_rate_bps_hz > 0, "covert_rate_bps_hz", "must be > 0")
        _require(self.bandwidth_hz > 0, "bandwidth_hz", "must be > 0")
        _require(self.source_bits > 0, "source_bits", "must be > 0")


@dataclass(frozen=True)
class AttackParams:
    """Seeded attack fixture: image/encoder sizes, budget, and blur defense."""

    mode: str = "targeted"
    epsilon: float = 0.1
    step_size: float = 0.1 / 25
    max_iters: int = 300
    height: int = 16
    width: int = 16
    channels: int = 1
    hidden_dim: int = 32
    embed_dim: int = 8
    blur_sigma: float = 1.5
    blur_radius: int = 3

    def __post_init__(self):
        # AttackConfig re-validates mode/budget; check the fixture dims here
        AttackConfig(self.mode, self.epsilon, self.step_size, self.max_iters)
        for name in ("height", "width", "channels", "hidden_dim"):
            _require(getattr(self, name) >= 1, name, "must be >= 1")
        _require(self.embed_dim >= 2, "embed_dim", "must be >= 2")
        _require(self.blur_sigma > 0, "blur_sigma", "must be > 0")
        _require(self.blur_radius >= 1, "blur_radius", "must be >= 1")


@dataclass(frozen=True)
class SingleMetricParams:
    """One metric evaluation; which fields matter depends on `metric`."""

    metric: str = "sop"
    method: str = "numeric"
    mc_samples: int = 10**6
    snr_b_db: float = 10.0
    eve_snr_db: float = 0.0
    tx_antennas: int = 3
    rx_antennas: int = 3
    eve_antennas: int = 3
    rate_threshold: float = 1.0
    sdep: float = 0.3
    dep: float = 0.95
    detections: float = 20.0
    noise_power: float = 1.0
    signal_power: float = 0.5
    warden_samples: int = 20
    threshold: float = -1.0  # negative -> use the optimal threshold

    def __post_init__(self):
        _require(self.metric in SINGLE_METRICS, "metric", f"must be one of {SINGLE_METRICS}")
        _require(self.method in ("numeric", "mc"), "method", "must be 'numeric' or 'mc'")
        _require(self.mc_samples >= 1000, "mc_samples", "must be >= 1000")
        _require(math.isfinite(self.snr_b_db), "snr_b_db", "must be finite")
        _require(math.isfinite(self.eve_snr_db), "eve_snr_db", "must be finite")
        for name in ("tx_antennas", "rx_antennas", "eve_antennas"):
            _require(getattr(self, name) >= 1, name, "must be >= 1")
        _require(self.rate_threshold >= 0, "rate_threshold", "must be >= 0")
        _require(0.0 <= self.sdep <= 1.0, "sdep", "must be in [0, 1]")
        _require(0.0 < self.dep <= 1.0, "dep", "must be in (0, 1]")
        _require(self.detections >= 0, "detections", "must be >= 0")
        _require(self.noise_power > 0, "noise_power", "must be > 0")
        _require(self.signal_power >= 0, "signal_power", "must be >= 0")
        _require(self.warden_samples >= 1, "warden_samples", "must be >= 1")


_KIND_SECTIONS = {
    "fig3_sweep": ("fig3", Fig3Params),
    "fig5_sweep": ("fig5", Fig5Params),
    "attack_demo": ("attack", AttackParams),
    "single_metric": ("metric", SingleMetricParams),
}


@dataclass(frozen=True)
class ExperimentSpec:
    """Validated experiment description; exactly one kind-params block is set."""

    kind: str
    seed: int = 1234
    out_format: str = "csv"
    out_path: str = ""
    fig3: Fig3Params | None = None
    fig5: Fig5Params | None = None
    attack: AttackParams | None = None
    metric: SingleMetricParams | None = None

    def __post_init__(self):
        _require(self.kind in EXPERIMENT_KINDS, "kind", f"must be one of {EXPERIMENT_KINDS}")
        _require(0 <= self.seed < 2**64, "seed", "must be an unsigned 64-bit integer")
        _require(self.out_format in ("csv", "json"), "format", "must be 'csv' or 'json'")
        section = _KIND_SECTIONS[self.kind][0]
        if getattr(self, section) is None:
            object.__setattr__(self, section, _KIND_SECTIONS[self.kind][1]())
        for other, _ in _KIND_SECTIONS.values():
            if other != section and getattr(self, other) is not None:
                raise SpecError(f"{other}: section does not belong to kind {self.kind}")

    @property
    def params(self):
        return getattr(self, _KIND_SECTIONS[self.kind][0])


def _validate_grid(name: str, start: float, stop: float, step: float):
    _require(math.isfinite(start) and math.isfinite(stop), f"{name}_start", "must be finite")
    _require(math.isfinite(step) and step > 0, f"{name}_step", "must be > 0")
    _require(start <= stop, f"{name}_start", "must be <= stop")
    n = int(round((stop - start) / step)) + 1
    _require(abs(start + (n - 1) * step - stop) <= 1e-9 * max(1.0, abs(stop)),
             f"{name}_step", "must evenly divide the grid span")


def _grid(start: float, stop: float, step: float) -> np.ndarray:
    n = int(round((stop - start) / step)) + 1
    return np.linspace(start, stop, n)


def _parse_field(field: dataclasses.Field, raw: str, section: str):
    name = field.name
    try:
        if field.type in ("float", float):
            return float(raw)
        if field.type in ("int", int):
            return int(raw)
        if field.type in ("str", str):
            return raw.strip()
        # tuple[float, ...]: comma-separated floats
        return tuple(float(t) for t in raw.split(",") if t.strip())
    except ValueError as e:
        raise SpecError(f"{section}.{name}: cannot parse {raw!r}") from e


def _parse_section(cp: configparser.ConfigParser, section: str, cls):
    fields = {f.name: f for f in dataclasses.fields(cls)}
    kwargs = {}
    if cp.has_section(section):
        for key, raw in cp.items(section):
            if key not in fields:
                raise SpecError(f"{section}.{key}: unknown key")
            kwargs[key] = _parse_field(fields[key], raw, section)
    return cls(**kwargs)


def parse_spec(text: str) -> ExperimentSpec:
    """Parse and validate INI-style experiment config text."""
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#",))
    try:
        cp.read_string(text)
    except configparser.Error as e:
        raise SpecError(f"config syntax error: {e}") from e
    if not cp.has_section("experiment"):
        raise SpecError("experiment: missing [experiment] section")
    exp = dict(cp.items("experiment"))
    kind = exp.pop("kind", None)
    if kind is None:
        raise SpecError("experiment.kind: required")
    if kind not in EXPERIMENT_KINDS:
        raise SpecError(f"experiment.kind: must be one of {EXPERIMENT_KINDS}, got {kind!r}")
    try:
        seed = int(exp.pop("seed", "1234"))
    except ValueError as e:
        raise SpecError("experiment.seed: must be an integer") from e
    out_format = exp.pop("format", "csv")
    out_path = exp.pop("output", "")
    if exp:
        raise SpecError(f"experiment.{sorted(exp)[0]}: unknown key")

    section, cls = _KIND_SECTIONS[kind]
    for other in cp.sections():
        if other not in ("experiment", section):
            raise SpecError(f"{other}: unknown section for kind {kind}")
    params = _parse_section(cp, section, cls)
    return ExperimentSpec(kind=kind, seed=seed, out_format=out_format, out_path=out_path,
                          **{section: params})


def _format_value(v) -> str:
    if isinstance(v, tuple):
        return ", ".join(repr(float(x)) for x in v)
    if isinstance(v, float):
        return repr(v)
    return str(v)


def serialize_spec(spec: ExperimentSpec) -> str:
    """Canonical config text; parse_spec(serialize_spec(s)) == s."""
    lines = ["[experiment]", f"kind = {spec.kind}", f"seed = {spec.seed}",
             f"format = {spec.out_format}"]
    if spec.out_path:
        lines.append(f"output = {spec.out_path}")
    section, _ = _KIND_SECTIONS[spec.kind]
    lines += ["", f"[{section}]"]
    for f in dataclasses.fields(spec.params):
        lines.append(f"{f.name} = {_format_value(getattr(spec.params, f.name))}")
    return "\n".join(lines) + "\n"


def spec_sha256(spec: ExperimentSpec) -> str:
    return hashlib.sha256(serialize_spec(spec).encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class ResultTable:
    """Rectangular table of finite reals with ordered columns and metadata."""

    columns: tuple[str, ...]
    rows: tuple[tuple[float, ...], ...]
    metadata: tuple[tuple[str, str], ...]

    def __post_init__(self):
        if not self.columns:
            raise ValueError("table must have at least one column")
        for row in self.rows:
            if len(row) != len(self.columns):
                raise ValueError("rows must match the column count")
            if not all(math.isfinite(v) for v in row):
                raise ValueError("table values must be finite")

    def column(self, name: str) -> np.ndarray:
        idx = self.columns.index(name)
        return np.array([row[idx] for row in self.rows])


def _make_table(spec: ExperimentSpec, columns, rows) -> ResultTable:
    meta = (("spec_sha256", spec_sha256(spec)), ("seed", str(spec.seed)),
            ("tool_version", __version__))
    return ResultTable(tuple(columns), tuple(tuple(float(v) for v in row) for row in rows), meta)


def _fig3_scenario(p: Fig3Params, snr_b_db: float) -> SecrecyScenario:
    geom_b = LinkGeometry(p.distance_b_m, p.path_loss_exponent)
    geom_e = LinkGeometry(p.distance_e_m, p.path_loss_exponent)
    snr_b = make_snr_model(avg_received_snr(snr_b_db, geom_b, p.snr_mode),
                           AntennaConfig(p.tx_antennas, p.rx_antennas))
    snr_e = make_snr_model(avg_received_snr(p.eve_snr_db, geom_e, p.snr_mode),
                           AntennaConfig(p.tx_antennas, p.eve_antennas))
    return SecrecyScenario(snr_b, snr_e, p.rate_threshold)


def run_fig3_sweep(spec: ExperimentSpec) -> ResultTable:
    """SOP and semantic SOP versus legitimate-link SNR in dB."""
    p = spec.fig3
    columns = ["snr_b_db", "sop"] + [f"ssop_{sdep:g}" for sdep in p.sdep_list]
    rows = []
    for snr_db in _grid(p.snr_db_start, p.snr_db_stop, p.snr_db_step):
        try:
            sop = sop_numeric(_fig3_scenario(p, snr_db))
        except QuadratureError as e:
            raise QuadratureError(f"SOP at snr_b_db={snr_db:g}", e.residual) from e
        rows.append([snr_db, sop] + [semantic_sop(sop, SemanticProfile(sdep))
                                     for sdep in p.sdep_list])
    return _make_table(spec, columns, rows)


def run_fig5_sweep(spec: ExperimentSpec) -> ResultTable:
    """DFP versus semantic compression ratio, against the uncompressed baseline."""
    p = spec.fig5
    looks_full = p.detection_rate_hz * p.source_bits / (p.covert_rate_bps_hz * p.bandwidth_hz)
    dfp_conventional = dfp(p.dep, looks_full)
    rows = [[ratio, dfp(p.dep, looks_full * ratio), dfp_conventional]
            for ratio in _grid(p.ratio_start, p.ratio_stop, p.ratio_step)]
    return _make_table(spec, ["ratio", "dfp_siot", "dfp_conventional"], rows)


def attack_fixture(seed: int, p: AttackParams):
    """Deterministic (encoder, source, reference image, config) for a demo run.

    Streams: 0 encoder weights, 1 source image, 2 targeted-mode reference.
    Untargeted mode references the source's own embedding.
    """
    enc = ToyEncoder.from_seed(p.height * p.width * p.channels, p.hidden_dim, p.embed_dim,
                               RngSeed(seed, 0))
    src = random_image(p.height, p.width, p.channels, RngSeed(seed, 1))
    target_img = random_image(p.height, p.width, p.channels, RngSeed(seed, 2))
    reference_img = target_img if p.mode == "targeted" else src
    cfg = AttackConfig(p.mode, p.epsilon, p.step_size, p.max_iters)
    return enc, src, reference_img, cfg


def run_attack_demo(spec: ExperimentSpec) -> ResultTable:
    """Seeded attack trace plus the blur-defense summary of the final image.

    Rows 0..max_iters hold the best-so-far similarity; the defense summary
    pair (before/after blurring) is repeated on every row, and a final row
    at iteration max_iters + 1 restates it.
    """
    p = spec.attack
    enc, src, reference_img, cfg = attack_fixture(spec.seed, p)
    trace = run_attack(enc, src, encode(enc, reference_img), cfg)
    sim_before, sim_after = defense_eval(enc, trace.adversarial, reference_img,
                                         p.blur_sigma, p.blur_radius)
    rows = [[t, s, sim_before, sim_after] for t, s in enumerate(trace.best_similarity)]
    rows.append([p.max_iters + 1, trace.final_similarity, sim_before, sim_after])
    return _make_table(spec, ["iteration", "best_similarity", "summary_sim_before",
                              "summary_sim_after"], rows)


def _secrecy_scenario_from_metric(p: SingleMetricParams) -> SecrecyScenario:
    snr_b = make_snr_model(10.0 ** (p.snr_b_db / 10.0),
                           AntennaConfig(p.tx_antennas, p.rx_antennas))
    snr_e = make_snr_model(10.0 ** (p.eve_snr_db / 10.0),
                           AntennaConfig(p.tx_antennas, p.eve_antennas))
    return SecrecyScenario(snr_b, snr_e, p.rate_threshold)


def run_single_metric(spec: ExperimentSpec) -> ResultTable:
    """Evaluate one metric and return a one-row table."""
    p = spec.metric
    seed = RngSeed(spec.seed, 0)
    if p.metric in ("sop", "pnz", "asc", "ssop"):
        s = _secrecy_scenario_from_metric(p)
        if p.metric == "ssop":
            sop = sop_numeric(s)
            return _make_table(spec, ["sop", "ssop"],
                               [[sop, semantic_sop(sop, SemanticProfile(p.sdep))]])
        if p.method == "mc":
            est = {"sop": sop_mc, "pnz": pnz_mc, "asc": asc_mc}[p.metric](s, p.mc_samples, seed)
            return _make_table(spec, [p.metric, "std_error", "n_samples"],
                               [[est.value, est.std_error, est.n_samples]])
        value = {"sop": sop_numeric, "pnz": pnz, "asc": asc}[p.metric](s)
        return _make_table(spec, [p.metric], [[value]])
    if p.metric == "dep":
        w = WardenModel(p.noise_power, p.signal_power, p.warden_samples)
        if p.threshold < 0:
            tau, _ = dep_optimal(w)
        else:
            tau = p.threshold
        point = dep_energy_detector(w, tau)
        return _make_table(spec, ["threshold", "p_fa", "p_md", "dep"],
                           [[tau, point.p_fa, point.p_md, point.dep]])
    # dfp
    if p.method == "mc":
        est = dfp_mc(p.dep, int(round(p.detections)), p.mc_samples, seed)
        return _make_table(spec, ["detections", "dfp", "std_error", "n_samples"],
                           [[int(round(p.detections)), est.value, est.std_error, est.n_samples]])
    return _make_table(spec, ["detections", "dfp"], [[p.detections, dfp(p.dep, p.detections)]])


_RUNNERS = {
    "fig3_sweep": run_fig3_sweep,
    "fig5_sweep": run_fig5_sweep,
    "attack_demo": run_attack_demo,
    "single_metric": run_single_metric,
}


def run_experiment(spec: ExperimentSpec) -> ResultTable:
    return _RUNNERS[spec.kind](spec)


def _sci(x: float) -> str:
    mantissa, exponent = f"{x:.6e}".split("e")
    return f"{mantissa}e{int(exponent)}"


def render_csv(table: ResultTable) -> str:
    buf = io.StringIO()
    for key, value in table.metadata:
        buf.write(f"# {key}={value}\n")
    buf.write(",".join(table.columns) + "\n")
    for row in table.rows:
        buf.write(",".join(_sci(v) for v in row) + "\n")
    return buf.getvalue()


def render_json(table: ResultTable) -> str:
    obj = {
        "metadata": dict(table.metadata),
        "columns": list(table.columns),
        "values": [[row[i] for row in table.rows] for i in range(len(table.columns))],
    }
    return json.dumps(obj, indent=2) + "\n"


def render_table(table: ResultTable, fmt: str) -> str:
    if fmt == "csv":
        return render_csv(table)
    if fmt == "json":
        return render_json(table)
    raise ValueError(f"format must be 'csv' or 'json', got {fmt!r}")


def emit_table(table: ResultTable, fmt: str, sink) -> int:
    """Write the rendered table to a path; returns bytes written."""
    data = render_table(table, fmt).encode("utf-8")
    path = Path(sink)
    try:
        path.write_bytes(data)
    except OSError as e:
        raise OSError(f"cannot write table to {path}: {e}") from e
    return len(data)
