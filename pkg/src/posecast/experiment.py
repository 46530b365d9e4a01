"""Benchmark harness: the model/class/horizon/drop-rate sweep.

Each trace is causally low-pass filtered, chunked, and classified once;
every predictor variant then streams over the filtered poses while a
seeded drop gate decides per tick whether the correction step runs.
Prediction errors are measured against the raw future pose, pooled by the
chunk's motion class, and summarized per sweep cell with confidence
intervals across repeats.

Every cell draws from its own generator seeded by (master_seed, model,
horizon, drop_rate, repeat), so results never depend on execution order.
"""

import os
from dataclasses import dataclass, field

import numpy as np

from .classifier import ClassifierConfig, MotionClass, classify, discretize_chunk, lz_entropy
from .filters import MODEL_NAMES, DegeneracyError, FilterConfig, canonical_model_name, make_predictor
from .metrics import orientation_error, position_error, summarize
from .preprocess import chunk_trace, design_butterworth_lowpass, filter_trace

SUMMARY_COLUMNS = (
    "model,class,horizon_ms,drop_rate,"
    "pos_mean_mm,pos_mean_ci_low,pos_mean_ci_high,"
    "pos_median_mm,pos_median_ci_low,pos_median_ci_high,"
    "ori_mean_deg,ori_mean_ci_low,ori_mean_ci_high,"
    "ori_median_deg,ori_median_ci_low,ori_median_ci_high,"
    "n_repeats,n_samples"
)

SAMPLES_COLUMNS = "model,class,horizon_ms,drop_rate,repeat,trace,tick,e_pos_mm,e_ori_deg"


def simulate_drop(rng, drop_rate):
    """One packet draw: received iff r > drop_rate for r uniform on [0, 1)."""
    if not 0.0 <= drop_rate <= 1.0:
        raise ValueError(f"drop_rate must be in [0, 1], got {drop_rate}")
    return bool(rng.random() > drop_rate)


@dataclass
class ExperimentConfig:
    models: tuple = MODEL_NAMES
    horizons_ms: tuple = (20, 40, 60, 80, 100)
    drop_rates: tuple = (0.0, 0.1, 0.3, 0.5)
    repeats: int = 10
    master_seed: int = 0
    chunk_len: int = 200
    classifier: ClassifierConfig = field(default_factory=ClassifierConfig)
    cutoff_hz: float = 5.0
    butter_order: int = 2
    diff_window: int = 0
    ci_level: float = 0.95
    keep_samples: bool = True

    def __post_init__(self):
        self.models = tuple(canonical_model_name(m) for m in self.models)
        if not self.models:
            raise ValueError("at least one model is required")
        self.horizons_ms = tuple(int(h) for h in self.horizons_ms)
        if any(h < 1 for h in self.horizons_ms) or not self.horizons_ms:
            raise ValueError("horizons must be positive and non-empty")
        self.drop_rates = tuple(float(d) for d in self.drop_rates)
        if any(not 0.0 <= d <= 1.0 for d in self.drop_rates) or not self.drop_rates:
            raise ValueError("drop rates must lie in [0, 1]")
        if self.repeats < 1:
            raise ValueError("repeats must be at least 1")
        if self.master_seed < 0:
            raise ValueError("master_seed must be non-negative")


@dataclass
class PerRepeatRow:
    model: str
    motion_class: MotionClass
    horizon_ms: int
    drop_rate: float
    repeat: int
    pos_median_mm: float
    pos_mean_mm: float
    ori_median_deg: float
    ori_mean_deg: float
    n_ticks: int


@dataclass
class AggregateRow:
    model: str
    motion_class: MotionClass
    horizon_ms: int
    drop_rate: float
    pos_mean_mm: float
    pos_mean_ci_low: float
    pos_mean_ci_high: float
    pos_median_mm: float
    pos_median_ci_low: float
    pos_median_ci_high: float
    ori_mean_deg: float
    ori_mean_ci_low: float
    ori_mean_ci_high: float
    ori_median_deg: float
    ori_median_ci_low: float
    ori_median_ci_high: float
    n_repeats: int
    n_samples: int


@dataclass
class FailedCell:
    model: str
    horizon_ms: int
    drop_rate: float
    repeat: int
    trace_index: int
    reason: str


@dataclass
class ExperimentReport:
    config: ExperimentConfig
    per_repeat: list
    aggregates: list
    failures: list
    chunk_classes: list          # per trace: MotionClass per chunk
    samples: list                # (model, class, h, drop, repeat, trace, tick, e_pos, e_ori)

    def aggregate(self, model, motion_class, horizon_ms, drop_rate):
        """The single aggregate row matching the given cell, or None."""
        for row in self.aggregates:
            if (row.model == model and row.motion_class == motion_class
                    and row.horizon_ms == horizon_ms
                    and abs(row.drop_rate - drop_rate) < 1e-12):
                return row
        return None


def classify_chunk(chunk, config=None):
    """Entropy-band label for one chunk of poses."""
    return classify(lz_entropy(discretize_chunk(chunk, config)), config)


def _prepare_trace(trace, config):
    dt = trace.median_dt()
    sos = design_butterworth_lowpass(config.butter_order, config.cutoff_hz, 1.0 / dt)
    filtered = filter_trace(trace, sos)
    labels = [classify_chunk(c, config.classifier)
              for c in chunk_trace(filtered, config.chunk_len)]
    return dt, filtered, labels


def _cell_rng(config, model, horizon_ms, drop_rate, repeat):
    key = (config.master_seed, MODEL_NAMES.index(model), int(horizon_ms),
           int(round(drop_rate * 1e6)), int(repeat))
    return np.random.default_rng(np.random.SeedSequence(key))


def run_experiment(config, traces):
    """Sweep every configured cell over the traces; returns the report.

    A numerically degenerate filter marks the (cell, trace) combination
    failed and the sweep keeps going; that trace contributes no samples to
    the failed cell.
    """
    traces = list(traces)
    if not traces:
        raise ValueError("at least one trace is required")
    prepared = [_prepare_trace(t, config) for t in traces]

    per_repeat = []
    failures = []
    samples = []
    for model in config.models:
        for h_ms in config.horizons_ms:
            for drop in config.drop_rates:
                for rep in range(config.repeats):
                    rng = _cell_rng(config, model, h_ms, drop, rep)
                    pool = {}
                    for ti, (trace, (dt, filtered, labels)) in enumerate(
                            zip(traces, prepared)):
                        n_steps = int(round(h_ms / 1000.0 / dt))
                        if n_steps < 1:
                            raise ValueError(
                                f"horizon {h_ms} ms is shorter than one tick of {dt:.9g} s")
                        fcfg = FilterConfig(model=model, dt=dt,
                                            horizon_steps=n_steps,
                                            diff_window=config.diff_window)
                        pred = make_predictor(fcfg, filtered.pose(0))
                        local = {}
                        try:
                            _stream_trace(pred, trace, filtered, labels, config,
                                          n_steps, rng, drop, local)
                        except DegeneracyError as e:
                            failures.append(FailedCell(model, h_ms, drop, rep,
                                                       ti, str(e)))
                            continue
                        for cls, (eps, eos, ticks) in local.items():
                            dst = pool.setdefault(cls, ([], [], []))
                            dst[0].extend(eps)
                            dst[1].extend(eos)
                            if config.keep_samples:
                                samples.extend(
                                    (model, cls, h_ms, drop, rep, ti, k, ep, eo)
                                    for k, ep, eo in zip(ticks, eps, eos))
                    for cls in sorted(pool):
                        eps, eos, _ = pool[cls]
                        per_repeat.append(PerRepeatRow(
                            model, cls, h_ms, drop, rep,
                            float(np.median(eps)), float(np.mean(eps)),
                            float(np.median(eos)), float(np.mean(eos)),
                            len(eps)))

    aggregates = _aggregate(config, per_repeat)
    return ExperimentReport(config, per_repeat, aggregates, failures,
                            [labels for _, _, labels in prepared], samples)


def _stream_trace(pred, trace, filtered, labels, config, n_steps, rng, drop, out):
    """Run one predictor over one trace, collecting per-tick errors by class."""
    usable = len(labels) * config.chunk_len
    n = len(filtered)
    for k in range(1, n):
        received = simulate_drop(rng, drop)
        pub = pred.step(filtered.pose(k), received=received)
        if k + n_steps < n and k < usable:
            cls = labels[k // config.chunk_len]
            eps, eos, ticks = out.setdefault(cls, ([], [], []))
            eps.append(position_error(pub.p, trace.p[k + n_steps]))
            eos.append(orientation_error(pub.q, trace.q[k + n_steps]))
            ticks.append(k)


def _aggregate(config, per_repeat):
    rows = []
    for model in config.models:
        for cls in MotionClass:
            for h_ms in config.horizons_ms:
                for drop in config.drop_rates:
                    group = [r for r in per_repeat
                             if r.model == model and r.motion_class == cls
                             and r.horizon_ms == h_ms and r.drop_rate == drop]
                    if not group:
                        continue
                    pm = summarize([r.pos_mean_mm for r in group], config.ci_level)
                    pq = summarize([r.pos_median_mm for r in group], config.ci_level)
                    om = summarize([r.ori_mean_deg for r in group], config.ci_level)
                    oq = summarize([r.ori_median_deg for r in group], config.ci_level)
                    rows.append(AggregateRow(
                        model, cls, h_ms, drop,
                        pm.mean, pm.ci_low, pm.ci_high,
                        pq.mean, pq.ci_low, pq.ci_high,
                        om.mean, om.ci_low, om.ci_high,
                        oq.mean, oq.ci_low, oq.ci_high,
                        len(group), sum(r.n_ticks for r in group)))
    return rows


def _fmt(v):
    return "%.9g" % v


def emit_report(report, out_dir):
    """Write summary.csv, samples.csv, and a fixed-width table.txt.

    Identical reports produce byte-identical files.
    """
    os.makedirs(out_dir, exist_ok=True)
    summary_path = os.path.join(out_dir, "summary.csv")
    with open(summary_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(SUMMARY_COLUMNS + "\n")
        for r in report.aggregates:
            fields = [r.model, r.motion_class.label, str(r.horizon_ms),
                      _fmt(r.drop_rate),
                      _fmt(r.pos_mean_mm), _fmt(r.pos_mean_ci_low),
                      _fmt(r.pos_mean_ci_high),
                      _fmt(r.pos_median_mm), _fmt(r.pos_median_ci_low),
                      _fmt(r.pos_median_ci_high),
                      _fmt(r.ori_mean_deg), _fmt(r.ori_mean_ci_low),
                      _fmt(r.ori_mean_ci_high),
                      _fmt(r.ori_median_deg), _fmt(r.ori_median_ci_low),
                      _fmt(r.ori_median_ci_high),
                      str(r.n_repeats), str(r.n_samples)]
            fh.write(",".join(fields) + "\n")

    with open(os.path.join(out_dir, "samples.csv"), "w", encoding="utf-8",
              newline="\n") as fh:
        fh.write(SAMPLES_COLUMNS + "\n")
        for model, cls, h_ms, drop, rep, ti, k, ep, eo in report.samples:
            fh.write(",".join([model, cls.label, str(h_ms), _fmt(drop),
                               str(rep), str(ti), str(k), _fmt(ep), _fmt(eo)])
                     + "\n")

    with open(os.path.join(out_dir, "table.txt"), "w", encoding="utf-8",
              newline="\n") as fh:
        _write_table(report, fh)
    return summary_path


def _write_table(report, fh):
    """Per (horizon, drop) block: models as rows, classes as column groups."""
    config = report.config
    for h_ms in config.horizons_ms:
        for drop in config.drop_rates:
            block = [r for r in report.aggregates
                     if r.horizon_ms == h_ms and r.drop_rate == drop]
            if not block:
                continue
            classes = sorted({r.motion_class for r in block})
            fh.write(f"horizon {h_ms} ms, drop rate {_fmt(drop)}\n")
            head1 = f"{'':8s}"
            head2 = f"{'model':8s}"
            for cls in classes:
                head1 += f"| {cls.label:^39s} "
                head2 += ("| " + f"{'pos med':>9s}{'pos mean':>10s}"
                          + f"{'ori med':>9s}{'ori mean':>10s} ")
            fh.write(head1.rstrip() + "\n")
            fh.write(head2.rstrip() + "\n")
            for model in config.models:
                line = f"{model:8s}"
                for cls in classes:
                    row = next((r for r in block if r.model == model
                                and r.motion_class == cls), None)
                    if row is None:
                        line += "| " + " " * 38 + " "
                    else:
                        line += ("| " + f"{row.pos_median_mm:9.3f}"
                                 + f"{row.pos_mean_mm:10.3f}"
                                 + f"{row.ori_median_deg:9.3f}"
                                 + f"{row.ori_mean_deg:10.3f} ")
                fh.write(line.rstrip() + "\n")
            fh.write("\n")
