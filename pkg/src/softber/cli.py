"""Experiment harness and command-line interface.

Single entry point with a ``--mode`` switch:

* ``unsupervised``  stochastic-EM estimate from soft outputs alone
* ``supervised``    estimate with known bits (labels from the simulator or file)
* ``mc``            hard-decision Monte Carlo error counting
* ``theory``        exact matched-filter error probability
* ``pdf-dump``      per-class density estimates on a grid, as plot-ready CSV

Observations come from the built-in CDMA simulator or from a trace file
(``--input``, rows ``x`` or ``x,bit``).  A ``--snr-sweep a:b:step`` turns the
run into a CSV sweep with one row per SNR point; named ``--preset`` configs
reproduce the standard scenarios.  Every output embeds the seed and a config
echo, and reruns with the same seed are byte-identical.
"""

import argparse
import json
import sys
from dataclasses import dataclass

import numpy as np

from . import channel, sem
from .errors import (
    InvalidParameterError,
    SoftBerError,
    TraceFormatError,
    TraceParseError,
)
from .estimator import supervised_estimate
from .randomness import GENERATOR_NAME, RoleStreams, derive_point_seed

FILE_FORMAT_VERSION = 1

MODES = ("unsupervised", "supervised", "mc", "theory", "pdf-dump")

# Named experiment scenarios (two-user CDMA, equal unit amplitudes).
PRESETS = {
    "fig3": {"mode": "pdf-dump", "snr_db": 0.0, "pi_plus": 0.5, "n": 10_000},
    "fig4": {"mode": "pdf-dump", "snr_db": 10.0, "pi_plus": 0.5, "n": 10_000},
    "fig5": {"mode": "unsupervised", "snr_sweep": "0:8:2", "pi_plus": 0.5, "n": 10_000},
    "fig6": {"mode": "pdf-dump", "snr_db": 10.0, "pi_plus": 0.75, "n": 10_000},
    "fig7": {"mode": "unsupervised", "snr_sweep": "0:16:2", "pi_plus": 0.5, "n": 1_000},
}

DEFAULT_PDF_GRID_POINTS = 513


@dataclass
class ExperimentConfig:
    """Fully resolved run description (preset plus flag overrides)."""

    mode: str = "unsupervised"
    preset: str | None = None
    cdma: channel.CdmaConfig | None = None
    input_path: str | None = None
    snr_sweep: list[float] | None = None
    iterations: int = sem.DEFAULT_ITERATIONS
    seed: int = 0
    output_path: str | None = None
    grid: tuple[float, float, int] | None = None
    dump_trace_path: str | None = None
    bandwidth_rounds: int = sem.DEFAULT_BANDWIDTH_ROUNDS

    def echo(self):
        out = {
            "mode": self.mode,
            "preset": self.preset,
            "iterations": self.iterations,
            "bandwidth_rounds": self.bandwidth_rounds,
        }
        if self.input_path is not None:
            out["input"] = self.input_path
        if self.cdma is not None:
            out["cdma"] = self.cdma.echo()
        if self.snr_sweep is not None:
            out["snr_sweep"] = list(self.snr_sweep)
        return out


def parse_sweep(text):
    """Parse ``a:b:step`` into the inclusive list of SNR points."""
    parts = text.split(":")
    if len(parts) != 3:
        raise InvalidParameterError(f"sweep must be 'a:b:step', got {text!r}")
    try:
        start, stop, step = (float(p) for p in parts)
    except ValueError as exc:
        raise InvalidParameterError(f"sweep must be numeric 'a:b:step', got {text!r}") from exc
    if step <= 0 or stop < start:
        raise InvalidParameterError(f"sweep needs step > 0 and b >= a, got {text!r}")
    count = int(np.floor((stop - start) / step + 1e-9)) + 1
    return [start + k * step for k in range(count)]


def parse_grid(text):
    """Parse ``min:max:count`` for the density-dump grid."""
    parts = text.split(":")
    if len(parts) != 3:
        raise InvalidParameterError(f"grid must be 'min:max:count', got {text!r}")
    try:
        lo, hi = float(parts[0]), float(parts[1])
        count = int(parts[2])
    except ValueError as exc:
        raise InvalidParameterError(f"grid must be 'min:max:count', got {text!r}") from exc
    if hi <= lo or count < 2:
        raise InvalidParameterError(f"grid needs max > min and count >= 2, got {text!r}")
    return lo, hi, count


def ingest_observations(path):
    """Read a trace file of ``x`` or ``x,bit`` rows.

    Returns (ObservationSet, labels) where labels is None unless every row
    carries a bit.  Comment lines starting with '#' and blank lines are
    skipped; a malformed row raises with its line number, and mixing
    labeled and unlabeled rows is a format error.
    """
    values = []
    labels = []
    labeled = None
    try:
        handle = open(path, "r", encoding="utf-8")
    except OSError as exc:
        raise InvalidParameterError(f"cannot read trace {path}: {exc}") from exc
    with handle:
        for line_number, raw in enumerate(handle, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            fields = [f.strip() for f in line.split(",")]
            if len(fields) > 2:
                raise TraceParseError(path, line_number, f"expected 'x' or 'x,bit', got {raw!r}")
            try:
                value = float(fields[0])
            except ValueError:
                raise TraceParseError(
                    path, line_number, f"cannot parse {fields[0]!r} as a soft output"
                ) from None
            row_labeled = len(fields) == 2
            if labeled is None:
                labeled = row_labeled
            elif labeled != row_labeled:
                raise TraceFormatError(
                    f"{path}: mixes labeled and unlabeled rows (first change at line "
                    f"{line_number})"
                )
            if row_labeled:
                try:
                    bit = int(fields[1])
                except ValueError:
                    raise TraceParseError(
                        path, line_number, f"cannot parse {fields[1]!r} as a bit"
                    ) from None
                if bit not in (1, -1):
                    raise TraceParseError(path, line_number, f"bit must be +1 or -1, got {bit}")
                labels.append(bit)
            values.append(value)
    if not values:
        raise TraceFormatError(f"{path}: no data rows")
    observations = sem.ObservationSet(np.array(values, dtype=float))
    return observations, (np.array(labels, dtype=np.int64) if labeled else None)


def _fmt(value):
    """Shortest exact decimal form; round-trips through float()."""
    return repr(float(value))


def _write_lines(path, lines):
    text = "\n".join(lines) + "\n"
    if path is None:
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(text)


def write_trace_csv(trace, path):
    """Export a simulated trace as ``x,bit`` rows (exact float round-trip)."""
    lines = [f"# format_version: {FILE_FORMAT_VERSION}", "# columns: x,bit"]
    lines.extend(
        f"{_fmt(x)},{int(b)}" for x, b in zip(trace.statistics, trace.true_bits)
    )
    _write_lines(path, lines)


def write_density_csv(grid, density, path):
    lines = [f"# format_version: {FILE_FORMAT_VERSION}", "# columns: x,density"]
    lines.extend(f"{_fmt(x)},{_fmt(d)}" for x, d in zip(grid, density))
    _write_lines(path, lines)


def emit_report(report, path, mode=None):
    """Write an estimation report as JSON (stdout when path is None)."""
    payload = report.to_json_dict()
    if mode is not None:
        payload = {"format_version": payload.pop("format_version"), "mode": mode, **payload}
    _write_lines(path, [json.dumps(payload, indent=2)])


def emit_value_report(mode, ber, seed, config_echo, path):
    """Minimal JSON for the mc and theory modes."""
    payload = {
        "format_version": FILE_FORMAT_VERSION,
        "mode": mode,
        "ber": ber,
        "seed": seed,
        "generator": GENERATOR_NAME,
        "config": config_echo,
    }
    _write_lines(path, [json.dumps(payload, indent=2)])


def _point_estimate(config, snr_db, point_seed):
    """One sweep row: simulate at a single SNR and run the requested estimators."""
    cdma = channel.CdmaConfig(
        snr_db=snr_db,
        pi_plus=config.cdma.pi_plus,
        n_bits=config.cdma.n_bits,
        amplitude_1=config.cdma.amplitude_1,
        amplitude_2=config.cdma.amplitude_2,
        code_1=config.cdma.code_1,
        code_2=config.cdma.code_2,
    )
    theory = channel.theoretical_bep(cdma)
    if config.mode == "theory":
        return {"snr_db": snr_db, "estimate": float("nan"), "theory": theory,
                "mc": float("nan"), "seed": point_seed}
    streams = RoleStreams.from_seed(point_seed)
    trace = channel.simulate(cdma, streams)
    mc = channel.mc_ber(trace)
    estimate = float("nan")
    if config.mode in ("unsupervised", "pdf-dump"):
        try:
            report = sem.run(
                sem.ObservationSet(trace.statistics),
                streams.em_classify,
                iterations=config.iterations,
                bandwidth_rounds=config.bandwidth_rounds,
            )
            estimate = report.ber
        except SoftBerError:
            pass  # degenerate point: marked nan in the row, sweep continues
    elif config.mode == "supervised":
        try:
            report = supervised_estimate(
                trace.statistics, trace.true_bits, config.bandwidth_rounds
            )
            estimate = report.ber
        except SoftBerError:
            pass
    return {"snr_db": snr_db, "estimate": estimate, "theory": theory, "mc": mc,
            "seed": point_seed}


def run_sweep(config):
    """Run every SNR point with its own derived seed; returns the row dicts.

    Rows land in sweep order regardless of how points are scheduled; a
    degenerate estimate shows up as ``nan``, never as an abort.
    """
    if config.cdma is None:
        raise InvalidParameterError("a sweep needs simulator parameters, not --input")
    rows = []
    for index, snr_db in enumerate(config.snr_sweep):
        point_seed = derive_point_seed(config.seed, index)
        rows.append(_point_estimate(config, snr_db, point_seed))
    return rows


def write_sweep_csv(rows, path):
    lines = [
        f"# format_version: {FILE_FORMAT_VERSION}",
        "# columns: snr_db,estimate,theory,mc,seed",
    ]
    lines.extend(
        f"{_fmt(r['snr_db'])},{_fmt(r['estimate'])},{_fmt(r['theory'])},"
        f"{_fmt(r['mc'])},{r['seed']}"
        for r in rows
    )
    _write_lines(path, lines)


def _density_outputs(output_path):
    if output_path is None:
        return None, None
    stem = output_path[:-5] if output_path.endswith(".json") else output_path
    return f"{stem}_plus.csv", f"{stem}_minus.csv"


def _dump_densities(report_state, grid_bounds, output_path):
    """Evaluate both class densities on the grid and write one CSV each."""
    kde_plus, kde_minus = report_state
    if grid_bounds is None:
        # Four bandwidths of padding is plenty for plotting.
        lo = min(
            kde_plus.samples.min() - 4 * kde_plus.bandwidth,
            kde_minus.samples.min() - 4 * kde_minus.bandwidth,
        )
        hi = max(
            kde_plus.samples.max() + 4 * kde_plus.bandwidth,
            kde_minus.samples.max() + 4 * kde_minus.bandwidth,
        )
        count = DEFAULT_PDF_GRID_POINTS
    else:
        lo, hi, count = grid_bounds
    grid = np.linspace(lo, hi, count)
    path_plus, path_minus = _density_outputs(output_path)
    write_density_csv(grid, kde_plus.evaluate(grid), path_plus)
    write_density_csv(grid, kde_minus.evaluate(grid), path_minus)


def _observations_for(config):
    """Observation source: the trace file when given, else the simulator."""
    if config.input_path is not None:
        return ingest_observations(config.input_path)
    streams = RoleStreams.from_seed(config.seed)
    trace = channel.simulate(config.cdma, streams)
    if config.dump_trace_path is not None:
        write_trace_csv(trace, config.dump_trace_path)
    return sem.ObservationSet(trace.statistics), trace.true_bits


def run_single(config):
    """Dispatch a single-point (non-sweep) run and write its outputs."""
    mode = config.mode
    if mode == "theory":
        if config.cdma is None:
            raise InvalidParameterError("theory mode needs simulator parameters, not --input")
        ber = channel.theoretical_bep(config.cdma)
        emit_value_report(mode, ber, config.seed, config.echo(), config.output_path)
        return
    observations, labels = _observations_for(config)
    if mode == "mc":
        if labels is None:
            raise InvalidParameterError("mc mode requires labeled observations")
        ber = channel.mc_ber(channel.SoftOutputTrace(observations.values, labels))
        emit_value_report(mode, ber, config.seed, config.echo(), config.output_path)
        return
    if mode == "supervised":
        if labels is None:
            raise InvalidParameterError("supervised mode requires labeled observations")
        report = supervised_estimate(
            observations.values, labels, config.bandwidth_rounds,
            seed=config.seed, config=config.echo(),
        )
        emit_report(report, config.output_path, mode)
        return
    # unsupervised and pdf-dump share the EM run
    em_stream = RoleStreams.from_seed(config.seed).em_classify
    report, state = sem.run_with_state(
        observations,
        em_stream,
        iterations=config.iterations,
        bandwidth_rounds=config.bandwidth_rounds,
        seed=config.seed,
        config=config.echo(),
    )
    emit_report(report, config.output_path, mode)
    if mode == "pdf-dump":
        _dump_densities((state.kde_plus, state.kde_minus), config.grid, config.output_path)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="softber",
        description="Unsupervised soft BER estimation with a built-in CDMA test link.",
    )
    parser.add_argument("--mode", choices=MODES, default=None,
                        help="estimator to run (default: unsupervised)")
    parser.add_argument("--preset", choices=sorted(PRESETS), default=None,
                        help="named experiment scenario; flags override its values")
    parser.add_argument("--snr-db", type=float, default=None, help="single SNR point in dB")
    parser.add_argument("--snr-sweep", default=None, metavar="A:B:STEP",
                        help="inclusive SNR sweep in dB; emits one CSV row per point")
    parser.add_argument("--n", type=int, default=None, help="number of simulated bits")
    parser.add_argument("--pi-plus", type=float, default=None,
                        help="probability that a transmitted bit is +1")
    parser.add_argument("--iterations", type=int, default=None,
                        help="classification iterations (default 6)")
    parser.add_argument("--seed", type=int, default=None,
                        help="64-bit seed; recorded in every output (default 0)")
    parser.add_argument("--input", default=None,
                        help="trace file of 'x' or 'x,bit' rows instead of simulating")
    parser.add_argument("--output", default=None,
                        help="output path (JSON report, or CSV for sweeps); stdout if omitted")
    parser.add_argument("--grid", default=None, metavar="MIN:MAX:COUNT",
                        help="density-dump grid (pdf-dump mode)")
    parser.add_argument("--dump-trace", default=None,
                        help="also export the simulated trace as x,bit CSV")
    return parser


def config_from_args(args):
    preset = dict(PRESETS[args.preset]) if args.preset else {}

    def pick(flag_value, preset_key, fallback):
        if flag_value is not None:
            return flag_value
        return preset.get(preset_key, fallback)

    mode = pick(args.mode, "mode", "unsupervised")
    sweep_spec = pick(args.snr_sweep, "snr_sweep", None)
    snr_db = pick(args.snr_db, "snr_db", 0.0)
    n_bits = pick(args.n, "n", 10_000)
    pi_plus = pick(args.pi_plus, "pi_plus", 0.5)
    iterations = args.iterations if args.iterations is not None else sem.DEFAULT_ITERATIONS
    seed = args.seed if args.seed is not None else 0

    if args.input is not None and sweep_spec is not None:
        raise InvalidParameterError("--input and --snr-sweep cannot be combined")
    cdma = None
    if args.input is None:
        cdma = channel.CdmaConfig(snr_db=snr_db, pi_plus=pi_plus, n_bits=n_bits)

    return ExperimentConfig(
        mode=mode,
        preset=args.preset,
        cdma=cdma,
        input_path=args.input,
        snr_sweep=parse_sweep(sweep_spec) if sweep_spec else None,
        iterations=iterations,
        seed=seed,
        output_path=args.output,
        grid=parse_grid(args.grid) if args.grid else None,
        dump_trace_path=args.dump_trace,
    )


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        config = config_from_args(args)
        if config.snr_sweep is not None:
            rows = run_sweep(config)
            write_sweep_csv(rows, config.output_path)
        else:
            run_single(config)
    except SoftBerError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
