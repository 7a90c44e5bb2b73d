"""Command-line front end: config-driven runs with deterministic outputs.

Subcommands:
    align     thermal alignment + refractive-index traces (CSV)
    memory    full storage/retrieval run (field snapshots, spectra, JSON)
    sweep     efficiency vs optical depth (CSV)
    spectrum  input-signal spectrum (CSV)

Exit codes: 0 success, 2 config error, 3 numerical non-convergence,
4 no emission detected.
"""

import os

# Single-threaded BLAS keeps outputs byte-identical run to run; must be
# set before numpy is first imported.
os.environ.setdefault("OPENBLAS_NUM_THREADS", "1")
os.environ.setdefault("OMP_NUM_THREADS", "1")
os.environ.setdefault("MKL_NUM_THREADS", "1")

import argparse
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import io, medium as medium_mod, protocol, rotor, units
from .config import ConfigError, ResolvedRun, load
from .errors import ConvergenceError, NoEmissionError
from .field import make_signal, spectrum
from .specs import SpecError, TimeGrid

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICS = 3
EXIT_NO_EMISSION = 4


def _alignment_and_index(run: ResolvedRun):
    scenario = run.scenario
    grid = TimeGrid.spanning(
        run.alignment_window[0], run.alignment_window[1], scenario.alignment_dt
    )
    trace = rotor.thermal_alignment(
        scenario.medium.molecule,
        list(scenario.pump_pulses),
        scenario.temperature,
        grid,
        scenario.rotor_params,
    )
    return trace, medium_mod.index_trace(trace, scenario.medium)


def cmd_align(run: ResolvedRun, out: Path) -> int:
    trace, index = _alignment_and_index(run)
    io.write_alignment_csv(out / "alignment.csv", trace)
    io.write_index_csv(out / "index.csv", index)
    record = {"config": run.echo}
    try:
        half = 1.5 * run.scenario.signal.sigma
        center = run.scenario.signal.center_time
        ramp = medium_mod.extract_ramp(index, (center - half, center + half))
        record["signal_transit_ramp"] = io.ramp_record(ramp)
    except SpecError:
        pass
    io.write_json(out / "align.json", record)
    return EXIT_OK


def cmd_memory(run: ResolvedRun, out: Path) -> int:
    scenario = run.scenario
    if not scenario.propagation.store_every:
        scenario = replace(
            scenario,
            propagation=replace(
                scenario.propagation,
                store_every=max(1, scenario.propagation.n_z_steps // 12),
            ),
        )
    result = protocol.run_memory(scenario)

    for i, (f, z) in enumerate(
        zip(result.propagation.history, result.propagation.history_z)
    ):
        io.write_field_csv(out / f"field_z{i:03d}.csv", f)
    omega, amp = spectrum(result.field_out)
    io.write_spectrum_csv(out / "spectrum.csv", omega, amp)
    if len(result.propagation.history) >= 2:
        from .field import spectrogram_over_z

        og, zg, mat = spectrogram_over_z(
            result.propagation.history, result.propagation.history_z
        )
        keep = (og >= run.fringe_band[0] - 0.01) & (og <= run.fringe_band[1] + 0.01)
        io.write_spectrogram_csv(out / "spectrogram.csv", og[keep], zg, mat[keep])
    io.write_json(
        out / "diagnostics.json",
        {
            "z_energy": list(result.propagation.z_energies),
            "n_z_used": result.propagation.n_z_used,
        },
    )

    record = {
        "efficiency": result.efficiency,
        "storage_time_fs": (
            None
            if result.storage_time is None
            else units.au_to_fs(result.storage_time)
        ),
        "t_a_fs": (
            None
            if result.emission_window is None
            else units.au_to_fs(result.emission_window[0])
        ),
        "t_b_fs": (
            None
            if result.emission_window is None
            else units.au_to_fs(result.emission_window[1])
        ),
        "leakage_fraction": result.leakage_fraction,
        "time_bandwidth_product": result.time_bandwidth_product,
        "transmitted_fraction": result.diagnostics["transmitted_fraction"],
        "config_echo": run.echo,
    }
    io.write_json(out / "memory.json", record)
    return EXIT_OK if result.emission_window is not None else EXIT_NO_EMISSION


def cmd_sweep(run: ResolvedRun, out: Path) -> int:
    pairs = protocol.sweep_optical_depth(
        run.scenario,
        list(run.sweep_depths),
        threads=run.scenario.rotor_params.threads,
    )
    io.write_sweep_csv(out / "sweep.csv", pairs)
    io.write_json(
        out / "sweep.json",
        {
            "depth_knob": "atomic_density_cm3 scaled linearly with optical depth "
            "at fixed index ramp",
            "points": [{"optical_depth": d, "efficiency": e} for d, e in pairs],
            "config_echo": run.echo,
        },
    )
    return EXIT_OK


def cmd_spectrum(run: ResolvedRun, out: Path) -> int:
    scenario = run.scenario
    grid = TimeGrid.spanning(
        scenario.tau_window[0], scenario.tau_window[1], scenario.tau_dt
    )
    field = make_signal(scenario.signal, grid)
    omega, amp = spectrum(field)
    io.write_field_csv(out / "signal.csv", field)
    io.write_spectrum_csv(out / "signal_spectrum.csv", omega, amp)
    io.write_json(out / "spectrum.json", {"config_echo": run.echo})
    return EXIT_OK


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="molgem",
        description="Gradient-echo optical memory via impulsive molecular alignment",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("align", "thermal alignment and refractive index traces"),
        ("memory", "full storage/retrieval run"),
        ("sweep", "efficiency vs optical depth"),
        ("spectrum", "input signal spectrum"),
    ]:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, type=Path)
        p.add_argument("--out", required=True, type=Path)
        p.add_argument("--threads", type=int, default=1)
        p.add_argument(
            "--grid-scale",
            type=float,
            default=1.0,
            help="coarsen grids uniformly (>= 1) for quick desk-scale runs",
        )
    args = parser.parse_args(argv)

    try:
        run = load(args.config, grid_scale=args.grid_scale, threads=args.threads)
    except (ConfigError, SpecError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    handler = {
        "align": cmd_align,
        "memory": cmd_memory,
        "sweep": cmd_sweep,
        "spectrum": cmd_spectrum,
    }[args.command]
    try:
        return handler(run, out)
    except ConvergenceError as exc:
        print(f"numerical non-convergence: {exc}", file=sys.stderr)
        return EXIT_NUMERICS
    except NoEmissionError as exc:
        print(f"no emission: {exc}", file=sys.stderr)
        return EXIT_NO_EMISSION
    except SpecError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
