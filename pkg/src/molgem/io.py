"""Deterministic file outputs (CSV / JSON) with atomic writes.

All CSV floats carry 17 significant digits; JSON is sorted-key with a
trailing newline.  Files are written to a temporary sibling and renamed,
so partially written outputs never appear under the target name.
"""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path

import numpy as np

from . import units
from .field import FieldGrid
from .medium import IndexTrace, RampSegment
from .rotor import AlignmentTrace


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def atomic_write_text(path: Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_json(path: Path, obj) -> None:
    atomic_write_text(path, json.dumps(obj, sort_keys=True, indent=2) + "\n")


def _csv(header: str, rows) -> str:
    lines = [header]
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


def write_alignment_csv(path: Path, trace: AlignmentTrace) -> None:
    t_fs = trace.times() / units.FS_TO_AU
    atomic_write_text(
        path, _csv("t_fs,cos2_expectation", zip(t_fs, trace.values))
    )


def write_index_csv(path: Path, index: IndexTrace) -> None:
    t_fs = index.times() / units.FS_TO_AU
    atomic_write_text(path, _csv("t_fs,n_minus_1", zip(t_fs, index.n_values - 1.0)))


def ramp_record(ramp: RampSegment) -> dict:
    return {
        "t_start_fs": units.au_to_fs(ramp.t_start),
        "t_end_fs": units.au_to_fs(ramp.t_end),
        "slope_per_fs": ramp.slope * units.FS_TO_AU,
        "residual": ramp.linear_fit_residual,
    }


def write_ramp_json(path: Path, ramp: RampSegment) -> None:
    write_json(path, ramp_record(ramp))


def write_field_csv(path: Path, field: FieldGrid) -> None:
    tau_fs = field.times() / units.FS_TO_AU
    atomic_write_text(
        path,
        _csv("tau_fs,re_E,im_E", zip(tau_fs, field.samples.real, field.samples.imag)),
    )


def write_spectrum_csv(path: Path, omega: np.ndarray, amp: np.ndarray) -> None:
    omega_ev = omega * units.HARTREE_EV
    atomic_write_text(path, _csv("omega_ev,amplitude", zip(omega_ev, np.abs(amp))))


def write_spectrogram_csv(
    path: Path, omega: np.ndarray, z: np.ndarray, amplitude: np.ndarray
) -> None:
    """Matrix layout: first row 'omega_ev' then the z axis (cm); every
    following row is one frequency with its amplitudes across z."""
    z_cm = z / units.CM_TO_AU
    header = "omega_ev," + ",".join(_fmt(v) for v in z_cm)
    rows = (
        [omega[i] * units.HARTREE_EV] + list(amplitude[i]) for i in range(omega.size)
    )
    atomic_write_text(path, _csv(header, rows))


def write_sweep_csv(path: Path, pairs: list[tuple[float, float]]) -> None:
    atomic_write_text(path, _csv("optical_depth,efficiency", pairs))
