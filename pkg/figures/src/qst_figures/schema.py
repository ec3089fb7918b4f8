"""CSV loading with schema validation.

Every loader returns a plain dict of numpy arrays (or string arrays for
label columns) and raises :class:`SchemaError` naming the offending file
and column on any violation.
"""

from __future__ import annotations

import csv
import os
import re

import numpy as np


class SchemaError(Exception):
    """A CSV file is missing, empty, or does not match its schema."""


def _read_rows(path: str):
    if not os.path.isfile(path):
        raise SchemaError(f"{path}: file not found")
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise SchemaError(f"{path}: file is empty")
    if len(rows) < 2:
        raise SchemaError(f"{path}: no data rows")
    return rows[0], rows[1:]


def _column(path: str, header, rows, name: str, as_float=True):
    try:
        idx = header.index(name)
    except ValueError:
        raise SchemaError(f"{path}: missing column '{name}'") from None
    values = [row[idx] if idx < len(row) else "" for row in rows]
    if not as_float:
        return np.array(values)
    out = np.empty(len(values))
    for i, v in enumerate(values):
        try:
            out[i] = float(v)
        except ValueError:
            raise SchemaError(
                f"{path}: column '{name}', row {i + 2}: "
                f"'{v}' is not a number") from None
    return out


def load_csv(path: str, columns, label_columns=()):
    """Load ``columns`` as float arrays and ``label_columns`` as strings."""
    header, rows = _read_rows(path)
    data = {name: _column(path, header, rows, name) for name in columns}
    data.update({name: _column(path, header, rows, name, as_float=False)
                 for name in label_columns})
    return data


def load_timeseries(path: str):
    """t, P_A, P_B plus the contiguous block of mode_NN columns."""
    header, rows = _read_rows(path)
    mode_cols = [c for c in header if re.fullmatch(r"mode_\d\d", c)]
    if not mode_cols:
        raise SchemaError(f"{path}: missing column 'mode_00'")
    data = {name: _column(path, header, rows, name)
            for name in ("t", "P_A", "P_B")}
    data["modes"] = np.column_stack(
        [_column(path, header, rows, c) for c in mode_cols])
    for optional in ("P_f_A", "P_vac"):
        if optional in header:
            data[optional] = _column(path, header, rows, optional)
    return data


def load_scan(path: str):
    data = load_csv(path, ("kappa", "tau_d", "infidelity"))
    kappa = np.unique(data["kappa"])
    tau_d = np.unique(data["tau_d"])
    if kappa.size * tau_d.size != data["kappa"].size:
        raise SchemaError(
            f"{path}: column 'kappa': rows do not form a complete "
            f"{kappa.size}x{tau_d.size} grid")
    grid = np.full((kappa.size, tau_d.size), np.nan)
    ki = np.searchsorted(kappa, data["kappa"])
    di = np.searchsorted(tau_d, data["tau_d"])
    grid[ki, di] = data["infidelity"]
    return kappa, tau_d, grid


def load_optimum(path: str):
    return load_csv(path, ("g_ratio", "kappa_opt", "tau_d_opt", "F_opt",
                           "t_cycle"))


def load_fits(path: str):
    data = load_csv(path, ("coeff_1", "coeff_2", "r_squared"),
                    label_columns=("model",))
    fits = {m: (c1, c2) for m, c1, c2 in
            zip(data["model"], data["coeff_1"], data["coeff_2"])}
    for required in ("kappa_opt_exponential", "t_cycle_exponential",
                     "tau_d_opt_logarithmic"):
        if required not in fits:
            raise SchemaError(
                f"{path}: column 'model': missing row '{required}'")
    return fits


def load_sweeps(data_dir: str):
    """Concatenate every sweep.csv found under ``data_dir`` (including the
    directory itself) and group rows by param_name."""
    paths = []
    for root, _, files in os.walk(data_dir):
        if "sweep.csv" in files:
            paths.append(os.path.join(root, "sweep.csv"))
    if not paths:
        raise SchemaError(f"{data_dir}: no sweep.csv found")
    groups: dict[str, dict[str, list]] = {}
    for path in sorted(paths):
        data = load_csv(path, ("param_value", "g_ratio", "infidelity",
                               "stderr"), label_columns=("param_name",))
        for i, name in enumerate(data["param_name"]):
            rows = groups.setdefault(name, {"param_value": [], "g_ratio": [],
                                            "infidelity": [], "stderr": []})
            for key in rows:
                rows[key].append(float(data[key][i]))
    return {name: {k: np.asarray(v) for k, v in rows.items()}
            for name, rows in groups.items()}
