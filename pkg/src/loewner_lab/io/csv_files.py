"""
CSV and JSON files read and written by the command-line tools.

Data files never carry timestamps; with `stamp=True` a single leading comment
line `# loewner-lab <version>` is written, which the readers skip.
"""
import contextlib
import json
import sys
from pathlib import Path

import numpy as np
import pandas as pd
import xarray as xr
from loguru import logger

from .. import __version__
from ..core import Curve, DrivingFunction, RatioSeries
from ..exceptions import InvalidArgument
from ..measures import measures_from_pair
from . import column_metainfo

CURVE_COLUMNS = ["s", "x", "y"]
DRIVING_COLUMNS = ["t", "lambda"]
SWEEP_COLUMNS = ["t", "lambda", "f_minus", "f_plus", "m_left", "m_right", "ratio"]
STAMP_PREFIX = "# loewner-lab"


@contextlib.contextmanager
def _open_target(target):
    """Text stream for `target`, a path or an open stream; None means stdout."""
    if target is None:
        yield sys.stdout
    elif hasattr(target, "write"):
        yield target
    else:
        with Path(target).open("w", encoding="utf-8", newline="") as f:
            yield f


def _write_csv(df, target, stamp):
    with _open_target(target) as f:
        if stamp:
            f.write(f"{STAMP_PREFIX} {__version__}\n")
        df.to_csv(f, index=False, lineterminator="\n")
    if target is not None and not hasattr(target, "write"):
        logger.info(f"Wrote {len(df)} rows to {target}")


def _read_csv(path, required, operation):
    path = Path(path)
    if not path.exists():
        raise InvalidArgument(f"{operation}: file {path} not found")
    try:
        df = pd.read_csv(path, comment="#", encoding="utf-8")
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as ex:
        raise InvalidArgument(f"{operation}: could not parse {path}: {ex}") from ex
    missing = [col for col in required if col not in df.columns]
    if missing:
        raise InvalidArgument(f"{operation}: {path} lacks the columns {missing} (found {list(df.columns)})")
    if df[required].isna().any().any():
        raise InvalidArgument(f"{operation}: {path} has empty or non-numeric cells")
    return df


def curve_to_dataframe(curve: Curve) -> pd.DataFrame:
    df = pd.DataFrame(dict(s=curve.arc_length, x=curve.vertices.real, y=curve.vertices.imag))
    if curve.capacity is not None:
        df["t"] = curve.capacity
    return df


def write_curve_csv(curve: Curve, target=None, stamp=False):
    """Write a curve as CSV with header `s,x,y[,t]`."""
    _write_csv(curve_to_dataframe(curve), target, stamp)


def read_curve_csv(path) -> Curve:
    """
    Read a curve from CSV with header `s,x,y[,t]`, rows in increasing `s`,
    the first row being the base point.
    """
    df = _read_csv(path, CURVE_COLUMNS, "read_curve_csv")
    s = df["s"].to_numpy(dtype=float)
    if len(s) < 2 or np.any(np.diff(s) <= 0):
        raise InvalidArgument(f"read_curve_csv: {path} needs at least 2 rows in strictly increasing s")
    vertices = df["x"].to_numpy(dtype=float) + 1j * df["y"].to_numpy(dtype=float)
    capacity = df["t"].to_numpy(dtype=float) if "t" in df.columns else None
    return Curve(vertices=vertices, arc_length=s, capacity=capacity)


def driving_to_dataframe(times, values) -> pd.DataFrame:
    return pd.DataFrame({"t": np.asarray(times, dtype=float), "lambda": np.asarray(values, dtype=float)})


def write_driving_csv(times, values, target=None, stamp=False):
    """Write driving samples as CSV with header `t,lambda`."""
    _write_csv(driving_to_dataframe(times, values), target, stamp)


def read_driving_csv(path) -> DrivingFunction:
    """Read driving samples `t,lambda` (t increasing from 0) as a sampled driving."""
    df = _read_csv(path, DRIVING_COLUMNS, "read_driving_csv")
    return DrivingFunction.sampled(df["t"].to_numpy(dtype=float), df["lambda"].to_numpy(dtype=float))


def sweep_to_dataframe(series: RatioSeries) -> pd.DataFrame:
    """One row per grid capacity with the image intervals, the measures and the ratio."""
    if len(series.pairs) != len(series.times):
        raise InvalidArgument("sweep_to_dataframe: the sweep does not carry its singular pairs")
    measures = [measures_from_pair(pair) for pair in series.pairs]
    return pd.DataFrame(
        {
            "t": series.times,
            "lambda": [pair.lam for pair in series.pairs],
            "f_minus": [pair.f_minus for pair in series.pairs],
            "f_plus": [pair.f_plus for pair in series.pairs],
            "m_left": [m.m_left for m in measures],
            "m_right": [m.m_right for m in measures],
            "ratio": series.values,
        },
        columns=SWEEP_COLUMNS,
    )


def write_sweep_csv(series: RatioSeries, target=None, stamp=False):
    _write_csv(sweep_to_dataframe(series), target, stamp)


def sweep_to_dataset(series: RatioSeries) -> xr.Dataset:
    """
    The sweep as an `xarray.Dataset` indexed by capacity `t`, every variable
    carrying `units` and `long_name` attributes and the summary stored in the
    dataset attributes.
    """
    df = sweep_to_dataframe(series).set_index("t")
    ds = xr.Dataset.from_dataframe(df)

    for var_name in list(ds.data_vars) + ["t"]:
        units = column_metainfo.COLUMN_UNITS.get(var_name)
        if units is None:
            raise InvalidArgument(f"Unknown units for column: {var_name}")
        ds[var_name].attrs["units"] = units
        ds[var_name].attrs["long_name"] = column_metainfo.COLUMN_LONG_NAMES[var_name]

    ds.attrs.update(
        {key: value for key, value in series.summary().items() if value is not None},
        quantity=series.quantity,
    )
    if series.expected_limit is not None:
        ds.attrs["expected_limit"] = series.expected_limit
    return ds


def write_json(values, target=None):
    """Write a JSON document with stable key order."""
    with _open_target(target) as f:
        json.dump(values, f, indent=2)
        f.write("\n")
