"""
Parsing of the inline specs accepted on the command line.

    drivings  const:v=0 | sqrt:c=3 | arc | file:path.csv
    curves    line:theta=0.628,len=1 | arc:phi=0.5
              | perturbed-line:theta=0.628,kappa=0.1,order=5,len=1
              | perturbed-arc:phi=0.5,kappa=0.1,order=7 | file:path.csv
    grids     geometric:start,stop,points
"""
import numpy as np

from ..config import NumericConfig
from ..core import ArcSpec, Curve, DrivingFunction, LineSpec, PerturbedArcSpec, PerturbedLineSpec, generate_curve
from ..exceptions import InvalidArgument
from ..io import read_curve_csv, read_driving_csv
from ..oracles import arc_driving

MIN_GRID_POINTS = 4

CURVE_FAMILIES = {
    # family: (spec class, {cli key: field name}, required cli keys)
    "line": (LineSpec, {"theta": "theta", "len": "length"}, ("theta",)),
    "arc": (ArcSpec, {"phi": "phi_max"}, ("phi",)),
    "perturbed-line": (
        PerturbedLineSpec,
        {"theta": "theta", "kappa": "kappa", "order": "order", "len": "length"},
        ("theta", "kappa"),
    ),
    "perturbed-arc": (PerturbedArcSpec, {"phi": "phi_max", "kappa": "kappa", "order": "order"}, ("phi", "kappa")),
}
INTEGER_FIELDS = ("order",)


def _split_spec(spec, what):
    if not isinstance(spec, str) or not spec:
        raise InvalidArgument(f"Invalid {what} spec: {spec!r}")
    kind, _, rest = spec.partition(":")
    return kind.strip(), rest.strip()


def parse_key_values(text, allowed, what):
    """'theta=0.6,len=1' -> {'theta': 0.6, 'len': 1.0}, rejecting keys outside `allowed`."""
    values = {}
    if not text:
        return values
    for item in text.split(","):
        key, sep, value = item.partition("=")
        key = key.strip()
        if not sep or key not in allowed:
            raise InvalidArgument(f"Invalid {what} spec entry {item!r}, expected key=value with keys {list(allowed)}")
        try:
            values[key] = int(value) if key in INTEGER_FIELDS else float(value)
        except ValueError as ex:
            raise InvalidArgument(f"Invalid value {value!r} for {key!r} in {what} spec") from ex
    return values


def normalise_driving_spec(spec, domain_end=1.0, cfg: NumericConfig = NumericConfig()) -> DrivingFunction:
    """
    Build a driving function from an inline spec. `domain_end` is used by the
    closed-form families; the arc family covers (0, cfg.arc_t_max] and file
    drivings cover their sample range.
    """
    kind, rest = _split_spec(spec, "driving")
    if kind == "const":
        values = parse_key_values(rest, ("v",), "driving")
        return DrivingFunction.constant(values.get("v", 0.0), domain_end=domain_end)
    if kind == "sqrt":
        values = parse_key_values(rest, ("c",), "driving")
        if "c" not in values:
            raise InvalidArgument(f"Invalid driving spec {spec!r}: sqrt needs c=<value>")
        return DrivingFunction.sqrt(values["c"], domain_end=domain_end)
    if kind == "arc":
        if rest:
            raise InvalidArgument(f"Invalid driving spec {spec!r}: arc takes no parameters")
        return arc_driving(cfg.arc_t_max, cfg)
    if kind == "file":
        return read_driving_csv(rest)
    raise InvalidArgument(f"Invalid driving spec {spec!r}: unknown family {kind!r}, expected const, sqrt, arc or file")


def normalise_curve_spec(spec, n_vertices) -> Curve:
    kind, rest = _split_spec(spec, "curve")
    if kind == "file":
        return read_curve_csv(rest)
    if kind not in CURVE_FAMILIES:
        raise InvalidArgument(
            f"Invalid curve spec {spec!r}: unknown family {kind!r}, expected one of {list(CURVE_FAMILIES)} or file"
        )
    spec_class, fields, required = CURVE_FAMILIES[kind]
    values = parse_key_values(rest, fields, "curve")
    missing = [key for key in required if key not in values]
    if missing:
        raise InvalidArgument(f"Invalid curve spec {spec!r}: missing {missing}")
    return generate_curve(spec_class(**{fields[key]: value for key, value in values.items()}), n_vertices)


def normalise_t_grid(spec, decreasing=True):
    """
    Capacity grid from 'geometric:start,stop,points'. Sweeps need a grid that
    decreases towards 0 (start > stop > 0) with at least 4 points; traces take
    increasing grids.
    """
    kind, rest = _split_spec(spec, "grid")
    if kind != "geometric":
        raise InvalidArgument(f"Invalid grid spec {spec!r}, expected geometric:start,stop,points")
    parts = rest.split(",")
    if len(parts) != 3:
        raise InvalidArgument(f"Invalid grid spec {spec!r}, expected geometric:start,stop,points")
    try:
        start, stop, points = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as ex:
        raise InvalidArgument(f"Invalid grid spec {spec!r}: {ex}") from ex
    if points < MIN_GRID_POINTS:
        raise InvalidArgument(f"Invalid grid spec {spec!r}: at least {MIN_GRID_POINTS} points are required")
    if not (start > 0 and stop > 0):
        raise InvalidArgument(f"Invalid grid spec {spec!r}: start and stop must be positive")
    if decreasing and not start > stop:
        raise InvalidArgument(f"Invalid grid spec {spec!r}: sweeps need start > stop > 0")
    if not decreasing and not start < stop:
        raise InvalidArgument(f"Invalid grid spec {spec!r}: traces need 0 < start < stop")
    return np.geomspace(start, stop, points)


def normalise_complex(value, what="point"):
    """'1+2j', '1,2' or '2j' -> complex."""
    text = str(value).replace(" ", "")
    try:
        if "," in text:
            x, y = text.split(",")
            return complex(float(x), float(y))
        return complex(text)
    except ValueError as ex:
        raise InvalidArgument(f"Invalid {what} {value!r}, expected x+yj or x,y") from ex
