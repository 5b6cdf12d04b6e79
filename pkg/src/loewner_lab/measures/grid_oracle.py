"""
Finite-difference harmonic measure of one slit side, independent of the
Löwner machinery.

The Dirichlet problem (1 on the chosen side, 0 on the other side, on the real
axis and on the outer box) is discretised by the 5-point Shortley-Weller
stencil on a tensor grid that is uniform with spacing `grid_h` around the slit
and the evaluation point and geometrically coarsened out to the box. Grid
edges cut by the slit end at the crossing point, which carries the value of
the side facing the node, so the slit acts as a double-sided internal
boundary.
"""
import numpy as np
import scipy.interpolate
import scipy.sparse
import scipy.sparse.linalg
from loguru import logger

from ..core import ComplexPoint, Curve, Side
from ..exceptions import InvalidArgument, ResolutionError

DEFAULT_BOX = 50.0
DEFAULT_STRETCH = 1.1
# minimal eval-point distance from the slit, in grid spacings
MIN_EVAL_DISTANCE = 10
# width of the uniform region around slit and evaluation point, in grid spacings
UNIFORM_MARGIN = 40
MIN_CROSSING_FRACTION = 1e-6
# edge/segment pairs handled per vectorised block
BLOCK_SIZE = 2_000_000


def _axis(uniform_end, h, box, stretch, start):
    """Grid coordinates from `start` with spacing h up to `uniform_end`, then growing by `stretch` up to `box`."""
    nodes = list(np.arange(start, uniform_end + h / 2, h))
    step = h
    while nodes[-1] < box:
        step *= stretch
        nodes.append(nodes[-1] + step)
    return np.asarray(nodes)


def _build_grid(curve, eval_point, h, box, stretch):
    vertices = np.append(curve.vertices, eval_point)
    x_extent = np.max(np.abs(vertices.real)) + UNIFORM_MARGIN * h
    y_extent = np.max(vertices.imag) + UNIFORM_MARGIN * h
    if max(x_extent, y_extent) >= box:
        raise InvalidArgument(
            f"harmonic_measure_grid_oracle: slit and evaluation point must lie well inside the box of size {box}"
        )
    # symmetric in x with the imaginary axis half-way between two columns
    x_half = _axis(x_extent, h, box, stretch, h / 2)
    x = np.concatenate((-x_half[::-1], x_half))
    y = _axis(y_extent, h, box, stretch, 0.0)
    return x, y


def _edge_crossings(p, q, curve):
    """
    Nearest slit crossing seen from each end of the edges p -> q.

    Returns the fractions along the edge measured from p and from q (inf when
    the edge misses the slit) and whether the crossing is on the left-hand
    side of the slit as seen from p and from q.
    """
    a = curve.vertices[:-1]
    e = np.diff(curve.vertices)
    n_edges = len(p)
    frac_p = np.full(n_edges, np.inf)
    frac_q = np.full(n_edges, np.inf)
    left_p = np.zeros(n_edges, dtype=bool)
    left_q = np.zeros(n_edges, dtype=bool)

    def cross(u, v):
        return u.real * v.imag - u.imag * v.real

    block = max(1, BLOCK_SIZE // len(a))
    for start in range(0, n_edges, block):
        sl = slice(start, start + block)
        pp, qq = p[sl, None], q[sl, None]
        d = qq - pp
        denom = cross(d, e[None, :])
        with np.errstate(divide="ignore", invalid="ignore"):
            s = cross(a[None, :] - pp, e[None, :]) / denom
            r = cross(a[None, :] - pp, d) / denom
        hit = (denom != 0) & (s >= 0) & (s <= 1) & (r >= 0) & (r <= 1)
        s_from_p = np.where(hit, s, np.inf)
        s_from_q = np.where(hit, 1 - s, np.inf)
        k_p = np.argmin(s_from_p, axis=1)
        k_q = np.argmin(s_from_q, axis=1)
        rows = np.arange(s.shape[0])
        frac_p[sl] = s_from_p[rows, k_p]
        frac_q[sl] = s_from_q[rows, k_q]
        left_p[sl] = cross(e[k_p], p[sl] - a[k_p]) > 0
        left_q[sl] = cross(e[k_q], q[sl] - a[k_q]) > 0
    return frac_p, frac_q, left_p, left_q


def _distance_to_polyline(point, vertices):
    a = vertices[:-1]
    e = np.diff(vertices)
    r = np.clip(((point - a) * np.conj(e)).real / np.abs(e) ** 2, 0, 1)
    return float(np.min(np.abs(point - (a + r * e))))


def harmonic_measure_grid_oracle(
    curve: Curve,
    side: Side,
    eval_point: ComplexPoint,
    grid_h: float,
    box: float = DEFAULT_BOX,
    stretch: float = DEFAULT_STRETCH,
) -> float:
    """
    Harmonic measure of one side of the slit at `eval_point` with respect to
    the slit domain, by finite differences.

    Parameters
    ----------
    curve : Curve
        The slit, resolved with chords no longer than `grid_h`.
    side : Side
        Side carrying the boundary value 1.
    eval_point : complex
        Interior point at distance at least 10 `grid_h` from the slit.
    grid_h : float
        Spacing of the uniform part of the grid.
    box : float, optional
        Half-width and height of the truncated domain, where the measure is
        set to 0.
    stretch : float, optional
        Growth factor of the grid spacing outside the uniform region.

    Returns
    -------
    float
        The discrete harmonic measure, bilinearly interpolated at `eval_point`.
    """
    eval_point = complex(eval_point)
    if not grid_h > 0:
        raise InvalidArgument(f"harmonic_measure_grid_oracle: grid_h must be positive, got {grid_h}")
    if not 1 <= stretch <= 2:
        raise InvalidArgument(f"harmonic_measure_grid_oracle: stretch must lie in [1, 2], got {stretch}")
    if np.max(np.abs(np.diff(curve.vertices))) > grid_h * (1 + 1e-9):
        raise InvalidArgument(
            "harmonic_measure_grid_oracle: the slit polyline must be resolved at the grid spacing or finer"
        )
    if curve.length < 2 * grid_h:
        raise ResolutionError(
            f"harmonic_measure_grid_oracle: slit of length {curve.length:.3g} is too short for grid_h={grid_h}"
        )
    distance = _distance_to_polyline(eval_point, curve.vertices)
    if eval_point.imag <= 0 or distance < MIN_EVAL_DISTANCE * grid_h:
        raise InvalidArgument(
            f"harmonic_measure_grid_oracle: eval_point {eval_point} must be interior and at least "
            f"{MIN_EVAL_DISTANCE} grid spacings from the slit (distance {distance:.3g})"
        )

    x, y = _build_grid(curve, eval_point, grid_h, box, stretch)
    nx, ny = len(x), len(y)
    # unknowns at x[1:-1] x y[1:-1]; the outer columns and rows are boundary nodes
    index = -np.ones((nx, ny), dtype=np.int64)
    index[1:-1, 1:-1] = np.arange((nx - 2) * (ny - 2)).reshape(nx - 2, ny - 2)
    n_unknowns = (nx - 2) * (ny - 2)

    # per node and direction: distance to the neighbour (or crossing) and boundary value there
    xx, yy = np.meshgrid(x, y, indexing="ij")
    spacing = {
        "E": np.broadcast_to(np.append(np.diff(x), np.inf)[:, None], (nx, ny)).copy(),
        "W": np.broadcast_to(np.insert(np.diff(x), 0, np.inf)[:, None], (nx, ny)).copy(),
        "N": np.broadcast_to(np.append(np.diff(y), np.inf)[None, :], (nx, ny)).copy(),
        "S": np.broadcast_to(np.insert(np.diff(y), 0, np.inf)[None, :], (nx, ny)).copy(),
    }
    cut = {key: np.zeros((nx, ny), dtype=bool) for key in spacing}
    value = {key: np.zeros((nx, ny)) for key in spacing}

    vertices = curve.vertices
    lo_x, hi_x = vertices.real.min() - grid_h, vertices.real.max() + grid_h
    hi_y = vertices.imag.max() + grid_h
    side_is_left = side == Side.LEFT

    for forward, backward, di, dj in (("E", "W", 1, 0), ("N", "S", 0, 1)):
        i, j = np.nonzero((xx >= lo_x) & (xx <= hi_x) & (yy <= hi_y))
        keep = (i + di < nx) & (j + dj < ny)
        i, j = i[keep], j[keep]
        p = xx[i, j] + 1j * yy[i, j]
        q = xx[i + di, j + dj] + 1j * yy[i + di, j + dj]
        frac_p, frac_q, left_p, left_q = _edge_crossings(p, q, curve)
        hit = np.isfinite(frac_p)
        length = np.abs(q - p)
        for (ii, jj), frac, left, key in (
            ((i, j), frac_p, left_p, forward),
            ((i + di, j + dj), frac_q, left_q, backward),
        ):
            ii, jj = ii[hit], jj[hit]
            spacing[key][ii, jj] = np.maximum(frac[hit], MIN_CROSSING_FRACTION) * length[hit]
            cut[key][ii, jj] = True
            value[key][ii, jj] = np.where(left[hit] == side_is_left, 1.0, 0.0)

    interior = index >= 0
    n_chosen = sum(int(np.sum(cut[key] & interior & (value[key] == 1.0))) for key in cut)
    n_other = sum(int(np.sum(cut[key] & interior & (value[key] == 0.0))) for key in cut)
    if n_chosen == 0 or n_other == 0:
        raise ResolutionError(
            f"harmonic_measure_grid_oracle: grid_h={grid_h} is too coarse to separate the slit sides "
            f"({n_chosen} chosen-side and {n_other} other-side cut edges)"
        )

    h_e, h_w, h_n, h_s = (spacing[key][interior] for key in ("E", "W", "N", "S"))
    coeffs = {
        "E": 2 / (h_e * (h_e + h_w)),
        "W": 2 / (h_w * (h_e + h_w)),
        "N": 2 / (h_n * (h_n + h_s)),
        "S": 2 / (h_s * (h_n + h_s)),
    }
    offsets = {"E": (1, 0), "W": (-1, 0), "N": (0, 1), "S": (0, -1)}
    ii, jj = np.nonzero(interior)
    rows_self = index[ii, jj]

    rows = [rows_self]
    cols = [rows_self]
    data = [-sum(coeffs.values())]
    rhs = np.zeros(n_unknowns)
    for key, (di, dj) in offsets.items():
        neighbour = index[ii + di, jj + dj]
        is_cut = cut[key][ii, jj]
        coupled = (neighbour >= 0) & ~is_cut
        rows.append(rows_self[coupled])
        cols.append(neighbour[coupled])
        data.append(coeffs[key][coupled])
        rhs[rows_self[is_cut]] -= coeffs[key][is_cut] * value[key][ii[is_cut], jj[is_cut]]

    matrix = scipy.sparse.csr_matrix(
        (np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))),
        shape=(n_unknowns, n_unknowns),
    )
    logger.debug(f"Grid oracle: {nx}x{ny} nodes, {n_chosen} chosen-side cut edges")
    solution = scipy.sparse.linalg.spsolve(matrix, rhs)

    field = np.zeros((nx, ny))
    field[1:-1, 1:-1] = solution.reshape(nx - 2, ny - 2)
    interpolator = scipy.interpolate.RegularGridInterpolator((x, y), field)
    measure = float(interpolator([[eval_point.real, eval_point.imag]])[0])
    logger.info(f"Grid oracle: harmonic measure of the {side.value} side at {eval_point} is {measure:.6g}")
    return measure
