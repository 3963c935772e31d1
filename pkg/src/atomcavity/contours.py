"""Iso-level contour extraction on rectilinear grids (marching squares).

Fields are sampled as ``field[i, j] = f(x[i], y[j])``.  Crossing points on
cell edges come from linear interpolation, so on an affine field
``f = a + b*x + c*y`` every emitted vertex lies exactly on the level line.
Cells touching a NaN sample are skipped, which opens contours at masked
regions instead of inventing geometry there.
"""

import numpy as np

__all__ = ["marching_squares"]


def _interp(level, pa, fa, pb, fb):
    """Crossing point of the level on the edge (pa, fa) -- (pb, fb)."""
    t = (level - fa) / (fb - fa)
    return (pa[0] + t * (pb[0] - pa[0]), pa[1] + t * (pb[1] - pa[1]))


def _cell_segments(level, corners, values):
    """Contour segments inside one cell.

    corners/values are ordered (i,j), (i+1,j), (i+1,j+1), (i,j+1); a corner
    is "inside" when its value exceeds the level.  The two saddle cases are
    disambiguated with the cell-center average.
    """
    inside = [v > level for v in values]
    case = inside[0] | inside[1] << 1 | inside[2] << 2 | inside[3] << 3
    if case in (0, 15):
        return []

    # edge k connects corner k and corner (k+1) % 4; interpolate in a fixed
    # grid direction so the two cells sharing an edge compute the crossing
    # point with bitwise-identical arithmetic
    canon = {0: (0, 1), 1: (1, 2), 2: (3, 2), 3: (0, 3)}

    def edge(k):
        a, b = canon[k]
        return _interp(level, corners[a], values[a], corners[b], values[b])

    pairs = {
        1: [(3, 0)],
        2: [(0, 1)],
        3: [(3, 1)],
        4: [(1, 2)],
        6: [(0, 2)],
        7: [(3, 2)],
        8: [(2, 3)],
        9: [(2, 0)],
        11: [(2, 1)],
        12: [(1, 3)],
        13: [(1, 0)],
        14: [(0, 3)],
    }
    if case == 5 or case == 10:
        center_inside = sum(values) / 4.0 > level
        if (case == 5) == center_inside:
            pairs_case = [(0, 1), (2, 3)]
        else:
            pairs_case = [(3, 0), (1, 2)]
    else:
        pairs_case = pairs[case]
    return [(edge(a), edge(b)) for a, b in pairs_case]


def _stitch(segments):
    """Join segments sharing endpoints into polylines.

    Shared cell edges produce bitwise-identical crossing points, so exact
    tuples work as keys.  Returns a list of (k, 2) float arrays; closed
    loops repeat their first vertex at the end.
    """
    links = {}
    for idx, (a, b) in enumerate(segments):
        links.setdefault(a, []).append(idx)
        links.setdefault(b, []).append(idx)
    used = [False] * len(segments)
    polylines = []

    def walk(start_idx, start_point):
        chain = [start_point]
        idx, point = start_idx, start_point
        while True:
            used[idx] = True
            a, b = segments[idx]
            point = b if point == a else a
            chain.append(point)
            candidates = [k for k in links.get(point, ()) if not used[k]]
            if not candidates:
                return chain
            idx = candidates[0]

    for idx in range(len(segments)):
        if used[idx]:
            continue
        # extend backwards from the tail, then forwards; avoids splitting
        # open contours in two when the walk starts mid-chain
        forward = walk(idx, segments[idx][0])
        used[idx] = False
        backward = walk(idx, segments[idx][1])
        chain = backward[::-1] + forward[2:]
        polylines.append(np.array(chain, dtype=float))
    return polylines


def marching_squares(x, y, field, level):
    """Extract iso-contours of a scalar field at one level.

    Parameters
    ----------
    x, y : 1-D arrays of grid coordinates (monotonic).
    field : 2-D array, shape (len(x), len(y)), field[i, j] = f(x[i], y[j]).
    level : contour value.

    Returns
    -------
    list of (k, 2) arrays of (x, y) vertices, one per connected contour.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    field = np.asarray(field, dtype=float)
    if field.shape != (x.size, y.size):
        raise ValueError(
            f"field shape {field.shape} does not match grid "
            f"({x.size}, {y.size})"
        )
    if x.size < 2 or y.size < 2:
        raise ValueError("need at least a 2x2 grid")
    if not np.isfinite(level):
        raise ValueError(f"level must be finite, got {level}")

    segments = []
    for i in range(x.size - 1):
        for j in range(y.size - 1):
            values = (
                field[i, j],
                field[i + 1, j],
                field[i + 1, j + 1],
                field[i, j + 1],
            )
            if not all(np.isfinite(v) for v in values):
                continue
            corners = (
                (x[i], y[j]),
                (x[i + 1], y[j]),
                (x[i + 1], y[j + 1]),
                (x[i], y[j + 1]),
            )
            segments.extend(_cell_segments(level, corners, values))
    segments = [(a, b) for a, b in segments if a != b]
    return _stitch(segments)
