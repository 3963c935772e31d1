"""File export for sweep results: CSV, schema-versioned JSON, and SVG.

CSV holds one row per grid point in a fixed column order with full double
precision (repr round-trip).  JSON carries the same data plus the config
echo, per-point metadata and contour polylines, and validates against the
shipped schema.  SVG rendering is deliberately minimal and dependency-free:
heatmap panels colored by light-statistics class (g2) and by a blue ramp on
negative values (Q), with contour polylines drawn on top.
"""

import csv
import json
import math
from importlib import resources

import numpy as np

__all__ = [
    "CSV_COLUMNS",
    "write_csv",
    "read_csv",
    "write_json",
    "write_svg",
    "write_distribution_csv",
    "write_distribution_json",
    "write_distribution_svg",
    "load_schema",
]

CSV_COLUMNS = (
    "axis1",
    "axis2",
    "mean_n",
    "g2",
    "q",
    "classification",
    "s",
    "p",
    "n_cut",
    "fidelity_qnbd",
    "n_max_used",
    "residual",
    "converged",
)

SCHEMA_VERSION = 1

# five-class scheme for g2 panels (antibunched .. superbunched) plus
# slots for vacuum and failed points
CLASS_COLORS = {
    "antibunched": "#2c7bb6",
    "coherent": "#abd9e9",
    "bunched": "#fee090",
    "thermal": "#fdae61",
    "superbunched": "#d7191c",
    "undefined": "#cccccc",
    None: "#777777",
}

# dash patterns for contour levels, smallest to largest (dotted, dashed,
# solid); cycles if more levels are requested
CONTOUR_DASHES = ("2,4", "8,4", "none")


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, bool) or isinstance(value, np.bool_):
        return "true" if value else "false"
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    value = float(value)
    if math.isnan(value):
        return ""
    return repr(value)


def _row(point):
    stats = point.statistics
    fit = point.qnbd_fit
    values = point.values
    return {
        "axis1": values[0],
        "axis2": values[1] if len(values) > 1 else None,
        "mean_n": point.scalar("mean_n"),
        "g2": point.scalar("g2"),
        "q": point.scalar("q"),
        "classification": (
            stats.classification if stats is not None
            else point.extras.get("classification")
        ),
        "s": fit.s if fit is not None else None,
        "p": fit.p if fit is not None else None,
        "n_cut": fit.n_cut if fit is not None else None,
        "fidelity_qnbd": point.fidelity_qnbd,
        "n_max_used": point.n_max_used,
        "residual": point.residual,
        "converged": bool(point.converged),
    }


def write_csv(result, path):
    """One row per grid point, fixed column order, repr-exact floats."""
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for point in result.points:
            row = _row(point)
            writer.writerow([_fmt(row[col]) for col in CSV_COLUMNS])


def _parse(column, text):
    if text == "":
        return None
    if column == "classification":
        return text
    if column == "converged":
        return text == "true"
    if column in ("n_cut", "n_max_used"):
        return int(text)
    return float(text)


def read_csv(path):
    """Inverse of write_csv: list of typed dicts, empty cells as None."""
    with open(path, newline="") as handle:
        reader = csv.DictReader(handle)
        return [
            {col: _parse(col, row[col]) for col in reader.fieldnames}
            for row in reader
        ]


def _clean(obj):
    """JSON-safe conversion: numpy scalars/arrays to native, non-finite to None."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_clean(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        return value if math.isfinite(value) else None
    return obj


def _point_json(point):
    record = _row(point)
    record["index"] = list(point.index)
    record["values"] = list(point.values)
    record["solve_time"] = point.solve_time
    record["error"] = point.error
    record["fit_error"] = point.fit_error
    if point.extras:
        record["extras"] = dict(point.extras)
    return _clean(record)


def write_json(result, path):
    """Schema-versioned JSON document with config echo and contours."""
    document = {
        "schema_version": SCHEMA_VERSION,
        "kind": result.kind,
        "config": _clean(result.config_echo),
        "axes": [
            {
                "name": axis.name,
                "start": axis.start,
                "stop": axis.stop,
                "steps": axis.steps,
                "log": axis.log,
                "values": _clean(axis.values()),
            }
            for axis in result.axes
        ],
        "points": [_point_json(p) for p in result.points],
        "contours": [
            {
                "field": field_name,
                "level": level,
                "polylines": _clean([poly.tolist() for poly in polylines]),
            }
            for field_name, by_level in result.contours.items()
            for level, polylines in by_level.items()
        ],
    }
    with open(path, "w") as handle:
        json.dump(document, handle, indent=1)
        handle.write("\n")


def load_schema():
    """The JSON schema shipped with the package (for output validation)."""
    text = resources.files("atomcavity").joinpath(
        "schema/grid_result.schema.json"
    ).read_text()
    return json.loads(text)


# ---------------------------------------------------------------- SVG ----

def _axis_transform(axis, lo_px, hi_px):
    """Value -> pixel map; logarithmic when the axis is log-spaced."""
    if axis.log:
        a, b = math.log10(axis.start), math.log10(axis.stop)

        def to_px(v):
            return lo_px + (math.log10(v) - a) / (b - a) * (hi_px - lo_px)
    else:
        a, b = axis.start, axis.stop

        def to_px(v):
            return lo_px + (v - a) / (b - a) * (hi_px - lo_px)

    return to_px


def _cell_edges(values, log):
    """Cell boundaries around each grid node (midpoints in map space)."""
    v = np.log10(values) if log else np.asarray(values, dtype=float)
    mids = (v[:-1] + v[1:]) / 2.0
    edges = np.concatenate([[v[0] - (mids[0] - v[0])], mids,
                            [v[-1] + (v[-1] - mids[-1])]])
    return 10.0 ** edges if log else edges


def _q_color(q, scale):
    """Blue ramp on negative Q; zero and positive values render white."""
    if q is None or not math.isfinite(q) or q >= 0:
        return "#ffffff"
    t = min(1.0, -q / scale) if scale > 0 else 1.0
    # white (247) to blue (33,102,172)
    r = round(247 + (33 - 247) * t)
    g = round(247 + (102 - 247) * t)
    b = round(247 + (172 - 247) * t)
    return f"#{r:02x}{g:02x}{b:02x}"


def _heat_color(value, lo, hi):
    """Gray-to-red log ramp for positive magnitude fields."""
    if value is None or not math.isfinite(value) or value <= 0:
        return "#ffffff"
    t = (math.log10(value) - lo) / (hi - lo) if hi > lo else 0.5
    t = min(1.0, max(0.0, t))
    r = round(240 + (178 - 240) * t)
    g = round(240 + (24 - 240) * t)
    b = round(240 + (43 - 240) * t)
    return f"#{r:02x}{g:02x}{b:02x}"


def _svg_header(width, height, title):
    return [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
        f'height="{height}" viewBox="0 0 {width} {height}">',
        f'<title>{title}</title>',
        f'<rect width="{width}" height="{height}" fill="white"/>',
    ]


def _panel_frame(parts, x0, y0, size, xlabel, ylabel, title, xticks, yticks):
    parts.append(
        f'<rect x="{x0}" y="{y0}" width="{size}" height="{size}" '
        f'fill="none" stroke="black"/>'
    )
    parts.append(
        f'<text x="{x0 + size / 2:.1f}" y="{y0 - 8}" text-anchor="middle" '
        f'font-size="13">{title}</text>'
    )
    parts.append(
        f'<text x="{x0 + size / 2:.1f}" y="{y0 + size + 32}" '
        f'text-anchor="middle" font-size="12">{xlabel}</text>'
    )
    parts.append(
        f'<text x="{x0 - 40}" y="{y0 + size / 2:.1f}" text-anchor="middle" '
        f'font-size="12" transform="rotate(-90 {x0 - 40} '
        f'{y0 + size / 2:.1f})">{ylabel}</text>'
    )
    for px, label in xticks:
        parts.append(
            f'<text x="{px:.1f}" y="{y0 + size + 14}" text-anchor="middle" '
            f'font-size="10">{label}</text>'
        )
    for py, label in yticks:
        parts.append(
            f'<text x="{x0 - 4}" y="{py + 3:.1f}" text-anchor="end" '
            f'font-size="10">{label}</text>'
        )


def _tick_label(value):
    return f"{value:g}"


def _render_panel(parts, result, origin, size, color_of, title,
                  contour_fields=("mean_n",)):
    """One heatmap panel plus contour overlays; returns nothing (appends)."""
    ax_x, ax_y = result.axes
    x0, y0 = origin
    to_px_x = _axis_transform(ax_x, x0, x0 + size)
    to_px_y = _axis_transform(ax_y, y0 + size, y0)  # y grows upward
    xs, ys = result.axis_values
    ex = _cell_edges(xs, ax_x.log)
    ey = _cell_edges(ys, ax_y.log)
    # clamp outer edges so cells stay inside the frame
    ex[0], ex[-1] = xs[0], xs[-1]
    ey[0], ey[-1] = ys[0], ys[-1]

    for point in result.points:
        i, j = point.index
        xa, xb = to_px_x(ex[i]), to_px_x(ex[i + 1])
        ya, yb = to_px_y(ey[j + 1]), to_px_y(ey[j])
        color = color_of(point)
        parts.append(
            f'<rect x="{xa:.2f}" y="{ya:.2f}" width="{xb - xa:.2f}" '
            f'height="{yb - ya:.2f}" fill="{color}"/>'
        )

    levels_seen = []
    for field_name in contour_fields:
        by_level = result.contours.get(field_name, {})
        for level in sorted(by_level):
            dash = CONTOUR_DASHES[len(levels_seen) % len(CONTOUR_DASHES)]
            levels_seen.append(level)
            style = "" if dash == "none" else f' stroke-dasharray="{dash}"'
            for poly in by_level[level]:
                pts = " ".join(
                    f"{to_px_x(px):.2f},{to_px_y(py):.2f}" for px, py in poly
                )
                parts.append(
                    f'<polyline points="{pts}" fill="none" '
                    f'stroke="black" stroke-width="1.2"{style}/>'
                )

    xticks = [(to_px_x(v), _tick_label(v)) for v in (xs[0], xs[xs.size // 2], xs[-1])]
    yticks = [(to_px_y(v), _tick_label(v)) for v in (ys[0], ys[ys.size // 2], ys[-1])]
    _panel_frame(parts, x0, y0, size, ax_x.name, ax_y.name, title,
                 xticks, yticks)


def _write_grid_svg(result, path):
    size, margin, gap = 300, 70, 70
    width = 2 * size + 2 * margin + gap
    height = size + margin + 60
    parts = _svg_header(width, height, f"{result.kind} sweep")

    q_values = [
        p.scalar("q") for p in result.points
        if p.scalar("q") is not None and math.isfinite(p.scalar("q")) and p.scalar("q") < 0
    ]
    q_scale = max(-min(q_values), 1e-12) if q_values else 1.0

    def g2_color(point):
        return CLASS_COLORS.get(_class_of(point), CLASS_COLORS[None])

    def q_color(point):
        q = point.scalar("q")
        if point.error is not None:
            return CLASS_COLORS[None]
        return _q_color(q, q_scale)

    _render_panel(parts, result, (margin, 40), size, g2_color, "g2 class")
    _render_panel(parts, result, (margin + size + gap, 40), size, q_color,
                  "Mandel Q (blue: Q &lt; 0)")
    # legend for the class panel
    lx, ly = margin, height - 12
    for name in ("antibunched", "coherent", "bunched", "thermal", "superbunched"):
        parts.append(
            f'<rect x="{lx}" y="{ly - 9}" width="10" height="10" '
            f'fill="{CLASS_COLORS[name]}" stroke="black" stroke-width="0.4"/>'
        )
        parts.append(
            f'<text x="{lx + 13}" y="{ly}" font-size="10">{name}</text>'
        )
        lx += 13 + 7 * len(name) + 14
    parts.append("</svg>")
    with open(path, "w") as handle:
        handle.write("\n".join(parts) + "\n")


def _class_of(point):
    if point.statistics is not None:
        return point.statistics.classification
    return point.extras.get("classification")


def _write_validity_svg(result, path):
    size, margin, gap = 300, 70, 70
    width = 2 * size + 2 * margin + gap
    height = size + margin + 60
    parts = _svg_header(width, height, "qnbd validity map")

    pcr = [
        p.extras["abs_p_cr"] for p in result.points
        if p.extras.get("abs_p_cr", 0) > 0
    ]
    lo = math.log10(min(pcr)) if pcr else -12.0
    hi = math.log10(max(pcr)) if pcr else 0.0

    def pcr_color(point):
        return _heat_color(point.extras.get("abs_p_cr"), lo, hi)

    def valid_color(point):
        return "#7fbf7b" if point.extras.get("valid") else "#af8dc3"

    _render_panel(parts, result, (margin, 40), size, pcr_color,
                  "|P_cr| (log ramp)", contour_fields=("abs_p_cr", "q"))
    _render_panel(parts, result, (margin + size + gap, 40), size, valid_color,
                  "validity verdict", contour_fields=("abs_p_cr", "q"))
    parts.append(
        f'<text x="{margin}" y="{height - 12}" font-size="10">'
        "green: valid qnbd; purple: invalid; contours: |P_cr| threshold "
        "and Q = -0.5</text>"
    )
    parts.append("</svg>")
    with open(path, "w") as handle:
        handle.write("\n".join(parts) + "\n")


def _split_runs(xs, ys):
    """Split a sampled curve at NaNs into drawable runs."""
    runs, cur = [], []
    for x, y in zip(xs, ys):
        if y is None or not math.isfinite(y):
            if len(cur) > 1:
                runs.append(cur)
            cur = []
        else:
            cur.append((x, y))
    if len(cur) > 1:
        runs.append(cur)
    return runs


def _write_scan_svg(result, path):
    """Stacked line charts of g2 and Q along a 1-D scan."""
    axis = result.axes[0]
    xs = result.axis_values[0]
    panel_w, panel_h, margin, gap = 520, 170, 70, 50
    width = panel_w + 2 * margin
    height = 2 * panel_h + gap + 100
    parts = _svg_header(width, height, f"scan over {axis.name}")
    to_px_x = _axis_transform(axis, margin, margin + panel_w)

    curves = (("g2", [p.scalar("g2") for p in result.points]),
              ("Q", [p.scalar("q") for p in result.points]))
    for k, (label, values) in enumerate(curves):
        y0 = 40 + k * (panel_h + gap)
        finite = [v for v in values if v is not None and math.isfinite(v)]
        lo = min(finite) if finite else 0.0
        hi = max(finite) if finite else 1.0
        if hi - lo < 1e-12:
            lo, hi = lo - 0.5, hi + 0.5
        pad = 0.05 * (hi - lo)
        lo, hi = lo - pad, hi + pad

        def to_px_y(v, lo=lo, hi=hi, y0=y0):
            return y0 + panel_h - (v - lo) / (hi - lo) * panel_h

        for run in _split_runs(xs, values):
            pts = " ".join(f"{to_px_x(x):.2f},{to_px_y(y):.2f}" for x, y in run)
            parts.append(
                f'<polyline points="{pts}" fill="none" stroke="#2c7bb6" '
                f'stroke-width="1.5"/>'
            )
        # reference line: g2 = 1 (coherent) / Q = 0 (Poissonian)
        ref = 1.0 if label == "g2" else 0.0
        if lo < ref < hi:
            parts.append(
                f'<line x1="{margin}" y1="{to_px_y(ref):.2f}" '
                f'x2="{margin + panel_w}" y2="{to_px_y(ref):.2f}" '
                f'stroke="#999999" stroke-dasharray="4,4"/>'
            )
        xticks = [(to_px_x(v), _tick_label(v)) for v in (xs[0], xs[xs.size // 2], xs[-1])]
        yticks = [(to_px_y(v), f"{v:.3g}") for v in (lo + pad, (lo + hi) / 2, hi - pad)]
        parts.append(
            f'<rect x="{margin}" y="{y0}" width="{panel_w}" '
            f'height="{panel_h}" fill="none" stroke="black"/>'
        )
        parts.append(
            f'<text x="{margin + panel_w / 2:.1f}" y="{y0 - 8}" '
            f'text-anchor="middle" font-size="13">{label}</text>'
        )
        for px, lab in xticks:
            parts.append(
                f'<text x="{px:.1f}" y="{y0 + panel_h + 14}" '
                f'text-anchor="middle" font-size="10">{lab}</text>'
            )
        for py, lab in yticks:
            parts.append(
                f'<text x="{margin - 4}" y="{py + 3:.1f}" text-anchor="end" '
                f'font-size="10">{lab}</text>'
            )
    parts.append(
        f'<text x="{margin + panel_w / 2:.1f}" y="{height - 20}" '
        f'text-anchor="middle" font-size="12">{axis.name}</text>'
    )
    parts.append("</svg>")
    with open(path, "w") as handle:
        handle.write("\n".join(parts) + "\n")


def write_svg(result, path):
    """Render a GridResult as a self-contained SVG."""
    if result.kind == "validity":
        _write_validity_svg(result, path)
    elif len(result.axes) == 2:
        _write_grid_svg(result, path)
    else:
        _write_scan_svg(result, path)


# ------------------------------------------------- distribution report ----

def write_distribution_csv(report, path):
    """Photon-number table: system vs reference pmfs and deviations."""
    names = ("system", "qnbd", "coherent", "thermal")
    upto = len(next(iter(report.deviations.values())))
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(
            ["n"] + [f"p_{n}" for n in names]
            + [f"dp_{n}" for n in names if n != "system"]
        )
        for n in range(report.pmfs["system"].size):
            row = [str(n)] + [_fmt(report.pmfs[name][n]) for name in names]
            if n < upto:
                row += [_fmt(report.deviations[name][n])
                        for name in names if name != "system"]
            else:
                row += ["", "", ""]
            writer.writerow(row)


def write_distribution_json(report, path):
    fit = report.qnbd_fit
    document = {
        "schema_version": SCHEMA_VERSION,
        "kind": "distribution",
        "config": _clean(report.echo()),
        "statistics": _clean(
            {
                "mean_n": report.statistics.mean_n,
                "g2": report.statistics.g2,
                "q": report.statistics.q,
                "classification": report.statistics.classification,
            }
        ),
        "qnbd": _clean(
            {
                "s": fit.s,
                "p": fit.p,
                "n_cut": fit.n_cut,
                "normalization": fit.normalization,
            }
        ),
        "pmfs": _clean({k: v for k, v in report.pmfs.items()}),
        "deviations": _clean({k: v for k, v in report.deviations.items()}),
        "fidelities": _clean(report.fidelities),
        "n_max_used": report.n_max_used,
        "residual": report.residual,
        "converged": bool(report.converged),
    }
    with open(path, "w") as handle:
        json.dump(document, handle, indent=1)
        handle.write("\n")


def write_distribution_svg(report, path, n_show=10):
    """Grouped-bar comparison of the photon distributions."""
    names = ("system", "qnbd", "coherent", "thermal")
    colors = {"system": "#333333", "qnbd": "#ffffff",
              "coherent": "#d7191c", "thermal": "#2c7bb6"}
    n_show = min(n_show, report.pmfs["system"].size - 1)
    margin, panel_w, panel_h = 60, 560, 260
    width = panel_w + 2 * margin
    height = panel_h + 120
    parts = _svg_header(width, height, "photon distribution comparison")
    top = max(max(p[: n_show + 1].max() for p in report.pmfs.values()), 1e-12)
    group_w = panel_w / (n_show + 1)
    bar_w = group_w / (len(names) + 1)
    y0 = 40
    for n in range(n_show + 1):
        gx = margin + n * group_w
        for k, name in enumerate(names):
            value = max(float(report.pmfs[name][n]), 0.0)
            h = value / top * panel_h
            parts.append(
                f'<rect x="{gx + k * bar_w:.2f}" y="{y0 + panel_h - h:.2f}" '
                f'width="{bar_w:.2f}" height="{h:.2f}" '
                f'fill="{colors[name]}" stroke="black" stroke-width="0.4"/>'
            )
        parts.append(
            f'<text x="{gx + group_w / 2:.1f}" y="{y0 + panel_h + 14}" '
            f'text-anchor="middle" font-size="10">{n}</text>'
        )
    parts.append(
        f'<rect x="{margin}" y="{y0}" width="{panel_w}" height="{panel_h}" '
        f'fill="none" stroke="black"/>'
    )
    parts.append(
        f'<text x="{margin + panel_w / 2:.1f}" y="{y0 + panel_h + 32}" '
        f'text-anchor="middle" font-size="12">photon number n</text>'
    )
    lx = margin
    ly = height - 16
    for name in names:
        parts.append(
            f'<rect x="{lx}" y="{ly - 9}" width="10" height="10" '
            f'fill="{colors[name]}" stroke="black" stroke-width="0.4"/>'
        )
        parts.append(f'<text x="{lx + 13}" y="{ly}" font-size="10">{name}</text>')
        lx += 13 + 7 * len(name) + 14
    parts.append("</svg>")
    with open(path, "w") as handle:
        handle.write("\n".join(parts) + "\n")
