"""Spatial usage products: max-normalized density grids over a bounding box
and hub spreading-out reports (ranked destination cells for trips leaving a
named hub). Cells are metric, using meters-per-degree at a reference latitude;
adequate for a city-scale box."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .ingest import EARTH_RADIUS_M, Trip, haversine

M_PER_DEG_LAT = math.pi / 180.0 * EARTH_RADIUS_M


def _m_per_deg_lon(at_lat: float) -> float:
    return M_PER_DEG_LAT * math.cos(math.radians(at_lat))


@dataclass
class DensityGrid:
    bbox: tuple[float, float, float, float]  # (min_lat, min_lon, max_lat, max_lon)
    cell_size: float
    n_rows: int
    n_cols: int
    counts: np.ndarray      # (n_rows, n_cols) int64
    normalized: np.ndarray  # counts / max(counts), zeros when empty
    ignored: int            # points outside the bbox


def build_density_grid(points, bbox, cell_size: float) -> DensityGrid:
    """Count (lat, lon) points into metric cells anchored at the bbox SW corner.

    Points on the closed bbox boundary are kept (top/right edges fold into the
    last row/column). Normalization is per grid, i.e. per call.
    """
    min_lat, min_lon, max_lat, max_lon = bbox
    if not (min_lat < max_lat and min_lon < max_lon):
        raise ParameterError(f"degenerate bbox: {bbox!r}")
    if cell_size <= 0:
        raise ParameterError("cell_size must be positive")

    center_lat = (min_lat + max_lat) / 2.0
    m_lat = M_PER_DEG_LAT
    m_lon = _m_per_deg_lon(center_lat)
    n_rows = max(1, math.ceil((max_lat - min_lat) * m_lat / cell_size))
    n_cols = max(1, math.ceil((max_lon - min_lon) * m_lon / cell_size))

    pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    if pts.size == 0:
        counts = np.zeros((n_rows, n_cols), dtype=np.int64)
        return DensityGrid(bbox, cell_size, n_rows, n_cols, counts, counts.astype(np.float64), 0)

    lat, lon = pts[:, 0], pts[:, 1]
    inside = (lat >= min_lat) & (lat <= max_lat) & (lon >= min_lon) & (lon <= max_lon)
    rows = np.floor((lat[inside] - min_lat) * m_lat / cell_size).astype(np.int64)
    cols = np.floor((lon[inside] - min_lon) * m_lon / cell_size).astype(np.int64)
    np.clip(rows, 0, n_rows - 1, out=rows)
    np.clip(cols, 0, n_cols - 1, out=cols)
    flat = np.bincount(rows * n_cols + cols, minlength=n_rows * n_cols)
    counts = flat.reshape(n_rows, n_cols).astype(np.int64)
    peak = counts.max()
    normalized = counts / peak if peak > 0 else counts.astype(np.float64)
    return DensityGrid(bbox, cell_size, n_rows, n_cols, counts, normalized, int(len(pts) - inside.sum()))


def grid_diff(a: DensityGrid, b: DensityGrid) -> np.ndarray:
    """Elementwise a.normalized - b.normalized; grids must be congruent."""
    if a.bbox != b.bbox or a.cell_size != b.cell_size or a.counts.shape != b.counts.shape:
        raise ParameterError("grids differ in bbox, cell size, or shape")
    return a.normalized - b.normalized


@dataclass
class Destination:
    cell_center: tuple[float, float]
    trip_count: int
    rank: int


@dataclass
class HubSpreadReport:
    hub_center: tuple[float, float]
    hub_radius: float
    period: str
    destinations: list[Destination]
    total_trips_from_hub: int
    hub_name: str = ""


def hub_spread(trips: list[Trip], hub_center: tuple[float, float], hub_radius: float,
               dest_cell_size: float, top_k: int, period: str = "all",
               hub_name: str = "") -> HubSpreadReport:
    """Rank destination cells of trips starting within `hub_radius` of the hub.

    Hub membership is a closed disk (start exactly at the radius counts).
    Destinations are metric cells anchored at the hub center; ties rank by
    (row, col) ascending so reports are byte-stable.
    """
    if hub_radius <= 0:
        raise ParameterError("hub_radius must be positive")
    if top_k < 1:
        raise ParameterError("top_k must be >= 1")

    m_lat = M_PER_DEG_LAT
    m_lon = _m_per_deg_lon(hub_center[0])
    cells: dict[tuple[int, int], int] = {}
    total = 0
    for t in trips:
        if haversine(t.start_point, hub_center) > hub_radius:
            continue
        total += 1
        row = math.floor((t.end_point[0] - hub_center[0]) * m_lat / dest_cell_size)
        col = math.floor((t.end_point[1] - hub_center[1]) * m_lon / dest_cell_size)
        cells[(row, col)] = cells.get((row, col), 0) + 1

    ranked = sorted(cells.items(), key=lambda kv: (-kv[1], kv[0][0], kv[0][1]))[:top_k]
    destinations = []
    for rank, ((row, col), count) in enumerate(ranked, start=1):
        center = (
            hub_center[0] + (row + 0.5) * dest_cell_size / m_lat,
            hub_center[1] + (col + 0.5) * dest_cell_size / m_lon,
        )
        destinations.append(Destination(center, count, rank))
    return HubSpreadReport(hub_center, hub_radius, period, destinations, total, hub_name)


@dataclass(frozen=True)
class HubDef:
    name: str
    lat: float
    lon: float
    radius_m: float


def parse_hub_file(source) -> list[HubDef]:
    """Hub config CSV with header `name,lat,lon,radius_m`."""
    from .errors import SchemaError

    if isinstance(source, (str,)) or hasattr(source, "__fspath__"):
        with open(source, "r", encoding="utf-8", newline="") as f:
            return parse_hub_file(f)
    rows = csv.reader(source)
    header = next(rows, None)
    if header != ["name", "lat", "lon", "radius_m"]:
        raise SchemaError(f"bad hub file header {header!r}")
    out = []
    for row in rows:
        if not row:
            continue
        if len(row) != 4:
            raise SchemaError(f"bad hub row {row!r}")
        out.append(HubDef(row[0], float(row[1]), float(row[2]), float(row[3])))
    return out


def write_density_csv(grid: DensityGrid, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as f:
        w = csv.writer(f)
        w.writerow(["row", "col", "count", "normalized"])
        for r in range(grid.n_rows):
            for c in range(grid.n_cols):
                w.writerow([r, c, int(grid.counts[r, c]), repr(float(grid.normalized[r, c]))])


def hub_report_as_dict(rep: HubSpreadReport) -> dict:
    return {
        "hub_name": rep.hub_name,
        "hub_center": list(rep.hub_center),
        "hub_radius_m": rep.hub_radius,
        "period": rep.period,
        "total_trips_from_hub": rep.total_trips_from_hub,
        "destinations": [
            {"rank": d.rank, "cell_center": list(d.cell_center), "trip_count": d.trip_count}
            for d in rep.destinations
        ],
    }
