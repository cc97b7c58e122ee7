"""Gridded forecast fields: bundle I/O, percentile reduction, cropping,
sea-area masking and per-area time series extraction.

All fields hold 24 hourly timesteps. Values are float64 with NaN for
missing data; reducers skip NaN rather than invent values.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from datetime import datetime, timedelta
from pathlib import Path

import numpy as np
from matplotlib.path import Path as MplPath

from .errors import (
    BundleMalformed,
    EmptyDomain,
    EmptyMask,
    PayloadSizeMismatch,
    TimeAxisInvalid,
    ValueOutOfRange,
)

HOURS = 24

# Regional domain used throughout: {30N, 70N} x {-20E, 10E}
DOMAIN_BBOX = (30.0, 70.0, -20.0, 10.0)  # lat_min, lat_max, lon_min, lon_max


def _check_time_axis(times) -> None:
    if len(times) != HOURS:
        raise TimeAxisInvalid(f"expected {HOURS} timesteps, got {len(times)}")
    for a, b in zip(times, times[1:]):
        if b - a != timedelta(hours=1):
            raise TimeAxisInvalid(f"non-hourly step between {a} and {b}")


@dataclass(frozen=True)
class GridField:
    """One attribute on a regular lat/lon grid over 24 hourly timesteps."""

    variable: str
    units: str
    lats: np.ndarray          # ascending, deg N
    lons: np.ndarray          # ascending, deg E
    times: tuple              # 24 hourly datetimes (UTC)
    values: np.ndarray        # (24, nlat, nlon), float64, NaN = missing
    percentile: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "lats", np.asarray(self.lats, dtype=np.float64))
        object.__setattr__(self, "lons", np.asarray(self.lons, dtype=np.float64))
        object.__setattr__(self, "times", tuple(self.times))
        object.__setattr__(self, "values", np.asarray(self.values, dtype=np.float64))
        _check_time_axis(self.times)
        if np.any(np.diff(self.lats) <= 0) or np.any(np.diff(self.lons) <= 0):
            raise BundleMalformed("coordinates must be strictly ascending")
        expected = (HOURS, self.lats.size, self.lons.size)
        if self.values.shape != expected:
            raise BundleMalformed(
                f"values shape {self.values.shape} != {expected}")


@dataclass(frozen=True)
class EnsembleField:
    """Same as GridField with a leading ensemble-member axis."""

    variable: str
    units: str
    lats: np.ndarray
    lons: np.ndarray
    times: tuple
    values: np.ndarray        # (members, 24, nlat, nlon)
    members: int = 1
    percentile: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "lats", np.asarray(self.lats, dtype=np.float64))
        object.__setattr__(self, "lons", np.asarray(self.lons, dtype=np.float64))
        object.__setattr__(self, "times", tuple(self.times))
        object.__setattr__(self, "values", np.asarray(self.values, dtype=np.float64))
        if self.members < 1:
            raise BundleMalformed("member count must be >= 1")
        _check_time_axis(self.times)
        expected = (self.members, HOURS, self.lats.size, self.lons.size)
        if self.values.shape != expected:
            raise BundleMalformed(
                f"values shape {self.values.shape} != {expected}")


@dataclass(frozen=True)
class SeaArea:
    """A named sea area with its boundary ring and broadcast position."""

    name: str
    order_index: int
    polygon: tuple            # closed ring of (lat, lon) vertices

    def __post_init__(self):
        ring = tuple((float(a), float(b)) for a, b in self.polygon)
        object.__setattr__(self, "polygon", ring)
        if len(ring) < 4 or ring[0] != ring[-1]:
            raise BundleMalformed(f"polygon for {self.name} is not a closed ring")


@dataclass(frozen=True)
class AreaSeries:
    """24 hourly scalars for one attribute reduced over one sea area."""

    area: str
    variable: str
    values: np.ndarray        # length 24
    reducer: str              # areal-mean | areal-max | areal-circular-mean

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=np.float64))
        if self.values.shape != (HOURS,):
            raise BundleMalformed(f"series length {self.values.size} != {HOURS}")


# --- sea-area registry -----------------------------------------------------

_DATA_DIR = Path(__file__).parent / "data"


_REGISTRY_CACHE: dict[str, dict] = {}


def load_area_registry(path: str | Path | None = None) -> dict[str, SeaArea]:
    """Load the sea-area registry (name -> SeaArea), canonical order kept."""
    path = Path(path) if path else _DATA_DIR / "areas.json"
    cached = _REGISTRY_CACHE.get(str(path))
    if cached is not None:
        return cached
    doc = json.loads(path.read_text(encoding="utf-8"))
    areas = {}
    for rec in doc["areas"]:
        area = SeaArea(name=rec["name"], order_index=int(rec["order_index"]),
                       polygon=tuple(map(tuple, rec["ring"])))
        if area.name in areas:
            raise BundleMalformed(f"duplicate area name {area.name}")
        areas[area.name] = area
    order = [a.order_index for a in areas.values()]
    if len(set(order)) != len(order):
        raise BundleMalformed("order_index values are not unique")
    result = dict(sorted(areas.items(), key=lambda kv: kv[1].order_index))
    _REGISTRY_CACHE[str(path)] = result
    return result


# --- bundle I/O -------------------------------------------------------------

def load_grid_bundle(path: str | Path) -> GridField | EnsembleField:
    """Load a grid-bundle directory (header.json + values.f64le).

    Returns a GridField when the header declares a single member, else an
    EnsembleField. Raises BundleMalformed / PayloadSizeMismatch /
    TimeAxisInvalid on contract violations.
    """
    path = Path(path)
    header_path = path / "header.json"
    if not header_path.is_file():
        raise BundleMalformed(f"missing header.json in {path}")
    try:
        header = json.loads(header_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise BundleMalformed(f"header.json unreadable: {exc}") from exc
    try:
        variable = header["variable"]
        units = header["units"]
        percentile = header["percentile"]
        members = int(header["members"])
        lats = np.asarray(header["lats"], dtype=np.float64)
        lons = np.asarray(header["lons"], dtype=np.float64)
        times = tuple(datetime.fromisoformat(t) for t in header["times"])
    except (KeyError, TypeError, ValueError) as exc:
        raise BundleMalformed(f"header.json incomplete: {exc}") from exc
    if members < 1:
        raise BundleMalformed("members must be >= 1")
    _check_time_axis(times)

    payload_path = path / "values.f64le"
    if not payload_path.is_file():
        raise BundleMalformed(f"missing values.f64le in {path}")
    raw = payload_path.read_bytes()
    count = members * len(times) * lats.size * lons.size
    if len(raw) != count * 8:
        raise PayloadSizeMismatch(
            f"payload is {len(raw)} bytes, header implies {count * 8}")
    values = np.frombuffer(raw, dtype="<f8").reshape(
        members, len(times), lats.size, lons.size)

    if members > 1:
        return EnsembleField(variable=variable, units=units, lats=lats,
                             lons=lons, times=times, values=values,
                             members=members, percentile=percentile)
    return GridField(variable=variable, units=units, lats=lats, lons=lons,
                     times=times, values=values[0], percentile=percentile)


def write_grid_bundle(field: GridField | EnsembleField, path: str | Path) -> Path:
    """Write a field as a grid-bundle directory (inverse of load_grid_bundle)."""
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    members = getattr(field, "members", 1)
    header = {
        "variable": field.variable,
        "units": field.units,
        "percentile": field.percentile,
        "members": members,
        "lats": field.lats.tolist(),
        "lons": field.lons.tolist(),
        "times": [t.isoformat() for t in field.times],
    }
    (path / "header.json").write_text(json.dumps(header), encoding="utf-8")
    values = field.values if members > 1 else field.values[np.newaxis]
    (path / "values.f64le").write_bytes(
        np.ascontiguousarray(values, dtype="<f8").tobytes())
    return path


# --- numeric operations -----------------------------------------------------

def reduce_percentile(fld: EnsembleField, p: float) -> GridField:
    """Collapse the ensemble axis to the p-th percentile per cell and hour.

    Linear interpolation between closest order statistics; NaN members are
    excluded per cell, and all-NaN cells stay NaN.
    """
    if not 0 <= p <= 100:
        raise ValueOutOfRange(f"percentile {p} outside [0, 100]")
    with np.errstate(invalid="ignore"):
        import warnings
        with warnings.catch_warnings():
            warnings.filterwarnings("ignore", "All-NaN slice")
            reduced = np.nanpercentile(fld.values, p, axis=0)
    return GridField(variable=fld.variable, units=fld.units, lats=fld.lats,
                     lons=fld.lons, times=fld.times, values=reduced,
                     percentile=float(p))


def crop_domain(fld: GridField, bbox: tuple[float, float, float, float] = DOMAIN_BBOX
                ) -> GridField:
    """Subset a field to the cells inside [lat_min,lat_max]x[lon_min,lon_max]."""
    lat_min, lat_max, lon_min, lon_max = bbox
    keep_lat = (fld.lats >= lat_min) & (fld.lats <= lat_max)
    keep_lon = (fld.lons >= lon_min) & (fld.lons <= lon_max)
    if not keep_lat.any() or not keep_lon.any():
        raise EmptyDomain(f"bbox {bbox} does not intersect the field grid")
    return replace(fld,
                   lats=fld.lats[keep_lat],
                   lons=fld.lons[keep_lon],
                   values=fld.values[:, keep_lat][:, :, keep_lon])


def _inside_mask(fld: GridField, area: SeaArea) -> np.ndarray:
    ring = np.array([(lon, lat) for lat, lon in area.polygon])
    lon_grid, lat_grid = np.meshgrid(fld.lons, fld.lats)
    pts = np.column_stack([lon_grid.ravel(), lat_grid.ravel()])
    inside = MplPath(ring).contains_points(pts, radius=1e-9)
    return inside.reshape(lat_grid.shape)


def mask_sea_area(fld: GridField, area: SeaArea) -> GridField:
    """NaN-out every cell whose center falls outside the area polygon."""
    inside = _inside_mask(fld, area)
    if not inside.any():
        raise EmptyMask(f"no cell center inside {area.name}")
    values = np.where(inside[np.newaxis], fld.values, np.nan)
    return replace(fld, values=values)


def area_series(fld: GridField, area: SeaArea, reducer: str = "areal-mean"
                ) -> AreaSeries:
    """Reduce an area-masked field to 24 hourly scalars.

    areal-circular-mean treats values as directions in degrees (vector
    mean), for wind direction where an arithmetic mean is meaningless.
    """
    masked = mask_sea_area(fld, area)
    flat = masked.values.reshape(HOURS, -1)
    import warnings
    with warnings.catch_warnings():
        warnings.filterwarnings("ignore", "Mean of empty slice")
        warnings.filterwarnings("ignore", "All-NaN")
        if reducer == "areal-mean":
            out = np.nanmean(flat, axis=1)
        elif reducer == "areal-max":
            out = np.nanmax(flat, axis=1)
        elif reducer == "areal-circular-mean":
            rad = np.deg2rad(flat)
            s = np.nanmean(np.sin(rad), axis=1)
            c = np.nanmean(np.cos(rad), axis=1)
            out = np.rad2deg(np.arctan2(s, c)) % 360.0
            out = np.where(np.isnan(s) | np.isnan(c), np.nan, out)
        else:
            raise ValueOutOfRange(f"unknown reducer {reducer!r}")
    return AreaSeries(area=area.name, variable=fld.variable, values=out,
                      reducer=reducer)
