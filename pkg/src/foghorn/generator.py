"""Rules-based data-to-text: 24-hour attribute series -> bulletin structures,
with timing phrases, gale warnings, a pressure synopsis and cross-area
consolidation.

Sub-period rules: classify each hour, merge identical runs, absorb runs
shorter than 3 h into the longer neighbor, then cap at 3 sub-periods by
merging the adjacent pair whose categories are closest in scale order
(ties merge the earlier pair). With two or more sub-periods the opening
clause carries "at first"; a change starting at hour 12 or after carries
"later", earlier changes carry no phrase.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import DuplicateArea, EmptySynopsis, MissingAttribute
from .grammar import (
    Bulletin,
    FORCE_SEVERITY,
    GaleWarning,
    PressureSystem,
    StateClause,
    Synopsis,
    WeatherClause,
    WindClause,
    render_bulletin,
    validate,
)
from .grid import AreaSeries, GridField, SeaArea, load_area_registry
from .scales import (
    COMPASS_8,
    CategoricalScale,
    WeatherCodeMap,
    classify_beaufort,
    compass_8,
    scale_for,
)

MIN_SUBPERIOD_HOURS = 3
MAX_SUBPERIODS = 3
LATER_CUTOVER_HOUR = 12

#: first qualifying hour -> gale warning timing
IMMINENT_BEFORE_HOUR = 6
SOON_BEFORE_HOUR = 13           # 6-12 h inclusive is "soon"


@dataclass(frozen=True)
class SubPeriod:
    start_hour: int
    end_hour: int                # exclusive
    category: int                # index in scale order

    @property
    def length(self) -> int:
        return self.end_hour - self.start_hour


def segment_hours(categories: list[int]) -> list[SubPeriod]:
    """Merge 24 hourly category indices into at most 3 contiguous sub-periods."""
    if len(categories) != 24:
        raise ValueError(f"expected 24 hourly categories, got {len(categories)}")
    periods: list[SubPeriod] = []
    start = 0
    for h in range(1, 25):
        if h == 24 or categories[h] != categories[start]:
            periods.append(SubPeriod(start, h, categories[start]))
            start = h

    # absorb short runs into the longer neighbor (tie: earlier neighbor)
    while len(periods) > 1:
        short = [i for i, p in enumerate(periods) if p.length < MIN_SUBPERIOD_HOURS]
        if not short:
            break
        i = min(short, key=lambda i: (periods[i].length, i))
        left = periods[i - 1] if i > 0 else None
        right = periods[i + 1] if i < len(periods) - 1 else None
        if right is None or (left is not None and left.length >= right.length):
            periods[i - 1:i + 1] = [SubPeriod(left.start_hour, periods[i].end_hour,
                                              left.category)]
        else:
            periods[i:i + 2] = [SubPeriod(periods[i].start_hour, right.end_hour,
                                          right.category)]

    # cap at MAX_SUBPERIODS by merging the closest-category adjacent pair
    while len(periods) > MAX_SUBPERIODS:
        i = min(range(len(periods) - 1),
                key=lambda i: (abs(periods[i].category - periods[i + 1].category), i))
        a, b = periods[i], periods[i + 1]
        keep = a if a.length >= b.length else b
        periods[i:i + 2] = [SubPeriod(a.start_hour, b.end_hour, keep.category)]

    # re-merge in case capping created adjacent twins
    merged: list[SubPeriod] = []
    for p in periods:
        if merged and merged[-1].category == p.category:
            merged[-1] = SubPeriod(merged[-1].start_hour, p.end_hour, p.category)
        else:
            merged.append(p)
    return merged


def timing_for(periods: list[SubPeriod]) -> list[str | None]:
    """Timing phrase per sub-period under the at-first/later rules."""
    out: list[str | None] = []
    for i, p in enumerate(periods):
        if i == 0:
            out.append("at first" if len(periods) > 1 else None)
        elif p.start_hour >= LATER_CUTOVER_HOUR:
            out.append("later")
        else:
            out.append(None)
    return out


def summarize_attribute(series: AreaSeries, scale: CategoricalScale
                        ) -> list[StateClause]:
    """Classify, merge and phrase a 24-hour series as timed state clauses."""
    cats = [scale.index(v) for v in series.values]
    periods = segment_hours(cats)
    timings = timing_for(periods)
    return [StateClause(label=scale.bins[p.category].label, timing=t)
            for p, t in zip(periods, timings)]


def detect_gales(wind_max: AreaSeries) -> GaleWarning | None:
    """Gale warning from the areal-max wind speed series (knots)."""
    forces = [classify_beaufort(v) if not math.isnan(v) else 0
              for v in wind_max.values]
    peak = max(forces)
    if peak < 8:
        return None
    first = next(h for h, f in enumerate(forces) if f >= 8)
    if first < IMMINENT_BEFORE_HOUR:
        timing = "imminent"
    elif first < SOON_BEFORE_HOUR:
        timing = "soon"
    else:
        timing = "later"
    return GaleWarning(severity=FORCE_SEVERITY[peak], timing=timing)


def _dominant_direction(directions: np.ndarray) -> str:
    """Most frequent 8-point bin; ties break clockwise from north."""
    counts = {label: 0 for label in COMPASS_8}
    for d in directions:
        if not math.isnan(d):
            counts[compass_8(d % 360.0)] += 1
    return max(COMPASS_8, key=lambda lab: (counts[lab], -COMPASS_8.index(lab)))


def _wind_clauses(speed_max: AreaSeries, direction: AreaSeries
                  ) -> list[WindClause]:
    forces = [classify_beaufort(v) if not math.isnan(v) else 0
              for v in speed_max.values]
    periods = segment_hours(forces)
    timings = timing_for(periods)
    clauses = []
    for p, t in zip(periods, timings):
        span = forces[p.start_hour:p.end_hour]
        high = max(span)
        # span capped at 3 Beaufort steps, biased toward the peak for safety
        low = max(min(span), high - 3)
        label = _dominant_direction(direction.values[p.start_hour:p.end_hour])
        clauses.append(WindClause(direction=label, force_low=low,
                                  force_high=high, timing=t))
    return clauses


def _weather_clauses(codes: AreaSeries, code_map: WeatherCodeMap
                     ) -> list[WeatherClause]:
    order = list(code_map.codes)
    idx = []
    for v in codes.values:
        code = int(round(v))
        if code not in order:
            code_map.phrase(code)  # raises UnknownWeatherCode
        idx.append(order.index(code))
    periods = segment_hours(idx)
    timings = timing_for(periods)
    clauses = [WeatherClause(phrase=code_map.phrase(order[p.category]), timing=t)
               for p, t in zip(periods, timings)]
    if len(clauses) == 1 and clauses[0].phrase == "fair":
        return []
    return clauses


REQUIRED_ATTRIBUTES = ("wind_speed", "wind_direction", "wave_height",
                       "visibility", "weather_code")


def generate_area_bulletin(series: dict[str, AreaSeries], area: SeaArea,
                           code_map: WeatherCodeMap) -> Bulletin:
    """Assemble a validated bulletin for one area from its attribute series.

    Expects wind_speed as areal-max (gale safety) and the rest as areal
    means; wind_direction should use the circular mean reducer.
    """
    missing = [a for a in REQUIRED_ATTRIBUTES if a not in series]
    if missing:
        raise MissingAttribute(f"{area.name}: missing series for {missing}")
    bulletin = Bulletin(
        areas=[area.name],
        wind=_wind_clauses(series["wind_speed"], series["wind_direction"]),
        sea_state=summarize_attribute(series["wave_height"],
                                      scale_for("wave_height")),
        weather=_weather_clauses(series["weather_code"], code_map),
        visibility=summarize_attribute(series["visibility"],
                                       scale_for("visibility")),
        gale=detect_gales(series["wind_speed"]),
    )
    violations = validate(bulletin)
    assert not violations, f"generator emitted invalid bulletin: {violations}"
    return bulletin


def consolidate(bulletins: list[Bulletin],
                registry: dict[str, SeaArea] | None = None) -> list[Bulletin]:
    """Merge bulletins whose rendered bodies (everything but the area list)
    are byte-identical; groups ordered by their first canonical area."""
    registry = registry or load_area_registry()
    seen: set[str] = set()
    groups: dict[str, Bulletin] = {}
    for b in bulletins:
        for a in b.areas:
            if a in seen:
                raise DuplicateArea(f"area {a} appears in multiple bulletins")
            seen.add(a)
        body = render_bulletin(b, registry).split(".", 1)[1]
        if body in groups:
            groups[body].areas.extend(b.areas)
        else:
            groups[body] = Bulletin(areas=list(b.areas), wind=b.wind,
                                    sea_state=b.sea_state, weather=b.weather,
                                    visibility=b.visibility, gale=b.gale)
    out = list(groups.values())
    for b in out:
        b.areas.sort(key=lambda a: registry[a].order_index)
    out.sort(key=lambda b: registry[b.areas[0]].order_index)
    return out


# --- pressure synopsis ---------------------------------------------------------

@dataclass(frozen=True)
class LabeledGrid:
    """Coarse overlay grid giving each cell a letter-number name."""

    lat_edges: np.ndarray      # descending row edges, north first
    lon_edges: np.ndarray      # ascending column edges

    def label_for(self, lat: float, lon: float) -> str:
        row = int(np.clip(np.searchsorted(-self.lat_edges, -lat) - 1,
                          0, self.lat_edges.size - 2))
        col = int(np.clip(np.searchsorted(self.lon_edges, lon) - 1,
                          0, self.lon_edges.size - 2))
        return f"{chr(ord('A') + row)}{col + 1}"


def make_labeled_grid(bbox=(30.0, 70.0, -20.0, 10.0), step: float = 5.0
                      ) -> LabeledGrid:
    lat_min, lat_max, lon_min, lon_max = bbox
    lats = np.arange(lat_max, lat_min - step / 2, -step)
    lons = np.arange(lon_min, lon_max + step / 2, step)
    return LabeledGrid(lat_edges=lats, lon_edges=lons)


SPEED_DESCRIPTORS = ((15.0, "slowly"), (25.0, "steadily"),
                     (35.0, "rather quickly"), (45.0, "rapidly"),
                     (math.inf, "very rapidly"))
STATIONARY_DEG = 0.75           # displacement below this -> no motion phrase
TENDENCY_HPA = 2.0


def _smooth(field2d: np.ndarray) -> np.ndarray:
    filled = np.where(np.isnan(field2d),
                      np.nanmean(field2d) if np.isfinite(np.nanmean(field2d)) else 0.0,
                      field2d)
    return ndimage.uniform_filter(filled, size=3, mode="nearest")


def _extrema(field2d: np.ndarray) -> list[tuple[str, int, int]]:
    """Interior strict local extrema via 8-neighbor comparison."""
    out = []
    mx = ndimage.maximum_filter(field2d, size=3, mode="nearest")
    mn = ndimage.minimum_filter(field2d, size=3, mode="nearest")
    nlat, nlon = field2d.shape
    for i in range(1, nlat - 1):
        for j in range(1, nlon - 1):
            window = field2d[i - 1:i + 2, j - 1:j + 2]
            center = field2d[i, j]
            others = np.delete(window.ravel(), 4)
            if center == mn[i, j] and np.all(others > center):
                out.append(("low", i, j))
            elif center == mx[i, j] and np.all(others < center):
                out.append(("high", i, j))
    return out


def _nearest_extremum(kind: str, i: int, j: int, extrema) -> tuple[int, int] | None:
    candidates = [(a, b) for k, a, b in extrema if k == kind]
    if not candidates:
        return None
    return min(candidates, key=lambda ab: (ab[0] - i) ** 2 + (ab[1] - j) ** 2)


def generate_synopsis(pressure: GridField,
                      labeled_grid: LabeledGrid | None = None) -> Synopsis:
    """Detect pressure systems at hour 0 and describe tendency and motion
    against hour 23. Raises EmptySynopsis when no system is found."""
    grid = labeled_grid or make_labeled_grid(
        (pressure.lats.min(), pressure.lats.max(),
         pressure.lons.min(), pressure.lons.max()))
    first = _smooth(pressure.values[0])
    last = _smooth(pressure.values[23])
    systems_at_0 = _extrema(first)
    if not systems_at_0:
        raise EmptySynopsis("no pressure extremum in the domain")
    systems_at_23 = _extrema(last)

    out = []
    for kind, i, j in systems_at_0:
        lat0, lon0 = float(pressure.lats[i]), float(pressure.lons[j])
        central = int(round(first[i, j]))
        tendency = "steady"
        motion_dir = motion_speed = None
        dest = _nearest_extremum(kind, i, j, systems_at_23)
        if dest is not None:
            i1, j1 = dest
            delta = last[i1, j1] - first[i, j]
            # central pressure falling > 2 hPa: deepening; rising: filling
            if delta < -TENDENCY_HPA:
                tendency = "deepening"
            elif delta > TENDENCY_HPA:
                tendency = "filling"
            lat1, lon1 = float(pressure.lats[i1]), float(pressure.lons[j1])
            dlat = lat1 - lat0
            dlon = (lon1 - lon0) * math.cos(math.radians((lat0 + lat1) / 2))
            if math.hypot(dlat, dlon) >= STATIONARY_DEG:
                bearing = math.degrees(math.atan2(dlon, dlat)) % 360.0
                motion_dir = compass_8(bearing)
                km = math.hypot(dlat, dlon) * 111.2
                knots = km / 24.0 / 1.852
                motion_speed = next(d for lim, d in SPEED_DESCRIPTORS
                                    if knots < lim)
        out.append(PressureSystem(kind=kind, pressure_hpa=central,
                                  position=grid.label_for(lat0, lon0),
                                  tendency=tendency,
                                  motion_direction=motion_dir,
                                  motion_speed=motion_speed))
    # lows first (deepest first), then highs (highest first)
    out.sort(key=lambda s: (s.kind != "low",
                            s.pressure_hpa if s.kind == "low" else -s.pressure_hpa))
    return Synopsis(systems=out)
