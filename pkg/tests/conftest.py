import random
from datetime import datetime, timedelta

import numpy as np
import pytest

from foghorn.grammar import (
    Bulletin,
    FORCE_SEVERITY,
    GaleWarning,
    StateClause,
    WeatherClause,
    WindClause,
)
from foghorn.grid import GridField, SeaArea, load_area_registry
from foghorn.scales import COMPASS_8, DOUGLAS_LABELS, VISIBILITY_LABELS

BASE_TIME = datetime(2024, 12, 1, 0, 0)


def hourly_times(n=24, start=BASE_TIME):
    return tuple(start + timedelta(hours=h) for h in range(n))


def make_field(values, lats=None, lons=None, variable="wave_height",
               units="m", percentile=None):
    values = np.asarray(values, dtype=np.float64)
    nlat = values.shape[1]
    nlon = values.shape[2]
    if lats is None:
        lats = np.linspace(30.0, 70.0, nlat)
    if lons is None:
        lons = np.linspace(-20.0, 10.0, nlon)
    return GridField(variable=variable, units=units, lats=lats, lons=lons,
                     times=hourly_times(values.shape[0]), values=values,
                     percentile=percentile)


def constant_field(value, nlat=41, nlon=31, **kw):
    return make_field(np.full((24, nlat, nlon), float(value)), **kw)


def box_area(name, lat_min, lat_max, lon_min, lon_max, order_index=1):
    ring = ((lat_min, lon_min), (lat_min, lon_max), (lat_max, lon_max),
            (lat_max, lon_min), (lat_min, lon_min))
    return SeaArea(name=name, order_index=order_index, polygon=ring)


@pytest.fixture(scope="session")
def registry():
    return load_area_registry()


# --- randomized valid bulletins -------------------------------------------------

SAFE_WEATHER_WORDS = ("rain", "drizzle", "showers", "snow", "thundery",
                      "wintry", "heavy", "squally", "thunderstorms", "hail")


def random_valid_bulletin(rng: random.Random, registry) -> Bulletin:
    names = list(registry)
    areas = sorted(rng.sample(names, rng.randint(1, 3)),
                   key=lambda a: registry[a].order_index)

    def timing(first):
        if first:
            return rng.choice([None, None, "at first"])
        return rng.choice([None, "later", "soon", "occasionally", "becoming"])

    wind = []
    for i in range(rng.randint(1, 3)):
        low = rng.randint(0, 12)
        high = min(12, low + rng.randint(0, 3))
        wind.append(WindClause(direction=rng.choice(COMPASS_8),
                               force_low=low, force_high=high,
                               timing=timing(i == 0)))
    peak = max(c.force_high for c in wind)
    gale = None
    if peak >= 8:
        gale = GaleWarning(severity=FORCE_SEVERITY[peak],
                           timing=rng.choice(("imminent", "soon", "later")))

    def state_clauses(labels):
        out = []
        for i in range(rng.randint(1, 2)):
            idx = rng.randrange(len(labels))
            high = None
            gap = rng.choice((0, 0, 1, 2))
            if gap and idx + gap < len(labels):
                high = labels[idx + gap]
            out.append(StateClause(label=labels[idx], label_high=high,
                                   timing=timing(i == 0)))
        return out

    weather = []
    if rng.random() < 0.8:
        for i in range(rng.randint(1, 2)):
            phrase = " ".join(rng.sample(SAFE_WEATHER_WORDS,
                                         rng.randint(1, 5)))
            weather.append(WeatherClause(phrase=phrase, timing=timing(i == 0)))

    return Bulletin(areas=areas, wind=wind,
                    sea_state=state_clauses(DOUGLAS_LABELS),
                    weather=weather,
                    visibility=state_clauses(VISIBILITY_LABELS),
                    gale=gale)
