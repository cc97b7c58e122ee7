"""From gridded fields to a spoken-style marine forecast.

Builds a synthetic 24-hour field set over the North-East Atlantic domain,
reduces each sea area to hourly series, and prints the resulting forecast:
a general synopsis followed by per-area bulletins. Run directly:

    python gallery/01_generate_forecast.py
"""

from datetime import datetime, timedelta

import numpy as np

from foghorn.gateway import SERIES_REDUCERS
from foghorn.generator import consolidate, generate_area_bulletin, generate_synopsis
from foghorn.grammar import render_bulletin, render_synopsis
from foghorn.grid import GridField, area_series, load_area_registry
from foghorn.errors import EmptyMask, EmptySynopsis
from foghorn.scales import load_weather_codes

LATS = np.linspace(30.0, 70.0, 41)
LONS = np.linspace(-20.0, 10.0, 31)
TIMES = tuple(datetime(2024, 12, 1) + timedelta(hours=h) for h in range(24))

# A deep low tracking east across the domain drives every other field:
# stronger winds and higher seas near the centre, rain and poor visibility
# on its flanks.
lon_g, lat_g = np.meshgrid(LONS, LATS)


def low_center(hour):
    return 55.0, -15.0 + 0.6 * hour


def storm_distance(hour):
    clat, clon = low_center(hour)
    return np.hypot((lat_g - clat) / 4.0, (lon_g - clon) / 5.0)


def field(variable, units, maker):
    values = np.stack([maker(h) for h in range(24)])
    return GridField(variable=variable, units=units, lats=LATS, lons=LONS,
                     times=TIMES, values=values)


fields = {
    "pressure": field("pressure", "hPa",
                      lambda h: 1014.0 - (22.0 + 0.3 * h)
                      * np.exp(-storm_distance(h) ** 2)),
    "wind_speed": field("wind_speed", "kn",
                        lambda h: 8.0 + 38.0 * np.exp(-storm_distance(h) ** 2)),
    "wind_direction": field("wind_direction", "deg",
                            lambda h: (200.0 + 3.0 * h) % 360.0
                            * np.ones_like(lat_g)),
    "wave_height": field("wave_height", "m",
                         lambda h: 0.8 + 6.0 * np.exp(-storm_distance(h) ** 2)),
    "visibility": field("visibility", "m",
                        lambda h: 18000.0 - 15000.0
                        * np.exp(-storm_distance(h) ** 2)),
    "weather_code": field("weather_code", "code",
                          lambda h: np.where(storm_distance(h) < 1.2, 4.0, 0.0)),
}

registry = load_area_registry()
code_map = load_weather_codes()

bulletins = []
for area in registry.values():
    try:
        series = {name: area_series(fields[name], area, reducer)
                  for name, reducer in SERIES_REDUCERS.items()}
    except EmptyMask:
        continue
    bulletins.append(generate_area_bulletin(series, area, code_map))

consolidated = consolidate(bulletins, registry)

print("The general synopsis:")
try:
    print(render_synopsis(generate_synopsis(fields["pressure"])))
except EmptySynopsis:
    print("Nothing significant.")
print()
print("The area forecasts:")
for bulletin in consolidated:
    print()
    print(render_bulletin(bulletin, registry))
