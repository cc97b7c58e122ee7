"""Rendering a training-corpus frame set for one sea area.

Paints a synthetic wave-height field through the sea-state color scale,
masks it to the Dover polygon, and writes the 24-frame set (1 s at 24 fps)
plus its manifest to ./frames_demo/. Also renders the combined wind clip
(24 direction frames then 24 speed frames) to show the 2-second layout.

    python gallery/02_render_frames.py
"""

from datetime import datetime, timedelta

import numpy as np

from foghorn.frames import encode_attribute_video, encode_wind_video
from foghorn.grid import GridField, load_area_registry
from foghorn.scales import scale_for

LATS = np.linspace(30.0, 70.0, 81)
LONS = np.linspace(-20.0, 10.0, 61)
TIMES = tuple(datetime(2024, 12, 1) + timedelta(hours=h) for h in range(24))

lon_g, lat_g = np.meshgrid(LONS, LATS)


def swell(hour):
    # a wave train propagating north-east through the day
    phase = (lat_g + lon_g) / 6.0 - hour / 3.0
    return 1.5 + 1.4 * np.sin(phase) + 0.04 * hour


waves = GridField(variable="wave_height", units="m", lats=LATS, lons=LONS,
                  times=TIMES,
                  values=np.stack([swell(h) for h in range(24)]))
direction = GridField(variable="wind_direction", units="deg", lats=LATS,
                      lons=LONS, times=TIMES,
                      values=np.stack([(220.0 + 5.0 * h)
                                       * np.ones_like(lat_g)
                                       for h in range(24)]) % 360.0)
speed = GridField(variable="wind_speed", units="kn", lats=LATS, lons=LONS,
                  times=TIMES,
                  values=np.stack([10.0 + 0.8 * h * np.ones_like(lat_g)
                                   for h in range(24)]))

dover = load_area_registry()["Dover"]

clip = encode_attribute_video(waves, scale_for("wave_height"), area=dover,
                              size=(500, 300))
manifest = clip.save("frames_demo/wave_height")
print(f"wave_height: {len(clip.frames)} frames "
      f"({clip.duration_s} s at {clip.fps} fps) -> {manifest}")

wind = encode_wind_video(direction, speed, scale_for("wind_direction"),
                         scale_for("wind_speed"), area=dover, size=(500, 300))
manifest = wind.save("frames_demo/wind_combined")
print(f"wind_combined: {len(wind.frames)} frames "
      f"({wind.duration_s} s, direction block then speed block) -> {manifest}")
print(f"palette entries: {len(wind.palette)}")
